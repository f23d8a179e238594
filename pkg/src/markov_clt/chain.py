"""Finite-state continuous-time Markov chains and the L^2(pi) geometry.

Observables are plain 1-d float arrays indexed by state. A chain is
immutable once built: its arrays are flagged read-only and derived
quantities (stationary vector, eigendecomposition) are computed once.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.sparse.csgraph import connected_components

from .errors import (
    BadParams,
    DegenerateStationary,
    DimensionMismatch,
    NotAGenerator,
    Reducible,
)

ROW_SUM_TOL = 1e-12
PI_SUM_TOL = 1e-12
STATIONARITY_TOL = 1e-10
NULL_GAP_TOL = 1e-9
EDGE_TOL = 1e-14
PI_FILE_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Right eigendecomposition Q = V diag(mu) V^{-1}."""

    mu: np.ndarray
    V: np.ndarray
    Vinv: np.ndarray
    cond: float


@dataclass(frozen=True, eq=False)
class MarkovChain:
    Q: np.ndarray
    pi: np.ndarray

    @property
    def n(self) -> int:
        return self.Q.shape[0]

    @property
    def scale(self) -> float:
        """max |Q_ij|, the reference magnitude for relative tolerances."""
        return float(np.max(np.abs(self.Q)))

    @property
    def one(self) -> np.ndarray:
        return np.ones(self.n)

    @cached_property
    def spectrum(self) -> Spectrum:
        mu, V = np.linalg.eig(self.Q)
        cond = float(np.linalg.cond(V))
        if not np.isfinite(cond):
            return Spectrum(mu, V, np.full_like(V, np.nan), np.inf)
        return Spectrum(mu, V, np.linalg.inv(V), cond)

    def is_reversible(self, tol: float = 1e-10) -> bool:
        flux = self.pi[:, None] * self.Q
        return bool(np.max(np.abs(flux - flux.T)) <= tol * self.scale)


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float, copy=True)
    a.flags.writeable = False
    return a


def check_generator(Q: np.ndarray, row_tol: float = ROW_SUM_TOL) -> np.ndarray:
    Q = np.asarray(Q, dtype=float)
    if Q.ndim != 2 or Q.shape[0] != Q.shape[1]:
        raise NotAGenerator(f"rate matrix must be square, got shape {Q.shape}")
    n = Q.shape[0]
    if n < 2:
        raise NotAGenerator("need at least two states")
    if not np.all(np.isfinite(Q)):
        raise NotAGenerator("rate matrix has non-finite entries")
    off = Q[~np.eye(n, dtype=bool)]
    if np.any(off < 0):
        i, j = np.argwhere((Q < 0) & ~np.eye(n, dtype=bool))[0]
        raise NotAGenerator(f"negative off-diagonal rate Q[{i}][{j}] = {Q[i, j]}")
    scale = np.max(np.abs(Q))
    if scale == 0:
        raise NotAGenerator("rate matrix is identically zero")
    rows = np.abs(Q.sum(axis=1))
    if np.any(rows > row_tol * scale):
        i = int(np.argmax(rows))
        raise NotAGenerator(f"row {i} sums to {Q[i].sum():.3e}, not 0")
    return Q


def stationary_distribution(Q: np.ndarray, gap_tol: float = NULL_GAP_TOL) -> np.ndarray:
    """Normalized left null vector of Q via SVD of Q^T."""
    _, s, Vh = np.linalg.svd(Q.T)
    if s[-2] <= gap_tol * s[0]:
        raise DegenerateStationary(
            f"null space of Q is not one-dimensional (singular values {s[-2]:.3e}, {s[-1]:.3e})"
        )
    pi = Vh[-1]
    pi = pi / pi.sum()
    if np.any(pi <= 0):
        raise DegenerateStationary("stationary vector is not strictly positive")
    return pi


def build_chain(Q, pi=None, *, row_tol: float = ROW_SUM_TOL,
                stat_tol: float = STATIONARITY_TOL, pi_tol: float = PI_FILE_TOL) -> MarkovChain:
    """Validate a rate matrix and attach its stationary distribution.

    If ``pi`` is given it is only compared against the computed vector
    (within ``pi_tol``); the computed one is always stored.
    """
    Q = check_generator(Q, row_tol)
    n = Q.shape[0]
    scale = np.max(np.abs(Q))
    adj = (Q > EDGE_TOL * scale) & ~np.eye(n, dtype=bool)
    ncomp, _ = connected_components(adj.astype(int), directed=True, connection="strong")
    if ncomp != 1:
        raise Reducible(f"jump graph has {ncomp} strongly connected components")
    pi_c = stationary_distribution(Q)
    if abs(pi_c.sum() - 1.0) > PI_SUM_TOL:
        raise DegenerateStationary("stationary vector failed to normalize")
    resid = np.max(np.abs(pi_c @ Q))
    if resid > stat_tol * scale:
        raise DegenerateStationary(f"pi^T Q residual {resid:.3e} too large")
    if pi is not None:
        pi = np.asarray(pi, dtype=float)
        if pi.shape != (n,):
            raise DimensionMismatch(f"pi has shape {pi.shape}, expected ({n},)")
        if np.max(np.abs(pi - pi_c)) > pi_tol:
            raise DegenerateStationary(
                f"supplied pi differs from computed stationary vector by "
                f"{np.max(np.abs(pi - pi_c)):.3e}"
            )
    return MarkovChain(_frozen(Q), _frozen(pi_c))


def as_observable(chain: MarkovChain, g) -> np.ndarray:
    g = np.asarray(g, dtype=float)
    if g.shape != (chain.n,):
        raise DimensionMismatch(f"observable has shape {g.shape}, chain has {chain.n} states")
    if not np.all(np.isfinite(g)):
        raise ValueError("observable has non-finite entries")
    return g


def inner(chain: MarkovChain, phi, psi) -> float:
    """(phi, psi) = sum_i pi_i phi_i psi_i."""
    phi = as_observable(chain, phi)
    psi = as_observable(chain, psi)
    return float(np.dot(chain.pi * phi, psi))


def norm(chain: MarkovChain, phi) -> float:
    return float(np.sqrt(max(inner(chain, phi, phi), 0.0)))


def mean(chain: MarkovChain, g) -> float:
    return inner(chain, g, chain.one)


def center(chain: MarkovChain, g) -> np.ndarray:
    g = as_observable(chain, g)
    return g - mean(chain, g)


def make_example(family: str, *params, seed: int = 0) -> tuple[MarkovChain, np.ndarray]:
    """Test-corpus chains paired with a centered observable.

    Families
    --------
    two_state(a, b)
        Rates a (0 -> 1) and b (1 -> 0); f is (1, -1) centered.
    cycle_drift(n)
        Unit-rate one-way cycle i -> i+1 mod n; f = e_0 - e_{n-1}.
    random_reversible(n)
        Random positive pi and symmetric conductances, so detailed
        balance holds by construction; f is a centered Gaussian draw.
    random_general(n)
        i.i.d. Uniform(0.1, 1) off-diagonal rates; f as above.
    """
    rng = np.random.default_rng(seed)
    if family == "two_state":
        if len(params) != 2:
            raise BadParams("two_state takes (a, b)")
        a, b = map(float, params)
        if not (a > 0 and b > 0):
            raise BadParams("two_state rates must be positive")
        chain = build_chain([[-a, a], [b, -b]])
        return chain, center(chain, [1.0, -1.0])

    if len(params) != 1:
        raise BadParams(f"{family} takes a single state count")
    n = int(params[0])
    if family == "cycle_drift":
        if n < 2:
            raise BadParams("cycle_drift needs n >= 2")
        Q = -np.eye(n)
        Q[np.arange(n), (np.arange(n) + 1) % n] += 1.0
        f = np.zeros(n)
        f[0], f[-1] = 1.0, -1.0
        # uniform pi: already centered, and centering would only add rounding
        return build_chain(Q), f
    if n < 2:
        raise BadParams(f"{family} needs n >= 2")
    if family == "random_reversible":
        w = rng.uniform(0.5, 1.5, size=n)
        pi = w / w.sum()
        C = rng.uniform(0.1, 1.0, size=(n, n))
        C = np.triu(C, 1)
        C = C + C.T
        Q = C / pi[:, None]
    elif family == "random_general":
        Q = rng.uniform(0.1, 1.0, size=(n, n))
    else:
        raise BadParams(f"unknown example family {family!r}")
    np.fill_diagonal(Q, 0.0)
    np.fill_diagonal(Q, -Q.sum(axis=1))
    chain = build_chain(Q)
    return chain, center(chain, rng.standard_normal(n))

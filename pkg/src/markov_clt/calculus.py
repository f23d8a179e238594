"""Operator calculus on L^2(pi): adjoints, G = -S + A, S^{1/2}, P_t, R_lambda, V_t.

All operators are n x n matrices acting on observables (column vectors).
Resolvents and the corrector are computed on the centered subspace by
deflating the constant mode, which keeps the solves well conditioned as
lambda -> 0.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import linalg

from .chain import MarkovChain, as_observable, mean, norm
from .errors import (
    DimensionMismatch,
    NegativeSpectrum,
    NotCentered,
    NotSelfAdjoint,
    NumericalBreakdown,
    SingularSystem,
)

EPS = np.finfo(float).eps
SELF_ADJOINT_TOL = 1e-10
CLIP_TOL = 1e-8
COND_MAX = 1e8
# eigen-path rounding budget, relative to ||f|| max(t, 1)
METHOD_BUDGET = 1e-9
RESIDUAL_TOL = 1e-10
CENTER_TOL = 1e-10
MEAN_SNAP = 1e-13


@dataclass(frozen=True, eq=False)
class OperatorDecomposition:
    G: np.ndarray
    Gstar: np.ndarray
    S: np.ndarray
    A: np.ndarray
    Shalf: np.ndarray


@dataclass(frozen=True)
class ResolventResult:
    lam: float
    u: np.ndarray
    residual: float


@dataclass(frozen=True)
class SemigroupIntegral:
    t: float
    v: np.ndarray
    method_error: float
    method: str


def _check_square(chain: MarkovChain, M) -> np.ndarray:
    M = np.asarray(M, dtype=float)
    if M.shape != (chain.n, chain.n):
        raise DimensionMismatch(f"matrix has shape {M.shape}, chain has {chain.n} states")
    return M


def pi_adjoint(chain: MarkovChain, M) -> np.ndarray:
    """Adjoint in L^2(pi): M*[i, j] = pi_j M[j, i] / pi_i."""
    M = _check_square(chain, M)
    pi = chain.pi
    return M.T * pi[None, :] / pi[:, None]


def sqrt_psd(chain: MarkovChain, S, *, sa_tol: float = SELF_ADJOINT_TOL,
             clip_tol: float = CLIP_TOL) -> np.ndarray:
    """Spectral square root of a pi-self-adjoint positive semidefinite matrix.

    With D = diag(pi), B = D^{1/2} S D^{-1/2} is symmetric; its eigenvalues
    in [-clip_tol ||S||, 0) are clipped to zero, anything more negative is
    an error.
    """
    S = _check_square(chain, S)
    d = np.sqrt(chain.pi)
    B = d[:, None] * S / d[None, :]
    ref = max(1.0, float(np.max(np.abs(B))))
    if np.max(np.abs(B - B.T)) > sa_tol * ref:
        raise NotSelfAdjoint(
            f"matrix is not pi-self-adjoint (asymmetry {np.max(np.abs(B - B.T)):.3e})"
        )
    B = 0.5 * (B + B.T)
    w, U = np.linalg.eigh(B)
    size = float(np.max(np.abs(w))) if w.size else 0.0
    if w.size and w[0] < -clip_tol * size:
        raise NegativeSpectrum(f"eigenvalue {w[0]:.3e} below clipping threshold")
    root = (U * np.sqrt(np.clip(w, 0.0, None))) @ U.T
    return root * d[None, :] / d[:, None]


def decompose(chain: MarkovChain) -> OperatorDecomposition:
    G = np.array(chain.Q)
    Gstar = pi_adjoint(chain, G)
    S = -0.5 * (G + Gstar)
    A = 0.5 * (G - Gstar)
    return OperatorDecomposition(G=G, Gstar=Gstar, S=S, A=A, Shalf=sqrt_psd(chain, S))


def _split(chain: MarkovChain, g) -> tuple[float, np.ndarray]:
    """(mean, centered part); a rounding-level mean is treated as zero.

    Operators like R_lambda amplify the constant mode by 1/lambda, so a
    mean of order eps * |g| would otherwise swamp centered inputs.
    """
    g = as_observable(chain, g)
    m = mean(chain, g)
    if abs(m) <= MEAN_SNAP * float(np.max(np.abs(g), initial=0.0)):
        return 0.0, g - m
    return m, g - m


def _eig_route(chain: MarkovChain):
    """Spectral data with the stationary mode removed, or None if ill conditioned."""
    sp = chain.spectrum
    if not np.isfinite(sp.cond) or sp.cond > COND_MAX:
        return None
    if chain.n * EPS * sp.cond > METHOD_BUDGET:
        return None
    keep = np.ones(chain.n, dtype=bool)
    keep[np.argmin(np.abs(sp.mu))] = False
    return sp.mu[keep], sp.V[:, keep], sp.Vinv[keep, :], sp.cond


def semigroup_apply(chain: MarkovChain, t: float, phi, method: str = "auto") -> np.ndarray:
    """P_t phi = exp(tQ) phi.

    ``method`` is "eig", "expm" or "auto"; auto uses the eigendecomposition
    when the eigenvector matrix is well conditioned and falls back to
    scaling-and-squaring otherwise.
    """
    if t < 0:
        raise ValueError("t must be nonnegative")
    m, phi_c = _split(chain, phi)
    if t == 0:
        return m + phi_c
    route = _eig_route(chain) if method in ("auto", "eig") else None
    if method == "eig" and route is None:
        raise NumericalBreakdown("eigenvector matrix too ill conditioned for the eig route")
    out = None
    if route is not None:
        mu, V, Vinv, _ = route
        out = m + (V @ (np.exp(mu * t) * (Vinv @ phi_c))).real
        if not np.all(np.isfinite(out)):
            out = None
    if out is None:
        out = m + linalg.expm(t * np.asarray(chain.Q)) @ phi_c
    if not np.all(np.isfinite(out)):
        raise NumericalBreakdown(f"semigroup action at t={t} is not finite")
    return out


def _deflated(chain: MarkovChain, lam: float) -> np.ndarray:
    # lam I - Q + 1 pi^T agrees with lam I - Q on centered vectors and is
    # invertible for every lam >= 0.
    return lam * np.eye(chain.n) - chain.Q + np.outer(chain.one, chain.pi)


def resolvent(chain: MarkovChain, lam: float, f) -> ResolventResult:
    """u_lambda = (lambda I - Q)^{-1} f by a dense solve."""
    if not lam > 0:
        raise ValueError("lambda must be positive")
    m, f_c = _split(chain, f)
    f = m + f_c
    try:
        u_c = linalg.solve(_deflated(chain, lam), f_c)
    except linalg.LinAlgError as exc:
        raise SingularSystem(str(exc)) from exc
    u = u_c + m / lam
    r = lam * u - chain.Q @ u - f
    fn = np.linalg.norm(f)
    residual = float(np.linalg.norm(r) / fn) if fn > 0 else float(np.linalg.norm(r))
    if not residual <= RESIDUAL_TOL:
        raise SingularSystem(f"resolvent residual {residual:.3e} at lambda={lam}")
    return ResolventResult(lam=float(lam), u=u, residual=residual)


def check_centered(chain: MarkovChain, f, tol: float = CENTER_TOL) -> np.ndarray:
    f = as_observable(chain, f)
    m = mean(chain, f)
    if abs(m) > tol * max(1.0, norm(chain, f)):
        raise NotCentered(f"observable has mean {m:.3e} under pi")
    return f


def u_zero(chain: MarkovChain, f) -> np.ndarray:
    """Centered solution of -Q u = f (the corrector)."""
    f = check_centered(chain, f)
    f_c = f - mean(chain, f)
    try:
        return linalg.solve(_deflated(chain, 0.0), f_c)
    except linalg.LinAlgError as exc:
        raise SingularSystem(str(exc)) from exc


def _phi1(mu: np.ndarray, t: float) -> np.ndarray:
    """(exp(mu t) - 1) / mu, with the mu -> 0 limit t."""
    z = mu * t
    out = np.empty_like(z)
    small = np.abs(z) < 1e-8
    out[small] = t * (1.0 + z[small] / 2.0)
    out[~small] = np.expm1(z[~small]) / mu[~small]
    return out


def _van_loan(chain: MarkovChain, t: float, f_c: np.ndarray) -> np.ndarray:
    n = chain.n
    M = np.zeros((n + 1, n + 1))
    M[:n, :n] = chain.Q
    M[:n, n] = f_c
    return linalg.expm(t * M)[:n, n]


def v_of_t(chain: MarkovChain, t: float, f, method: str = "auto") -> SemigroupIntegral:
    """v_t = int_0^t P_s f ds.

    The eig route integrates each eigencomponent in closed form. The
    fallback reads the integral off the exponential of the augmented
    matrix [[Q, f], [0, 0]].
    """
    if t < 0:
        raise ValueError("t must be nonnegative")
    m, f_c = _split(chain, f)
    fn = norm(chain, m + f_c)
    if t == 0:
        return SemigroupIntegral(0.0, np.zeros(chain.n), 0.0, "exact")
    route = _eig_route(chain) if method in ("auto", "eig") else None
    if method == "eig" and route is None:
        raise NumericalBreakdown("eigenvector matrix too ill conditioned for the eig route")
    if route is not None:
        mu, V, Vinv, cond = route
        v = m * t + (V @ (_phi1(mu, t) * (Vinv @ f_c))).real
        err = chain.n * EPS * cond * fn * max(t, 1.0)
        used = "eig"
    else:
        v = m * t + _van_loan(chain, t, f_c)
        err = chain.n * EPS * (1.0 + chain.scale * t) * fn
        used = "expm"
    if not np.all(np.isfinite(v)):
        raise NumericalBreakdown(f"v_t at t={t} is not finite")
    return SemigroupIntegral(float(t), v, float(err), used)


def decay_time(chain: MarkovChain, g, rel_tol: float, t_start: float = 1.0,
               t_max: float = 1e15) -> tuple[float, float]:
    """Smallest doubling T >= t_start with ||P_T g|| <= rel_tol ||g||.

    Returns (T, ||P_T g||). Contractivity makes ||P_t g|| <= ||P_T g|| for
    every t >= T, which is what callers use to certify tails.
    """
    gn = norm(chain, g)
    T = t_start
    while True:
        r = norm(chain, semigroup_apply(chain, T, g))
        if r <= rel_tol * gn or T >= t_max:
            return T, r
        T *= 2.0

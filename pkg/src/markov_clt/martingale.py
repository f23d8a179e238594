"""Asymptotic variance and the corrector martingale.

With u0 the centered solution of -Q u0 = f, Dynkin's formula gives the
martingale M(t) = u0(eta_t) - u0(eta_0) + int_0^t f(eta_s) ds, which is
evaluated exactly on piecewise-constant paths.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .calculus import OperatorDecomposition, check_centered, decompose, u_zero
from .chain import MarkovChain, inner, norm
from .errors import PathChainMismatch
from .simulate import Trajectory, sample_paths

Z_BAND = 3.0


@dataclass(frozen=True)
class VarianceReport:
    sigma2_resolvent: float
    sigma2_spectral: float
    w_norm2: float
    consistency_gap: float

    @property
    def sigma2(self) -> float:
        return self.sigma2_resolvent


def sigma_squared(chain: MarkovChain, f, dec: OperatorDecomposition | None = None) -> VarianceReport:
    """sigma^2 as 2 (u0, f) and as 2 ||S^{1/2} u0||^2."""
    f = check_centered(chain, f)
    dec = dec or decompose(chain)
    u0 = u_zero(chain, f)
    s_res = 2.0 * inner(chain, u0, f)
    w2 = norm(chain, dec.Shalf @ u0) ** 2
    s_spec = 2.0 * w2
    return VarianceReport(s_res, s_spec, w2, abs(s_res - s_spec))


@dataclass(frozen=True, eq=False)
class MartingalePath:
    times: np.ndarray
    M: np.ndarray
    states: np.ndarray
    f: np.ndarray
    corrector_start: float
    corrector_end: float
    integral_f: float

    @property
    def horizon(self) -> float:
        return float(self.times[-1])

    def value_at(self, t: float) -> float:
        if not 0.0 <= t <= self.horizon:
            raise ValueError(f"t={t} outside [0, {self.horizon}]")
        i = min(int(np.searchsorted(self.times, t, side="right")) - 1, len(self.states) - 1)
        return float(self.M[i] + self.f[self.states[i]] * (t - self.times[i]))


def martingale_path(chain: MarkovChain, f, path: Trajectory, u0: np.ndarray | None = None) -> MartingalePath:
    """M at time 0, at every jump time, and at the horizon."""
    if path.states.size == 0 or path.states.min() < 0 or path.states.max() >= chain.n:
        raise PathChainMismatch("trajectory visits states outside the chain")
    f = check_centered(chain, f)
    if u0 is None:
        u0 = u_zero(chain, f)
    states = path.states
    seg = f[states] * path.durations
    # integral at each segment start, then at the horizon
    cum = np.concatenate([[0.0], np.cumsum(seg)])
    times = np.concatenate([path.times, [path.horizon]])
    at = np.concatenate([states, [states[-1]]])
    M = u0[at] - u0[states[0]] + cum
    M[0] = 0.0
    return MartingalePath(times, M, states, f, float(u0[states[0]]), float(u0[states[-1]]), float(cum[-1]))


@dataclass(frozen=True, eq=False)
class MartingaleSample:
    """Per-path terminal values from one batch of stationary-start paths."""

    horizon: float
    M_T: np.ndarray
    integral_f: np.ndarray
    corrector_diff: np.ndarray  # u0(eta_0) - u0(eta_T)
    identity_error: float  # max |int f - M(T) - (u0(eta_0) - u0(eta_T))|


def martingale_sample(chain: MarkovChain, f, horizon: float, n_paths: int, seed: int) -> MartingaleSample:
    f = check_centered(chain, f)
    u0 = u_zero(chain, f)
    MT = np.empty(n_paths)
    integ = np.empty(n_paths)
    corr = np.empty(n_paths)
    for i, p in enumerate(sample_paths(chain, horizon, n_paths, seed)):
        mp = martingale_path(chain, f, p, u0)
        MT[i] = mp.M[-1]
        integ[i] = mp.integral_f
        corr[i] = mp.corrector_start - mp.corrector_end
    err = float(np.max(np.abs(integ - MT - corr))) if n_paths else 0.0
    return MartingaleSample(float(horizon), MT, integ, corr, err)


def _mean_se(x: np.ndarray) -> tuple[float, float]:
    return float(x.mean()), float(x.std(ddof=1) / math.sqrt(x.size))


def _z(diff: float, se: float) -> float:
    if se == 0.0:
        return 0.0 if diff == 0.0 else math.copysign(math.inf, diff)
    return diff / se


@dataclass
class VarianceCheck:
    horizon: float
    n_paths: int
    sigma2: float
    mean_M2: float
    se_M2: float
    target: float
    z: float
    mean_M: float
    se_M: float
    z_mean: float
    identity_error: float
    passed: bool

    def to_dict(self) -> dict:
        return asdict(self)


def variance_check(chain: MarkovChain, f, horizon: float, n_paths: int, seed: int, *,
                   z_band: float = Z_BAND, sample: MartingaleSample | None = None) -> VarianceCheck:
    """E[M(T)^2] against sigma^2 T and E[M(T)] against 0."""
    if n_paths < 100:
        raise ValueError("variance_check needs at least 100 paths")
    sample = sample or martingale_sample(chain, f, horizon, n_paths, seed)
    s2 = sigma_squared(chain, f).sigma2
    m2, se2 = _mean_se(sample.M_T ** 2)
    m1, se1 = _mean_se(sample.M_T)
    target = s2 * horizon
    z = _z(m2 - target, se2)
    z_mean = _z(m1, se1)
    return VarianceCheck(horizon, n_paths, s2, m2, se2, target, z, m1, se1, z_mean,
                         sample.identity_error, bool(abs(z) <= z_band and abs(z_mean) <= z_band))


@dataclass
class L2Error:
    N: float
    n_paths: int
    value: float
    se: float
    ceiling: float
    identity_error: float
    passed: bool

    def to_dict(self) -> dict:
        return asdict(self)


def l2_error(chain: MarkovChain, f, N: float, n_paths: int, seed: int, *,
             z_band: float = Z_BAND, sample: MartingaleSample | None = None) -> L2Error:
    """N^{-1} E[(int_0^N f - M(N))^2] against the ceiling 4 ||u0||^2 / N."""
    sample = sample or martingale_sample(chain, f, N, n_paths, seed)
    d2 = (sample.integral_f - sample.M_T) ** 2 / N
    val, se = _mean_se(d2)
    ceiling = 4.0 * norm(chain, u_zero(chain, f)) ** 2 / N
    return L2Error(float(N), n_paths, val, se, ceiling, sample.identity_error,
                   bool(val <= ceiling + z_band * se))


def increment_covariance(chain: MarkovChain, f, t1: float, t2: float, n_paths: int,
                         seed: int) -> tuple[float, float]:
    """Empirical Cov(M(t2) - M(t1), M(t1)) and its standard error."""
    if not 0.0 < t1 < t2:
        raise ValueError("need 0 < t1 < t2")
    f = check_centered(chain, f)
    u0 = u_zero(chain, f)
    prod = np.empty(n_paths)
    for i, p in enumerate(sample_paths(chain, t2, n_paths, seed)):
        mp = martingale_path(chain, f, p, u0)
        m1 = mp.value_at(t1)
        prod[i] = (mp.M[-1] - m1) * m1
    return _mean_se(prod)

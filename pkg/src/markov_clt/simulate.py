"""Exact simulation of chain trajectories and CLT statistics.

Paths use the jump-chain / holding-time construction, so additive
functionals are integrated exactly over piecewise-constant segments.
Every path draws from its own stream keyed by (seed, path_index), which
makes results independent of how paths are scheduled.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass
from typing import Iterator

import numpy as np
from scipy import stats

from .calculus import u_zero
from .chain import MarkovChain, as_observable, inner, norm
from .errors import AbsorbingState, BadParams, DimensionMismatch, SigmaZero

KS_CRIT_5 = 1.36
KS_CRIT_1 = 1.63
SIGMA_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class Trajectory:
    states: np.ndarray
    jump_times: np.ndarray
    horizon: float

    @property
    def times(self) -> np.ndarray:
        """Segment start times, beginning with 0."""
        return np.concatenate([[0.0], self.jump_times])

    @property
    def durations(self) -> np.ndarray:
        return np.diff(np.concatenate([[0.0], self.jump_times, [self.horizon]]))


def path_rng(seed: int, path_index: int = 0) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(path_index,))))


def _open_uniform(rng: np.random.Generator, size: int) -> np.ndarray:
    # random() is on the grid k 2^-53, k < 2^53; shifting by half a step lands in (0, 1)
    return rng.random(size) + 2.0 ** -54


class _JumpTables:
    def __init__(self, chain: MarkovChain):
        Q = np.asarray(chain.Q)
        n = chain.n
        self.rates = (-np.diag(Q)).tolist()
        if min(self.rates) <= 0:
            raise AbsorbingState("chain has a state with zero exit rate")
        self.targets = []
        self.cums = []
        for i in range(n):
            tgt = [j for j in range(n) if j != i and Q[i, j] > 0]
            p = np.cumsum(Q[i, tgt]) / self.rates[i]
            self.targets.append(tgt)
            self.cums.append(p.tolist())
        self.pi_cum = np.cumsum(chain.pi).tolist()
        self.mean_rate = float(np.dot(chain.pi, -np.diag(Q)))

    def next_state(self, i: int, u: float) -> int:
        tgt = self.targets[i]
        return tgt[min(bisect_right(self.cums[i], u), len(tgt) - 1)]

    def initial(self, u: float) -> int:
        return min(bisect_right(self.pi_cum, u), len(self.pi_cum) - 1)


def _sample(tables: _JumpTables, horizon: float, rng: np.random.Generator,
            start: int | None) -> Trajectory:
    state = tables.initial(_open_uniform(rng, 1)[0]) if start is None else int(start)
    states = [state]
    times = []
    t = 0.0
    chunk = int(horizon * tables.mean_rate * 1.2) + 32
    rates = tables.rates
    done = False
    while not done:
        holds = (-np.log(_open_uniform(rng, chunk))).tolist()
        picks = rng.random(chunk).tolist()
        for e, u in zip(holds, picks):
            t += e / rates[state]
            if t >= horizon:
                done = True
                break
            state = tables.next_state(state, u)
            times.append(t)
            states.append(state)
    return Trajectory(np.array(states, dtype=np.intp), np.array(times, dtype=float), float(horizon))


def sample_path(chain: MarkovChain, horizon: float, seed: int, path_index: int = 0,
                start: int | None = None) -> Trajectory:
    """One trajectory on [0, horizon], started from pi unless ``start`` is given."""
    if not horizon > 0:
        raise BadParams("horizon must be positive")
    return _sample(_JumpTables(chain), horizon, path_rng(seed, path_index), start)


def sample_paths(chain: MarkovChain, horizon: float, n_paths: int, seed: int) -> Iterator[Trajectory]:
    if not horizon > 0:
        raise BadParams("horizon must be positive")
    tables = _JumpTables(chain)
    for i in range(n_paths):
        yield _sample(tables, horizon, path_rng(seed, i), None)


def additive_functional(traj: Trajectory, f) -> float:
    """int_0^T f(eta_s) ds, summed segment by segment."""
    f = np.asarray(f, dtype=float)
    if f.ndim != 1 or traj.states.max(initial=0) >= f.size:
        raise DimensionMismatch("observable does not cover the trajectory's states")
    return float(np.dot(f[traj.states], traj.durations))


def occupation(traj: Trajectory, n: int) -> np.ndarray:
    return np.bincount(traj.states, weights=traj.durations, minlength=n)


@dataclass
class CltReport:
    samples: np.ndarray
    ks_distance: float
    mean: float
    variance: float
    sigma2: float
    N: float
    ks_critical_5: float
    ks_critical_1: float

    @property
    def passed(self) -> bool:
        return self.ks_distance <= self.ks_critical_5

    def to_dict(self) -> dict:
        m = len(self.samples)
        return {
            "N": self.N,
            "n_paths": m,
            "sigma2": self.sigma2,
            "ks_distance": self.ks_distance,
            "ks_critical_5": self.ks_critical_5,
            "ks_critical_1": self.ks_critical_1,
            "mean": self.mean,
            "mean_se": math.sqrt(1.0 / m),
            "variance": self.variance,
            "variance_se": math.sqrt(2.0 / (m - 1)),
            "passed": self.passed,
        }


def clt_statistics(chain: MarkovChain, f, N: float, n_paths: int, seed: int) -> CltReport:
    """Samples of sigma^{-1} N^{-1/2} int_0^N f and their KS distance to N(0, 1)."""
    f = as_observable(chain, f)
    u0 = u_zero(chain, f)
    sigma2 = 2.0 * inner(chain, u0, f)
    if sigma2 <= SIGMA_TOL:
        raise SigmaZero(f"asymptotic variance {sigma2:.3e} is zero; cannot standardize")
    if 4.0 * norm(chain, u0) ** 2 / (sigma2 * N) >= 0.05:
        raise BadParams(f"N={N} too small relative to the corrector size")
    scale = 1.0 / math.sqrt(sigma2 * N)
    samples = np.array([additive_functional(p, f) * scale
                        for p in sample_paths(chain, N, n_paths, seed)])
    ks = float(stats.kstest(samples, "norm").statistic)
    return CltReport(
        samples=samples,
        ks_distance=ks,
        mean=float(samples.mean()),
        variance=float(samples.var(ddof=1)),
        sigma2=float(sigma2),
        N=float(N),
        ks_critical_5=KS_CRIT_5 / math.sqrt(n_paths),
        ks_critical_1=KS_CRIT_1 / math.sqrt(n_paths),
    )

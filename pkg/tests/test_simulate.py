import math

import numpy as np
import pytest
from scipy import stats

from markov_clt.chain import make_example
from markov_clt.errors import BadParams, DimensionMismatch, SigmaZero
from markov_clt.simulate import (
    Trajectory,
    additive_functional,
    clt_statistics,
    occupation,
    sample_path,
    sample_paths,
)


def test_trajectory_invariants(c3):
    chain, _ = c3
    for i in range(20):
        p = sample_path(chain, 10.0, seed=42, path_index=i)
        d = p.durations
        assert np.all(d[:-1] > 0) and d[-1] >= 0
        assert d.sum() == pytest.approx(10.0, abs=1e-12)
        assert np.all(p.states[1:] != p.states[:-1])
        assert np.all(np.diff(p.jump_times) > 0)
        assert p.jump_times.size == 0 or p.jump_times[0] > 0


def test_determinism(c3):
    chain, _ = c3
    a = sample_path(chain, 25.0, seed=9, path_index=4)
    b = sample_path(chain, 25.0, seed=9, path_index=4)
    np.testing.assert_array_equal(a.states, b.states)
    np.testing.assert_array_equal(a.jump_times, b.jump_times)
    # batch generation gives the same stream per index, in any order
    batch = list(sample_paths(chain, 25.0, 6, seed=9))
    np.testing.assert_array_equal(batch[4].jump_times, a.jump_times)
    c = sample_path(chain, 25.0, seed=9, path_index=5)
    assert not np.array_equal(c.jump_times, a.jump_times)


def test_tiny_horizon_has_no_jumps(c2):
    chain, _ = c2
    for i in range(50):
        p = sample_path(chain, 1e-9, seed=3, path_index=i)
        assert p.states.size == 1 and p.jump_times.size == 0


def test_horizon_must_be_positive(c2):
    chain, _ = c2
    with pytest.raises(BadParams):
        sample_path(chain, 0.0, seed=1)


def _occupation_fractions(chain, horizon, n_paths, seed):
    occ = np.array([occupation(p, chain.n) / horizon for p in sample_paths(chain, horizon, n_paths, seed)])
    return occ.mean(axis=0), occ.std(axis=0, ddof=1) / math.sqrt(n_paths)


def test_occupation_c2(c2):
    chain, _ = c2
    m, se = _occupation_fractions(chain, 10.0, 10_000, seed=42)
    assert abs(m[0] - 0.5) <= 3 * se[0]


def test_occupation_asymmetric(c_asym):
    chain, _ = c_asym
    m, se = _occupation_fractions(chain, 10.0, 10_000, seed=5)
    assert abs(m[1] - 2 / 3) <= 3 * se[1]


def test_occupation_ergodic_random_chain():
    chain, _ = make_example("random_general", 5, seed=2)
    m, se = _occupation_fractions(chain, 100.0, 1000, seed=8)  # total time 1e5
    assert np.all(np.abs(m - chain.pi) <= 3 * se)


def test_additive_functional_examples():
    p = Trajectory(np.array([1]), np.array([]), 2.5)
    assert additive_functional(p, [4.0, -2.0]) == -5.0
    p = Trajectory(np.array([0, 1]), np.array([0.3]), 1.0)
    assert additive_functional(p, [1.0, -1.0]) == pytest.approx(-0.4, abs=1e-15)
    assert additive_functional(p, [1.0, 1.0]) == 1.0
    with pytest.raises(DimensionMismatch):
        additive_functional(p, [1.0])


def _split(p: Trajectory, s: float) -> tuple[Trajectory, Trajectory]:
    k = int(np.searchsorted(p.jump_times, s))
    first = Trajectory(p.states[:k + 1], p.jump_times[:k], s)
    second = Trajectory(p.states[k:], p.jump_times[k:] - s, p.horizon - s)
    return first, second


def test_additive_functional_linear_and_additive(c3):
    chain, _ = c3
    rng = np.random.default_rng(0)
    for i in range(20):
        p = sample_path(chain, 30.0, seed=1, path_index=i)
        g, h = rng.normal(size=3), rng.normal(size=3)
        a, b = rng.normal(size=2)
        lhs = additive_functional(p, a * g + b * h)
        rhs = a * additive_functional(p, g) + b * additive_functional(p, h)
        assert lhs == pytest.approx(rhs, abs=1e-12)
        first, second = _split(p, 13.7)
        assert additive_functional(first, g) + additive_functional(second, g) == \
            pytest.approx(additive_functional(p, g), abs=1e-12)


@pytest.mark.slow
def test_clt_c2(c2):
    chain, f = c2
    r = clt_statistics(chain, f, 200.0, 2000, seed=7)
    assert r.ks_distance <= 1.36 / math.sqrt(2000)
    assert r.ks_critical_5 == pytest.approx(0.0304, abs=1e-4)
    assert abs(r.variance - 1) <= 3 * math.sqrt(2 / 1999)
    assert abs(r.mean) <= 3 / math.sqrt(2000)
    assert 0 <= r.ks_distance <= 1
    # ks_distance is the sup distance between the ECDF and Phi
    x = np.sort(r.samples)
    m = x.size
    cdf = stats.norm.cdf(x)
    brute = max(np.max(np.arange(1, m + 1) / m - cdf), np.max(cdf - np.arange(m) / m))
    assert r.ks_distance == pytest.approx(brute, abs=1e-15)


@pytest.mark.slow
def test_clt_c3_moments(c3):
    chain, f = c3
    r = clt_statistics(chain, f, 200.0, 2000, seed=7)
    assert r.sigma2 == pytest.approx(2 / 3, abs=1e-12)
    assert abs(r.variance - 1) <= 3 * math.sqrt(2 / 1999)
    assert abs(r.mean) <= 3 / math.sqrt(2000)


def test_clt_errors(c2):
    chain, f = c2
    with pytest.raises(SigmaZero):
        clt_statistics(chain, np.zeros(2), 200.0, 100, seed=1)
    with pytest.raises(BadParams):
        clt_statistics(chain, f, 5.0, 100, seed=1)

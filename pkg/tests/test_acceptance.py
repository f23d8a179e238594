"""End-to-end acceptance criteria, one test per criterion.

Each test appends a one-line verdict to ``ACCEPTANCE_LINES``; the lines are
printed in a dedicated section of the pytest terminal summary.
"""

import math
import time

import numpy as np
import pytest

from markov_clt.calculus import decompose, resolvent, u_zero
from markov_clt.chain import make_example, norm
from markov_clt.conditions import (
    LambdaSchedule,
    QuadConfig,
    auxbound_check,
    bracket_check,
    bt_identity_check,
    gamma_bound,
    gamma_sum,
    kv2_limit,
    laplace_identity,
    lemma_chain_check,
    mw_integral,
)
from markov_clt.martingale import l2_error, martingale_sample, sigma_squared, variance_check
from markov_clt.simulate import clt_statistics
from tests.conftest import ACCEPTANCE_LINES, corpus

FROZEN_SEED = 7


def _record(number, ok, detail):
    ACCEPTANCE_LINES.append(f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {detail}")
    print(ACCEPTANCE_LINES[-1])
    return ok


def _pairs(rng, count):
    """Random (lambda, lambda') pairs, log-uniform on [1e-4, 10] with lambda > lambda'."""
    x = np.exp(rng.uniform(math.log(1e-4), math.log(10.0), size=(count, 2)))
    return [(max(a, b), min(a, b)) for a, b in x]


def test_criterion_1_energy_identity():
    t0 = time.perf_counter()
    rng = np.random.default_rng(101)
    worst = 0.0
    for chain, f in corpus(100):
        dec = decompose(chain)
        scale = max(1.0, norm(chain, f) ** 2)
        for lam, lam2 in _pairs(rng, 10):
            lhs, rhs = bt_identity_check(chain, f, lam, lam2, dec)
            worst = max(worst, abs(lhs - rhs) / scale)
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-9 and elapsed < 10.0
    assert _record(1, ok, f"energy identity, max |lhs-rhs|/max(1,|f|^2) = {worst:.2e} "
                          f"(<= 1e-9) over 1000 cases in {elapsed:.2f} s (< 10 s)")


def test_criterion_2_auxbound_and_brackets():
    rng = np.random.default_rng(202)
    worst = math.inf
    chains = corpus(100)
    for chain, f in chains:
        dec = decompose(chain)
        for lam, lam2 in _pairs(rng, 10):
            r = auxbound_check(chain, f, lam, lam2, dec, tol=0.0)
            worst = min(worst, r.witness["b_minus_a"], r.witness["c_minus_b"],
                        r.witness["norm_increase"])
    bracket_worst = math.inf
    for delta in (0.3, 0.5, 0.7):
        for chain, f in chains[:30]:
            r = bracket_check(chain, f, LambdaSchedule(delta, 0, 30), tol=0.0)
            bracket_worst = min(bracket_worst, *r.witness["worst_margin"].values())
    ok = worst >= -1e-10 and bracket_worst >= -1e-10
    assert _record(2, ok, f"auxbound/monotone min slack {worst:.2e}, bracket min slack "
                          f"{bracket_worst:.2e} (>= -1e-10), delta in {{0.3, 0.5, 0.7}}")


def test_criterion_3_closed_forms(c2, c3):
    chain, f = c2
    lams = 2.0 ** -np.arange(0, 21)
    err_u = max(abs(norm(chain, resolvent(chain, lam, f).u) - 1.0 / (lam + 2.0)) for lam in lams)
    var = sigma_squared(chain, f)
    err_s = max(abs(var.sigma2_resolvent - 1.0), abs(var.sigma2_spectral - 1.0))
    w, _ = kv2_limit(chain, f, LambdaSchedule(0.5, 0, 60))
    err_w = float(np.max(np.abs(w - f / math.sqrt(2.0))))
    mw, _ = mw_integral(chain, f)
    err_mw = abs(mw - math.sqrt(2.0 * math.pi))
    chain3, f3 = c3
    err_s3 = abs(sigma_squared(chain3, f3).sigma2 - 2.0 / 3.0)
    ok = err_u <= 1e-12 and err_s <= 1e-10 and err_w <= 1e-10 and err_mw <= 1e-3 and err_s3 <= 1e-10
    assert _record(3, ok, f"C2 |u| err {err_u:.1e}, sigma2 err {err_s:.1e}, w err {err_w:.1e}, "
                          f"MW {mw:.6f} (err {err_mw:.1e}); C3 sigma2 err {err_s3:.1e}")


def test_criterion_4_gamma_bound():
    t0 = time.perf_counter()
    ts = np.geomspace(1e-3, 1e3, 60)
    worst = -math.inf
    sup = -math.inf
    for delta in np.arange(1, 10) / 10.0:
        bound = gamma_bound(delta)
        sums = np.array([gamma_sum(t, delta)[0] for t in ts])
        worst = max(worst, float(np.max(sums - bound)))
        sup = max(sup, float(sums.max()))
    elapsed = time.perf_counter() - t0
    s1, b1 = gamma_sum(1.0, 0.5)
    ok = (worst <= 0.0 and abs(s1 - 1.2786) <= 1e-3 and abs(b1 - 2.18237) <= 1e-5
          and sup >= 0.40992 and elapsed < 1.0)
    assert _record(4, ok, f"gamma max(sum-bound) = {worst:.3f} (<= 0), sum(1,0.5) = {s1:.5f}, "
                          f"bound(0.5) = {b1:.6f}, sup {sup:.4f} (>= 0.40992), {elapsed:.2f} s (< 1 s)")


def test_criterion_5_laplace_identity(c2, c3):
    chains = [c2, c3] + [make_example("random_general" if s % 2 else "random_reversible",
                                      3 + s % 6, seed=500 + s) for s in range(10)]
    worst = 0.0
    for chain, f in chains:
        for lam in (1.0, 0.25, 0.04):
            r = laplace_identity(chain, f, lam)
            worst = max(worst, r.witness["distance"] / norm(chain, f))
    ok = worst <= 1e-6
    assert _record(5, ok, f"Laplace identity max distance/|f| = {worst:.2e} (<= 1e-6) "
                          f"on C2, C3 and 10 random chains")


def test_criterion_6_lemma_chain(c2):
    chains = [c2] + [make_example("random_general" if s % 2 else "random_reversible",
                                  3 + s % 6, seed=600 + s) for s in range(10)]
    quad = QuadConfig()
    worst = -math.inf
    for chain, f in chains:
        mw, _ = mw_integral(chain, f, quad)
        for delta in (0.3, 0.5):
            lhs, mid, rhs = (v for _, v in lemma_chain_check(chain, f, delta, quad, mw=mw).profile)
            worst = max(worst, lhs - mid, mid - rhs)
    ok = worst <= 1e-6
    assert _record(6, ok, f"lemma chain max violation {worst:.2e} (<= 1e-6) on C2 and "
                          f"10 random chains, delta in {{0.3, 0.5}}")


@pytest.mark.slow
def test_criterion_7_martingale_monte_carlo(c2):
    chain, f = c2
    t0 = time.perf_counter()
    sample = martingale_sample(chain, f, 100.0, 10_000, seed=FROZEN_SEED)
    var = variance_check(chain, f, 100.0, 10_000, FROZEN_SEED, sample=sample)
    l2 = l2_error(chain, f, 100.0, 10_000, FROZEN_SEED, sample=sample)
    elapsed = time.perf_counter() - t0
    ratio = var.mean_M2 / (var.sigma2 * 100.0)
    se_ratio = var.se_M2 / (var.sigma2 * 100.0)
    ok = (abs(ratio - 1) <= 3 * se_ratio and l2.value <= l2.ceiling + 3 * l2.se
          and sample.identity_error <= 1e-10 and elapsed < 120.0)
    assert _record(7, ok, f"C2 N=100: E[M^2]/(sigma2 N) = {ratio:.4f} (SE {se_ratio:.4f}), "
                          f"L2 {l2.value:.4f} <= {l2.ceiling:.4f} + 3 SE, identity err "
                          f"{sample.identity_error:.1e}, {elapsed:.1f} s (< 120 s)")


@pytest.mark.slow
def test_criterion_8_clt_marginal(c2, c3):
    parts = []
    ok = True
    for name, (chain, f) in (("C2", c2), ("C3", c3)):
        r = clt_statistics(chain, f, 200.0, 2000, seed=FROZEN_SEED)
        ok &= r.ks_distance <= 0.0304
        parts.append(f"{name} KS {r.ks_distance:.4f}")
    assert _record(8, ok, ", ".join(parts) + " (<= 0.0304, N=200, 2000 paths, seed 7)")

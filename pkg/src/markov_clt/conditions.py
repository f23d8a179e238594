"""Numerical verdicts for the resolvent conditions and bounds.

Every check returns a ConditionReport: the computed profile, a pass/fail
verdict and the worst-case witness. Tolerances are keyword arguments
with the module-level defaults below; the CLI overrides them from the
command line.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field, fields
from typing import Any

import numpy as np
from scipy import integrate

from .calculus import (
    OperatorDecomposition,
    check_centered,
    decompose,
    resolvent,
    semigroup_apply,
    u_zero,
    v_of_t,
)
from .chain import MarkovChain, inner, norm
from .errors import BadParams, QuadratureNotConverged


@dataclass(frozen=True)
class Tolerances:
    kv1: float = 1e-6
    kv2_gap: float = 1e-8
    kv2_tail: float = 1e-6
    bt: float = 1e-10
    aux: float = 1e-10
    monotone: float = 1e-12
    bracket: float = 1e-10
    mw_rel: float = 1e-4
    laplace: float = 1e-6
    laplace_norm: float = 1e-8
    lemma: float = 1e-6
    summability_tail: float = 1e-3

    @classmethod
    def names(cls) -> list[str]:
        return [f.name for f in fields(cls)]


TOL = Tolerances()


@dataclass(frozen=True)
class LambdaSchedule:
    """Geometric grid lambda_k = delta**k for k_min <= k <= k_max."""

    delta: float = 0.5
    k_min: int = 0
    k_max: int = 40

    def __post_init__(self):
        if not 0.0 < self.delta < 1.0:
            raise BadParams(f"delta must lie in (0, 1), got {self.delta}")
        if self.k_max < self.k_min:
            raise BadParams("k_max must be >= k_min")

    @property
    def ks(self) -> np.ndarray:
        return np.arange(self.k_min, self.k_max + 1)

    @property
    def lambdas(self) -> np.ndarray:
        return self.delta ** self.ks.astype(float)


@dataclass(frozen=True)
class QuadConfig:
    t0: float = 1e-6
    tail_tol: float = 1e-6
    epsabs: float = 1e-12
    epsrel: float = 1e-10
    limit: int = 200
    # unit-width segments in log t keep quad well inside its subdivision limit
    segment: float = 1.0


@dataclass
class ConditionReport:
    name: str
    passed: bool
    profile: list = field(default_factory=list)
    witness: dict = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        return _jsonable(asdict(self))


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    return obj


def _norms_u(chain, f, lambdas):
    us = [resolvent(chain, lam, f).u for lam in lambdas]
    return us, np.array([norm(chain, u) for u in us])


# ---------------------------------------------------------------- KV conditions

def kv1_profile(chain: MarkovChain, f, schedule: LambdaSchedule = LambdaSchedule(), *,
                tol: float = TOL.kv1, mono_tol: float = TOL.monotone) -> ConditionReport:
    """Profile of sqrt(lambda) ||u_lambda|| along the schedule.

    Passes when the last value is below ``tol * ||f||`` and ||u_lambda||
    is non-decreasing as lambda decreases. Whether the profile itself is
    monotone is reported but not required; it need not be for chains with
    small rates.
    """
    f = check_centered(chain, f)
    lams = schedule.lambdas
    _, nu = _norms_u(chain, f, lams)
    vals = np.sqrt(lams) * nu
    fn = norm(chain, f)
    drops = nu[:-1] - nu[1:]  # positive means ||u|| shrank as lambda decreased
    worst_drop = float(drops.max()) if drops.size else 0.0
    mono_ok = worst_drop <= mono_tol * max(1.0, float(nu.max(initial=0.0)))
    tail_ok = vals[-1] <= tol * fn
    return ConditionReport(
        name="kv1",
        passed=bool(tail_ok and mono_ok),
        profile=[(float(l), float(v)) for l, v in zip(lams, vals)],
        witness={
            "tail_lambda": float(lams[-1]),
            "tail_value": float(vals[-1]),
            "tail_threshold": tol * fn,
            "norm_u_monotone": bool(mono_ok),
            "worst_norm_drop": worst_drop,
            "profile_nonincreasing": bool(np.all(np.diff(vals) <= mono_tol * max(1.0, fn))),
        },
    )


def kv2_limit(chain: MarkovChain, f, schedule: LambdaSchedule = LambdaSchedule(),
              dec: OperatorDecomposition | None = None, *, gap_tol: float = TOL.kv2_gap,
              tail_tol: float = TOL.kv2_tail) -> tuple[np.ndarray, ConditionReport]:
    """Estimate w = lim S^{1/2} u_lambda and check the Cauchy increments.

    The tail sum runs over the last quarter of the schedule's increments.
    """
    f = check_centered(chain, f)
    dec = dec or decompose(chain)
    lams = schedule.lambdas
    us, _ = _norms_u(chain, f, lams)
    ws = [dec.Shalf @ u for u in us]
    incs = np.array([norm(chain, ws[k] - ws[k - 1]) for k in range(1, len(ws))])
    w_est = ws[-1]
    w0 = dec.Shalf @ u_zero(chain, f)
    gap = norm(chain, w_est - w0)
    fn = norm(chain, f)
    q = max(1, len(incs) // 4)
    tail = float(incs[-q:].sum()) if incs.size else 0.0
    passed = gap <= gap_tol * fn and tail <= tail_tol * fn
    report = ConditionReport(
        name="kv2",
        passed=bool(passed),
        profile=[(float(l), float(v)) for l, v in zip(lams[1:], incs)],
        witness={
            "w_norm2": norm(chain, w_est) ** 2,
            "gap_to_limit": gap,
            "gap_threshold": gap_tol * fn,
            "tail_increment_sum": tail,
            "tail_threshold": tail_tol * fn,
            "increment_sum": float(incs.sum()),
        },
    )
    return w_est, report


def bt_identity_check(chain: MarkovChain, f, lam: float, lam2: float,
                      dec: OperatorDecomposition | None = None) -> tuple[float, float]:
    """Both sides of (l + l')(u_l, u_l') = ||S^{1/2}(u_l - u_l')||^2 + l||u_l||^2 + l'||u_l'||^2."""
    dec = dec or decompose(chain)
    u = resolvent(chain, lam, f).u
    u2 = resolvent(chain, lam2, f).u
    lhs = (lam + lam2) * inner(chain, u, u2)
    rhs = (norm(chain, dec.Shalf @ (u - u2)) ** 2
           + lam * norm(chain, u) ** 2 + lam2 * norm(chain, u2) ** 2)
    return float(lhs), float(rhs)


def auxbound_check(chain: MarkovChain, f, lam: float, lam2: float,
                   dec: OperatorDecomposition | None = None, *,
                   tol: float = TOL.aux) -> ConditionReport:
    """a <= b <= c for a = 2||S^{1/2}(u - u')||^2, b = (l - l')(||u'||^2 - ||u||^2),
    c = l||u'||^2 + l'||u||^2, plus ||u'|| >= ||u||, where l > l'."""
    if not lam > lam2 > 0:
        raise BadParams("auxbound_check needs lambda > lambda' > 0")
    dec = dec or decompose(chain)
    u = resolvent(chain, lam, f).u
    u2 = resolvent(chain, lam2, f).u
    n1, n2 = norm(chain, u) ** 2, norm(chain, u2) ** 2
    a = 2.0 * norm(chain, dec.Shalf @ (u - u2)) ** 2
    b = (lam - lam2) * (n2 - n1)
    c = lam * n2 + lam2 * n1
    slack = tol * norm(chain, f) ** 2
    margins = {"b_minus_a": b - a, "c_minus_b": c - b, "norm_increase": math.sqrt(n2) - math.sqrt(n1)}
    passed = margins["b_minus_a"] >= -slack and margins["c_minus_b"] >= -slack \
        and margins["norm_increase"] >= -slack
    return ConditionReport(
        name="auxbound",
        passed=bool(passed),
        profile=[("a", a), ("b", b), ("c", c)],
        witness={"lambda": lam, "lambda2": lam2, **margins, "slack": slack},
    )


def bracket_check(chain: MarkovChain, f, schedule: LambdaSchedule,
                  dec: OperatorDecomposition | None = None, *, samples: int = 5,
                  seed: int = 0, tol: float = TOL.bracket) -> ConditionReport:
    """Bracket bounds on every [lambda_k, lambda_{k-1}].

    Checks, with envelope e_k = sqrt(lambda_{k-1}) ||u_{lambda_k}||:
    sqrt(l)||u_l|| <= e_k and ||S^{1/2}(u_{lambda_k} - u_l)|| <= e_k for
    sampled l in the bracket, and ||S^{1/2}(u_{lambda_k} - u_{lambda_{k-1}})|| <= e_k.
    """
    dec = dec or decompose(chain)
    rng = np.random.default_rng(seed)
    lams = schedule.lambdas
    us = [resolvent(chain, lam, f).u for lam in lams]
    worst = {"inbetween1": math.inf, "crossbound": math.inf, "inbetween2": math.inf}
    where = {}
    profile = []
    for k in range(1, len(lams)):
        hi, lo = lams[k - 1], lams[k]
        env = math.sqrt(hi) * norm(chain, us[k])
        cross = norm(chain, dec.Shalf @ (us[k] - us[k - 1]))
        m_cross = env - cross
        grid = np.exp(rng.uniform(math.log(lo), math.log(hi), size=samples))
        m1 = m2 = math.inf
        for lam in np.concatenate([[lo, hi], grid]):
            u = resolvent(chain, lam, f).u
            m1 = min(m1, env - math.sqrt(lam) * norm(chain, u))
            m2 = min(m2, env - norm(chain, dec.Shalf @ (us[k] - u)))
        profile.append((float(lo), float(env)))
        for key, m in (("inbetween1", m1), ("crossbound", m_cross), ("inbetween2", m2)):
            if m < worst[key]:
                worst[key], where[key] = m, float(lo)
    passed = all(v >= -tol for v in worst.values())
    return ConditionReport(
        name="brackets",
        passed=bool(passed),
        profile=profile,
        witness={"worst_margin": worst, "at_lambda": where, "tol": tol},
    )


# ----------------------------------------------------------- quadrature helpers

def _log_segments(a: float, b: float, width: float) -> np.ndarray:
    la, lb = math.log(a), math.log(b)
    m = max(1, int(math.ceil((lb - la) / width)))
    return np.linspace(la, lb, m + 1)


def _quad_log(fun, a: float, b: float, cfg: QuadConfig) -> tuple[float, float]:
    """int_a^b fun(t) dt via t = e^x, split into fixed segments in x."""
    total, err = 0.0, 0.0
    edges = _log_segments(a, b, cfg.segment)
    for x0, x1 in zip(edges[:-1], edges[1:]):
        val, e = integrate.quad(lambda x: fun(math.exp(x)) * math.exp(x), x0, x1,
                                epsabs=cfg.epsabs, epsrel=cfg.epsrel, limit=cfg.limit)
        total += val
        err += e
    return total, err


def _tail_start(chain, u0, accept, t_start=1.0, t_max=1e16):
    """Doubling search for T with accept(T, ||P_T u0||) true."""
    T = t_start
    while True:
        r = norm(chain, semigroup_apply(chain, T, u0))
        if accept(T, r) or T >= t_max:
            return T, r
        T *= 2.0


# --------------------------------------------------------------------- MW integral

def mw_integral(chain: MarkovChain, f, quad: QuadConfig = QuadConfig(), *,
                rel_tol: float = TOL.mw_rel) -> tuple[float, ConditionReport]:
    """int_0^inf t^{-3/2} ||v_t|| dt.

    (0, t0]: t = s^2 turns the t^{-1/2} endpoint behaviour into a bounded
    integrand. [t0, T]: log-substituted quadrature. [T, inf): ||v_t|| is
    replaced by ||u_0|| (v_t = u_0 - P_t u_0 for centered f), giving
    2 ||u_0|| T^{-1/2} with error at most 2 ||P_T u_0|| T^{-1/2}.
    """
    f = check_centered(chain, f)
    fn = norm(chain, f)
    if fn == 0.0:
        return 0.0, ConditionReport("mw", True, [], {"value": 0.0, "error": 0.0})
    u0 = u_zero(chain, f)
    u0n = norm(chain, u0)

    def vn(t):
        return norm(chain, v_of_t(chain, t, f).v)

    t0 = quad.t0
    head, e_head = integrate.quad(lambda s: 2.0 * vn(s * s) / (s * s) if s > 0 else 2.0 * fn,
                                  0.0, math.sqrt(t0), epsabs=quad.epsabs,
                                  epsrel=quad.epsrel, limit=quad.limit)
    T, r = _tail_start(chain, u0, lambda T, r: 2.0 * r / math.sqrt(T) <= quad.tail_tol,
                       t_start=max(1.0, 10 * t0))
    body, e_body = _quad_log(lambda t: vn(t) * t ** -1.5, t0, T, quad)
    tail = 2.0 * u0n / math.sqrt(T)
    tail_err = 2.0 * r / math.sqrt(T)
    value = head + body + tail
    error = e_head + e_body + tail_err
    if not (math.isfinite(value) and math.isfinite(error)):
        raise QuadratureNotConverged(f"MW integral not finite (value={value}, error={error})")
    passed = error <= rel_tol * value
    return value, ConditionReport(
        name="mw",
        passed=bool(passed),
        profile=[("head", head), ("body", body), ("tail", tail)],
        witness={"value": value, "error": error, "T": T, "t0": t0,
                 "tail_error_bound": tail_err, "rel_tol": rel_tol},
    )


# ------------------------------------------------------------------- summability

def summability(chain: MarkovChain, f, schedule: LambdaSchedule = LambdaSchedule(k_min=1),
                tail_tol: float = TOL.summability_tail) -> tuple[float, ConditionReport]:
    """sum_{k>=1} sqrt(lambda_{k-1}) ||u_{lambda_k}|| with a certified tail.

    Terms past K are bounded by delta^{(k-1)/2} ||u_0|| since ||u_lambda||
    increases to ||u_0|| as lambda decreases; K is extended past the
    schedule's k_max until that geometric tail is below ``tail_tol``.
    """
    if schedule.k_min != 1:
        raise BadParams("summability expects a schedule starting at k_min = 1")
    f = check_centered(chain, f)
    d = schedule.delta
    u0n = norm(chain, u_zero(chain, f))
    sq = math.sqrt(d)

    def tail_bound(K):
        return u0n * d ** (K / 2) / (1.0 - sq)

    K = schedule.k_max
    while tail_bound(K) > tail_tol:
        K += 1
    ks = np.arange(1, K + 1)
    lams = d ** ks.astype(float)
    _, nu = _norms_u(chain, f, lams)
    terms = np.sqrt(lams / d) * nu
    partial = float(np.sum(terms))
    tb = tail_bound(K)
    value = partial + tb
    return value, ConditionReport(
        name="summability",
        passed=bool(math.isfinite(value)),
        profile=[(int(k), float(t)) for k, t in zip(ks, terms)],
        witness={"partial_sum": partial, "tail_bound": tb, "K": int(K), "delta": d},
    )


# ------------------------------------------------------------------------ gamma

def gamma_bound(delta: float) -> float:
    """(3/(2e))^{3/2} + sqrt(pi) / (2 (1 - delta))."""
    return (1.5 / math.e) ** 1.5 + math.sqrt(math.pi) / (2.0 * (1.0 - delta))


# term u^{3/2} e^{-u} is below 1e-23 past U_HI; below U_LO it is below 3e-20
U_HI = 60.0
U_LO = 1e-13


def gamma_terms(t: float, delta: float, k_min: int | None = None):
    """Terms (t delta^k)^{3/2} exp(-t delta^k) for the relevant k, and a tail bound.

    With ``k_min=None`` the range is two-sided over all integers; terms are
    dropped where t delta^k > U_HI or < U_LO, and the dropped mass is bounded
    geometrically on each side.
    """
    if not 0.0 < delta < 1.0:
        raise BadParams(f"delta must lie in (0, 1), got {delta}")
    if t < 0:
        raise BadParams("t must be nonnegative")
    if t == 0:
        return np.zeros(0, dtype=int), np.zeros(0), 0.0
    ld = math.log(delta)
    # u_k = t delta^k, decreasing in k
    k_hi = int(math.ceil(math.log(U_LO / t) / ld))
    k_lo = int(math.floor(math.log(U_HI / t) / ld))
    if k_min is not None:
        k_lo = max(k_lo, k_min)
        k_hi = max(k_hi, k_min)
    ks = np.arange(k_lo, k_hi + 1)
    u = t * delta ** ks.astype(float)
    terms = u ** 1.5 * np.exp(-u)
    # small-u side: sum over u' < u_last of u'^{3/2} <= u_last^{3/2} delta^{3/2}/(1-delta^{3/2})
    low = u[-1] ** 1.5 * delta ** 1.5 / (1.0 - delta ** 1.5)
    high = 0.0
    if k_min is None or k_lo > k_min:
        # large-u side: ratio of successive terms for u >= U_HI is at most rho
        u_first = u[0] / delta
        rho = delta ** -1.5 * math.exp(-U_HI * (1.0 / delta - 1.0))
        first = u_first ** 1.5 * math.exp(-u_first)
        high = first / (1.0 - rho) if rho < 1 else math.inf
    return ks, terms, low + high


def gamma_sum(t: float, delta: float) -> tuple[float, float]:
    """(sum over k in Z of (t delta^k)^{3/2} e^{-t delta^k}, closed-form bound)."""
    _, terms, _ = gamma_terms(t, delta)
    return float(np.sum(terms)), gamma_bound(delta)


def is_unimodal(seq) -> bool:
    """Non-decreasing then non-increasing."""
    d = np.diff(np.asarray(seq, dtype=float))
    if d.size == 0:
        return True
    turn = np.argmax(d < 0) if np.any(d < 0) else d.size
    return bool(np.all(d[:turn] >= 0) and np.all(d[turn:] <= 0))


def kernel_one_sided(t: float, delta: float) -> float:
    """sum_{k>=0} (t delta^k)^{3/2} e^{-t delta^k}."""
    _, terms, _ = gamma_terms(t, delta, k_min=0)
    return float(np.sum(terms))


# ---------------------------------------------------------------- Laplace identity

def laplace_identity(chain: MarkovChain, f, lam: float, quad: QuadConfig = QuadConfig(), *,
                     tol: float = TOL.laplace, norm_tol: float = TOL.laplace_norm
                     ) -> ConditionReport:
    """Compare lambda int_0^inf e^{-lambda t} v_t dt with the resolvent solve.

    On [T, inf) the integrand is lambda e^{-lambda t}(u_0 - P_t u_0); the u_0
    part integrates to e^{-lambda T} u_0 and the rest is bounded by
    e^{-lambda T} ||P_T u_0||, which T is chosen to make negligible.
    """
    if not lam > 0:
        raise BadParams("lambda must be positive")
    f = check_centered(chain, f)
    fn = norm(chain, f)
    u_res = resolvent(chain, lam, f).u
    if fn == 0.0:
        return ConditionReport("laplace", True, [], {"lambda": lam, "distance": 0.0})
    u0 = u_zero(chain, f)
    tiny = 1e-3 * tol * fn
    T, r = _tail_start(chain, u0, lambda T, r: math.exp(-lam * T) * r <= tiny)
    # split [0, T] at multiples of the decay scale so quad_vec starts well resolved
    pts = np.unique(np.clip(np.array([0.0, 0.5, 1, 2, 4, 8, 16, 32, 64]) / lam, 0, T))
    pts = np.append(pts[pts < T], T)
    vec = np.zeros(chain.n)
    vec_err = 0.0
    scal = 0.0
    for a, b in zip(pts[:-1], pts[1:]):
        val, e = integrate.quad_vec(lambda t: lam * math.exp(-lam * t) * v_of_t(chain, t, f).v,
                                    a, b, epsabs=quad.epsabs, epsrel=quad.epsrel, norm="max")
        vec += val
        vec_err += e
        s, _ = integrate.quad(lambda t: lam * math.exp(-lam * t) * norm(chain, v_of_t(chain, t, f).v),
                              a, b, epsabs=quad.epsabs, epsrel=quad.epsrel, limit=quad.limit)
        scal += s
    decay = math.exp(-lam * T)
    vec += decay * u0
    # lower bound for the scalar tail: ||v_t|| >= ||u_0|| - ||P_t u_0|| >= ||u_0|| - r
    scal += decay * max(norm(chain, u0) - r, 0.0)
    dist = norm(chain, vec - u_res)
    un = norm(chain, u_res)
    passed = dist <= tol * fn and scal >= un - norm_tol
    return ConditionReport(
        name="laplace",
        passed=bool(passed),
        profile=[("lambda", lam), ("T", T)],
        witness={"lambda": lam, "distance": dist, "threshold": tol * fn,
                 "quad_error": vec_err, "norm_integral": scal, "norm_u": un,
                 "tail_remainder_bound": decay * r},
    )


# ------------------------------------------------------------------ lemma chain

def lemma_chain_check(chain: MarkovChain, f, delta: float, quad: QuadConfig = QuadConfig(), *,
                      tol: float = TOL.lemma, lhs_tail_tol: float = 1e-9,
                      mw: float | None = None) -> ConditionReport:
    """lhs <= mid <= gamma_bound(delta) * MW-integral.

    lhs = sum_{k>=0} delta^{k/2} ||u_{delta^k}|| (tail certified as in
    summability), mid = int_0^inf K(t) t^{-3/2} ||v_t|| dt with the one-sided
    kernel K(t) = sum_{k>=0} (t delta^k)^{3/2} e^{-t delta^k}.
    """
    if not 0.0 < delta < 1.0:
        raise BadParams(f"delta must lie in (0, 1), got {delta}")
    f = check_centered(chain, f)
    fn = norm(chain, f)
    u0 = u_zero(chain, f)
    u0n = norm(chain, u0)
    sq = math.sqrt(delta)
    K = 0
    while u0n * delta ** ((K + 1) / 2) / (1.0 - sq) > lhs_tail_tol:
        K += 1
    ks = np.arange(0, K + 1)
    _, nu = _norms_u(chain, f, delta ** ks.astype(float))
    terms = delta ** (ks / 2.0) * nu
    lhs_tail = u0n * delta ** ((K + 1) / 2) / (1.0 - sq)
    lhs = float(np.sum(terms)) + lhs_tail
    bridge = float(np.sum(terms[1:])) / sq  # sum_{k>=1} sqrt(lambda_{k-1}) ||u_{lambda_k}||

    if mw is None:
        mw, _ = mw_integral(chain, f, quad)
    gb = gamma_bound(delta)
    rhs = gb * mw

    if fn == 0.0:
        mid, mid_err, T = 0.0, 0.0, 0.0
    else:
        t_lo = 1e-12

        def integrand(t):
            return kernel_one_sided(t, delta) * t ** -1.5 * norm(chain, v_of_t(chain, t, f).v)

        # past T, ||v_t|| -> ||u_0|| and int_T^inf K(t) t^{-3/2} dt = sum_k delta^{k/2} e^{-T delta^k}
        n_terms = int(math.ceil(2.0 * math.log(1e-20) / math.log(delta))) + 1

        def tail_weight(T):
            kk = np.arange(0, n_terms)
            return float(np.sum(delta ** (kk / 2.0) * np.exp(-T * delta ** kk.astype(float))))

        T, r = _tail_start(chain, u0, lambda T, r: r * tail_weight(T) <= 1e-3 * tol)
        body, e_body = _quad_log(integrand, t_lo, T, quad)
        tw = tail_weight(T)
        mid = body + u0n * tw
        # below t_lo: K(t) <= t^{3/2}/(1-delta^{3/2}) and ||v_t|| <= t ||f||
        head_bound = fn * t_lo ** 2 / (2.0 * (1.0 - delta ** 1.5))
        mid_err = e_body + r * tw + head_bound
    passed = lhs <= mid + tol and mid <= rhs + tol
    return ConditionReport(
        name="lemma_chain",
        passed=bool(passed),
        profile=[("lhs", lhs), ("mid", mid), ("rhs_bound", rhs)],
        witness={"delta": delta, "lhs_tail_bound": lhs_tail, "mid_error": mid_err,
                 "gamma_bound": gb, "mw_integral": mw, "T": T,
                 "sum_condition": bridge, "bridge_factor": 1.0 / sq,
                 "bridge_ok": bool(bridge <= lhs / sq + tol)},
    )


def sweep_rows(chain: MarkovChain, f, schedule: LambdaSchedule,
               dec: OperatorDecomposition | None = None) -> list[tuple]:
    """(k, lambda_k, ||u||, sqrt(lambda)||u||, ||S^{1/2}(u_k - u_{k-1})|| or None)."""
    dec = dec or decompose(chain)
    rows = []
    prev = None
    for k, lam in zip(schedule.ks, schedule.lambdas):
        u = resolvent(chain, lam, f).u
        nu = norm(chain, u)
        inc = None if prev is None else norm(chain, dec.Shalf @ (u - prev))
        rows.append((int(k), float(lam), nu, math.sqrt(lam) * nu, inc))
        prev = u
    return rows

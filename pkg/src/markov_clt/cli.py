"""Command-line front end.

    markov-clt validate --input chain.json
    markov-clt analyze  --input chain.json [--delta 0.5] [--k-max 40]
    markov-clt sweep    --input chain.json [--format csv|json]
    markov-clt gamma    --delta 0.5 [--t-min 1e-3 --t-max 1e3 --points 60]
    markov-clt simulate --input chain.json --horizon 200 --paths 2000 --seed 7
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np

from . import __version__
from .calculus import check_centered, decompose
from .chain import MarkovChain, build_chain, center, mean, norm
from .conditions import (
    LambdaSchedule,
    QuadConfig,
    Tolerances,
    auxbound_check,
    bracket_check,
    bt_identity_check,
    gamma_bound,
    gamma_sum,
    kv1_profile,
    kv2_limit,
    laplace_identity,
    lemma_chain_check,
    mw_integral,
    summability,
    sweep_rows,
)
from .errors import (
    AbsorbingState,
    BadParams,
    DegenerateStationary,
    DimensionMismatch,
    MarkovError,
    NotAGenerator,
    NotCentered,
    ParseError,
    PathChainMismatch,
    Reducible,
    SchemaError,
    SigmaZero,
)
from .martingale import l2_error, martingale_sample, sigma_squared, variance_check
from .simulate import clt_statistics

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_VERDICT = 2
EXIT_PARSE = 3
EXIT_SCHEMA = 4
EXIT_NUMERIC = 5

INPUT_ERRORS = (NotAGenerator, Reducible, DegenerateStationary, DimensionMismatch,
                NotCentered, BadParams, SigmaZero, AbsorbingState, PathChainMismatch)

LAPLACE_LAMBDAS = (1.0, 0.25, 0.04)
BT_PAIRS = ((1.0, 0.5), (0.1, 0.01), (1e-4, 1e-3))

EPILOG = """\
exit status:
  0  every verdict passed
  1  invalid input: not a generator, reducible, bad pi, uncentered f,
     dimension mismatch, zero variance, bad parameters, missing file
  2  at least one verdict failed
  3  input file is not valid JSON
  4  input JSON does not match the chain-spec schema
  5  numerical failure (breakdown, singular solve, quadrature)
"""


@dataclass
class RunConfig:
    command: str
    input_path: Path | None = None
    output_path: Path | None = None
    delta: float = 0.5
    k_max: int = 40
    seed: int = 1
    paths: int = 2000
    horizon: float = 200.0
    fmt: str | None = None
    center: bool = False
    t_min: float = 1e-3
    t_max: float = 1e3
    points: int = 60
    samples_csv: Path | None = None
    paths_csv: Path | None = None
    tol: Tolerances = field(default_factory=Tolerances)

    def __post_init__(self):
        if not 0.0 < self.delta < 1.0:
            raise BadParams("--delta must lie in (0, 1)")
        if self.paths < 1:
            raise BadParams("--paths must be >= 1")
        if not self.horizon > 0:
            raise BadParams("--horizon must be positive")
        if self.k_max < 1:
            raise BadParams("--k-max must be >= 1")
        if self.input_path is not None and not self.input_path.is_file():
            raise FileNotFoundError(f"input file {self.input_path} does not exist")

    def provenance(self) -> dict:
        d = asdict(self)
        for k in ("input_path", "output_path", "samples_csv", "paths_csv"):
            d[k] = None if d[k] is None else str(d[k])
        d["quad"] = asdict(QuadConfig())
        d["version"] = __version__
        return d


def load_chain_spec(path: Path, pi_tol: float = 1e-8,
                    do_center: bool = False) -> tuple[MarkovChain, np.ndarray]:
    """Read {"Q": [[...]], "f": [...], "pi": optional [...]}."""
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: {exc}") from exc
    if not isinstance(doc, dict):
        raise SchemaError("chain spec must be a JSON object")
    unknown = set(doc) - {"Q", "f", "pi"}
    if unknown:
        raise SchemaError(f"unknown keys {sorted(unknown)}")
    for key in ("Q", "f"):
        if key not in doc:
            raise SchemaError(f"missing required key {key!r}")

    def numbers(x, what):
        if not isinstance(x, list) or not x or not all(
                isinstance(v, (int, float)) and not isinstance(v, bool) for v in x):
            raise SchemaError(f"{what} must be a non-empty list of numbers")
        return [float(v) for v in x]

    Q = doc["Q"]
    if not isinstance(Q, list) or not Q:
        raise SchemaError("'Q' must be a list of rows")
    rows = [numbers(r, "each row of 'Q'") for r in Q]
    if any(len(r) != len(rows) for r in rows):
        raise SchemaError("'Q' must be square")
    f = numbers(doc["f"], "'f'")
    pi = numbers(doc["pi"], "'pi'") if doc.get("pi") is not None else None
    if len(f) != len(rows):
        raise SchemaError(f"'f' has {len(f)} entries, 'Q' has {len(rows)} rows")
    if pi is not None and len(pi) != len(rows):
        raise SchemaError(f"'pi' has {len(pi)} entries, 'Q' has {len(rows)} rows")
    chain = build_chain(rows, pi, pi_tol=pi_tol)
    f = np.array(f)
    if do_center:
        f = center(chain, f)
    return chain, f


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".17g")


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_fmt(v) for v in r])
    return buf.getvalue()


def _json(doc) -> str:
    return json.dumps(_clean(doc), indent=2, sort_keys=True) + "\n"


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else str(x)
    return obj


def cmd_validate(cfg: RunConfig) -> tuple[dict, bool]:
    chain, f = load_chain_spec(cfg.input_path, do_center=cfg.center)
    Q = np.asarray(chain.Q)
    m = mean(chain, f)
    centered = abs(m) <= 1e-10 * max(1.0, norm(chain, f))
    doc = {
        "command": "validate",
        "valid": True,
        "n": chain.n,
        "pi": chain.pi,
        "reversible": chain.is_reversible(),
        "invariants": {
            "max_row_sum": float(np.max(np.abs(Q.sum(axis=1)))),
            "stationarity_residual": float(np.max(np.abs(chain.pi @ Q))),
            "pi_sum_error": float(abs(chain.pi.sum() - 1.0)),
            "min_pi": float(chain.pi.min()),
        },
        "f_mean": m,
        "f_centered": bool(centered),
        "config": cfg.provenance(),
    }
    return doc, bool(centered)


def cmd_analyze(cfg: RunConfig) -> tuple[dict, bool]:
    chain, f = load_chain_spec(cfg.input_path, do_center=cfg.center)
    check_centered(chain, f)
    tol = cfg.tol
    dec = decompose(chain)
    sched = LambdaSchedule(cfg.delta, 0, cfg.k_max)
    quad = QuadConfig()
    fn2 = norm(chain, f) ** 2

    var = sigma_squared(chain, f, dec)
    reports = {}
    reports["kv1"] = kv1_profile(chain, f, sched, tol=tol.kv1, mono_tol=tol.monotone).to_dict()
    w, kv2 = kv2_limit(chain, f, sched, dec, gap_tol=tol.kv2_gap, tail_tol=tol.kv2_tail)
    reports["kv2"] = kv2.to_dict()

    bt = []
    for lam, lam2 in BT_PAIRS:
        lhs, rhs = bt_identity_check(chain, f, lam, lam2, dec)
        bt.append({"lambda": lam, "lambda2": lam2, "lhs": lhs, "rhs": rhs,
                   "ok": abs(lhs - rhs) <= tol.bt * max(abs(lhs), fn2, 1e-300)})
    reports["bt_identity"] = {"name": "bt_identity", "passed": all(r["ok"] for r in bt), "profile": bt}

    lams = sched.lambdas
    aux = [auxbound_check(chain, f, lams[k - 1], lams[k], dec, tol=tol.aux) for k in range(1, len(lams))]
    reports["auxbound"] = {"name": "auxbound", "passed": all(r.passed for r in aux),
                           "profile": [r.to_dict()["witness"] for r in aux]}
    reports["brackets"] = bracket_check(chain, f, sched, dec, seed=cfg.seed, tol=tol.bracket).to_dict()

    mw, mw_rep = mw_integral(chain, f, quad, rel_tol=tol.mw_rel)
    reports["mw"] = mw_rep.to_dict()
    s_val, s_rep = summability(chain, f, LambdaSchedule(cfg.delta, 1, cfg.k_max), tol.summability_tail)
    reports["summability"] = s_rep.to_dict()
    lap = [laplace_identity(chain, f, lam, quad, tol=tol.laplace, norm_tol=tol.laplace_norm)
           for lam in LAPLACE_LAMBDAS]
    reports["laplace"] = {"name": "laplace", "passed": all(r.passed for r in lap),
                          "profile": [r.to_dict()["witness"] for r in lap]}
    reports["lemma_chain"] = lemma_chain_check(chain, f, cfg.delta, quad, tol=tol.lemma, mw=mw).to_dict()
    g_sum, g_bound = gamma_sum(1.0, cfg.delta)

    passed = all(r["passed"] for r in reports.values())
    doc = {
        "command": "analyze",
        "n": chain.n,
        "pi": chain.pi,
        "reversible": chain.is_reversible(),
        "sigma2": var.sigma2,
        "variance": asdict(var),
        "w": w,
        "mw_integral": mw,
        "summability": s_val,
        "gamma_at_t1": {"sum": g_sum, "bound": g_bound},
        "conditions": reports,
        "all_passed": passed,
        "config": cfg.provenance(),
    }
    return doc, passed


def cmd_sweep(cfg: RunConfig) -> tuple[list, list, bool]:
    chain, f = load_chain_spec(cfg.input_path, do_center=cfg.center)
    check_centered(chain, f)
    rows = sweep_rows(chain, f, LambdaSchedule(cfg.delta, 0, cfg.k_max))
    header = ["k", "lambda", "norm_u", "sqrt_lambda_norm_u", "cross_increment"]
    return header, rows, True


def cmd_gamma(cfg: RunConfig) -> tuple[list, list, bool]:
    ts = np.geomspace(cfg.t_min, cfg.t_max, cfg.points)
    bound = gamma_bound(cfg.delta)
    rows = [(t, cfg.delta, gamma_sum(t, cfg.delta)[0], bound) for t in ts]
    return ["t", "delta", "sum", "bound"], rows, all(r[2] <= r[3] for r in rows)


def cmd_simulate(cfg: RunConfig) -> tuple[dict, bool]:
    chain, f = load_chain_spec(cfg.input_path, do_center=cfg.center)
    check_centered(chain, f)
    clt = clt_statistics(chain, f, cfg.horizon, cfg.paths, cfg.seed)
    sample = martingale_sample(chain, f, cfg.horizon, cfg.paths, cfg.seed)
    var = variance_check(chain, f, cfg.horizon, cfg.paths, cfg.seed, sample=sample)
    l2 = l2_error(chain, f, cfg.horizon, cfg.paths, cfg.seed, sample=sample)
    if cfg.samples_csv is not None:
        cfg.samples_csv.write_text("".join(_fmt(x) + "\n" for x in clt.samples))
    if cfg.paths_csv is not None:
        rows = [(i, m, s) for i, (m, s) in enumerate(zip(sample.M_T, sample.integral_f))]
        cfg.paths_csv.write_text(_csv(["path_index", "M_T", "integral_f"], rows))
    passed = clt.passed and var.passed and l2.passed
    doc = {
        "command": "simulate",
        "clt": clt.to_dict(),
        "variance_check": var.to_dict(),
        "l2_error": l2.to_dict(),
        "all_passed": passed,
        "config": cfg.provenance(),
    }
    return doc, passed


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", type=Path, help="chain-spec JSON file")
    common.add_argument("--output", type=Path, help="write the report here instead of stdout")
    common.add_argument("--delta", type=float, default=0.5)
    common.add_argument("--k-max", type=int, default=40)
    common.add_argument("--seed", type=int, default=1)
    common.add_argument("--paths", type=int, default=2000)
    common.add_argument("--horizon", type=float, default=200.0)
    common.add_argument("--format", choices=("json", "csv"), default=None)
    common.add_argument("--center", action="store_true", help="center f under pi before use")
    for name in Tolerances.names():
        common.add_argument(f"--tol-{name.replace('_', '-')}", type=float, default=None,
                            dest=f"tol_{name}")

    p = argparse.ArgumentParser(
        prog="markov-clt",
        description="Resolvent conditions, asymptotic variance and CLT checks for finite Markov chains.",
        epilog=EPILOG,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("validate", parents=[common], help="check chain invariants")
    sub.add_parser("analyze", parents=[common], help="sigma^2 and every condition report (JSON)")
    sub.add_parser("sweep", parents=[common], help="lambda profile (CSV)")
    g = sub.add_parser("gamma", parents=[common], help="unimodular sum vs its bound (CSV)")
    g.add_argument("--t-min", type=float, default=1e-3)
    g.add_argument("--t-max", type=float, default=1e3)
    g.add_argument("--points", type=int, default=60)
    s = sub.add_parser("simulate", parents=[common], help="Monte Carlo martingale and CLT checks (JSON)")
    s.add_argument("--samples-csv", type=Path, help="dump standardized samples, one per line")
    s.add_argument("--paths-csv", type=Path, help="dump (path_index, M_T, integral_f)")
    return p


def _config(args) -> RunConfig:
    overrides = {n: getattr(args, f"tol_{n}") for n in Tolerances.names()
                 if getattr(args, f"tol_{n}") is not None}
    if args.command != "gamma" and args.input is None:
        raise BadParams(f"{args.command} requires --input")
    return RunConfig(
        command=args.command,
        input_path=args.input,
        output_path=args.output,
        delta=args.delta,
        k_max=args.k_max,
        seed=args.seed,
        paths=args.paths,
        horizon=args.horizon,
        fmt=args.format,
        center=args.center,
        t_min=getattr(args, "t_min", 1e-3),
        t_max=getattr(args, "t_max", 1e3),
        points=getattr(args, "points", 60),
        samples_csv=getattr(args, "samples_csv", None),
        paths_csv=getattr(args, "paths_csv", None),
        tol=replace(Tolerances(), **overrides),
    )


def run(cfg: RunConfig) -> tuple[str, int]:
    """Execute one command; returns (report text, exit status)."""
    if cfg.command in ("sweep", "gamma"):
        header, rows, ok = (cmd_sweep if cfg.command == "sweep" else cmd_gamma)(cfg)
        if cfg.fmt == "json":
            text = _json({"command": cfg.command, "rows": [dict(zip(header, r)) for r in rows],
                          "all_passed": ok, "config": cfg.provenance()})
        else:
            text = _csv(header, rows)
    else:
        doc, ok = {"validate": cmd_validate, "analyze": cmd_analyze,
                   "simulate": cmd_simulate}[cfg.command](cfg)
        text = _json(doc)
    return text, EXIT_OK if ok else EXIT_VERDICT


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _config(args)
        text, status = run(cfg)
    except ParseError as exc:
        print(f"ParseError: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except SchemaError as exc:
        print(f"SchemaError: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    except INPUT_ERRORS as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except FileNotFoundError as exc:
        print(f"FileNotFoundError: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except MarkovError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    if cfg.output_path is not None:
        cfg.output_path.write_text(text)
    else:
        sys.stdout.write(text)
    return status


if __name__ == "__main__":
    sys.exit(main())

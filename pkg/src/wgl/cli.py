"""Command-line entry point: ``wgl <subcommand> ...``.

Exit codes: 0 success, 1 a checked bound failed, 2 usage or input error.
Reports are JSON (schema 1) embedding the resolved run configuration.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import dyadic_core as dc
from . import interpolants as it
from . import riesz_products as rp
from . import tensor_norms as tn
from . import verify

SCHEMA = 1


class UsageError(Exception):
    """Bad flag value or malformed input file (exit code 2)."""


@dataclass
class RunConfig:
    command: str
    seed: int
    format: str
    options: dict = field(default_factory=dict)
    caps: dict = field(default_factory=lambda: {"max_n": dc.MAX_N, "real_exact": tn.REAL_EXACT_CAP})


# ---------------------------------------------------------------------------
# input parsing
# ---------------------------------------------------------------------------


def parse_vector(text: str, flag: str) -> np.ndarray:
    """Inline comma list (entries like 1, -0.5, 2+1j) or a JSON file path."""
    path = Path(text)
    if path.suffix == ".json" or path.is_file():
        try:
            obj = json.loads(path.read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"{flag}: cannot read {text}: {exc}") from None
        if isinstance(obj, list):
            return _complex_array(obj, flag)
        try:
            return np.asarray(dc.series_from_json(obj).coeffs
                              if obj.get("side") == "coeff" else dc.series_from_json(obj).values)
        except (ValueError, AttributeError) as exc:
            raise UsageError(f"{flag}: {exc}") from None
    return _complex_array([t for t in text.split(",") if t.strip()], flag)


def _complex_array(items, flag):
    try:
        arr = np.array([complex(str(t).replace(" ", "")) for t in items])
    except ValueError as exc:
        raise UsageError(f"{flag}: {exc}") from None
    if arr.size == 0:
        raise UsageError(f"{flag}: empty vector")
    return arr.real.copy() if not np.any(arr.imag) else arr


def parse_matrix(path: str) -> np.ndarray:
    """CSV (cells ``re`` or ``re:im``) or JSON (nested list, or {"re": .., "im": ..})."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"--matrix: cannot read {path}: {exc}") from None
    try:
        if path.endswith(".json"):
            obj = json.loads(text)
            if isinstance(obj, dict):
                a = np.asarray(obj["re"], dtype=float) + 1j * np.asarray(obj.get("im", 0.0), dtype=float)
            else:
                a = np.asarray(obj, dtype=float)
        else:
            rows = [r for r in csv.reader(io.StringIO(text)) if r]
            a = np.array([[_cell(c) for c in r] for r in rows])
    except (ValueError, KeyError, TypeError, json.JSONDecodeError) as exc:
        raise UsageError(f"--matrix: malformed {path}: {exc}") from None
    if a.ndim != 2 or 0 in a.shape:
        raise UsageError(f"--matrix: expected a rectangular non-empty array in {path}")
    return a.real.copy() if not np.any(a.imag) else a


def _cell(c: str) -> complex:
    parts = c.strip().split(":")
    if len(parts) == 1:
        return complex(float(parts[0]))
    if len(parts) == 2:
        return complex(float(parts[0]), float(parts[1]))
    raise ValueError(f"bad cell {c!r}")


def parse_exponent(text: str) -> float:
    v = float(text)
    if not v >= 1:
        raise argparse.ArgumentTypeError(f"exponent must be >= 1, got {text}")
    return v


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------


def jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": jsonable(obj.real), "im": jsonable(obj.imag)}
    if isinstance(obj, (float, np.floating)):
        f = float(obj)
        return f if math.isfinite(f) else ("inf" if f > 0 else "-inf" if f < 0 else "nan")
    return obj


def emit(cfg: RunConfig, result: dict, passed: bool, stamp: bool, out=sys.stdout, table=None):
    report = {"schema": SCHEMA, "config": asdict(cfg), "passed": passed, "result": result}
    if stamp:
        report["timestamp"] = datetime.now(timezone.utc).isoformat()
    if cfg.format == "csv":
        if table is None:
            raise UsageError("--format csv is only available for flat tables (verify-all)")
        w = csv.DictWriter(out, fieldnames=list(table[0].keys()), lineterminator="\n")
        w.writeheader()
        w.writerows(jsonable(table))
    else:
        out.write(json.dumps(jsonable(report), indent=2, sort_keys=True) + "\n")
    return 0 if passed else 1


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def _vector_or_random(args, flag_value, n, rng, s=2.0, flag="--x"):
    if flag_value is not None:
        x = parse_vector(flag_value, flag)
        if n is not None and x.shape[0] != n:
            raise UsageError(f"{flag}: has {x.shape[0]} entries but --n is {n}")
        return x, "given"
    if n is None:
        raise UsageError(f"either {flag} or --n is required")
    x = rng.standard_normal(n)
    return x / rp.vector_norm(x, s), "random unit (seeded)"


def cmd_fwht(args, rng):
    v = parse_vector(args.x, "--x")
    try:
        out = dc.ifwht(v) if args.inverse else dc.fwht(v)
    except dc.DomainError as exc:
        raise UsageError(f"--x: {exc}") from None
    return out.to_json(), True


def cmd_riesz(args, rng):
    x, origin = _vector_or_random(args, args.x, args.n, rng, args.s)
    if args.check == "bounds":
        out = rp.interpolant(x, args.kind, args.epsilon, args.s)
        rep = rp.verify_key_bounds(x, args.epsilon, args.s)
        result = {"x_origin": origin, "x": x, "series": out.series.to_json(), "bounds": rep.as_dict(),
                  "printed_exceedances": [r.tag for r in rep.printed_exceedances]}
        return result, rep.passed
    if np.iscomplexobj(x):
        raise UsageError("--x: conv and parseval checks need a real vector")
    t = it.conjugate_exponent(args.s) if args.t is None else args.t
    y, yorigin = _vector_or_random(args, args.y, x.shape[0], rng, t, "--y")
    if np.iscomplexobj(y):
        raise UsageError("--y: conv and parseval checks need a real vector")
    if args.check == "conv":
        rep = rp.convolution_identities_check(x, y, args.s, t)
    else:
        rep = rp.parseval_formulae_check(x, y, args.s, t)
    return {"x_origin": origin, "y_origin": yorigin, "x": x, "y": y, "t": t, "report": rep.as_dict()}, rep.passed


def cmd_cascade(args, rng):
    x, origin = _vector_or_random(args, args.x, args.n, rng, args.s)
    plan = it.build_cascade_plan(x.shape[0], args.depth, args.variant)
    F = it.ultra_interpolant(x, plan, args.s)
    s = args.s
    sup_side = F.sup_certificate if s <= 2 else F.m_certificate
    result = {"x_origin": origin, "x": x, "series": F.as_dict(),
              "level_decay": it.level_decay(s) if s < math.inf else None,
              "certificate_vs_bound": {"measured": sup_side, "bound": F.stated_bound,
                                       "norm": "sup" if s <= 2 else "M"}}
    passed = sup_side <= F.stated_bound * (1 + 1e-9) + 1e-12
    if args.pair is not None:
        t = it.conjugate_exponent(s)
        if args.pair == "random":
            y = rng.standard_normal(x.shape[0])
            y = y / rp.vector_norm(y, t)
            yorigin = "random unit (seeded)"
        else:
            y, yorigin = parse_vector(args.pair, "--pair"), "given"
            if y.shape != x.shape:
                raise UsageError("--pair: length differs from x")
        G = it.ultra_interpolant(y, plan, t)
        value, bound = it.pairing(F, G)
        residual = abs(value - complex(np.dot(x, y)))
        J = plan.depth
        result["pair"] = {"y_origin": yorigin, "y": y, "t": t, "value": value, "x_dot_y": complex(np.dot(x, y)),
                          "residual": residual, "residual_bound": bound,
                          "unit_bound": it._tail_decay(s, J) * it._tail_decay(t, J),
                          "levels_realised": len(plan.levels), "terminated": plan.terminated}
        passed &= residual <= bound * (1 + 1e-9) + 1e-12
    return result, passed


def cmd_uniformize(args, rng):
    x, origin = _vector_or_random(args, args.x, args.n, rng)
    if args.p is None:
        rep = it.uniformize(x, args.delta, kappa_hat=args.kappa, seed=args.seed, samples=args.samples)
    else:
        rep = it.uniformize_lambda_p(x, args.delta, args.p, kappa2_hat=args.kappa)
    return {"x_origin": origin, "x": x, "report": rep.as_dict()}, not rep.hard_failures


def cmd_norms(args, rng):
    a = parse_matrix(args.matrix)
    result = {"shape": list(a.shape)}
    real = not np.iscomplexobj(a)
    if args.mode == "real" and not real:
        raise UsageError("--mode real given a complex matrix; use --mode complex")
    if args.mode == "real":
        result["injective_real"] = tn.injective_norm_real(a).as_dict()
    else:
        result["injective_complex"] = tn.injective_norm_complex(a, args.restarts, args.seed).as_dict()
    passed = True
    if args.report == "littlewood":
        result["littlewood"] = tn.littlewood_orlicz_report(a, args.seed).as_dict()
        passed = result["littlewood"]["O"] <= result["littlewood"]["L"] * (1 + 1e-12)
    elif args.report in ("grothendieck", "quadratic"):
        if not real:
            raise UsageError(f"--report {args.report} needs a real matrix")
        fn = tn.grothendieck_ratio if args.report == "grothendieck" else tn.quadratic_ratio
        r = fn(a, args.dim, args.restarts, args.seed)
        result[args.report] = r.as_dict()
        if args.report == "grothendieck" and r.ratio is not None:
            passed = r.ratio >= 1 - 1e-9
    return result, passed


def cmd_verify_all(args, rng):
    rows = verify.run_all(args.max_n, args.seed, args.trials)
    table = verify.rows_as_dicts(rows)
    width = max(len(r.tag) for r in rows)
    for r in rows:
        print(f"{r.tag:<{width}}  {'PASS' if r.passed else 'FAIL'}  cases={r.cases:<5d} worst={r.worst:.4g}  {r.detail}",
              file=sys.stderr)
    return {"table": table}, all(r.passed for r in rows), table


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="64-bit seed for all randomness")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--no-timestamp", action="store_true", help="omit the timestamp field")

    p = argparse.ArgumentParser(prog="wgl", description="Walsh analysis, Riesz-product interpolants and bilinear norms.")
    sub = p.add_subparsers(dest="command", required=True)

    f = sub.add_parser("fwht", parents=[common], help="Walsh transform of a vector")
    f.add_argument("--x", required=True, help="inline comma list or JSON file")
    f.add_argument("--inverse", action="store_true", help="treat input as coefficients")

    r = sub.add_parser("riesz", parents=[common], help="Q/P interpolants and their checks")
    r.add_argument("--n", type=int)
    r.add_argument("--x")
    r.add_argument("--y", help="second vector for conv/parseval")
    r.add_argument("--kind", choices=("Q", "P"), default="Q")
    r.add_argument("--epsilon", type=float, default=1.0)
    r.add_argument("--s", type=parse_exponent, default=2.0)
    r.add_argument("--t", type=parse_exponent, help="exponent for y (default: conjugate of s)")
    r.add_argument("--check", choices=("bounds", "conv", "parseval"), default="bounds")

    c = sub.add_parser("cascade", parents=[common], help="truncated cascade interpolant and pairing")
    c.add_argument("--n", type=int)
    c.add_argument("--depth", type=int, default=3)
    c.add_argument("--variant", choices=("odd", "full"), default="odd")
    c.add_argument("--s", type=parse_exponent, default=2.0)
    c.add_argument("--x")
    c.add_argument("--pair", nargs="?", const="random", help="pair with y (file/inline; random unit if omitted)")

    u = sub.add_parser("uniformize", parents=[common], help="truncation uniformizer")
    u.add_argument("--n", type=int, default=10)
    u.add_argument("--x")
    u.add_argument("--delta", type=float, required=True)
    u.add_argument("--p", type=float, help="use the L^2 -> L^p variant with this p > 2")
    u.add_argument("--kappa", type=float, help="override the sampled constant")
    u.add_argument("--samples", type=int, default=10_000)

    m = sub.add_parser("norms", parents=[common], help="bilinear-form norms of a matrix")
    m.add_argument("--matrix", required=True, help="CSV (re or re:im cells) or JSON")
    m.add_argument("--mode", choices=("real", "complex"), default="real")
    m.add_argument("--dim", type=int, default=2)
    m.add_argument("--restarts", type=int, default=32)
    m.add_argument("--report", choices=("littlewood", "grothendieck", "quadratic"))

    v = sub.add_parser("verify-all", parents=[common], help="run the invariant suite")
    v.add_argument("--max-n", type=int, default=8)
    v.add_argument("--trials", type=int, default=20)
    return p


COMMANDS = {"fwht": cmd_fwht, "riesz": cmd_riesz, "cascade": cmd_cascade, "uniformize": cmd_uniformize,
            "norms": cmd_norms, "verify-all": cmd_verify_all}


def run(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    opts = {k: v for k, v in vars(args).items() if k not in ("command", "seed", "format", "no_timestamp")}
    cfg = RunConfig(args.command, args.seed, args.format, opts)
    rng = np.random.default_rng(args.seed)
    try:
        res = COMMANDS[args.command](args, rng)
        result, passed = res[0], res[1]
        table = res[2] if len(res) > 2 else None
        return emit(cfg, result, bool(passed), not args.no_timestamp, out, table)
    except UsageError as exc:
        print(f"wgl {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except (dc.DomainError, ValueError) as exc:
        print(f"wgl {args.command}: error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()

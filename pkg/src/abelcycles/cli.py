"""Command-line interface.

Exit codes: 0 success, 2 usage or domain error, 3 numerical failure,
4 degenerate input, 5 verification mismatch.
"""
from __future__ import annotations

import argparse
import io
import math
import sys
from dataclasses import dataclass, field

import numpy as np

from .cycles import distribution, lambda_bands
from .detection import DEFAULT_TOL, abelian_integral, default_grid, detection_curve
from .exceptions import DegenerateError, DomainError, IntegrationError, QuadratureError
from .hamiltonian import OrbitFamily, SystemParams, classify_level, singular_points
from .oracle import DEFAULT_EPSILON, DEFAULT_ODE_TOL, verify_prediction

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERICAL = 3
EXIT_DEGENERATE = 4
EXIT_MISMATCH = 5

_FLOAT_KEYS = ("a", "b", "u", "v", "tol", "ode_tol", "epsilon")
_INT_KEYS = ("n", "mu", "beta")


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    params: SystemParams = field(default_factory=SystemParams)
    tol: float = DEFAULT_TOL
    ode_tol: float = DEFAULT_ODE_TOL
    output_path: str | None = None
    rho_scale: bool = False


def parse_config_text(text: str) -> dict:
    """Parse flat ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"config line {lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in _FLOAT_KEYS + _INT_KEYS:
            raise UsageError(f"config line {lineno}: unknown key {key!r}")
        try:
            out[key] = int(value) if key in _INT_KEYS else float(value)
        except ValueError:
            raise UsageError(f"config line {lineno}: bad value {value!r} for {key}") from None
    return out


def build_config(args: argparse.Namespace) -> RunConfig:
    values = {}
    if getattr(args, "config", None):
        try:
            with open(args.config, encoding="utf-8") as fh:
                values.update(parse_config_text(fh.read()))
        except OSError as exc:
            raise UsageError(f"cannot read config: {exc}") from None
    for key in _FLOAT_KEYS + _INT_KEYS:
        val = getattr(args, key, None)
        if val is not None:
            values[key] = val
    tol = values.pop("tol", DEFAULT_TOL)
    ode_tol = values.pop("ode_tol", DEFAULT_ODE_TOL)
    if tol <= 0 or ode_tol <= 0:
        raise DomainError("tolerances must be positive")
    if "n" in values and "mu" not in values and "beta" not in values:
        values["mu"] = values["n"] // 2
        values["beta"] = values["n"] - values["mu"]
    elif "mu" in values and "beta" not in values:
        values["beta"] = values.get("n", 12) - values["mu"]
    elif "beta" in values and "mu" not in values:
        values["mu"] = values.get("n", 12) - values["beta"]
    values.pop("epsilon", None)
    params = SystemParams(**values)
    return RunConfig(params, tol, ode_tol, getattr(args, "out", None),
                     bool(getattr(args, "rho_scale", False)))


def fmt(x: float) -> str:
    """Shortest text of at most 17 significant digits that round-trips."""
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    s = repr(float(x))
    s = s[:-2] if s.endswith(".0") else s
    return "0" if s == "-0" else s


def _emit(text: str, path: str | None):
    if path in (None, "-"):
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _grid(args, family: OrbitFamily, params: SystemParams) -> np.ndarray:
    given = [args.h_start, args.h_end, args.step]
    if all(g is None for g in given):
        return default_grid(family, params)
    if any(g is None for g in given):
        raise UsageError("--h-start, --h-end and --step go together")
    if args.step <= 0 or args.h_end < args.h_start:
        raise UsageError("need --step > 0 and --h-end >= --h-start")
    count = int(round((args.h_end - args.h_start) / args.step))
    grid = args.h_start + args.step * np.arange(count + 1)
    lo, hi = family.h_range(params)
    bad = [h for h in grid if not lo <= h <= hi]
    if bad:
        raise DomainError(f"h={bad[0]:g} outside the valid interval ({lo:g}, {hi:g}) for {family.label}")
    return grid


def table_csv(curve, scaled: bool = False) -> str:
    buf = io.StringIO()
    if scaled:
        buf.write("h,cu_rho,cv_omega\n")
        for h, cu, cv, _ in curve.to_rows(scaled=True):
            buf.write(f"{fmt(h)},{fmt(cu)},{fmt(cv)}\n")
    else:
        buf.write("h,cu,cv,area\n")
        for h, cu, cv, area in curve.to_rows():
            buf.write(f"{fmt(h)},{fmt(cu)},{fmt(cv)},{fmt(area)}\n")
    return buf.getvalue()


def read_table_csv(text: str) -> list[tuple[float, ...]]:
    lines = text.strip("\n").split("\n")
    return [tuple(float(c) for c in line.split(",")) for line in lines[1:]]


def _all_curves(cfg: RunConfig) -> dict:
    p = cfg.params
    return {fam: detection_curve(fam, default_grid(fam, p), p, cfg.tol) for fam in OrbitFamily}


def _probe(lo: float, hi: float) -> float:
    if math.isinf(lo):
        return hi - 1.0
    if math.isinf(hi):
        return lo + 1.0
    return 0.5 * (lo + hi)


def cmd_singular(args, cfg: RunConfig) -> int:
    def coord(v):
        s = f"{v:.6f}".rstrip("0").rstrip(".")
        return "0" if s in ("-0", "") else s

    lines = [f"{pt.label}, {coord(pt.x)}, {coord(pt.y)}, {pt.kind}, {pt.energy:.6f}\n"
             for pt in singular_points(cfg.params)]
    _emit("".join(lines), None)
    return EXIT_OK


def cmd_classify(args, cfg: RunConfig) -> int:
    lc = classify_level(args.h, cfg.params)
    fams = ",".join(f.label for f in sorted(lc.families, key=lambda f: f.value)) or "none"
    _emit(f"h: {fmt(args.h)}\nfamilies: {fams}\nboundary: {lc.boundary or 'none'}\n", None)
    return EXIT_OK


def cmd_table(args, cfg: RunConfig) -> int:
    family = OrbitFamily.coerce(args.family)
    curve = detection_curve(family, _grid(args, family, cfg.params), cfg.params, cfg.tol)
    _emit(table_csv(curve, cfg.rho_scale), cfg.output_path)
    return EXIT_OK


def bands_report(cfg: RunConfig) -> str:
    p = cfg.params
    curves = _all_curves(cfg)
    bands = lambda_bands(p, curves)
    out = []
    for i, band in enumerate(bands, 1):
        rep = distribution(_probe(band.lo, band.hi), p, curves, bands=bands)
        out.append(f"band: {i}\n")
        out.append(f"lambda_lo: {fmt(band.lo)}\nlambda_hi: {fmt(band.hi)}\n")
        for fam in OrbitFamily:
            k = band.pattern.get(fam, 0)
            out.append(f"{fam.label}: {k}x{fam.multiplicity}\n")
        out.append(f"total: {band.total}\n")
        tags = ",".join(f"{f.family.label}@{f.h_root:.6g}={f.stability}" for f in rep.findings)
        out.append(f"stability: {tags or 'none'}\n\n")
    return "".join(out)


def cmd_bands(args, cfg: RunConfig) -> int:
    _emit(bands_report(cfg), cfg.output_path)
    return EXIT_OK


def distribution_report(cfg: RunConfig, lambda0: float) -> str:
    p = cfg.params
    rep = distribution(lambda0, p, _all_curves(cfg))
    out = [f"lambda0: {fmt(lambda0)}\ntotal: {rep.total}\n"]
    if rep.band:
        out.append(f"band: {fmt(rep.band.lo)} {fmt(rep.band.hi)}\n")
    for t in rep.tangencies:
        out.append(f"tangency: {t.family.label} h={fmt(t.h)}\n")
    out.append("\n")
    for f in rep.findings:
        out.append(
            f"family: {f.family.label}\nh_root: {fmt(f.h_root)}\nslope: {fmt(f.slope)}\n"
            f"stability: {f.stability}\ncount: {f.count}\n"
            f"near_critical: {str(f.near_critical).lower()}\n\n"
        )
    return "".join(out)


def cmd_distribution(args, cfg: RunConfig) -> int:
    _emit(distribution_report(cfg, args.lambda0), cfg.output_path)
    return EXIT_OK


def cmd_verify(args, cfg: RunConfig) -> int:
    if args.epsilon == 0:
        raise DomainError("degenerate: epsilon=0, every orbit is closed")
    p = cfg.params
    rep = distribution(args.lambda0, p, _all_curves(cfg))
    findings = rep.findings
    if args.family is not None:
        fam = OrbitFamily.coerce(args.family)
        findings = [f for f in findings if f.family is fam]
    out = [f"lambda0: {fmt(args.lambda0)}\nepsilon: {fmt(args.epsilon)}\n"]
    if not findings:
        out.append("no findings\n")
        _emit("".join(out), cfg.output_path)
        return EXIT_OK
    out.append("\n")
    status = EXIT_OK
    for f in findings:
        rec = verify_prediction(f, p, args.epsilon, cfg.ode_tol)
        out.append(f"family: {f.family.label}\nh_root: {fmt(f.h_root)}\n")
        out.append(f"predicted: {rec.predicted_stability}\n")
        if rec.ok:
            out.append(
                f"h_star: {fmt(rec.h_star)}\nh_error: {fmt(rec.h_error)}\n"
                f"derivative: {fmt(rec.derivative)}\nobserved: {rec.observed_stability}\n"
            )
        out.append(f"result: {rec.message}\n\n")
        if not rec.stability_agrees:
            status = EXIT_MISMATCH
    _emit("".join(out), cfg.output_path)
    return status


def cmd_abelian(args, cfg: RunConfig) -> int:
    p = cfg.params.replace(lambda0=args.lambda0)
    value = abelian_integral(args.family, args.h, p, cfg.tol)
    _emit(f"{fmt(value)}\n", None)
    return EXIT_OK


def _common() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("model")
    g.add_argument("--config", default=argparse.SUPPRESS, help="flat key = value file")
    for key in ("a", "b", "u", "v", "tol"):
        g.add_argument(f"--{key}", type=float, default=argparse.SUPPRESS)
    for key in _INT_KEYS:
        g.add_argument(f"--{key}", type=int, default=argparse.SUPPRESS)
    g.add_argument("--ode-tol", dest="ode_tol", type=float, default=argparse.SUPPRESS)
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="abelcycles", parents=[common],
                                     description="Limit cycles from detection functions.")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("singular", parents=[common], help="list the equilibria")
    s = sub.add_parser("classify", parents=[common], help="orbit families at an energy")
    s.add_argument("--h", type=float, required=True)
    for name in ("table", "curve"):
        s = sub.add_parser(name, parents=[common], help="sample a detection curve as CSV")
        s.add_argument("--family", type=int, choices=range(1, 5), required=True)
        s.add_argument("--h-start", type=float)
        s.add_argument("--h-end", type=float)
        s.add_argument("--step", type=float)
        s.add_argument("--paper-scale", dest="rho_scale", action="store_true",
                       help="divide Gamma1, 3, 4 coefficients by 1e4 (rho, omega units)")
        s.add_argument("--out")
    s = sub.add_parser("bands", parents=[common], help="lambda bands of constant pattern")
    s.add_argument("--out")
    s = sub.add_parser("distribution", parents=[common], help="cycles at one lambda0")
    s.add_argument("--lambda", dest="lambda0", type=float, required=True)
    s.add_argument("--out")
    s = sub.add_parser("verify", parents=[common], help="confirm findings by simulation")
    s.add_argument("--lambda", dest="lambda0", type=float, required=True)
    s.add_argument("--epsilon", type=float, default=DEFAULT_EPSILON)
    s.add_argument("--family", type=int, choices=range(1, 5))
    s.add_argument("--out")
    s = sub.add_parser("abelian", parents=[common], help="A(h) for one family")
    s.add_argument("--family", type=int, choices=range(1, 5), required=True)
    s.add_argument("--h", type=float, required=True)
    s.add_argument("--lambda", dest="lambda0", type=float, required=True)
    return parser


COMMANDS = {
    "singular": cmd_singular,
    "classify": cmd_classify,
    "table": cmd_table,
    "curve": cmd_table,
    "bands": cmd_bands,
    "distribution": cmd_distribution,
    "verify": cmd_verify,
    "abelian": cmd_abelian,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        cfg = build_config(args)
        return COMMANDS[args.command](args, cfg)
    except DegenerateError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except (DomainError, UsageError, ValueError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (QuadratureError, IntegrationError, ArithmeticError) as exc:
        print(f"numerical failure in {args.command}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

"""Command-line front end: boundary sweeps, cheating simulations and Gaussian checks.

Exit codes: 0 on success, 1 on domain errors, 2 on usage errors. Data goes
to stdout (or ``--output``); diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import boundaries as bd
from . import gaussian as gs
from . import lhs_sim

# relative --output paths are resolved against this directory when it is set
OUTPUT_DIR_ENV = "STEERING_HIERARCHY_OUTPUT_DIR"
SIG_DIGITS = 9

CSV_COLUMNS = ("param", "eta_ent", "eta_steer", "eta_steer_kind", "eta_bell_lower", "eta_bell_upper")
INTEGER_FAMILIES = ("werner", "isotropic")


class UsageError(Exception):
    pass


def fmt(x) -> str:
    """Real number with 9 significant digits; empty string for None."""
    if x is None:
        return ""
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    return f"{float(x):.{SIG_DIGITS}g}"


def _round(obj):
    """Recursively round floats to 9 significant digits for JSON output."""
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if not math.isfinite(x) else float(f"{x:.{SIG_DIGITS}g}")
    if isinstance(obj, dict):
        return {k: _round(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _round(obj.tolist())
    return obj


def dumps(obj) -> str:
    return json.dumps(_round(obj), indent=2, allow_nan=True)


def parse_grid(text: str, integer: bool) -> list:
    """``start:stop:count`` (inclusive linspace) or a comma list."""
    try:
        if ":" in text:
            parts = text.split(":")
            if len(parts) != 3:
                raise UsageError(f"grid range must be start:stop:count, got {text!r}")
            count = int(parts[2])
            if count < 1:
                raise UsageError("grid count must be positive")
            if integer:
                start, stop = int(parts[0]), int(parts[1])
                values = np.linspace(start, stop, count)
                if not np.allclose(values, np.round(values)):
                    raise UsageError(f"grid {text!r} does not land on integers")
                grid = [int(round(v)) for v in values]
            else:
                grid = [float(v) for v in np.linspace(float(parts[0]), float(parts[1]), count)]
        else:
            items = [s.strip() for s in text.split(",") if s.strip()]
            grid = [int(s) for s in items] if integer else [float(s) for s in items]
    except ValueError as exc:
        raise UsageError(f"bad grid {text!r}: {exc}") from None
    if not grid:
        raise UsageError("empty grid")
    return grid


def _resolve_output(path):
    if path is None:
        return None
    p = Path(path)
    base = os.environ.get(OUTPUT_DIR_ENV)
    if base and not p.is_absolute():
        p = Path(base) / p
    return p


def _emit(text: str, output):
    path = _resolve_output(output)
    if path is None:
        sys.stdout.write(text)
        return
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8", newline="")


def _report_row(report: bd.BoundaryReport) -> dict:
    param = next(iter(report.params.values()))
    return {
        "param": param,
        "eta_ent": report.eta_ent,
        "eta_steer": report.eta_steer,
        "eta_steer_kind": report.eta_steer_kind,
        "eta_bell_lower": report.eta_bell_lower,
        "eta_bell_upper": report.eta_bell_upper,
    }


def cmd_boundary(args) -> int:
    family = args.family.replace("-", "_")
    grid = parse_grid(args.grid, integer=family in INTEGER_FAMILIES)
    rows = [_report_row(bd.boundaries(family, value)) for value in grid]
    if args.format == "json":
        text = dumps(rows) + "\n"
    else:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for row in rows:
            writer.writerow([row["eta_steer_kind"] if c == "eta_steer_kind" else fmt(row[c]) for c in CSV_COLUMNS])
        text = buf.getvalue()
    _emit(text, args.output)
    return 0


def cmd_simulate(args) -> int:
    if args.family == "inept":
        if args.epsilon is None:
            raise UsageError("inept simulation needs --epsilon")
        outcome = lhs_sim.inept_cheat_simulation(args.epsilon, args.eta, args.shots, args.seed, args.workers)
        params = {"epsilon": args.epsilon, "eta": args.eta}
    else:
        if args.d is None:
            raise UsageError(f"{args.family} simulation needs --d")
        outcome = lhs_sim.steering_verdict(args.family, args.d, args.eta, args.shots, args.seed, args.workers)
        params = {"d": args.d, "eta": args.eta}
    record = {"family": args.family, "params": params, "seed": args.seed, **outcome.as_dict()}
    sys.stdout.write(dumps(record) + "\n")
    return 0


def load_cm(path) -> gs.CovarianceMatrix:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"malformed JSON in {path}: {exc}") from None
    if not isinstance(data, dict) or not {"n_modes_a", "n_modes_b", "matrix"} <= data.keys():
        raise UsageError("covariance file needs keys n_modes_a, n_modes_b, matrix")
    try:
        return gs.CovarianceMatrix.from_json_dict(data)
    except (ValueError, gs.InvalidCovarianceError) as exc:
        raise UsageError(f"bad covariance matrix: {exc}") from None


def cmd_gaussian(args) -> int:
    v = load_cm(args.cm)
    if not gs.is_valid_cm(v):
        raise gs.InvalidCovarianceError("invalid covariance matrix: V + i Sigma is not positive semidefinite")
    if args.action == "check":
        params = gs.standard_form_params(v)
        record = {
            "valid": True,
            "separable": gs.is_separable_two_mode(v) if (v.n_modes_a, v.n_modes_b) == (1, 1) else None,
            "steerable": gs.is_steerable_gaussian(v),
            "reid_product": gs.reid_epr_product(v) if params is not None else None,
        }
    elif args.action == "witness":
        t = gs.steering_witness_measurement(v)
        record = {"measurement": t.t, "schur_min_eigenvalue": gs.min_eigenvalue(gs.witness_schur_matrix(v, t))}
        if args.certificate:
            cert = gs.steering_certificate(v)
            record["certificate"] = {
                "x": cert.x,
                "y": cert.y,
                "measurements": [m.t for m in cert.measurements],
                "margin": cert.margin,
            }
    else:
        record = {"ensemble_cm": gs.non_steering_ensemble_cm(v)}
    sys.stdout.write(dumps(record) + "\n")
    return 0


def _positive_int(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="steering-hierarchy",
        description="Entanglement, steering and Bell-nonlocality boundaries for standard state families.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("boundary", help="tabulate boundaries over a parameter grid")
    p.add_argument("family", choices=["werner", "isotropic", "inept", "gaussian-symmetric"])
    p.add_argument("--grid", required=True, help="start:stop:count or a comma-separated list")
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--output", help=f"output file (relative paths resolve against ${OUTPUT_DIR_ENV} if set)")
    p.set_defaults(func=cmd_boundary)

    p = sub.add_parser("simulate", help="run a cheating-ensemble Monte Carlo")
    p.add_argument("family", choices=["werner", "isotropic", "inept"])
    p.add_argument("--d", type=int)
    p.add_argument("--epsilon", type=float)
    p.add_argument("--eta", type=float, required=True)
    p.add_argument("--shots", type=int, default=1_000_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=_positive_int, default=None)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("gaussian", help="covariance-matrix tests")
    p.add_argument("action", choices=["check", "witness", "ensemble"])
    p.add_argument("--cm", required=True, help="JSON file with n_modes_a, n_modes_b, matrix")
    p.add_argument("--certificate", action="store_true", help="witness: also print a two-measurement certificate")
    p.set_defaults(func=cmd_gaussian)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, ArithmeticError, RuntimeError, np.linalg.LinAlgError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

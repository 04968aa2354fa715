"""Command-line interface.

Exit codes: 0 on success, 1 when the input is invalid, 2 when the
computation finished (or broke down) with numerical warnings.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from functools import partial
from pathlib import Path

import numpy as np

from .base import LocalPatch
from .checks import (
    COARSE_STEP,
    DEFAULT_NEG_TOL,
    FINE_STEP,
    SpaceFamily,
    check_partition_of_unity,
    critical_length_scan,
    critical_length_scan_mdtb,
    refine_critical_length,
)
from .config import load_config
from .errors import MDTBError, NumericalError
from .mdtb_patch import MDTSpaceSpec, curve_eval, dimension, extract, knot_vectors
from .reproduce import EXAMPLES, reproduce, write_json, write_rows
from .tb_patch import MultiPatch, sample_basis

EXIT_OK, EXIT_INVALID, EXIT_NUMERICAL = 0, 1, 2

log = logging.getLogger("mdtbspline.cli")


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _load(args):
    if not args.config:
        raise MDTBError("--config is required for this command")
    return load_config(args.config, args.rcond_threshold)


def _as_patch(obj) -> LocalPatch:
    return MultiPatch(obj) if isinstance(obj, MDTSpaceSpec) else obj


def _warn_code(warnings) -> int:
    if warnings:
        for w in warnings:
            print(f"warning: {w.context}: rcond={w.rcond:.3e}", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


def describe(obj) -> dict:
    if isinstance(obj, MDTSpaceSpec):
        u, v = knot_vectors(obj)
        d = {
            "breaks": list(obj.breaks),
            "degrees": list(obj.degrees),
            "smoothness": list(obj.smoothness),
            "kinds": [p.kind for p in obj.patches],
            "dimension": dimension(obj),
            "knots": {"u": u.tolist(), "v": v.tolist()},
        }
        if obj.periodic is not None:
            d["periodic"] = {"r": obj.periodic}
        return d
    return {
        "kind": obj.kind,
        "degree": obj.degree,
        "dimension": obj.dimension,
        "interval": list(obj.interval),
        "warnings": len(obj.warnings),
    }


def cmd_space(args) -> int:
    obj = _load(args)
    if args.action == "validate":
        print(f"ok: dimension {describe(obj)['dimension']}")
    else:
        print(json.dumps(describe(obj), indent=2))
    warnings = obj.warnings if isinstance(obj, LocalPatch) else [w for p in obj.patches for w in p.warnings]
    return _warn_code(warnings)


def cmd_eval(args) -> int:
    patch = _as_patch(_load(args))
    out = _out_dir(args)
    if args.points:
        x = np.array([float(v) for v in args.points.split(",")])
        values = patch.eval_all(x, args.deriv)
        prefix = "N" if isinstance(patch, MultiPatch) else "B"
        header = ["x", *(f"{prefix}_{k + 1}" for k in range(patch.dimension))]
        files = [write_rows(out / f"{args.name}_d{d}.csv", header, np.column_stack([x, values[d].T]))
                 for d in range(args.deriv + 1)]
    else:
        files = sample_basis(patch, args.grid, args.deriv).write_all(out, args.name)
    for f in files:
        print(f)
    return _warn_code(patch.warnings)


def cmd_extract(args) -> int:
    space = _load(args)
    if not isinstance(space, MDTSpaceSpec):
        raise MDTBError("extract needs a spline space configuration")
    out = _out_dir(args)
    H = extract(space)
    H.write_matrix_market(out / "H.mtx")
    write_json(out / "H.json", H.to_dict())
    u, v = knot_vectors(space)
    write_json(out / "knots.json", {"u": u.tolist(), "v": v.tolist()})
    report = check_partition_of_unity(space, args.grid, H)
    write_json(out / "extraction_report.json", report.to_dict())
    print(f"H: {H.shape[0]} x {H.shape[1]}, column-sum deviation {report.h_column_sum_deviation:.3e}")
    return _warn_code(report.warnings)


def _read_points(path) -> np.ndarray:
    path = Path(path)
    if path.suffix == ".json":
        return np.asarray(json.loads(path.read_text()), dtype=float)
    return np.loadtxt(path, delimiter=",", ndmin=2)


def cmd_curve(args) -> int:
    space = _load(args)
    if not isinstance(space, MDTSpaceSpec):
        raise MDTBError("curve needs a spline space configuration")
    H = extract(space)
    P = _read_points(args.control_points)
    x = np.linspace(*space.interval, args.grid)
    pts = curve_eval(space, H, P, x)
    out = _out_dir(args)
    header = ["x", *("XYZW"[k] if k < 4 else f"c{k}" for k in range(pts.shape[1]))]
    print(write_rows(out / f"{args.name}.csv", header, np.column_stack([x, pts])))
    return _warn_code([w for p in space.patches for w in p.warnings])


def cmd_check_pou(args) -> int:
    report = check_partition_of_unity(_load(args), args.grid)
    text = report.to_json()
    print(text)
    if args.out:
        write_json(_out_dir(args) / "check_report.json", report.to_dict())
    return _warn_code(report.warnings)


def cmd_critical_length(args) -> int:
    if not args.config:
        raise MDTBError("--config is required for this command")
    desc = json.loads(Path(args.config).read_text())
    family = SpaceFamily(
        desc["kind"], int(desc["p"]), float(desc.get("shape", 0.0)),
        tuple(tuple(r) for r in desc.get("roots", ())),
    )
    if "m" in desc:
        scan = partial(critical_length_scan_mdtb, family, int(desc["m"]), int(desc.get("r", 0)))
    else:
        scan = partial(critical_length_scan, family)
    scan = partial(scan, neg_tol=args.neg_tol, grid_size=args.grid, strict=args.strict)
    est = refine_critical_length(scan, args.upper, args.coarse, args.fine)
    data = est.to_dict()
    data.pop("grid")
    print(json.dumps(data, indent=2))
    if args.out:
        write_json(_out_dir(args) / "critical_length.json", est.to_dict())
    return EXIT_OK if est.reliable else EXIT_NUMERICAL


def cmd_reproduce(args) -> int:
    res = reproduce(args.example, args.out or ".", args.grid)
    for f in res.files:
        print(f)
    return _warn_code(res.report.warnings if res.report else [])


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mdtb", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON space description")
    common.add_argument("--out", help="output directory")
    common.add_argument("--grid", type=int, default=501, help="number of sample points")
    common.add_argument("--rcond-threshold", type=float, default=None,
                        help="flag solves with a smaller reciprocal condition number")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("space", parents=[common], help="validate or describe a space")
    p.add_argument("action", choices=["validate", "show"])
    p.set_defaults(func=cmd_space)

    p = sub.add_parser("eval", parents=[common], help="evaluate a basis to CSV")
    p.add_argument("--points", help="comma separated points (default: uniform grid)")
    p.add_argument("--deriv", type=int, default=0)
    p.add_argument("--name", default="basis")
    p.set_defaults(func=cmd_eval, out=".")

    p = sub.add_parser("extract", parents=[common], help="write the extraction matrix")
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("curve", parents=[common], help="evaluate a spline curve")
    p.add_argument("--control-points", required=True, help="JSON or CSV file, one point per row")
    p.add_argument("--name", default="curve")
    p.set_defaults(func=cmd_curve)

    p = sub.add_parser("check-pou", parents=[common], help="partition-of-unity check")
    p.set_defaults(func=cmd_check_pou)

    p = sub.add_parser("critical-length", parents=[common], help="scan for the critical length")
    p.add_argument("--upper", type=float, default=16.0, help="largest length scanned")
    p.add_argument("--coarse", type=float, default=COARSE_STEP)
    p.add_argument("--fine", type=float, default=FINE_STEP)
    p.add_argument("--neg-tol", type=float, default=DEFAULT_NEG_TOL)
    p.add_argument("--strict", action="store_true", help="fail on unstable lengths")
    p.set_defaults(func=cmd_critical_length)

    p = sub.add_parser("reproduce", parents=[common], help="reproduce a worked example")
    p.add_argument("example", choices=EXAMPLES)
    p.set_defaults(func=cmd_reproduce)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.ERROR,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.command in ("extract", "curve") and not args.out:
        args.out = "."
    try:
        return args.func(args)
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (MDTBError, ValueError, KeyError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())

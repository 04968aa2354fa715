"""One-command reproduction of the worked examples.

Every writer below is deterministic: same inputs, byte-identical files.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from functools import partial
from pathlib import Path

import numpy as np

from .checks import (
    CheckReport,
    SpaceFamily,
    check_partition_of_unity,
    critical_length_scan,
    critical_length_scan_mdtb,
    refine_critical_length,
)
from .ect_space import TchebPatch, null_space
from .errors import NumericalError, UnknownExample
from .gallery import (
    CRITICAL_LENGTHS_GT,
    SQUARE_CONTROL_POINTS,
    mixed_space,
    rounded_square,
    rounded_square_space,
    trig_mixed_roots,
    w_space,
)
from .mdtb_patch import curve_eval, extraction, extraction_periodic, knot_vectors
from .special_spaces import GenPolyParams, GenPolyPatch
from .tb_patch import sample_basis, sample_space

EXAMPLES = (
    "basis_A",
    "basis_B",
    "instability_A",
    "instability_B",
    "critical_length_A",
    "critical_length_B",
    "critical_length_C",
)


@dataclass
class ReproduceResult:
    example: str
    files: list[Path] = field(default_factory=list)
    report: CheckReport | None = None
    details: dict = field(default_factory=dict)

    @property
    def has_warnings(self) -> bool:
        return self.report is not None and self.report.has_warnings


def write_json(path: Path, data) -> Path:
    path.write_text(json.dumps(data, indent=2, sort_keys=True) + "\n")
    return path


def write_rows(path: Path, header, rows) -> Path:
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([repr(float(v)) for v in row])
    return path


def _basis_A(out: Path, grid: int) -> ReproduceResult:
    res = ReproduceResult("basis_A")
    space = mixed_space()
    H = extraction(space)
    Hp = extraction_periodic(space, 2)
    res.files += sample_space(space, H, grid).write_all(out, "basis_A_nonperiodic")
    res.files += sample_space(space, Hp, grid).write_all(out, "basis_A_periodic")
    H.write_matrix_market(out / "basis_A_H.mtx")
    Hp.write_matrix_market(out / "basis_A_H_periodic.mtx")
    res.files += [out / "basis_A_H.mtx", out / "basis_A_H_periodic.mtx"]
    u, v = knot_vectors(space)
    res.files.append(write_json(out / "basis_A_knots.json", {"u": u.tolist(), "v": v.tolist()}))
    res.report = check_partition_of_unity(space, grid, H)
    periodic = check_partition_of_unity(space, grid, Hp)
    res.details = {
        "dimension": H.shape[0],
        "periodic_dimension": Hp.shape[0],
        "nonperiodic": res.report.to_dict(),
        "periodic": periodic.to_dict(),
    }
    res.files.append(write_json(out / "basis_A_report.json", res.details))
    return res


def _basis_B(out: Path, grid: int) -> ReproduceResult:
    res = ReproduceResult("basis_B")
    cases = {}
    for s in (-2, -1, 0, 1):
        ell = 4.0**s
        space = rounded_square_space(ell)
        H = extraction_periodic(space)
        tag = f"basis_B_s{s:+d}"
        res.files += sample_space(space, H, grid).write_all(out, tag)
        x = np.linspace(*space.interval, grid)
        pts = curve_eval(space, H, SQUARE_CONTROL_POINTS, x)
        res.files.append(write_rows(out / f"{tag}_curve.csv", ["x", "X", "Y"],
                                    np.column_stack([x, pts])))
        # first piece is the arc around (-L ell, L ell)
        L = 1.0 / (2.0 + ell)
        arc = x <= np.pi / 2
        radius = np.hypot(pts[arc, 0] + L * ell, pts[arc, 1] - L * ell)
        report = check_partition_of_unity(space, grid, H)
        cases[tag] = {
            "ell": ell,
            "dimension": H.shape[0],
            "curve_error": float(np.abs(pts - rounded_square(x, ell)).max()),
            "corner_radius": 2 * L,
            "corner_radius_error": float(np.abs(radius - 2 * L).max()),
            "check": report.to_dict(),
        }
        if ell == 1.0:
            res.report = report
    res.details = cases
    res.files.append(write_json(out / "basis_B_report.json", cases))
    return res


def _instability_A(out: Path, grid: int) -> ReproduceResult:
    res = ReproduceResult("instability_A")
    warnings = []
    for p in (9, 10):
        patch = w_space(p)
        res.files += sample_basis(patch, grid).write_all(out, f"instability_A_p{p}")
        report = check_partition_of_unity(patch, grid)
        res.details[f"p{p}"] = report.to_dict()
        warnings += report.warnings
    res.report = CheckReport(
        max(d["max_pou_deviation"] for d in res.details.values()),
        min(d["min_basis_value"] for d in res.details.values()),
        warnings=warnings,
    )
    res.files.append(write_json(out / "instability_A_report.json", res.details))
    return res


def _instability_B(out: Path, grid: int) -> ReproduceResult:
    res = ReproduceResult("instability_B")
    params = GenPolyParams(10, 1.0 / 3.0)
    special = GenPolyPatch("gtrig", params, (0.0, 1.0))
    res.files += sample_basis(special, grid).write_all(out, "instability_B_gtrig")
    res.report = check_partition_of_unity(special, grid)
    res.details["gtrig"] = res.report.to_dict()
    try:
        generic = TchebPatch(null_space(10, [(0, 1.0 / 3.0, 1)], (0.0, 1.0)))
        res.files += sample_basis(generic, grid).write_all(out, "instability_B_tcheb")
        res.details["tcheb"] = check_partition_of_unity(generic, grid).to_dict()
    except NumericalError as exc:
        res.details["tcheb"] = {"error": str(exc)}
    res.files.append(write_json(out / "instability_B_report.json", res.details))
    return res


def _scan_summary(est) -> dict:
    return {
        "estimate": est.estimate,
        "first_failure": est.first_failure,
        "reliable": est.reliable,
        "neg_tol": est.neg_tol,
        "warnings": len(est.warnings),
    }


def _critical_length_A(out: Path, grid: int) -> ReproduceResult:
    res = ReproduceResult("critical_length_A")
    for p in range(2, 11):
        fam = SpaceFamily("gtrig", p, 1.0)
        est = refine_critical_length(partial(critical_length_scan, fam, grid_size=grid), 16.0)
        res.details[f"p{p}"] = {**_scan_summary(est), "reference": CRITICAL_LENGTHS_GT[p]}
    res.files.append(write_json(out / "critical_length_A.json", res.details))
    return res


def _critical_length_B(out: Path, grid: int) -> ReproduceResult:
    res = ReproduceResult("critical_length_B")
    for beta in (3.0, 4.0, 5.0, 6.0):
        fam = SpaceFamily("tcheb", 6, roots=trig_mixed_roots(beta))
        est = refine_critical_length(partial(critical_length_scan, fam, grid_size=grid), 5.0)
        res.details[f"beta{beta:g}"] = _scan_summary(est)
    res.files.append(write_json(out / "critical_length_B.json", res.details))
    return res


def _critical_length_C(out: Path, grid: int) -> ReproduceResult:
    res = ReproduceResult("critical_length_C")
    fam = SpaceFamily("tcheb", 6, roots=trig_mixed_roots(3.0))
    for m in (3, 5):
        for r in (0, 1):
            scan = partial(critical_length_scan_mdtb, fam, m, r, grid_size=grid)
            res.details[f"m{m}_r{r}"] = _scan_summary(refine_critical_length(scan, 5.0))
    res.files.append(write_json(out / "critical_length_C.json", res.details))
    return res


_RUNNERS = {
    "basis_A": _basis_A,
    "basis_B": _basis_B,
    "instability_A": _instability_A,
    "instability_B": _instability_B,
    "critical_length_A": _critical_length_A,
    "critical_length_B": _critical_length_B,
    "critical_length_C": _critical_length_C,
}


def reproduce(example_id: str, out_dir=".", grid_size: int = 501) -> ReproduceResult:
    """Run one example and write its samples and reports into ``out_dir``."""
    if example_id not in _RUNNERS:
        raise UnknownExample(f"unknown example {example_id!r}; choose from {', '.join(EXAMPLES)}")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return _RUNNERS[example_id](out, grid_size)

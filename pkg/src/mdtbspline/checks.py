"""Numerical sanity checks and critical-length scans."""

from __future__ import annotations

import json
import logging
from dataclasses import asdict, dataclass, field
from typing import Callable, NamedTuple

import numpy as np

from .base import ConditionRecord, LocalPatch
from .ect_space import TchebPatch, null_space
from .errors import DegenerateConstraint, SingularSystem, SpaceError, UnstableScan
from .mdtb_patch import ExtractionMatrix, MDTSpaceSpec, extract, mdtb_eval_all
from .special_spaces import GenPolyParams, GenPolyPatch, PolyPatch, PTypePatch

logger = logging.getLogger(__name__)

DEFAULT_NEG_TOL = -1e-8
DEFAULT_GRID = 501
COARSE_STEP = 0.1
FINE_STEP = 0.001


@dataclass
class CheckReport:
    max_pou_deviation: float
    min_basis_value: float
    h_column_sum_deviation: float | None = None
    h_entry_range: tuple[float, float] | None = None
    warnings: list[ConditionRecord] = field(default_factory=list)

    @property
    def has_warnings(self) -> bool:
        return bool(self.warnings)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["warnings"] = [{"context": w.context, "rcond": w.rcond} for w in self.warnings]
        if self.h_entry_range is not None:
            d["h_entry_range"] = list(self.h_entry_range)
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def _space_warnings(space: MDTSpaceSpec) -> list[ConditionRecord]:
    return [w for p in space.patches for w in p.warnings]


def check_partition_of_unity(obj, grid_size: int = DEFAULT_GRID, H=None) -> CheckReport:
    """Partition-of-unity and sign check on a uniform grid over the domain.

    ``obj`` is a local patch or a spline space; for the latter the column
    sums and entry range of the extraction operator are reported as well.
    """
    if isinstance(obj, MDTSpaceSpec):
        H = H if H is not None else extract(obj)
        if not isinstance(H, ExtractionMatrix):
            H = ExtractionMatrix(H)
        x = np.linspace(*obj.interval, grid_size)
        N = mdtb_eval_all(obj, H, x)[0]
        data = H.matrix.data
        return CheckReport(
            float(np.abs(1.0 - N.sum(axis=0)).max()),
            float(N.min()),
            float(np.abs(1.0 - H.column_sums()).max()),
            (float(data.min(initial=0.0)), float(data.max(initial=0.0))),
            _space_warnings(obj),
        )
    if not isinstance(obj, LocalPatch):
        raise TypeError(f"cannot check {type(obj).__name__}")
    x = np.linspace(*obj.interval, grid_size)
    B = obj.eval_all(x)[0]
    return CheckReport(
        float(np.abs(1.0 - B.sum(axis=0)).max()),
        float(B.min()),
        warnings=list(obj.warnings),
    )


# --------------------------------------------------------------------------
# critical length


@dataclass(frozen=True)
class SpaceFamily:
    """A local space on ``[0, l]`` for varying ``l``.

    ``kind`` is one of the local kinds; ``roots`` (nonzero roots) is used
    for ``tcheb``; ``shape`` for the exponential/trigonometric kinds.
    """

    kind: str
    p: int
    shape: float = 0.0
    roots: tuple = ()

    def build(self, a: float, b: float) -> LocalPatch:
        iv = (a, b)
        if self.kind == "poly":
            return PolyPatch(self.p, iv)
        if self.kind in ("pexp", "ptrig"):
            return PTypePatch(self.kind, self.shape, self.p, iv)
        if self.kind in ("gexp", "gtrig"):
            return GenPolyPatch(self.kind, GenPolyParams(self.p, self.shape), iv)
        if self.kind == "tcheb":
            return TchebPatch(null_space(self.p, self.roots, iv))
        raise SpaceError(f"unknown family kind {self.kind!r}")

    def describe(self) -> dict:
        d = {"kind": self.kind, "p": self.p}
        if self.kind == "tcheb":
            d["roots"] = [list(r) for r in self.roots]
        elif self.kind != "poly":
            d["shape"] = self.shape
        return d


@dataclass
class CriticalLengthEstimate:
    family: dict
    grid: list[float]
    estimate: float | None
    neg_tol: float
    reliable: bool = True
    first_failure: float | None = None
    warnings: list[ConditionRecord] = field(default_factory=list)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["warnings"] = [{"context": w.context, "rcond": w.rcond} for w in self.warnings]
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


class _Probe(NamedTuple):
    min_value: float
    noise: float
    warnings: list


def _probe(build: Callable[[float], tuple], length: float, grid_size: int) -> _Probe:
    """Minimum basis value over the domain built for ``length``, the
    partition-of-unity deviation as a measure of roundoff, and any
    condition warnings.

    A breakdown of the construction counts as ``-inf``: no basis exists.
    """
    try:
        evaluate, warnings, end = build(length)
        x = np.linspace(0.0, end, grid_size)
        values = evaluate(x)
    except (SingularSystem, DegenerateConstraint) as exc:
        logger.info("length %.6g: construction failed (%s)", length, exc)
        return _Probe(-np.inf, 0.0, [])
    if not np.all(np.isfinite(values)):
        return _Probe(-np.inf, 0.0, list(warnings))
    noise = float(np.abs(1.0 - values.sum(axis=0)).max())
    return _Probe(float(values.min()), noise, list(warnings))


def _scan(build, family: dict, grid, neg_tol: float, grid_size: int, strict: bool):
    """Walk up ``grid`` until the basis turns negative.

    Negative values no larger than the partition-of-unity error at the same
    length are roundoff, not evidence of a lost basis; such lengths, like
    lengths with nearly singular solves, make the result unreliable instead.
    """
    grid = [float(v) for v in grid]
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValueError("length grid must be strictly increasing")
    estimate, failure, reliable = None, None, True
    collected: list[ConditionRecord] = []
    for length in grid:
        probe = _probe(build, length, grid_size)
        if probe.min_value < neg_tol - probe.noise:
            failure = length
            break
        unstable = bool(probe.warnings) or (
            probe.min_value < neg_tol and probe.noise > abs(neg_tol)
        )
        collected.extend(probe.warnings)
        if unstable and reliable:
            if strict:
                raise UnstableScan(f"unstable basis at length {length} before any negativity")
            reliable = False
        estimate = length
    return CriticalLengthEstimate(family, grid, estimate, neg_tol, reliable, failure, collected)


def _local_builder(family: SpaceFamily):
    def build(length):
        patch = family.build(0.0, length)
        return (lambda x: patch.eval_all(x)[0]), patch.warnings, length

    return build


def _spline_builder(family: SpaceFamily, m: int, r: int):
    def build(length):
        breaks = tuple(length * i for i in range(m + 1))
        patches = tuple(family.build(breaks[i], breaks[i + 1]) for i in range(m))
        space = MDTSpaceSpec(breaks, patches, (-1, *([r] * (m - 1)), -1))
        H = extract(space)
        return (lambda x: mdtb_eval_all(space, H, x)[0]), _space_warnings(space), breaks[-1]

    return build


def critical_length_scan(family: SpaceFamily, lengths, neg_tol: float = DEFAULT_NEG_TOL,
                         grid_size: int = DEFAULT_GRID, strict: bool = False) -> CriticalLengthEstimate:
    """Last length of ``lengths`` before some Bernstein function turns negative.

    This is only a numerical guess (an upper-bound-style estimate). If
    nearly singular solves are reported before negativity, the result is
    marked unreliable, or :class:`UnstableScan` is raised when ``strict``.
    """
    return _scan(_local_builder(family), family.describe(), lengths, neg_tol, grid_size, strict)


def critical_length_scan_mdtb(family: SpaceFamily, m: int, r: int, lengths,
                              neg_tol: float = DEFAULT_NEG_TOL, grid_size: int = DEFAULT_GRID,
                              strict: bool = False) -> CriticalLengthEstimate:
    """Same scan on the uniform spline space of ``m`` pieces of length ``l``.

    The evaluation grid of ``grid_size`` points covers the whole domain
    ``[0, m l]``.
    """
    desc = {**family.describe(), "m": m, "r": r}
    return _scan(_spline_builder(family, m, r), desc, lengths, neg_tol, grid_size, strict)


def length_grid(start: float, stop: float, step: float) -> list[float]:
    """``start, start + step, ..., <= stop`` rounded to the step's decimals."""
    digits = max(0, -int(np.floor(np.log10(step))) + 1)
    count = int(np.floor((stop - start) / step + 1e-9)) + 1
    return [round(start + k * step, digits) for k in range(count)]


def refine_critical_length(scan: Callable, upper: float, coarse: float = COARSE_STEP,
                           fine: float = FINE_STEP, start: float | None = None) -> CriticalLengthEstimate:
    """Two-level scan: a coarse pass up to ``upper``, then a fine pass just
    below the first coarse failure.

    ``scan`` maps a length grid to a :class:`CriticalLengthEstimate`.
    """
    start = coarse if start is None else start
    first = scan(length_grid(start, upper, coarse))
    if first.first_failure is None or first.estimate is None:
        return first
    lo = first.estimate
    second = scan(length_grid(lo, first.first_failure - fine / 2, fine))
    second.warnings = first.warnings + second.warnings
    second.reliable = first.reliable and second.reliable
    if second.first_failure is None:
        second.first_failure = first.first_failure
    return second

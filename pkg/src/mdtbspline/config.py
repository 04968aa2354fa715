"""JSON descriptors for local spaces and MDT-spline spaces.

A local space is a dict with a ``kind`` key::

    {"kind": "gtrig", "p": 4, "shape": 1.5, "interval": [2, 3]}
    {"kind": "tcheb", "roots": [[0, 0, 1], [1, 0, 1], ...], "interval": [3, 4]}
    {"kind": "tcheb", "p": 6, "roots": [[1, 0, 1], [-1, 0, 1]], "interval": [3, 4]}

The second ``tcheb`` form lists nonzero roots only and fills the zero root
up to dimension ``p + 1``. A spline space has ``breaks``, ``smoothness``,
``patches`` and optionally ``"periodic": {"r": k}``; its patches may leave
out ``interval``, which is then taken from the breaks. A spline space can
itself appear as a patch with ``"kind": "multi"``.
"""

from __future__ import annotations

import json
from pathlib import Path

from .base import LocalPatch
from .ect_space import TchebPatch, null_space, validate_root_spec
from .errors import SpaceError
from .mdtb_patch import MDTSpaceSpec
from .special_spaces import (
    DEFAULT_SWITCH_THRESHOLD,
    DEFAULT_TAYLOR_CAP,
    BSplineLocalSpec,
    BSplinePatch,
    GenPolyParams,
    GenPolyPatch,
    PolyPatch,
    PTypePatch,
)

KINDS = ("poly", "bspline", "pexp", "ptrig", "gexp", "gtrig", "tcheb", "multi")


def _require(desc: dict, *keys):
    missing = [k for k in keys if k not in desc]
    if missing:
        raise SpaceError(f"{desc.get('kind', 'space')} descriptor lacks {', '.join(missing)}")


def patch_from_dict(desc: dict, interval=None, rcond_threshold: float | None = None) -> LocalPatch:
    """Build a local patch; ``interval`` fills in a missing ``interval`` key."""
    kind = desc.get("kind")
    if kind not in KINDS:
        raise SpaceError(f"unknown space kind {kind!r}; expected one of {', '.join(KINDS)}")
    if kind == "multi":
        from .tb_patch import MultiPatch

        space = space_from_dict(desc, rcond_threshold)
        if space.periodic is not None:
            raise SpaceError("a nested spline space cannot be periodic")
        return MultiPatch(space)
    if kind == "bspline":
        _require(desc, "p", "breaks", "smoothness")
        return BSplinePatch(BSplineLocalSpec(int(desc["p"]), tuple(desc["breaks"]), tuple(desc["smoothness"])))
    iv = desc.get("interval", interval)
    if iv is None:
        raise SpaceError(f"{kind} descriptor lacks an interval")
    if kind == "poly":
        _require(desc, "p")
        return PolyPatch(int(desc["p"]), iv)
    if kind in ("pexp", "ptrig"):
        _require(desc, "p", "shape")
        return PTypePatch(kind, float(desc["shape"]), int(desc["p"]), iv)
    if kind in ("gexp", "gtrig"):
        _require(desc, "p", "shape")
        params = GenPolyParams(
            int(desc["p"]),
            float(desc["shape"]),
            float(desc.get("switch_threshold", DEFAULT_SWITCH_THRESHOLD)),
            int(desc.get("taylor_cap", DEFAULT_TAYLOR_CAP)),
        )
        return GenPolyPatch(kind, params, iv, rcond_threshold)
    _require(desc, "roots")
    if "p" in desc:
        spec = null_space(int(desc["p"]), desc["roots"], iv)
    else:
        spec = validate_root_spec(desc["roots"], iv)
    return TchebPatch(spec, rcond_threshold)


def space_from_dict(desc: dict, rcond_threshold: float | None = None) -> MDTSpaceSpec:
    _require(desc, "breaks", "smoothness", "patches")
    breaks = [float(b) for b in desc["breaks"]]
    if len(desc["patches"]) != len(breaks) - 1:
        raise SpaceError(f"{len(breaks) - 1} intervals but {len(desc['patches'])} patches")
    patches = [
        patch_from_dict(d, (breaks[i], breaks[i + 1]), rcond_threshold)
        for i, d in enumerate(desc["patches"])
    ]
    periodic = desc.get("periodic")
    r_per = None if periodic is None else int(periodic["r"])
    return MDTSpaceSpec(tuple(breaks), tuple(patches), tuple(desc["smoothness"]), r_per)


def is_space(desc: dict) -> bool:
    return "breaks" in desc and "patches" in desc


def load_config(path, rcond_threshold: float | None = None) -> LocalPatch | MDTSpaceSpec:
    """Read a JSON file describing either a local space or a spline space."""
    desc = json.loads(Path(path).read_text())
    return from_dict(desc, rcond_threshold)


def from_dict(desc: dict, rcond_threshold: float | None = None) -> LocalPatch | MDTSpaceSpec:
    if not isinstance(desc, dict):
        raise SpaceError("configuration must be a JSON object")
    if is_space(desc) and desc.get("kind") != "multi":
        return space_from_dict(desc, rcond_threshold)
    return patch_from_dict(desc, rcond_threshold=rcond_threshold)

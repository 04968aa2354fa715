"""Functions in Bernstein coordinates, nested spline patches and sampling."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .base import LEFT, LocalPatch, check_endpoint
from .errors import DerivOrderTooHigh, DimensionMismatch
from .mdtb_patch import (
    ExtractionMatrix,
    MDTSpaceSpec,
    end_point_derivs,
    extract,
    mdtb_eval_all,
    owner_patches,
)


@dataclass(frozen=True)
class BernsteinFunction:
    """``sum_j c_j B_j`` on a local patch."""

    patch: LocalPatch
    coefficients: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coefficients, dtype=float).ravel()
        if c.size != self.patch.dimension:
            raise DimensionMismatch(
                f"{c.size} coefficients for a patch of dimension {self.patch.dimension}"
            )
        object.__setattr__(self, "coefficients", c)

    def __call__(self, points, max_deriv: int = 0) -> np.ndarray:
        return function_eval(self, points, max_deriv)

    def __add__(self, other: "BernsteinFunction") -> "BernsteinFunction":
        if other.patch is not self.patch:
            raise DimensionMismatch("functions live on different patches")
        return BernsteinFunction(self.patch, self.coefficients + other.coefficients)

    def __mul__(self, a: float) -> "BernsteinFunction":
        return BernsteinFunction(self.patch, a * self.coefficients)

    __rmul__ = __mul__


def function_eval(f: BernsteinFunction, points, max_deriv: int = 0) -> np.ndarray:
    """Values and derivatives of ``f``, shape ``(max_deriv + 1, npts)``."""
    basis = f.patch.eval_all(points, max_deriv)
    return np.einsum("j,djk->dk", f.coefficients, basis)


class MultiPatch(LocalPatch):
    """A finished MDT-spline space used as one local space.

    The basis is the MDTB-spline basis ``H B``, so it can be glued into a
    larger space without recomputing anything.
    """

    kind = "multi"

    def __init__(self, space: MDTSpaceSpec, extraction: ExtractionMatrix | None = None):
        super().__init__(space.interval)
        self.space = space
        self.extraction = extraction if extraction is not None else extract(space)
        self.H = self.extraction.matrix
        self.warnings = tuple(w for p in space.patches for w in p.warnings)

    @property
    def degree(self) -> int:
        return self.H.shape[0] - 1

    def eval_all(self, points, max_deriv: int = 0) -> np.ndarray:
        return mdtb_eval_all(self.space, self.H, points, max_deriv)

    def diffend_all(self, endpoint: str, max_deriv: int) -> np.ndarray:
        check_endpoint(endpoint)
        if max_deriv > self.degree:
            raise DerivOrderTooHigh(f"order {max_deriv} > degree {self.degree}")
        i = 0 if endpoint == LEFT else self.space.m - 1
        D = end_point_derivs(self.space.patches[i], endpoint, max_deriv)
        return np.asarray(self.H[:, self.space.block(i)] @ D)


def multi_patch_eval(mp: MultiPatch, points, max_deriv: int = 0) -> np.ndarray:
    return mp.eval_all(points, max_deriv)


@dataclass(frozen=True)
class BasisSample:
    """Basis values on a uniform grid.

    ``values[d]`` has shape ``(n, npts)``; ``interval_index[k]`` is the
    (0-based) interval owning ``x[k]``.
    """

    x: np.ndarray
    values: np.ndarray
    interval_index: np.ndarray
    prefix: str = "B"

    @property
    def dimension(self) -> int:
        return self.values.shape[1]

    def header(self) -> list[str]:
        return ["x", *(f"{self.prefix}_{k + 1}" for k in range(self.dimension))]

    def write_csv(self, path, order: int = 0) -> Path:
        path = Path(path)
        with path.open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(self.header())
            for k, xk in enumerate(self.x):
                w.writerow([repr(float(xk)), *(repr(float(v)) for v in self.values[order, :, k])])
        return path

    def write_all(self, directory, stem: str = "basis") -> list[Path]:
        """One CSV per derivative order: ``<stem>_d<order>.csv``."""
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        return [self.write_csv(directory / f"{stem}_d{d}.csv", d) for d in range(self.values.shape[0])]


def sample_basis(patch: LocalPatch, grid_size: int = 501, max_deriv: int = 0) -> BasisSample:
    """Evaluate ``patch`` on ``grid_size`` uniform points including both ends."""
    if grid_size < 2:
        raise ValueError("grid_size must be at least 2")
    x0, x1 = patch.interval
    x = np.linspace(x0, x1, grid_size)
    values = patch.eval_all(x, max_deriv)
    if isinstance(patch, MultiPatch):
        owner = owner_patches(patch.space, x)
        prefix = "N"
    else:
        owner = np.zeros(grid_size, dtype=int)
        prefix = "B"
    return BasisSample(x, values, owner, prefix)


def sample_space(space: MDTSpaceSpec, H=None, grid_size: int = 501, max_deriv: int = 0) -> BasisSample:
    """Sample the MDTB-splines of ``space`` (periodic if the space says so)."""
    if H is not None and not isinstance(H, ExtractionMatrix):
        H = ExtractionMatrix(H)
    return sample_basis(MultiPatch(space, H), grid_size, max_deriv)

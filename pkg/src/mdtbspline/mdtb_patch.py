"""Multi-degree Tchebycheffian B-splines through a sparse extraction operator.

A spline space is given by break points, one local space per interval and
a smoothness value per break. Its B-spline basis is ``N = H B`` where ``B``
stacks the local Bernstein bases and ``H`` is obtained by eliminating the
continuity constraints one derivative order at a time.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np
import scipy.io
import scipy.sparse as sp

from .base import EPS, LEFT, RIGHT, LocalPatch, as_points
from .errors import (
    AllZeroVector,
    DegenerateConstraint,
    DimensionMismatch,
    InvalidSmoothness,
    PeriodicSmoothnessTooHigh,
    SpaceError,
)


@dataclass(frozen=True)
class MDTSpaceSpec:
    """Break points, local patches and smoothness of an MDT-spline space.

    ``smoothness`` holds ``r_0, ..., r_m`` with ``r_0 = r_m = -1``; a list of
    the ``m - 1`` interior values is accepted as well. ``periodic`` is the
    smoothness imposed at the seam joining ``b`` to ``a``, or ``None``.
    """

    breaks: tuple[float, ...]
    patches: tuple[LocalPatch, ...]
    smoothness: tuple[int, ...]
    periodic: int | None = None

    def __post_init__(self):
        breaks = tuple(float(b) for b in self.breaks)
        patches = tuple(self.patches)
        m = len(breaks) - 1
        if m < 1 or any(b1 <= b0 for b0, b1 in zip(breaks, breaks[1:])):
            raise SpaceError("breaks must be strictly increasing with at least two entries")
        if len(patches) != m:
            raise SpaceError(f"{m} intervals but {len(patches)} patches")
        tol = 64 * EPS * max(1.0, abs(breaks[0]), abs(breaks[-1]))
        for i, patch in enumerate(patches):
            x0, x1 = patch.interval
            if abs(x0 - breaks[i]) > tol or abs(x1 - breaks[i + 1]) > tol:
                raise SpaceError(
                    f"patch {i} lives on [{x0}, {x1}], expected [{breaks[i]}, {breaks[i + 1]}]"
                )
        r = tuple(int(v) for v in self.smoothness)
        if len(r) == m - 1:
            r = (-1, *r, -1)
        if len(r) != m + 1:
            raise InvalidSmoothness(f"expected {m + 1} smoothness values, got {len(r)}")
        if r[0] != -1 or r[-1] != -1:
            raise InvalidSmoothness("end smoothness must be -1; use `periodic` for the seam")
        degrees = [p.degree for p in patches]
        for i in range(1, m):
            if not -1 <= r[i] <= min(degrees[i - 1], degrees[i]):
                raise InvalidSmoothness(
                    f"r_{i} = {r[i]} outside [-1, {min(degrees[i - 1], degrees[i])}]"
                )
        if self.periodic is not None:
            rp = int(self.periodic)
            if rp < 0:
                raise InvalidSmoothness("periodic smoothness must be nonnegative")
            if rp > min(degrees[0], degrees[-1]):
                raise PeriodicSmoothnessTooHigh(
                    f"r_per = {rp} exceeds min(p_1, p_m) = {min(degrees[0], degrees[-1])}"
                )
            object.__setattr__(self, "periodic", rp)
        object.__setattr__(self, "breaks", breaks)
        object.__setattr__(self, "patches", patches)
        object.__setattr__(self, "smoothness", r)
        if dimension(self, periodic=False) < 1:
            raise InvalidSmoothness("space has no degrees of freedom")

    @property
    def m(self) -> int:
        return len(self.patches)

    @property
    def degrees(self) -> tuple[int, ...]:
        return tuple(p.degree for p in self.patches)

    @property
    def offsets(self) -> np.ndarray:
        """``mu(0), ..., mu(m)``: start of each Bernstein block in ``B``."""
        return np.concatenate([[0], np.cumsum([p.dimension for p in self.patches])])

    @property
    def interval(self) -> tuple[float, float]:
        return self.breaks[0], self.breaks[-1]

    def block(self, i: int) -> slice:
        """Columns of ``H`` belonging to patch ``i`` (0-based)."""
        mu = self.offsets
        return slice(int(mu[i]), int(mu[i + 1]))


def dimension(spec: MDTSpaceSpec, periodic: bool | None = None) -> int:
    """``sum_i (p_i - r_i)``; the seam smoothness counts once when periodic."""
    n = sum(p - r for p, r in zip(spec.degrees, spec.smoothness[1:]))
    if periodic is None:
        periodic = spec.periodic is not None
    if periodic:
        n -= spec.periodic + 1
    return n


class KnotVectors(NamedTuple):
    u: np.ndarray
    v: np.ndarray


def knot_vectors(spec: MDTSpaceSpec) -> KnotVectors:
    """Support ends of the (non-periodic) basis: ``N_k`` lives on ``[u_k, v_k]``."""
    x, p, r = spec.breaks, spec.degrees, spec.smoothness
    m = spec.m
    u = np.repeat(x[:m], [p[i] - r[i] for i in range(m)])
    v = np.repeat(x[1:], [p[i - 1] - r[i] for i in range(1, m + 1)])
    return KnotVectors(u, v)


def end_point_derivs(patch: LocalPatch, endpoint: str, order: int) -> np.ndarray:
    if order <= patch.degree:
        return patch.diffend_all(endpoint, order)
    x = patch.interval[0] if endpoint == LEFT else patch.interval[1]
    return patch.eval_all([x], order)[:, :, 0].T


def _seam_matrix(spec: MDTSpaceSpec, left: int, right: int, order: int) -> sp.csc_matrix:
    """Constraints joining patch ``left`` (right end) to patch ``right`` (left end)."""
    pl, pr = spec.patches[left], spec.patches[right]
    dl = end_point_derivs(pl, RIGHT, order)
    dr = end_point_derivs(pr, LEFT, order)
    ol, orr = spec.offsets[left], spec.offsets[right]
    rows, cols, vals = [], [], []
    for k in range(order + 1):
        # left block: last k + 1 functions; right block: first k + 1
        for j in range(pl.degree - k, pl.degree + 1):
            rows.append(ol + j)
            cols.append(k)
            vals.append(dl[j, k])
        for j in range(k + 1):
            rows.append(orr + j)
            cols.append(k)
            vals.append(-dr[j, k])
    mu = int(spec.offsets[-1])
    return sp.csc_matrix((vals, (rows, cols)), shape=(mu, order + 1))


def constraint_matrix(spec: MDTSpaceSpec, i: int) -> sp.csc_matrix:
    """``K^(i)`` for interior break ``i`` (1-based, ``1 <= i <= m - 1``).

    Column ``k`` asks the ``k``-th derivative to match across ``x_i``. Only
    the structurally nonzero end-point derivatives are stored.
    """
    if not 1 <= i <= spec.m - 1:
        raise IndexError(f"break index {i} not interior")
    r = spec.smoothness[i]
    if r < 0:
        return sp.csc_matrix((int(spec.offsets[-1]), 0))
    return _seam_matrix(spec, i - 1, i, r)


def sparse_nullspace(l) -> sp.csr_matrix:
    """Sparsest left null-space of the column ``l``.

    Rows before the first nonzero of ``l`` and after the last are kept; in
    between, consecutive entries are merged pairwise. When ``l`` sums to
    zero (as continuity constraints of a partition of unity do), each column
    of the result sums to one.
    """
    l = np.asarray(l, dtype=float).ravel()
    q = l.size
    nz = np.flatnonzero(l)
    if nz.size == 0:
        raise AllZeroVector("cannot build the null-space of a zero vector")
    i1, i2 = int(nz[0]), int(nz[-1])
    H = sp.lil_matrix((q - 1, q))
    if i1 == i2:
        # only that function is constrained: drop it
        for j in range(q):
            if j != i1:
                H[j - (j > i1), j] = 1.0
        return H.tocsr()
    for j in range(i1 + 1):
        H[j, j] = 1.0
    for j in range(i1 + 1, i2):
        if l[j] == 0.0:
            raise DegenerateConstraint(f"zero pivot at position {j} of the constraint")
        H[j - 1, j] = -l[j - 1] / l[j] * H[j - 1, j - 1]
        H[j, j] = 1.0 - H[j - 1, j]
    for j in range(i2, q):
        H[j - 1, j] = 1.0
    return H.tocsr()


@dataclass(frozen=True)
class ExtractionMatrix:
    """Sparse ``n x mu(m)`` operator with ``N = H B``."""

    matrix: sp.csr_matrix
    periodic: bool = False

    @property
    def shape(self) -> tuple[int, int]:
        return self.matrix.shape

    def toarray(self) -> np.ndarray:
        return self.matrix.toarray()

    def triplets(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        coo = self.matrix.tocoo()
        order = np.lexsort((coo.col, coo.row))
        return coo.row[order], coo.col[order], coo.data[order]

    def row_ranges(self) -> list[tuple[int, int]]:
        """Half-open column range of each row's nonzeros (circular rows excluded)."""
        out = []
        for k in range(self.shape[0]):
            row = self.matrix.getrow(k)
            cols = row.indices[row.data != 0]
            out.append((int(cols.min()), int(cols.max()) + 1) if cols.size else (0, 0))
        return out

    def column_sums(self) -> np.ndarray:
        return np.asarray(self.matrix.sum(axis=0)).ravel()

    def write_matrix_market(self, path) -> None:
        scipy.io.mmwrite(str(path), self.matrix.tocoo(), precision=17)

    def to_dict(self) -> dict:
        rows, cols, vals = self.triplets()
        return {
            "shape": list(self.shape),
            "periodic": self.periodic,
            "rows": rows.tolist(),
            "cols": cols.tolist(),
            "values": vals.tolist(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def _eliminate(H: sp.csr_matrix, K: sp.spmatrix) -> sp.csr_matrix:
    L = (H @ K).tocsc()
    for j in range(K.shape[1]):
        Hbar = sparse_nullspace(L[:, j].toarray().ravel())
        H = (Hbar @ H).tocsr()
        L = (Hbar @ L).tocsc()
    return H


def _extract(spec: MDTSpaceSpec) -> sp.csr_matrix:
    mu = int(spec.offsets[-1])
    H = sp.identity(mu, format="csr")
    for i in range(1, spec.m):
        if spec.smoothness[i] >= 0:
            H = _eliminate(H, constraint_matrix(spec, i))
    H.eliminate_zeros()
    return H


def extraction(spec: MDTSpaceSpec) -> ExtractionMatrix:
    """Extraction operator of the non-periodic space (the seam is ignored)."""
    return ExtractionMatrix(_extract(spec))


def extraction_periodic(spec: MDTSpaceSpec, r_per: int | None = None) -> ExtractionMatrix:
    """Extraction operator with ``C^r_per`` continuity between ``b`` and ``a``.

    The last ``r_per + 1`` rows of the non-periodic operator are moved to the
    front so that the seam constraints involve consecutive rows, and are
    then eliminated like those of an interior break. Functions that do not
    touch the seam keep their position.
    """
    if r_per is None:
        r_per = spec.periodic
    if r_per is None:
        raise InvalidSmoothness("no periodic smoothness given")
    r_per = int(r_per)
    if r_per < 0:
        raise InvalidSmoothness("periodic smoothness must be nonnegative")
    if r_per > min(spec.degrees[0], spec.degrees[-1]):
        raise PeriodicSmoothnessTooHigh(
            f"r_per = {r_per} exceeds min(p_1, p_m) = {min(spec.degrees[0], spec.degrees[-1])}"
        )
    H = _extract(spec)
    n = H.shape[0]
    if n < 2 * (r_per + 1):
        raise DegenerateConstraint(f"{n} functions cannot carry C^{r_per} periodicity")
    order = np.r_[n - r_per - 1 : n, 0 : n - r_per - 1]
    H = H[order]
    H = _eliminate(H, _seam_matrix(spec, spec.m - 1, 0, r_per))
    H.eliminate_zeros()
    return ExtractionMatrix(H, periodic=True)


def extract(spec: MDTSpaceSpec) -> ExtractionMatrix:
    """Periodic or non-periodic extraction depending on ``spec.periodic``."""
    if spec.periodic is None:
        return extraction(spec)
    return extraction_periodic(spec, spec.periodic)


def owner_patches(spec: MDTSpaceSpec, x: np.ndarray) -> np.ndarray:
    """Index of the patch owning each point: half-open, last patch closed."""
    idx = np.searchsorted(np.asarray(spec.breaks), x, side="right") - 1
    return np.clip(idx, 0, spec.m - 1)


def _as_matrix(H) -> sp.csr_matrix:
    if isinstance(H, ExtractionMatrix):
        return H.matrix
    return sp.csr_matrix(H)


def mdtb_eval_all(spec: MDTSpaceSpec, H, points, max_deriv: int = 0) -> np.ndarray:
    """MDTB-splines and derivatives, shape ``(max_deriv + 1, n, npts)``.

    Each point is evaluated in the patch that owns it only; at interior
    breaks that is the patch on the right, so derivatives there are
    right-sided.
    """
    Hm = _as_matrix(H)
    if Hm.shape[1] != spec.offsets[-1]:
        raise DimensionMismatch(f"H has {Hm.shape[1]} columns, space needs {spec.offsets[-1]}")
    x = as_points(points, spec.interval)
    owner = owner_patches(spec, x)
    out = np.zeros((max_deriv + 1, Hm.shape[0], x.size))
    for i in np.unique(owner):
        sel = np.flatnonzero(owner == i)
        B = spec.patches[i].eval_all(x[sel], max_deriv)
        Hb = Hm[:, spec.block(i)]
        for d in range(max_deriv + 1):
            out[d][:, sel] = Hb @ B[d]
    return out


def curve_eval(spec: MDTSpaceSpec, H, control_points, params) -> np.ndarray:
    """Points ``sum_k P_k N_k(x)`` of a spline curve, shape ``(len(params), d)``."""
    P = np.asarray(control_points, dtype=float)
    if P.ndim == 1:
        P = P[:, None]
    n = _as_matrix(H).shape[0]
    if P.shape[0] != n:
        raise DimensionMismatch(f"{P.shape[0]} control points for {n} basis functions")
    N = mdtb_eval_all(spec, H, params, 0)[0]
    return N.T @ P


def one_sided_derivs(spec: MDTSpaceSpec, H, i: int, max_deriv: int) -> tuple[np.ndarray, np.ndarray]:
    """Left and right derivatives ``(n, max_deriv + 1)`` of every ``N_k`` at break ``i``.

    Both come from the analytic end-point derivatives of the adjacent
    patches, ``i`` is 1-based and interior.
    """
    if not 1 <= i <= spec.m - 1:
        raise IndexError(f"break index {i} not interior")
    Hm = _as_matrix(H)
    left = Hm[:, spec.block(i - 1)] @ end_point_derivs(spec.patches[i - 1], RIGHT, max_deriv)
    right = Hm[:, spec.block(i)] @ end_point_derivs(spec.patches[i], LEFT, max_deriv)
    return np.asarray(left), np.asarray(right)


def super_smoothness_window(spec: MDTSpaceSpec, i: int) -> range:
    """0-based indices of the functions that may jump in derivative ``r_i + 1`` at ``x_i``.

    All other functions are smoother than the space requires there.
    """
    p, r = spec.degrees, spec.smoothness
    mu_v = sum(p[j - 1] - r[j] for j in range(1, i + 1))
    mu_u = sum(p[j] - r[j] for j in range(i))
    # 1-based window mu_v .. mu_u + 1
    return range(mu_v - 1, mu_u + 1)


def spline_patches(patches: Sequence[LocalPatch]) -> tuple[float, ...]:
    """Break points implied by consecutive patches."""
    return (patches[0].interval[0], *(p.interval[1] for p in patches))

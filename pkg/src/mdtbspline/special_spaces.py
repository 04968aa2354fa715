"""Specialized local spaces with more robust Bernstein evaluation.

All classes here implement :class:`~mdtbspline.base.LocalPatch` and
describe spaces that could also be given as a :class:`RootSpec`; the
specialized routines avoid the ill-conditioning of the generic path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .base import (
    LEFT,
    LocalPatch,
    as_points,
    check_endpoint,
    check_interval,
    growth_record,
    warn_rcond_threshold,
)
from .ect_space import MAX_EXPONENT, RootSpec, conversion_matrix, validate_root_spec
from .errors import DegreeTooSmall, InvalidSmoothness, OddDegree, ParameterOverflow, SpaceError

DEFAULT_SWITCH_THRESHOLD = 0.1
DEFAULT_TAYLOR_CAP = 30


def _endpoint_x(patch: LocalPatch, endpoint: str) -> float:
    check_endpoint(endpoint)
    return patch.interval[0] if endpoint == LEFT else patch.interval[1]


# --------------------------------------------------------------------------
# algebraic polynomials


def _bernstein_table(p: int, s: np.ndarray) -> list[np.ndarray]:
    """Bernstein polynomials of all degrees ``0..p`` at local parameters ``s``."""
    table = [np.ones((1, s.size))]
    for q in range(1, p + 1):
        prev = table[-1]
        cur = np.zeros((q + 1, s.size))
        cur[1:] += s * prev
        cur[:-1] += (1.0 - s) * prev
        table.append(cur)
    return table


def poly_bernstein_eval(p: int, interval, points, max_deriv: int = 0) -> np.ndarray:
    """Classical Bernstein polynomials by the triangular recurrence.

    Derivatives use ``D B_{j,p} = p / h * (B_{j-1,p-1} - B_{j,p-1})``
    applied repeatedly to the lower-degree rows of the same table.
    """
    if p < 0:
        raise DegreeTooSmall("polynomial degree must be nonnegative")
    interval = check_interval(interval)
    x = as_points(points, interval)
    h = interval[1] - interval[0]
    table = _bernstein_table(p, (x - interval[0]) / h)
    out = np.zeros((max_deriv + 1, p + 1, x.size))
    out[0] = table[p]
    for d in range(1, min(max_deriv, p) + 1):
        cur = table[p - d]
        for q in range(p - d + 1, p + 1):
            nxt = np.zeros((q + 1, x.size))
            nxt[1:] += cur
            nxt[:-1] -= cur
            cur = nxt * (q / h)
        out[d] = cur
    return out


class PolyPatch(LocalPatch):
    kind = "poly"

    def __init__(self, p: int, interval):
        super().__init__(interval)
        if p < 0:
            raise DegreeTooSmall("polynomial degree must be nonnegative")
        self.p = int(p)

    @property
    def degree(self) -> int:
        return self.p

    def eval_all(self, points, max_deriv: int = 0) -> np.ndarray:
        return poly_bernstein_eval(self.p, self.interval, points, max_deriv)

    def diffend_all(self, endpoint: str, max_deriv: int) -> np.ndarray:
        x = _endpoint_x(self, endpoint)
        return self.eval_all([x], max_deriv)[:, :, 0].T

    def as_root_spec(self) -> RootSpec:
        return validate_root_spec([(0, 0, self.p + 1)], self.interval)


# --------------------------------------------------------------------------
# classical B-splines as one local space


@dataclass(frozen=True)
class BSplineLocalSpec:
    """Uniform-degree polynomial spline space on ``breaks``.

    ``smoothness`` has one entry per break (``-1`` at both ends) or one
    entry per interior break.
    """

    degree: int
    breaks: tuple[float, ...]
    smoothness: tuple[int, ...]

    def __post_init__(self):
        breaks = tuple(float(b) for b in self.breaks)
        m = len(breaks) - 1
        if m < 1 or any(b1 <= b0 for b0, b1 in zip(breaks, breaks[1:])):
            raise SpaceError("breaks must be strictly increasing with at least two entries")
        r = tuple(int(v) for v in self.smoothness)
        if len(r) == m - 1:
            r = (-1, *r, -1)
        if len(r) != m + 1:
            raise InvalidSmoothness(f"expected {m + 1} smoothness values, got {len(r)}")
        if r[0] != -1 or r[-1] != -1:
            raise InvalidSmoothness("end smoothness must be -1")
        if any(not -1 <= v <= self.degree for v in r):
            raise InvalidSmoothness(f"smoothness must lie in [-1, {self.degree}]")
        object.__setattr__(self, "breaks", breaks)
        object.__setattr__(self, "smoothness", r)

    @property
    def dimension(self) -> int:
        return sum(self.degree - r for r in self.smoothness[:-1])

    @property
    def knots(self) -> np.ndarray:
        """Open knot vector of length ``n + p + 1``."""
        reps = [self.degree - r for r in self.smoothness]
        return np.repeat(np.asarray(self.breaks), reps)


def _safe_div(num, den):
    return np.divide(num, den, out=np.zeros_like(num), where=den != 0)


def bspline_local_eval(spec: BSplineLocalSpec, points, max_deriv: int = 0) -> np.ndarray:
    """Cox--de Boor evaluation of all B-splines of ``spec``.

    Points at an interior knot belong to the span on the right; the last
    break belongs to the last nonempty span (limit from the left).
    """
    p = spec.degree
    xi = spec.knots
    x = as_points(points, (spec.breaks[0], spec.breaks[-1]))
    nspan = xi.size - 1
    last = int(np.flatnonzero(xi[:-1] < xi[1:])[-1])
    span = np.minimum(np.searchsorted(xi, x, side="right") - 1, last)
    cols = np.arange(x.size)
    levels = [np.zeros((nspan, x.size))]
    levels[0][span, cols] = 1.0
    for q in range(1, p + 1):
        prev = levels[-1]
        k = np.arange(nspan - q)[:, None]
        left = _safe_div(x - xi[k], np.broadcast_to(xi[k + q] - xi[k], (k.size, x.size)))
        right = _safe_div(
            xi[k + q + 1] - x, np.broadcast_to(xi[k + q + 1] - xi[k + 1], (k.size, x.size))
        )
        levels.append(left * prev[:-1] + right * prev[1:])
    n = spec.dimension
    out = np.zeros((max_deriv + 1, n, x.size))
    out[0] = levels[p]
    for d in range(1, min(max_deriv, p) + 1):
        cur = levels[p - d]
        for q in range(p - d + 1, p + 1):
            k = np.arange(cur.shape[0] - 1)[:, None]
            a = xi[k + q] - xi[k]
            b = xi[k + q + 1] - xi[k + 1]
            a = np.broadcast_to(a, (k.size, x.size))
            b = np.broadcast_to(b, (k.size, x.size))
            cur = q * (_safe_div(cur[:-1], a) - _safe_div(cur[1:], b))
        out[d] = cur
    return out


class BSplinePatch(LocalPatch):
    """A whole classical spline space used as a single local space."""

    kind = "bspline"

    def __init__(self, spec: BSplineLocalSpec):
        super().__init__((spec.breaks[0], spec.breaks[-1]))
        self.spec = spec

    @property
    def degree(self) -> int:
        return self.spec.dimension - 1

    def eval_all(self, points, max_deriv: int = 0) -> np.ndarray:
        return bspline_local_eval(self.spec, points, max_deriv)

    def diffend_all(self, endpoint: str, max_deriv: int) -> np.ndarray:
        x = _endpoint_x(self, endpoint)
        return self.eval_all([x], max_deriv)[:, :, 0].T


# --------------------------------------------------------------------------
# polynomial-type spaces <1, u(x), v(x), ..., u(qx), v(qx)>


def _uv(kind: str, shape: float):
    if kind == "pexp":
        return (lambda y: np.cosh(shape * y)), (lambda y: np.sinh(shape * y))
    if kind == "ptrig":
        return (lambda y: np.cos(shape * y)), (lambda y: np.sin(shape * y))
    raise SpaceError(f"unknown polynomial-type kind {kind!r}")


class PTypePatch(LocalPatch):
    """Polynomial-type exponential (``pexp``) or trigonometric (``ptrig``) space.

    The sigma table and the derivative operator depend only on the shape
    and the interval, so they are built once here.
    """

    def __init__(self, kind: str, shape: float, p: int, interval):
        super().__init__(interval)
        if p < 2:
            raise DegreeTooSmall("polynomial-type spaces need p >= 2")
        if p % 2:
            raise OddDegree(f"polynomial-type spaces need even p, got {p}")
        shape = abs(float(shape))
        if shape == 0 or not math.isfinite(shape):
            raise SpaceError("shape parameter must be finite and nonzero")
        if kind == "pexp" and shape * self.length / 2 * p > MAX_EXPONENT:
            raise ParameterOverflow("shape * length too large for the exponential space")
        self.kind = kind
        self.shape = shape
        self.p = int(p)
        self.u, self.v = _uv(kind, shape)
        half = self.length / 2
        vh = self.v(half)
        s02 = 1.0 / vh**2
        s12 = 2.0 * self.u(half) / vh**2
        self.sigma2 = np.array([s02, s12, s02])
        self.sigma = self._sigma_table()
        tau = shape / 2 * vh
        q = self.p // 2
        sig = self.sigma
        T = np.zeros((self.p + 1, self.p + 1))
        for j in range(self.p + 1):
            T[j, j] = -tau * (q - j) * s12
            if j > 0:
                T[j, j - 1] = tau * j * s02 * sig[j] / sig[j - 1]
            if j < self.p:
                T[j, j + 1] = -tau * (self.p - j) * s02 * sig[j] / sig[j + 1]
        self.derivative_matrix = T

    def _sigma_table(self) -> np.ndarray:
        sig = np.array([1.0])
        for q in range(2, self.p + 1, 2):
            nxt = np.zeros(q + 1)
            for k, s in enumerate(self.sigma2):
                nxt[k: k + q - 1] += s * sig
            sig = nxt
        return sig

    @property
    def degree(self) -> int:
        return self.p

    def _values(self, x: np.ndarray) -> np.ndarray:
        x0, x1 = self.interval
        va, vb = self.v((x - x0) / 2), self.v((x1 - x) / 2)
        s02, s12, s22 = self.sigma2
        b2 = np.array([s02 * vb * vb, s12 * vb * va, s22 * va * va])
        B = b2
        for q in range(4, self.p + 1, 2):
            nxt = np.zeros((q + 1, x.size))
            for k in range(3):
                nxt[k: k + q - 1] += b2[k] * B
            B = nxt
        return B

    def eval_all(self, points, max_deriv: int = 0) -> np.ndarray:
        x = as_points(points, self.interval)
        out = np.empty((max_deriv + 1, self.p + 1, x.size))
        out[0] = self._values(x)
        for d in range(1, max_deriv + 1):
            out[d] = self.derivative_matrix @ out[d - 1]
        return out

    def diffend_all(self, endpoint: str, max_deriv: int) -> np.ndarray:
        x = _endpoint_x(self, endpoint)
        return self.eval_all([x], max_deriv)[:, :, 0].T

    def as_root_spec(self) -> RootSpec:
        q = self.p // 2
        if self.kind == "pexp":
            roots = [r for k in range(1, q + 1) for r in ((k * self.shape, 0, 1), (-k * self.shape, 0, 1))]
        else:
            roots = [(0, k * self.shape, 1) for k in range(1, q + 1)]
        return validate_root_spec([(0, 0, 1), *roots], self.interval)


def ptype_bernstein_eval(kind: str, shape: float, p: int, interval, points,
                         max_deriv: int = 0) -> np.ndarray:
    return PTypePatch(kind, shape, p, interval).eval_all(points, max_deriv)


# --------------------------------------------------------------------------
# generalized polynomial spaces <1, x, ..., x^{p-2}, u(x), v(x)>


@dataclass(frozen=True)
class GenPolyParams:
    p: int
    shape: float
    switch_threshold: float = DEFAULT_SWITCH_THRESHOLD
    taylor_cap: int = DEFAULT_TAYLOR_CAP

    def __post_init__(self):
        if self.p < 2:
            raise DegreeTooSmall("generalized polynomial spaces need p >= 2")
        if not math.isfinite(self.shape):
            raise SpaceError("shape parameter must be finite")
        if not self.switch_threshold > 0:
            raise SpaceError("switch_threshold must be positive")


def _series(k: int, t: np.ndarray, s2: float, cap: int) -> np.ndarray:
    """``sum_j s2^j t^(k+2j) / (k+2j)!`` for ``k >= 0``.

    ``s2`` is ``shape**2`` for the exponential and ``-shape**2`` for the
    trigonometric case. Terms are added until the next one is below
    machine precision relative to the sum, at most ``cap`` of them.
    """
    term = t**k / math.factorial(k)
    total = term.copy()
    for j in range(1, cap):
        term = term * (s2 * t * t / ((k + 2 * j - 1) * (k + 2 * j)))
        total += term
        if np.all(np.abs(term) <= 2.0**-53 * np.abs(total)):
            break
    return total


def switch_quantity(p: int, sh: float) -> float:
    """``(s h)^(p-1) / (p-1)!``, the size of the leading term that separates
    ``cosh/sinh`` (or ``cos/sin``) from the polynomial part of the space.

    For ``p = 2`` this is just ``s * h``. For larger ``p`` the closed-form
    functions become nearly dependent on the polynomials much sooner, so the
    plain product would keep the cancelling basis far too long.
    """
    if sh == 0:
        return 0.0
    return math.exp((p - 1) * math.log(sh) - math.lgamma(p))


class GenPolyPatch(LocalPatch):
    """Generalized polynomial space of exponential (``gexp``) or trigonometric
    (``gtrig``) type.

    Away from zero the basis ``(s t)^i / i!`` plus ``cosh/sinh`` (or
    ``cos/sin``) of ``s t`` is used, with derivative columns balanced by
    ``s^-i``. When :func:`switch_quantity` falls below ``switch_threshold`` the two
    transcendental functions are replaced by Taylor tails, which keeps the
    polynomial limit well conditioned.
    """

    def __init__(self, kind: str, params: GenPolyParams, interval,
                 rcond_threshold: float | None = None):
        super().__init__(interval)
        if kind not in ("gexp", "gtrig"):
            raise SpaceError(f"unknown generalized polynomial kind {kind!r}")
        self.kind = kind
        self.params = params
        self.shape = abs(float(params.shape))
        if kind == "gexp" and self.shape * self.length > MAX_EXPONENT:
            raise ParameterOverflow(
                f"shape * length = {self.shape * self.length:.4g} exceeds {MAX_EXPONENT}"
            )
        self.scaled = switch_quantity(params.p, self.shape * self.length) >= params.switch_threshold
        x0, x1 = self.interval
        M0 = self._unit_derivs(np.array([x0]), params.p)[:, :, 0].T
        M1 = self._unit_derivs(np.array([x1]), params.p)[:, :, 0].T
        self.M0, self.M1 = M0, M1
        self.conversion = conversion_matrix(
            M0, M1, warn_rcond_threshold(rcond_threshold), context=f"{kind}(p={params.p})"
        )
        x = np.linspace(x0, x1, 11)
        rec = growth_record(self.conversion.entries, self._unit_derivs(x, 0)[0],
                            f"{kind}(p={params.p})")
        self.warnings = self.conversion.warnings + ((rec,) if rec else ())

    @property
    def degree(self) -> int:
        return self.params.p

    @property
    def condition_flag(self) -> bool:
        return bool(self.warnings)

    def _unit_derivs(self, x: np.ndarray, max_deriv: int) -> np.ndarray:
        """Derivatives of the working basis.

        In scaled mode level ``d`` is divided by ``shape**d``. The Taylor
        basis is written in the unit variable ``t / h`` with shape ``s h``,
        so there level ``d`` is multiplied by ``h**d``.
        """
        p = self.params.p
        t = x - self.interval[0]
        out = np.zeros((max_deriv + 1, p + 1, x.size))
        if self.scaled:
            st = self.shape * t
            powers = [np.ones_like(st)]
            for i in range(1, p - 1):
                powers.append(powers[-1] * st / i)
            if self.kind == "gexp":
                ch, sh = np.cosh(st), np.sinh(st)
            for d in range(max_deriv + 1):
                for i in range(d, p - 1):
                    out[d, i] = powers[i - d]
                if self.kind == "gexp":
                    out[d, p - 1], out[d, p] = (ch, sh) if d % 2 == 0 else (sh, ch)
                else:
                    out[d, p - 1] = np.cos(st + d * np.pi / 2)
                    out[d, p] = np.sin(st + d * np.pi / 2)
            return out
        t = t / self.length
        powers = [np.ones_like(t)]
        for i in range(1, p - 1):
            powers.append(powers[-1] * t / i)
        sh2 = (self.shape * self.length) ** 2
        s2 = sh2 if self.kind == "gexp" else -sh2
        cap = self.params.taylor_cap
        cache: dict[int, np.ndarray] = {}

        def tail(k: int) -> np.ndarray:
            # derivatives step the series index down; below zero it
            # folds back as S_k = s2 * S_{k+2}
            if k < 0:
                return s2 * tail(k + 2)
            if k not in cache:
                cache[k] = _series(k, t, s2, cap)
            return cache[k]

        for d in range(max_deriv + 1):
            for i in range(d, p - 1):
                out[d, i] = powers[i - d]
            out[d, p - 1] = tail(p - 1 - d)
            out[d, p] = tail(p - d)
        return out

    def _derivs(self, x: np.ndarray, max_deriv: int) -> np.ndarray:
        out = self._unit_derivs(x, max_deriv)
        scale = self.shape if self.scaled else 1.0 / self.length
        out *= (scale ** np.arange(max_deriv + 1))[:, None, None]
        return out

    def eval_all(self, points, max_deriv: int = 0) -> np.ndarray:
        x = as_points(points, self.interval)
        phi = self._derivs(x, max_deriv)
        return np.einsum("ij,djk->dik", self.conversion.entries, phi)

    def diffend_all(self, endpoint: str, max_deriv: int) -> np.ndarray:
        x = _endpoint_x(self, endpoint)
        return self.eval_all([x], max_deriv)[:, :, 0].T

    def as_root_spec(self) -> RootSpec:
        p = self.params.p
        if self.kind == "gexp":
            roots = [(self.shape, 0, 1), (-self.shape, 0, 1)]
        else:
            roots = [(0, self.shape, 1)]
        return validate_root_spec([(0, 0, p - 1), *roots], self.interval)


def genpoly_bernstein_eval(kind: str, params: GenPolyParams, interval, points,
                           max_deriv: int = 0) -> np.ndarray:
    return GenPolyPatch(kind, params, interval).eval_all(points, max_deriv)

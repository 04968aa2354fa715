"""Null-spaces of constant-coefficient differential operators.

A space is identified by the roots ``alpha + i*beta`` (with multiplicity
``mu``) of the characteristic polynomial of its operator. The fundamental
system is anchored at the left end point ``x0`` so that everything derived
from it depends only on the interval length.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .base import (
    LEFT,
    RIGHT,
    ConditionRecord,
    LocalPatch,
    as_points,
    check_endpoint,
    check_interval,
    growth_record,
    solve_left,
    warn_rcond_threshold,
)
from .errors import (
    DegreeTooSmall,
    DerivOrderTooHigh,
    DuplicateRoot,
    MissingZeroRoot,
    ParameterOverflow,
    SpaceError,
)

#: exp() overflows a little above 709; refuse well before that.
MAX_EXPONENT = 700.0


class Root(NamedTuple):
    alpha: float
    beta: float
    mu: int

    @property
    def count(self) -> int:
        """Number of fundamental functions generated by this root."""
        return self.mu if self.beta == 0 else 2 * self.mu


@dataclass(frozen=True)
class RootSpec:
    """Characteristic roots of a null-space together with its interval.

    Build instances with :func:`validate_root_spec`; the constructor
    performs no normalization.
    """

    roots: tuple[Root, ...]
    interval: tuple[float, float]

    @property
    def dimension(self) -> int:
        return sum(r.count for r in self.roots)

    @property
    def degree(self) -> int:
        return self.dimension - 1

    @property
    def length(self) -> float:
        return self.interval[1] - self.interval[0]

    def translated(self, shift: float) -> "RootSpec":
        x0, x1 = self.interval
        return RootSpec(self.roots, (x0 + shift, x1 + shift))

    def to_dict(self) -> dict:
        return {
            "interval": list(self.interval),
            "roots": [{"alpha": r.alpha, "beta": r.beta, "mu": r.mu} for r in self.roots],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict) -> "RootSpec":
        return validate_root_spec(data["roots"], data["interval"])

    @classmethod
    def from_json(cls, text: str) -> "RootSpec":
        return cls.from_dict(json.loads(text))


def _as_root(raw) -> Root:
    if isinstance(raw, dict):
        alpha, beta, mu = raw.get("alpha", 0.0), raw.get("beta", 0.0), raw.get("mu", 1)
    else:
        alpha, beta, mu = raw
    if int(mu) != mu or mu < 1:
        raise SpaceError(f"root multiplicity must be a positive integer, got {mu}")
    alpha, beta = float(alpha), abs(float(beta))
    if not (math.isfinite(alpha) and math.isfinite(beta)):
        raise SpaceError("root parts must be finite")
    # normalize -0.0 so that (0, 0) compares and prints cleanly
    return Root(alpha + 0.0, beta + 0.0, int(mu))


def validate_root_spec(roots, interval) -> RootSpec:
    """Normalize raw ``(alpha, beta, mu)`` triples into a :class:`RootSpec`.

    Betas are made nonnegative (the conjugate root is implicit) and the
    roots are put in canonical order: the zero root first, then
    lexicographically by ``(alpha, beta)``.
    """
    interval = check_interval(interval)
    parsed = [_as_root(r) for r in roots]
    seen = set()
    for r in parsed:
        key = (r.alpha, r.beta)
        if key in seen:
            raise DuplicateRoot(f"root {key} given more than once")
        seen.add(key)
    if (0.0, 0.0) not in seen:
        raise MissingZeroRoot("constants require a root at zero")
    parsed.sort(key=lambda r: (r.alpha != 0 or r.beta != 0, r.alpha, r.beta))
    spec = RootSpec(tuple(parsed), interval)
    if spec.degree < 1:
        raise DegreeTooSmall(f"space degree {spec.degree} < 1")
    return spec


def null_space(p: int, roots, interval) -> RootSpec:
    """The space ``N_p^{roots}``: the zero root fills the remaining dimension.

    ``roots`` lists the nonzero roots only, as in the usual notation
    ``N_6^{(1,0,1),(-1,0,1),(0,2,1)}``.
    """
    nonzero = [_as_root(r) for r in roots]
    used = sum(r.count for r in nonzero)
    mu0 = p + 1 - used
    if mu0 < 1:
        raise DegreeTooSmall(f"roots {roots} need more than p + 1 = {p + 1} functions")
    return validate_root_spec([(0.0, 0.0, mu0), *nonzero], interval)


def _check_overflow(spec: RootSpec) -> None:
    for r in spec.roots:
        if r.alpha * spec.length > MAX_EXPONENT:
            raise ParameterOverflow(
                f"alpha * length = {r.alpha * spec.length:.4g} exceeds {MAX_EXPONENT}"
            )


def derivative_operator(spec: RootSpec) -> np.ndarray:
    """Matrix ``A`` with ``D phi = A phi`` for the fundamental system.

    It encodes the per-root recurrences, e.g. ``D phi_i = phi_{i-1} +
    alpha * phi_i`` for a real root, with ``phi_i = 0`` for ``i < 0``.
    """
    A = np.zeros((spec.dimension, spec.dimension))
    o = 0
    for alpha, beta, mu in spec.roots:
        if beta == 0:
            for i in range(mu):
                A[o + i, o + i] = alpha
                if i > 0:
                    A[o + i, o + i - 1] = 1.0
            o += mu
        else:
            for i in range(mu):
                c, s = o + 2 * i, o + 2 * i + 1
                A[c, c] = alpha
                A[s, s] = alpha
                A[c, s] = -beta
                A[s, c] = beta
                if i > 0:
                    A[c, c - 2] = 1.0
                    A[s, s - 2] = 1.0
            o += 2 * mu
    return A


def _fundamental_values(spec: RootSpec, t: np.ndarray) -> np.ndarray:
    phi = np.empty((spec.dimension, t.size))
    o = 0
    for alpha, beta, mu in spec.roots:
        powers = [np.ones_like(t)]
        for i in range(1, mu):
            powers.append(powers[-1] * t / i)
        damp = np.exp(alpha * t) if alpha != 0 else None
        if beta == 0:
            for i in range(mu):
                phi[o + i] = powers[i] if damp is None else powers[i] * damp
            o += mu
        else:
            cos, sin = np.cos(beta * t), np.sin(beta * t)
            if damp is not None:
                cos, sin = cos * damp, sin * damp
            for i in range(mu):
                phi[o + 2 * i] = powers[i] * cos
                phi[o + 2 * i + 1] = powers[i] * sin
            o += 2 * mu
    return phi


def fundamental_eval_all(spec: RootSpec, points, max_deriv: int = 0) -> np.ndarray:
    """Fundamental system and its derivatives at ``points``.

    Returns an array of shape ``(max_deriv + 1, p + 1, npts)`` whose level
    ``d`` holds ``D^d phi_i(points_k)``. Derivatives are produced level by
    level through the root recurrences.
    """
    _check_overflow(spec)
    x = as_points(points, spec.interval)
    t = x - spec.interval[0]
    out = np.empty((max_deriv + 1, spec.dimension, x.size))
    out[0] = _fundamental_values(spec, t)
    if max_deriv:
        A = derivative_operator(spec)
        for d in range(1, max_deriv + 1):
            out[d] = A @ out[d - 1]
    return out


@dataclass(frozen=True)
class WronskianMatrix:
    """Transposed Wronskian: ``entries[i, j] = D^j phi_i`` at an end point."""

    entries: np.ndarray
    endpoint: str


def wronskian_at(spec: RootSpec, endpoint: str) -> WronskianMatrix:
    check_endpoint(endpoint)
    x = spec.interval[0] if endpoint == LEFT else spec.interval[1]
    levels = fundamental_eval_all(spec, [x], spec.degree)
    return WronskianMatrix(levels[:, :, 0].T.copy(), endpoint)


@dataclass(frozen=True)
class ConversionMatrix:
    """Rows express the Bernstein functions in the fundamental basis."""

    entries: np.ndarray
    condition_flag: bool = False
    warnings: tuple[ConditionRecord, ...] = field(default=())


def _entries(m) -> np.ndarray:
    return np.asarray(m.entries if isinstance(m, WronskianMatrix) else m, dtype=float)


def conversion_matrix(M0, M1, rcond_threshold: float | None = None,
                      context: str = "conversion") -> ConversionMatrix:
    """Bernstein conversion matrix from the end-point derivative matrices.

    Each Bernstein function solves a Hermite problem at the two end points.
    The last row is computed first, then the rows ``p-1, ..., 1`` using the
    running sum of the rows already found, and finally the first row.
    Columns of ``M0``/``M1`` may be rescaled beforehand; the result is
    unaffected since every right-hand side is derived from the same columns.
    """
    M0, M1 = _entries(M0), _entries(M1)
    n = M0.shape[0]
    if M0.shape != (n, n) or M1.shape != (n, n):
        raise ValueError("M0 and M1 must be square matrices of equal size")
    p = n - 1
    threshold = warn_rcond_threshold(rcond_threshold)
    C = np.zeros((n, n))
    records = []

    def solve(A, rhs, row):
        c, rec = solve_left(A, rhs, f"{context}: row {row}", threshold)
        if rec is not None:
            records.append(rec)
        return c

    e = np.zeros(n)
    e[0] = 1.0
    C[p] = solve(np.column_stack([M1[:, 0], M0[:, :p]]), e, p)
    s = np.zeros(n)
    for i in range(2, p + 1):
        s += C[p - i + 2]
        c = np.zeros(n)
        c[i - 1] = -s @ M1[:, i - 1]
        C[p - i + 1] = solve(np.column_stack([M1[:, :i], M0[:, : p - i + 1]]), c, p - i + 1)
    C[0] = solve(np.column_stack([M0[:, 0], M1[:, :p]]), e, 0)
    return ConversionMatrix(C, bool(records), tuple(records))


class TchebPatch(LocalPatch):
    """Bernstein basis of a general null-space, via the conversion matrix."""

    kind = "tcheb"

    def __init__(self, spec: RootSpec, rcond_threshold: float | None = None):
        super().__init__(spec.interval)
        _check_overflow(spec)
        self.spec = spec
        self.M0 = wronskian_at(spec, LEFT)
        self.M1 = wronskian_at(spec, RIGHT)
        self.conversion = conversion_matrix(
            self.M0, self.M1, rcond_threshold, context=f"tcheb(p={spec.degree})"
        )
        x = np.linspace(*spec.interval, 11)
        rec = growth_record(self.conversion.entries, fundamental_eval_all(spec, x)[0],
                            f"tcheb(p={spec.degree})")
        self.warnings = self.conversion.warnings + ((rec,) if rec else ())

    @classmethod
    def from_roots(cls, roots, interval, **kwargs) -> "TchebPatch":
        return cls(validate_root_spec(roots, interval), **kwargs)

    @property
    def degree(self) -> int:
        return self.spec.degree

    @property
    def condition_flag(self) -> bool:
        """Set when a solve was nearly singular or evaluation amplifies roundoff."""
        return bool(self.warnings)

    def eval_all(self, points, max_deriv: int = 0) -> np.ndarray:
        levels = fundamental_eval_all(self.spec, points, max_deriv)
        return np.einsum("ij,djk->dik", self.conversion.entries, levels)

    def diffend_all(self, endpoint: str, max_deriv: int) -> np.ndarray:
        check_endpoint(endpoint)
        if max_deriv > self.degree:
            raise DerivOrderTooHigh(f"order {max_deriv} > degree {self.degree}")
        M = self.M0 if endpoint == LEFT else self.M1
        return self.conversion.entries @ M.entries[:, : max_deriv + 1]


def bernstein_eval_all(space: TchebPatch, points, max_deriv: int = 0) -> np.ndarray:
    return space.eval_all(points, max_deriv)


def bernstein_diffend_all(space: TchebPatch, endpoint: str, max_deriv: int) -> np.ndarray:
    return space.diffend_all(endpoint, max_deriv)

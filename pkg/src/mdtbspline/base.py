"""Common local-space interface and numerical helpers."""

from __future__ import annotations

import logging
import os
import warnings
from abc import ABC, abstractmethod
from typing import NamedTuple

import numpy as np
import scipy.linalg as sla
from scipy.linalg import lapack

from .errors import EmptyInterval, PointOutOfInterval, SingularSystem

logger = logging.getLogger(__name__)

EPS = np.finfo(float).eps
DEFAULT_WARN_RCOND = 1e3 * EPS
RCOND_ENV_VAR = "TCHEB_WARN_RCOND"
#: evaluating ``C phi`` may lose up to ``eps * sum |C| |phi|``; flag above this
EVAL_ERROR_TOL = 1e-9

LEFT = "left"
RIGHT = "right"


def warn_rcond_threshold(value: float | None = None) -> float:
    """Reciprocal-condition threshold below which a solve is flagged.

    An explicit ``value`` wins, then the ``TCHEB_WARN_RCOND`` environment
    variable, then ``1e3 * eps``.
    """
    if value is not None:
        return float(value)
    env = os.environ.get(RCOND_ENV_VAR)
    if env:
        return float(env)
    return DEFAULT_WARN_RCOND


class ConditionRecord(NamedTuple):
    """A nearly singular solve: where it happened and its rcond estimate."""

    context: str
    rcond: float


def check_endpoint(endpoint: str) -> str:
    if endpoint not in (LEFT, RIGHT):
        raise ValueError(f"endpoint must be 'left' or 'right', got {endpoint!r}")
    return endpoint


def check_interval(interval) -> tuple[float, float]:
    x0, x1 = (float(v) for v in interval)
    if not (np.isfinite(x0) and np.isfinite(x1)) or x1 <= x0:
        raise EmptyInterval(f"interval [{x0}, {x1}] is empty")
    return x0, x1


def as_points(points, interval: tuple[float, float]) -> np.ndarray:
    """Validate evaluation points against ``interval``.

    Points within a few ulps of an endpoint are snapped onto it.
    """
    x = np.atleast_1d(np.asarray(points, dtype=float)).ravel()
    x0, x1 = interval
    tol = 8 * EPS * max(1.0, abs(x0), abs(x1))
    if x.size and (x.min() < x0 - tol or x.max() > x1 + tol or not np.all(np.isfinite(x))):
        bad = x[(x < x0 - tol) | (x > x1 + tol) | ~np.isfinite(x)]
        raise PointOutOfInterval(f"points {bad[:5]} outside [{x0}, {x1}]")
    return np.clip(x, x0, x1)


def solve_left(A: np.ndarray, rhs: np.ndarray, context: str, threshold: float):
    """Solve the row-vector system ``c @ A = rhs`` by LU with partial pivoting.

    Returns ``(c, record)`` where ``record`` is a :class:`ConditionRecord`
    when the reciprocal condition estimate of ``A`` is below ``threshold``
    and ``None`` otherwise.
    """
    if not np.all(np.isfinite(A)):
        raise SingularSystem(f"{context}: non-finite entries in system matrix")
    anorm = np.linalg.norm(A, 1)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", sla.LinAlgWarning)
        lu, piv = sla.lu_factor(A, check_finite=False)
    if np.any(np.diag(lu) == 0.0):
        raise SingularSystem(f"{context}: exactly singular system")
    rcond, info = lapack.dgecon(lu, anorm, norm="1")
    c = sla.lu_solve((lu, piv), rhs, trans=1, check_finite=False)
    record = None
    if rcond < threshold:
        record = ConditionRecord(context, float(rcond))
        logger.warning("%s: nearly singular system (rcond=%.3e)", context, rcond)
    return c, record


def growth_record(C: np.ndarray, phi: np.ndarray, context: str,
                  tol: float = EVAL_ERROR_TOL) -> ConditionRecord | None:
    """Flag a conversion whose evaluation amplifies roundoff too much.

    ``phi`` holds fundamental-system values at sample points (functions by
    points). The attainable accuracy of ``C @ phi`` is about ``eps`` times
    the largest column of ``|C| @ |phi|``; the record stores its reciprocal
    in the ``rcond`` slot.
    """
    growth = float((np.abs(C) @ np.abs(phi)).sum(axis=0).max())
    if EPS * growth <= tol:
        return None
    logger.warning("%s: evaluation growth %.3e amplifies roundoff", context, growth)
    return ConditionRecord(f"{context}: evaluation growth", 1.0 / growth)


class LocalPatch(ABC):
    """A local ECT-space on ``[x0, x1]`` represented by its Bernstein basis.

    Subclasses implement :meth:`eval_all` and :meth:`diffend_all`; the
    dimension is ``degree + 1``.
    """

    kind: str = "abstract"

    def __init__(self, interval):
        self.interval = check_interval(interval)
        self.warnings: tuple[ConditionRecord, ...] = ()

    @property
    @abstractmethod
    def degree(self) -> int: ...

    @property
    def dimension(self) -> int:
        return self.degree + 1

    @property
    def length(self) -> float:
        return self.interval[1] - self.interval[0]

    @abstractmethod
    def eval_all(self, points, max_deriv: int = 0) -> np.ndarray:
        """Basis values and derivatives, shape ``(max_deriv + 1, dim, npts)``."""

    @abstractmethod
    def diffend_all(self, endpoint: str, max_deriv: int) -> np.ndarray:
        """End-point derivatives, shape ``(dim, max_deriv + 1)``."""

    def __repr__(self):
        return f"{type(self).__name__}(degree={self.degree}, interval={self.interval})"

"""Ready-made spaces used by the reproduction scripts and the test-suite."""

from __future__ import annotations

import numpy as np

from .ect_space import TchebPatch, null_space
from .mdtb_patch import MDTSpaceSpec
from .special_spaces import GenPolyParams, GenPolyPatch, PolyPatch, PTypePatch

MIXED_BREAKS = (0.0, 1.0, 2.0, 3.0, 4.0)
MIXED_SMOOTHNESS = (-1, 2, 3, 3, -1)
MIXED_ROOTS = ((1, 0, 1), (-1, 0, 1), (0, 2, 1))


def mixed_space(periodic: int | None = None, rcond_threshold=None) -> MDTSpaceSpec:
    """Four pieces of degrees 3, 4, 4, 6 on ``[0, 4]``: polynomial,
    exponential, trigonometric and a general null-space."""
    patches = (
        PolyPatch(3, (0, 1)),
        GenPolyPatch("gexp", GenPolyParams(4, 3.0), (1, 2), rcond_threshold),
        GenPolyPatch("gtrig", GenPolyParams(4, 1.5), (2, 3), rcond_threshold),
        TchebPatch(null_space(6, MIXED_ROOTS, (3, 4)), rcond_threshold),
    )
    return MDTSpaceSpec(MIXED_BREAKS, patches, MIXED_SMOOTHNESS, periodic)


SQUARE_CONTROL_POINTS = np.array([(1.0, 1.0), (-1.0, 1.0), (-1.0, -1.0), (1.0, -1.0)])


def rounded_square_breaks(ell: float) -> tuple[float, ...]:
    pi = np.pi
    return (0.0, pi / 2, ell + pi / 2, ell + pi, 2 * ell + pi, 2 * ell + 1.5 * pi,
            3 * ell + 1.5 * pi, 3 * ell + 2 * pi, 4 * ell + 2 * pi)


def rounded_square_space(ell: float, generalized: bool = False) -> MDTSpaceSpec:
    """Periodic C^1 space alternating quarter-circle and straight pieces."""
    br = rounded_square_breaks(ell)
    patches = []
    for i in range(8):
        iv = (br[i], br[i + 1])
        if i % 2:
            patches.append(PolyPatch(1, iv))
        elif generalized:
            patches.append(GenPolyPatch("gtrig", GenPolyParams(2, 1.0), iv))
        else:
            patches.append(PTypePatch("ptrig", 1.0, 2, iv))
    return MDTSpaceSpec(br, tuple(patches), (-1, *[1] * 7, -1), periodic=1)


def rounded_square(x, ell: float) -> np.ndarray:
    """Closed form of the rounded square with corner radius ``2 / (2 + ell)``."""
    x = np.asarray(x, dtype=float)
    L = 1.0 / (2.0 + ell)
    pi = np.pi
    sin, cos = np.sin, np.cos
    one = np.ones_like(x)
    br = rounded_square_breaks(ell)
    pieces = [
        (-L * (2 * sin(x) + ell), L * (2 * cos(x) + ell)),
        (-one, -L * (2 * x - ell - pi)),
        (-L * (2 * sin(x - ell) + ell), L * (2 * cos(x - ell) - ell)),
        (L * (2 * x - 3 * ell - 2 * pi), -one),
        (-L * (2 * sin(x - 2 * ell) - ell), L * (2 * cos(x - 2 * ell) - ell)),
        (one, L * (2 * x - 5 * ell - 3 * pi)),
        (-L * (2 * sin(x - 3 * ell) - ell), L * (2 * cos(x - 3 * ell) + ell)),
        (-L * (2 * x - 7 * ell - 4 * pi), one),
    ]
    conds = [x < b for b in br[1:-1]] + [x <= br[-1]]
    X = np.select(conds, [p[0] for p in pieces], np.nan)
    Y = np.select(conds, [p[1] for p in pieces], np.nan)
    return np.column_stack([X, Y])


W_INTERVAL = (11 * np.pi / 2, 49 * np.pi / 8)
W_ROOTS = ((0, 1, 1), (1 / (6 * np.pi), 0, 1), (1 / (3 * np.pi), 0, 1), (1 / (6 * np.pi), 1, 1))


def w_space(p: int, rcond_threshold=None) -> TchebPatch:
    """Exponential-trigonometric null-space that becomes unstable for p >= 10."""
    return TchebPatch(null_space(p, W_ROOTS, W_INTERVAL), rcond_threshold)


def trig_mixed_roots(beta: float = 3.0) -> tuple:
    """Nonzero roots of the degree-6 trigonometric space with frequencies 1, 2, beta."""
    return ((0, 1, 1), (0, 2, 1), (0, beta, 1))


CRITICAL_LENGTHS_GT = {2: 3.141, 3: 6.283, 4: 6.283, 5: 8.986, 6: 8.986,
                       7: 11.526, 8: 11.526, 9: 13.975, 10: 13.975}

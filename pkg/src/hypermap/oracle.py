"""Independent brute-force ground truth used by the test suite.

Three tools live here: a closed-form 2x2 SVD, an exhaustive angle sweep for
the most contracted direction, and a central finite difference.  They are
deliberately kept apart from the production formula paths so no identity is
ever validated only against itself.

Note on signs: the derivative of psi_c(y) = 2 pi k cos(2 pi y) is
psi_c'(y) = -4 pi^2 k sin(2 pi y); the leading sign is negative.  The finite
difference here pins that sign.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .stdmap import DirAngle, Mat2

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class Svd2Result:
    """Singular values and right-singular directions of a 2x2 matrix."""

    sigma_max: float
    sigma_min: float
    dir_max: Optional[DirAngle]
    dir_min: Optional[DirAngle]
    degenerate: bool


@dataclass(frozen=True)
class SweepMinResult:
    angle: Optional[DirAngle]
    degenerate: bool


def _image_norm(m: Mat2, theta: float) -> float:
    c, s = math.cos(theta), math.sin(theta)
    return math.hypot(m.a11 * c + m.a12 * s, m.a21 * c + m.a22 * s)


def svd2(m: Mat2) -> Svd2Result:
    """Closed-form singular value decomposition of a 2x2 real matrix.

    Singular values come from the numerically stable split

        h1 = |(a+d, b-c)|,  h2 = |(a-d, b+c)|,
        sigma_max = (h1 + h2)/2,  sigma_min = |h1 - h2|/2,

    and the extremal right-singular directions from the stationarity relation
    tan(2 theta) = 2(ab + cd) / (a^2 + c^2 - b^2 - d^2).  Which of the two
    orthogonal solutions is most contracted is decided by direct evaluation
    of |M v|, never by convention.
    """
    a, b, c, d = m.entries()
    if not all(map(math.isfinite, (a, b, c, d))):
        raise ValueError(f"svd2 requires finite entries, got {m!r}")
    h1 = math.hypot(a + d, b - c)
    h2 = math.hypot(a - d, b + c)
    sigma_max = 0.5 * (h1 + h2)
    sigma_min = 0.5 * abs(h1 - h2)
    if h2 <= 1e-14 * max(h1, 1e-300) or sigma_max == 0.0:
        return Svd2Result(sigma_max, sigma_min, None, None, True)
    num = 2.0 * (a * b + c * d)
    den = a * a + c * c - b * b - d * d
    if num == 0.0 and den == 0.0:
        return Svd2Result(sigma_max, sigma_min, None, None, True)
    t0 = 0.5 * math.atan2(num, den)
    t1 = t0 + 0.5 * math.pi
    if _image_norm(m, t0) <= _image_norm(m, t1):
        dir_min, dir_max = DirAngle(t0), DirAngle(t1)
    else:
        dir_min, dir_max = DirAngle(t1), DirAngle(t0)
    return Svd2Result(sigma_max, sigma_min, dir_max, dir_min, False)


def sweep_min_direction(m: Mat2, grid: int = 100_000) -> SweepMinResult:
    """Most contracted direction by exhaustive minimisation of |M v(theta)|.

    A uniform grid over [0, pi) is followed by golden-section refinement to
    1e-10.  This is the cross-check route, fully independent of svd2.
    """
    if grid < 1000:
        raise ValueError(f"grid must be >= 1000, got {grid}")
    a, b, c, d = m.entries()
    thetas = np.linspace(0.0, math.pi, grid, endpoint=False)
    ct, st = np.cos(thetas), np.sin(thetas)
    norms_sq = (a * ct + b * st) ** 2 + (c * ct + d * st) ** 2
    lo, hi = float(norms_sq.min()), float(norms_sq.max())
    if hi <= 0.0 or (hi - lo) <= 1e-13 * hi:
        return SweepMinResult(None, True)
    i = int(norms_sq.argmin())
    width = math.pi / grid
    xa, xb = thetas[i] - width, thetas[i] + width
    # Golden-section search on the bracketing interval.
    x1 = xb - _GOLDEN * (xb - xa)
    x2 = xa + _GOLDEN * (xb - xa)
    f1, f2 = _image_norm(m, x1), _image_norm(m, x2)
    while xb - xa > 1e-10:
        if f1 <= f2:
            xb, x2, f2 = x2, x1, f1
            x1 = xb - _GOLDEN * (xb - xa)
            f1 = _image_norm(m, x1)
        else:
            xa, x1, f1 = x1, x2, f2
            x2 = xa + _GOLDEN * (xb - xa)
            f2 = _image_norm(m, x2)
    best = 0.5 * (xa + xb)
    # |M v(theta)|^2 is an exact sinusoid in 2 theta, so a three-point vertex
    # solve at well-separated samples removes the sqrt(eps) noise floor that
    # limits any purely comparison-based minimiser.
    h = width
    f0 = _image_norm(m, best) ** 2
    fp = _image_norm(m, best + h) ** 2
    fm = _image_norm(m, best - h) ** 2
    curvature = fp + fm - 2.0 * f0
    if curvature > 0.0:
        best -= 0.5 * math.atan(math.tan(h) * (fp - fm) / curvature)
    return SweepMinResult(DirAngle(best), False)


def fd_derivative(fn: Callable[[float], float], y: float, h: float) -> float:
    """Central difference (fn(y+h) - fn(y-h)) / (2h).

    Non-finite evaluations propagate into the result.
    """
    if h <= 0:
        raise ValueError(f"h must be positive, got {h}")
    return (fn(y + h) - fn(y - h)) / (2.0 * h)

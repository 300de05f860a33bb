"""The critical curve: tangencies between the forward and backward
contracted direction fields.

A tangency at the point with coordinates (ytilde, y) means the forward
field at y and the backward field at ytilde are the same undirected
direction.  Inside the strips where both case formulas carry compatible
offsets, this reduces to phi(y) = phitilde(ytilde), solved by the
multivalued inverse

    y = phi^{-1}(z) = acos((-(z+2) +- sqrt(3 z^2 + 4)) / (4 pi k z)) / (2 pi)

(the radicand 3 z^2 + 4 is always positive).  The selector Gamma intersects
the inverse with a region that switches at ytilde = delta^*, and always
contains exactly two values: one on the lower curve (y < 1/2), one on the
upper (its mirror).  Both curves live inside the tangency strip
Delta_hat_T; the horizontal strips y in [0, delta^-] and [1 - delta^-, 1]
contain no tangencies at all because there the forward field points into
the second quadrant while the backward field stays in the first.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .coordinates import (
    CriticalConstants,
    critical_constants,
    phi_tilde,
    psi,
    psi_prime,
    theta_field,
)
from .stdmap import TWO_PI, MapParams, angle_dist_mod_pi

#: Cushion used for interval membership at delta-boundaries.
_EDGE_TOL = 1e-12


class TangencySelectionError(RuntimeError):
    """The region intersection did not produce exactly two values.

    Indicates k below the validity threshold of the strip constants.
    """


@dataclass(frozen=True)
class TangencyPoint:
    """One point on a tangency curve, in (ytilde, y) coordinates."""

    ytilde: float
    y: float
    branch: str  # "lower" | "upper"
    residual: float  # angle between the two contracted fields, radians

    @property
    def x(self) -> float:
        """Torus x-coordinate, (y - ytilde) mod 1."""
        return (self.y - self.ytilde) % 1.0


@dataclass(frozen=True)
class NoTangencyReport:
    """Minimum field angle over a grid scan of the tangency-free strips."""

    k: float
    grid: int
    min_angle: float
    at_y: float
    at_ytilde: float


def residual_angle(y: float, ytilde: float, params: MapParams) -> float:
    """Angle between the forward field at y and the backward field at ytilde."""
    return theta_field(y, params, "forward").dist(theta_field(ytilde, params, "backward"))


def _polish_root(y: float, psi_target: float, params: MapParams) -> float:
    """Newton-polish y so that psi_c(y) hits the exact quadratic root.

    The closed form goes through an acos/cos round trip; one or two Newton
    steps on psi_c(y) - psi_target remove that rounding.  Skipped where
    psi_c' is too small to divide by (roots never sit there in practice).
    """
    for _ in range(2):
        dp = psi_prime(y, params)
        if abs(dp) < 1e-6 * params.k:
            break
        err = psi(y, params) - psi_target
        if err == 0.0:
            break
        y -= err / dp
    return y


def phi_inverse(z: float, params: MapParams) -> list[float]:
    """All y in [0, 1) with phi(y) = z, for z != 0.

    Each quadratic branch whose acos argument lies in [-1, 1] contributes a
    root y and its mirror 1 - y.  Roots are polished so that phi(y) matches
    z to 1e-10 relative.  The z = 0 case is excluded (the formula divides
    by z); callers use the known zero set {delta^*, 1 - delta^*} instead.
    """
    if z == 0.0:
        raise ValueError("phi_inverse is undefined at z = 0; the zero set of phi is {delta^*, 1 - delta^*}")
    if math.isinf(z):
        raise ValueError("phi_inverse expects finite z; asymptote preimages are delta^-+ by definition")
    root = math.sqrt(3.0 * z * z + 4.0)
    out: list[float] = []
    for sign in (1.0, -1.0):
        psi_root = (-(z + 2.0) + sign * root) / (2.0 * z)
        arg = psi_root / (TWO_PI * params.k)
        if abs(arg) > 1.0:
            continue
        y = math.acos(arg) / TWO_PI
        y = _polish_root(y, psi_root, params)
        out.append(y)
        out.append(1.0 - y)
    return sorted(out)


def _in_union(y: float, intervals: list[tuple[float, float]]) -> bool:
    return any(lo - _EDGE_TOL <= y <= hi + _EDGE_TOL for lo, hi in intervals)


def gamma(ytilde: float, params: MapParams) -> tuple[float, float]:
    """The two tangency heights y above a given diagonal coordinate.

    Evaluates phitilde, inverts phi, and intersects with the region
    dictated by the case split at delta^* and 1 - delta^*.  At the
    asymptotes of phitilde the limit values are the phi-asymptote preimages
    delta^+ and 1 - delta^+.  Returns (lower, upper) with lower < upper.
    """
    consts = critical_constants(params)
    dm, ds, dp = consts.delta_minus, consts.delta_star, consts.delta_plus
    if dm is None or ds is None or dp is None:
        raise TangencySelectionError(f"strip constants undefined for k = {params.k}")
    if not 0.0 <= ytilde < 1.0:
        ytilde %= 1.0

    if abs(ytilde - ds) <= _EDGE_TOL or abs(ytilde - (1.0 - ds)) <= _EDGE_TOL:
        return (dp, 1.0 - dp)

    if ytilde <= ds or ytilde >= 1.0 - ds:
        region = [(dm, dp), (1.0 - dp, 1.0 - dm)]
    else:
        region = [(dp, 1.0 - dp)]

    z = phi_tilde(ytilde, params)
    values = [y for y in phi_inverse(z, params) if _in_union(y, region)]
    if len(values) != 2:
        raise TangencySelectionError(
            f"expected 2 tangency heights at ytilde = {ytilde}, k = {params.k}; got {values}"
        )
    return (values[0], values[1])


def _refine_tangency(y: float, ytilde: float, params: MapParams) -> float:
    """Up to 3 secant steps on the field-angle difference along y.

    The closed-form roots are already accurate; this kills the last of the
    floating-point error so the residual contract (< 1e-8) holds with a
    wide margin.
    """
    def diff(yy: float) -> float:
        a = theta_field(yy, params, "forward").theta
        b = theta_field(ytilde, params, "backward").theta
        d = (a - b) % math.pi
        return d - math.pi if d > math.pi / 2.0 else d

    h = 1e-9
    for _ in range(3):
        d0 = diff(y)
        if abs(d0) < 1e-13:
            break
        d1 = diff(y + h)
        slope = (d1 - d0) / h
        if slope == 0.0:
            break
        step = -d0 / slope
        if abs(step) > 1e-6:
            break
        y += step
    return y


def tangency_curve(params: MapParams, n_samples: int) -> tuple[list[TangencyPoint], list[TangencyPoint]]:
    """Sample both tangency curves over a uniform grid of ytilde.

    Branch assignment is by continuity in y from sample to sample (which
    coincides with the lower/upper split about y = 1/2 for this family).
    """
    if n_samples < 16:
        raise ValueError(f"n_samples must be >= 16, got {n_samples}")
    lower: list[TangencyPoint] = []
    upper: list[TangencyPoint] = []
    prev: Optional[tuple[float, float]] = None
    for i in range(n_samples):
        ytilde = i / n_samples
        lo, hi = gamma(ytilde, params)
        if prev is not None and abs(lo - prev[1]) + abs(hi - prev[0]) < abs(lo - prev[0]) + abs(hi - prev[1]):
            lo, hi = hi, lo
        prev = (lo, hi)
        lo = _refine_tangency(lo, ytilde, params)
        hi = _refine_tangency(hi, ytilde, params)
        lower.append(TangencyPoint(ytilde, lo, "lower", residual_angle(lo, ytilde, params)))
        upper.append(TangencyPoint(ytilde, hi, "upper", residual_angle(hi, ytilde, params)))
    return lower, upper


def tangency_landmarks(params: MapParams) -> list[Optional[TangencyPoint]]:
    """The eight landmark tangency points P1..P8 along the lower curve.

    Their diagonal coordinates are, in order along the curve,

        P1 0          P3 delta^*   P5 1/2           P7 1 - delta^*
        P2 delta^-    P4 delta^+   P6 1 - delta^+   P8 1 - delta^-

    and each height is the lower branch of the tangency selector there:
    P1/P5 land on delta_T^-+, P3/P7 on delta^+ exactly, and P2/P8 resp.
    P4/P6 are the extreme heights of the lower curve (where phi takes the
    k-free values -+ sqrt(3), strictly inside the Delta_hat_T strip).
    A landmark whose diagonal coordinate is unavailable for this k is None.
    """
    c = critical_constants(params)
    ytildes: list[Optional[float]] = [
        0.0,
        c.delta_minus,
        c.delta_star,
        c.delta_plus,
        0.5,
        None if c.delta_plus is None else 1.0 - c.delta_plus,
        None if c.delta_star is None else 1.0 - c.delta_star,
        None if c.delta_minus is None else 1.0 - c.delta_minus,
    ]
    out: list[Optional[TangencyPoint]] = []
    for ytilde in ytildes:
        if ytilde is None:
            out.append(None)
            continue
        try:
            y = gamma(ytilde, params)[0]  # lower branch: y < 1/2
        except TangencySelectionError:
            out.append(None)  # selector degenerates below the validity range
            continue
        y = _refine_tangency(y, ytilde, params)
        out.append(TangencyPoint(ytilde, y, "lower", residual_angle(y, ytilde, params)))
    return out


def no_tangency_scan(params: MapParams, grid: int) -> NoTangencyReport:
    """Minimum angle between the two contracted fields over the strips
    y in [0, delta^-] and [1 - delta^-, 1], sampled on a grid x grid mesh.

    The minimum is strictly positive: no tangencies occur there.
    """
    if grid < 64:
        raise ValueError(f"grid must be >= 64, got {grid}")
    c = critical_constants(params)
    dm = c.delta_minus
    if dm is None:
        raise ValueError(f"delta^- undefined for k = {params.k}")
    half = grid // 2
    ys = [dm * j / (half - 1) for j in range(half)]
    ys += [1.0 - y for y in ys]
    best = math.inf
    best_y = best_yt = 0.0
    backward_cache: dict[float, float] = {}
    for y in ys:
        th_f = theta_field(y, params, "forward").theta
        for i in range(grid):
            x = i / grid
            yt = (y - x) % 1.0
            th_b = backward_cache.get(yt)
            if th_b is None:
                th_b = theta_field(yt, params, "backward").theta
                backward_cache[yt] = th_b
            d = angle_dist_mod_pi(th_f, th_b)
            if d < best:
                best, best_y, best_yt = d, y, yt
    return NoTangencyReport(params.k, grid, best, best_y, best_yt)


def delta_constants_with_tangency(params: MapParams) -> CriticalConstants:
    """Convenience re-export: full constant set including delta_T^-+."""
    return critical_constants(params)

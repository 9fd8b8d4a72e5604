"""Electrostatic field of a uniformly charged plane with a horizontal slit.

The screen occupies the plane x = 0 except for a gap |y| < R (the slit);
the strip extends to infinity along z.  A point charge moving in the z = 0
plane feels the in-plane force

    F_x = 2*qs * (sign(x)*pi + atan((y-R)/x) - atan((y+R)/x))
    F_y = qs * ln[(x^2 + (R-y)^2) / (x^2 + (R+y)^2)]

where qs is the product of particle charge and screen charge density
(qs < 0 means attraction).  The sign(x) factor makes the closed form valid
on both sides of the screen; without it the expression only holds for
x > 0.  `force_quadrature` integrates the underlying surface-charge
integrals directly and serves as an independent check of the closed form,
including the sign convention.

All quantities are dimensionless model units.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.integrate import quad

from .errors import ScreenSurfaceError, ToleranceNotMetError


class Vec2(NamedTuple):
    """Point or vector in the xy-plane."""

    x: float
    y: float


@dataclass(frozen=True)
class FieldParams:
    """Strength and geometry of the charged screen.

    charge_product: combined q*sigma scale; 0 disables the field,
        negative values attract the particle to the screen.
    slit_half_height: half-height R of the gap, R > 0.
    """

    charge_product: float
    slit_half_height: float

    def __post_init__(self) -> None:
        if not math.isfinite(self.charge_product):
            raise ValueError("charge_product must be finite")
        if not (self.slit_half_height > 0):
            raise ValueError("slit_half_height must be > 0")


@dataclass(frozen=True)
class QuadratureSpec:
    """Controls for the direct numerical integration of the screen force.

    truncation_half_width: symmetric cutoff Y for the charged-line
        coordinate; the two half-lines are truncated at the same |Y| so
        their logarithmically divergent contributions cancel.  The
        remainder beyond Y is integrated as a symmetrically paired tail,
        which is the exact Y -> infinity limit of the symmetric cutoff.
    abs_tol: absolute tolerance on each force component.
    max_subdivisions: adaptive subdivision budget per integral.
    """

    truncation_half_width: float
    abs_tol: float = 1e-10
    max_subdivisions: int = 200

    def __post_init__(self) -> None:
        if not (self.abs_tol > 0):
            raise ValueError("abs_tol must be > 0")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be >= 1")


def on_screen_surface(p: Vec2, params: FieldParams) -> bool:
    """True when p lies on the charged part of the plane x = 0."""
    return p[0] == 0.0 and abs(p[1]) >= params.slit_half_height


def _check_point(p: Vec2, params: FieldParams) -> None:
    if not (math.isfinite(p[0]) and math.isfinite(p[1])):
        raise ValueError(f"non-finite field point {p!r}")
    if on_screen_surface(p, params):
        raise ScreenSurfaceError(f"point {p!r} lies on the screen surface")


def _force_scalar(x: float, y: float, qs: float, R: float) -> tuple[float, float]:
    """Closed-form force components; assumes the point is off the surface.

    Works with |x|, |y| internally so that the mirror identities
    F_x(-x, y) = -F_x(x, y) and F_y(x, -y) = -F_y(x, y) hold exactly in
    floating point; trajectory mirror tests rely on this.
    """
    ax = abs(x)
    ay = abs(y)
    d1 = ay - R
    d2 = ay + R
    if ax == 0.0:
        fx = 0.0
    else:
        fx = ((math.atan(d1 / ax) - math.atan(d2 / ax)) + math.pi) * (2.0 * qs)
        if x < 0.0:
            fx = -fx
    x2 = x * x
    g = qs * math.log((x2 + d1 * d1) / (x2 + d2 * d2))
    fy = -g if y < 0.0 else g
    return fx, fy


def force_closed_form(p: Vec2, params: FieldParams) -> Vec2:
    """Force of the charged screen on a particle at p.

    Raises ScreenSurfaceError on the charged surface and ValueError on
    non-finite input.  At x = 0 inside the slit the analytic limit
    F_x = 0 is returned.
    """
    _check_point(p, params)
    fx, fy = _force_scalar(p[0], p[1], params.charge_product, params.slit_half_height)
    return Vec2(fx, fy)


def force_batch(x: np.ndarray, y: np.ndarray, params: FieldParams) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized closed-form force for trajectory ensembles.

    Same even/odd canonicalization as the scalar path, so mirror
    symmetry is exact elementwise.  Points on the screen surface are the
    caller's responsibility; they never occur in the stepping loop
    because blocking happens before the force is evaluated there.
    """
    qs = params.charge_product
    R = params.slit_half_height
    ax = np.abs(x)
    ay = np.abs(y)
    d1 = ay - R
    d2 = ay + R
    with np.errstate(divide="ignore"):
        inv = 1.0 / ax
    fxm = ((np.arctan(d1 * inv) - np.arctan(d2 * inv)) + np.pi) * (2.0 * qs)
    fx = np.where(x < 0.0, -fxm, fxm)
    x2 = x * x
    g = qs * np.log((d1 * d1 + x2) / (d2 * d2 + x2))
    fy = np.where(y < 0.0, -g, g)
    return fx, fy


def _quad_checked(fun, a: float, b: float, spec: QuadratureSpec) -> float:
    """scipy.integrate.quad within the QuadratureSpec budget, or ToleranceNotMetError."""
    result = quad(fun, a, b, epsabs=spec.abs_tol / 8.0, epsrel=1e-12,
                  limit=spec.max_subdivisions, full_output=1)
    if len(result) > 3:
        raise ToleranceNotMetError(
            f"quadrature on [{a}, {b}] did not converge: {result[3]}")
    value, abserr = result[0], result[1]
    if abserr > max(spec.abs_tol, 1e-10 * abs(value)):
        raise ToleranceNotMetError(
            f"quadrature on [{a}, {b}] reached error {abserr:.3e} > {spec.abs_tol:.3e}")
    return value


def force_quadrature(p: Vec2, params: FieldParams, spec: QuadratureSpec) -> Vec2:
    """Direct integration of the screen-charge force, the oracle for
    `force_closed_form`.

    The z-integral of the Coulomb kernel is done analytically, leaving
    one integral per component over the charged set |y'| > R:

        F_x = qs * Int 2 x / (x^2 + (y - y')^2) dy'
        F_y = qs * Int 2 (y - y') / (x^2 + (y - y')^2) dy'

    Each half-line is integrated up to the symmetric cutoff Y; beyond Y
    the two tails are combined into a single absolutely convergent
    integrand (the y' -> -y' pair), which preserves the cancellation of
    the log divergence and removes the O(1/Y) truncation error.
    """
    _check_point(p, params)
    x, y = float(p[0]), float(p[1])
    qs = params.charge_product
    R = params.slit_half_height
    Y = float(spec.truncation_half_width)
    if not Y > R:
        raise ValueError("truncation_half_width must exceed slit_half_height")

    def gx(yp: float) -> float:
        u = y - yp
        return 2.0 * x / (x * x + u * u)

    def gy(yp: float) -> float:
        u = y - yp
        return 2.0 * u / (x * x + u * u)

    fx = _quad_checked(gx, R, Y, spec) + _quad_checked(gx, -Y, -R, spec)
    fy = _quad_checked(gy, R, Y, spec) + _quad_checked(gy, -Y, -R, spec)
    # Paired tails: s >= Y contributes g(s) + g(-s), decaying like 1/s^2.
    fx += _quad_checked(lambda s: gx(s) + gx(-s), Y, math.inf, spec)
    fy += _quad_checked(lambda s: gy(s) + gy(-s), Y, math.inf, spec)
    return Vec2(qs * fx, qs * fy)


def potential(p: Vec2, params: FieldParams) -> float:
    """Potential energy of the particle in the screen field, zero at (0, 0).

    Exact antiderivative of the closed-form force; equals the line
    integral of -F along any path from the origin through the slit.
    Raises ScreenSurfaceError on the charged surface, where no such path
    ends.
    """
    _check_point(p, params)
    qs = params.charge_product
    R = params.slit_half_height
    x, y = float(p[0]), float(p[1])
    a1 = y - R
    a2 = y + R
    bracket = math.pi * abs(x)
    if x != 0.0:
        bracket += x * (math.atan(a1 / x) - math.atan(a2 / x))
    bracket += 0.5 * a1 * math.log(x * x + a1 * a1)
    bracket -= 0.5 * a2 * math.log(x * x + a2 * a2)
    return -2.0 * qs * (bracket + 2.0 * R * math.log(R))

"""Closed-form evaluation of the two-player payoff and the planar
descent-ascent vector field it induces on the means, plus the polar
identities (radial growth, angular velocity, divergence) used everywhere
else in the package.

All functions are pure and operate on plain floats; the component helpers
accept numpy arrays as well, which is what the certification grids use.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Params:
    """Game parameters: coupling strength alpha (>= 1, dimensionless) and
    diffusion coefficient eps (>= 0, dimensionless; 0 means deterministic)."""

    alpha: float
    eps: float = 0.0

    def __post_init__(self):
        if not math.isfinite(self.alpha) or self.alpha < 1.0:
            raise ValueError(f"alpha must be finite and >= 1, got {self.alpha}")
        if not math.isfinite(self.eps) or self.eps < 0.0:
            raise ValueError(f"eps must be finite and >= 0, got {self.eps}")


@dataclass(frozen=True)
class Point2:
    """A point (m, n) in the plane of means, with polar accessors."""

    m: float
    n: float

    @property
    def r2(self) -> float:
        return self.m * self.m + self.n * self.n

    @property
    def r(self) -> float:
        return math.hypot(self.m, self.n)

    @property
    def theta(self) -> float:
        """Polar angle in (-pi, pi]; undefined (raises) at the origin."""
        if self.m == 0.0 and self.n == 0.0:
            raise ValueError("polar angle undefined at the origin (r = 0)")
        return math.atan2(self.n, self.m)

    def as_array(self) -> np.ndarray:
        return np.array([self.m, self.n], dtype=float)


@dataclass(frozen=True)
class Annulus:
    """The annulus 3 <= m^2 + n^2 <= 6 that confines the limit cycle."""

    r2_min: float = 3.0
    r2_max: float = 6.0

    def contains(self, p: Point2, tol: float = 0.0) -> bool:
        r2 = p.r2
        return self.r2_min - tol <= r2 <= self.r2_max + tol


ANNULUS = Annulus()


def payoff(params: Params, x: float, y: float) -> float:
    """Two-player objective: descent in x, ascent in y.

    alpha*x*y - x^2/2 + x^4/12 + y^2/2 - y^4/12, a double well per
    coordinate with bilinear coupling.
    """
    return params.alpha * x * y - x * x / 2.0 + x**4 / 12.0 + y * y / 2.0 - y**4 / 12.0


def field_components(alpha, m, n):
    """Descent-ascent field components (array-friendly).

    F1 = -alpha*n + m - m^3/3 = -d(payoff)/dx at (m, n)
    F2 =  alpha*m + n - n^3/3 = +d(payoff)/dy at (m, n)
    """
    return -alpha * n + (m - m**3 / 3.0), alpha * m + (n - n**3 / 3.0)


def vector_field(params: Params, p: Point2) -> Point2:
    f1, f2 = field_components(params.alpha, p.m, p.n)
    return Point2(f1, f2)


def jacobian(params: Params, p: Point2) -> np.ndarray:
    """Jacobian of the field: [[1 - m^2, -alpha], [alpha, 1 - n^2]]."""
    return np.array(
        [
            [1.0 - p.m * p.m, -params.alpha],
            [params.alpha, 1.0 - p.n * p.n],
        ]
    )


def divergence(params: Params, p: Point2) -> float:
    """Divergence of the field, 2 - r^2; independent of alpha and strictly
    negative on the annulus."""
    return 2.0 - p.r2


def angular_velocity(params: Params, p: Point2) -> float:
    """d(theta)/dt along the flow: alpha + (r^2/12) sin(4 theta).

    Requires r > 0; bounded below by alpha - 1/2 on the annulus, so the
    motion there always turns anticlockwise.
    """
    theta = p.theta  # raises at the origin
    return params.alpha + p.r2 / 12.0 * math.sin(4.0 * theta)


def radial_derivative(params: Params, p: Point2) -> float:
    """d(r^2)/dt along the flow: 2 r^2 - (2/3)(m^4 + n^4); alpha-free."""
    return 2.0 * p.r2 - 2.0 / 3.0 * (p.m**4 + p.n**4)

"""Distance-to-cycle geometry: nearest-point projection onto the sampled
orbit and tracking of a (possibly stochastic) mean path against the
deterministic flow started from its projection.

Queries do a coarse scan over the cycle samples and then minimize the
squared distance to a periodic cubic spline through them on the bracketing
time window.  The spline keeps the projection smooth enough that the
gradient identity grad g = 2 (z - proj) and the near-cycle decay ratios
hold to the tolerances the tests use; a piecewise-linear polyline would
contaminate both with kink noise.
"""
from __future__ import annotations

import math
import warnings

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.optimize import minimize_scalar

from .dynamics import Params, Point2
from .flow import LimitCycle, Trajectory, _rk4_step, default_dt


class ProjectionNeighborhoodWarning(UserWarning):
    """A query point sits outside the configured projection neighborhood."""


class CycleGeometry:
    """Immutable nearest-point index over a sampled limit cycle.

    neighborhood_g bounds the squared distance within which the projection
    is trusted to be well-defined; callers are warned beyond it.
    """

    def __init__(self, cycle: LimitCycle, neighborhood_g: float = 0.25):
        self.cycle = cycle
        self.neighborhood_g = neighborhood_g
        t_ext = np.append(cycle.sample_times, cycle.period)
        pts_ext = np.vstack([cycle.samples, cycle.samples[:1]])
        self._spline = CubicSpline(
            t_ext, pts_ext, bc_type="periodic", extrapolate="periodic", axis=0
        )
        self._d1 = self._spline.derivative(1)
        self._d2 = self._spline.derivative(2)
        self._samples = cycle.samples
        self._dt_sample = cycle.period / len(cycle.samples)

    def point_at(self, t: float) -> np.ndarray:
        return self._spline(t)

    def _newton_foot(self, z: np.ndarray, t0: float, lo: float, hi: float):
        # drive the orthogonality residual (S(t) - z) . S'(t) to zero; this
        # pins the foot point tangentially far tighter than a tolerance on
        # the squared distance alone can
        t = t0
        for _ in range(12):
            q = self._spline(t)
            dq = self._d1(t)
            ddq = self._d2(t)
            rx, ry = q[0] - z[0], q[1] - z[1]
            psi = rx * dq[0] + ry * dq[1]
            dpsi = dq[0] ** 2 + dq[1] ** 2 + rx * ddq[0] + ry * ddq[1]
            if dpsi <= 0.0:
                return None
            step = psi / dpsi
            t_new = t - step
            if not lo <= t_new <= hi:
                return None
            t = t_new
            if abs(step) <= 1e-15 * self.cycle.period:
                return t
        return None

    def project(self, z: np.ndarray) -> tuple[float, np.ndarray]:
        """Squared distance to the cycle and the minimizing point."""
        d2 = ((self._samples - z) ** 2).sum(axis=1)
        i = int(np.argmin(d2))
        n = len(self._samples)
        t_i = i * self._dt_sample
        lo, hi = t_i - self._dt_sample, t_i + self._dt_sample
        spline = self._spline

        def sqdist(t: float) -> float:
            q = spline(t)
            return float((q[0] - z[0]) ** 2 + (q[1] - z[1]) ** 2)

        # parabola vertex through the bracketing squared distances seeds the
        # Newton polish; a bounded scan is the fallback for degenerate cases
        # (for example queries near the curve's center)
        a = d2[(i - 1) % n]
        b = d2[i]
        c = d2[(i + 1) % n]
        denom = a - 2.0 * b + c
        t0 = t_i if denom <= 0.0 else t_i + 0.5 * (a - c) / denom * self._dt_sample
        t_star = self._newton_foot(z, min(max(t0, lo), hi), lo, hi)
        if t_star is None:
            res = minimize_scalar(
                sqdist,
                bounds=(lo, hi),
                method="bounded",
                options={"xatol": 1e-12 * self.cycle.period},
            )
            t_star = self._newton_foot(z, float(res.x), lo, hi)
            if t_star is None:
                t_star = float(res.x)
        g = sqdist(t_star)
        if g <= b:
            return g, np.asarray(spline(t_star), dtype=float)
        return float(b), self._samples[i].copy()


def distance_to_cycle(geom: CycleGeometry, z: Point2) -> tuple[float, Point2]:
    """g(z) = squared distance from z to the cycle, and its projection."""
    g, proj = geom.project(np.array([z.m, z.n]))
    return g, Point2(float(proj[0]), float(proj[1]))


def track_cycle(
    geom: CycleGeometry,
    params: Params,
    mean_path: Trajectory,
    dt: float | None = None,
) -> tuple[float, Trajectory]:
    """Compare a mean path against the deterministic flow from its projected
    start.

    The tracked path solves the mean ODE by RK4 from the projection of the
    first mean-path point, sampled at the mean path's own times (with
    internal substeps so the RK4 step never exceeds the default step for
    this alpha).  Returns the max pointwise deviation and the tracked path.
    """
    p0 = Point2(float(mean_path.points[0, 0]), float(mean_path.points[0, 1]))
    g0, proj = distance_to_cycle(geom, p0)
    if g0 > geom.neighborhood_g:
        warnings.warn(
            f"mean path starts at g = {g0:.4g} > neighborhood bound "
            f"{geom.neighborhood_g:g}; projection may be ill-defined",
            ProjectionNeighborhoodWarning,
        )
    step = mean_path.step
    h_target = default_dt(params.alpha) if dt is None else dt
    n_sub = max(1, math.ceil(step / h_target))
    h = step / n_sub
    alpha = params.alpha

    tracked = np.empty_like(mean_path.points)
    m, n = proj.m, proj.n
    tracked[0] = (m, n)
    for k in range(1, len(tracked)):
        for _ in range(n_sub):
            m, n = _rk4_step(alpha, m, n, h)
        tracked[k] = (m, n)
    dev = np.hypot(
        mean_path.points[:, 0] - tracked[:, 0],
        mean_path.points[:, 1] - tracked[:, 1],
    )
    return float(dev.max()), Trajectory(mean_path.times.copy(), tracked)

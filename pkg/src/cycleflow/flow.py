"""Deterministic integration of the mean dynamics and extraction of its
unique attracting periodic orbit.

The integrator is fixed-step classical RK4 (bit-reproducible, no adaptive
control).  The cycle finder marches the flow from a seed, detects upward
crossings of the Poincare section {n = 0, m > 0}, refines each crossing by
bisection on a cubic Hermite interpolant of the stored step, and declares
convergence when two successive section hits agree in m to the requested
tolerance.  One period is then re-integrated and sampled uniformly in time.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .dynamics import Params, Point2


class BlowupError(RuntimeError):
    """Integration produced a non-finite state."""

    def __init__(self, step: int, t: float):
        self.step = step
        self.t = t
        super().__init__(f"non-finite state at step {step} (t = {t:g})")


class CycleConvergenceError(RuntimeError):
    """Poincare iteration did not settle within the allowed section hits."""

    def __init__(self, max_hits: int, last_two: tuple[float, float]):
        self.max_hits = max_hits
        self.last_two = last_two
        super().__init__(
            f"no cycle convergence within {max_hits} section hits; "
            f"last two section m-values: {last_two[0]!r}, {last_two[1]!r}"
        )


class WindingAliasingError(ValueError):
    """Angle increment of a trajectory step reached pi; dt is too large."""


@dataclass(frozen=True)
class Trajectory:
    """Uniformly sampled solution path: times (strictly increasing, uniform
    step) and points, one (m, n) row per time."""

    times: np.ndarray
    points: np.ndarray

    def __post_init__(self):
        if len(self.times) < 2 or len(self.times) != len(self.points):
            raise ValueError("trajectory needs >= 2 samples with matching times")
        steps = np.diff(self.times)
        if steps[0] <= 0 or abs(steps.max() - steps.min()) > 1e-9 * steps[0]:
            raise ValueError("trajectory times must increase with uniform step")

    @property
    def step(self) -> float:
        return float(self.times[1] - self.times[0])

    def final(self) -> Point2:
        return Point2(float(self.points[-1, 0]), float(self.points[-1, 1]))

    def r2(self) -> np.ndarray:
        return self.points[:, 0] ** 2 + self.points[:, 1] ** 2


@dataclass(frozen=True)
class LimitCycle:
    """One sampled period of the attracting orbit.

    samples[k] sits at time sample_times[k] = k * period / len(samples); the
    polyline is implicitly closed (the last sample is one step before the
    start, not a duplicate of it).
    """

    alpha: float
    period: float
    samples: np.ndarray
    sample_times: np.ndarray

    def r2(self) -> np.ndarray:
        return self.samples[:, 0] ** 2 + self.samples[:, 1] ** 2

    def as_trajectory(self) -> Trajectory:
        return Trajectory(self.sample_times.copy(), self.samples.copy())


def default_dt(alpha: float) -> float:
    """Default integration step: resolves the fastest rotation scale.

    The period is bounded above by 4 pi / (2 alpha - 1); 2000 steps per
    worst-case period, capped at 1e-3.
    """
    return min(1e-3, 4.0 * math.pi / (2.0 * alpha - 1.0) / 2000.0)


def _rk4_step(alpha: float, m: float, n: float, h: float) -> tuple[float, float]:
    k1m = -alpha * n + m - m * m * m / 3.0
    k1n = alpha * m + n - n * n * n / 3.0
    m2 = m + 0.5 * h * k1m
    n2 = n + 0.5 * h * k1n
    k2m = -alpha * n2 + m2 - m2 * m2 * m2 / 3.0
    k2n = alpha * m2 + n2 - n2 * n2 * n2 / 3.0
    m3 = m + 0.5 * h * k2m
    n3 = n + 0.5 * h * k2n
    k3m = -alpha * n3 + m3 - m3 * m3 * m3 / 3.0
    k3n = alpha * m3 + n3 - n3 * n3 * n3 / 3.0
    m4 = m + h * k3m
    n4 = n + h * k3n
    k4m = -alpha * n4 + m4 - m4 * m4 * m4 / 3.0
    k4n = alpha * m4 + n4 - n4 * n4 * n4 / 3.0
    return (
        m + h * (k1m + 2.0 * (k2m + k3m) + k4m) / 6.0,
        n + h * (k1n + 2.0 * (k2n + k3n) + k4n) / 6.0,
    )


def integrate(params: Params, p0: Point2, t_end: float, dt: float) -> Trajectory:
    """Fixed-step RK4 trajectory from p0 over [0, t_end].

    The number of steps is round(t_end / dt), so the final time is within
    dt/2 of t_end.  Raises BlowupError with the first bad step index if the
    state leaves the representable range.
    """
    if dt <= 0.0:
        raise ValueError("dt must be positive")
    if t_end < dt:
        raise ValueError("t_end must be at least dt")
    n_steps = max(1, round(t_end / dt))
    alpha = params.alpha
    pts = np.empty((n_steps + 1, 2))
    m, n = p0.m, p0.n
    pts[0] = (m, n)
    for k in range(1, n_steps + 1):
        m, n = _rk4_step(alpha, m, n, dt)
        if not (math.isfinite(m) and math.isfinite(n)):
            raise BlowupError(k, k * dt)
        pts[k] = (m, n)
    return Trajectory(np.arange(n_steps + 1) * dt, pts)


def _hermite(s: float, h: float, y0: float, d0: float, y1: float, d1: float) -> float:
    # cubic Hermite on [0, 1] with endpoint slopes scaled by the step h
    s2 = s * s
    s3 = s2 * s
    return (
        (2.0 * s3 - 3.0 * s2 + 1.0) * y0
        + (s3 - 2.0 * s2 + s) * h * d0
        + (-2.0 * s3 + 3.0 * s2) * y1
        + (s3 - s2) * h * d1
    )


def find_limit_cycle(
    params: Params,
    tol: float = 1e-9,
    *,
    seed_point: tuple[float, float] = (2.0, 0.0),
    dt: float | None = None,
    max_hits: int = 200,
    warmup_hits: int = 5,
    n_samples: int = 2048,
) -> LimitCycle:
    """Locate the attracting periodic orbit via its Poincare return map.

    tol is both the bisection width for crossing times and the convergence
    threshold on successive section m-values.  The first `warmup_hits`
    section hits are discarded as transient.  Raises CycleConvergenceError
    (carrying the last two section values) after `max_hits` hits without
    convergence.
    """
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    alpha = params.alpha
    h = default_dt(alpha) if dt is None else dt
    if h <= 0.0:
        raise ValueError("dt must be positive")

    m, n = float(seed_point[0]), float(seed_point[1])
    fm = -alpha * n + m - m**3 / 3.0
    fn = alpha * m + n - n**3 / 3.0
    t = 0.0
    hits_t: list[float] = []
    hits_m: list[float] = []
    start_state: tuple[float, float] | None = None
    period = 0.0
    step = 0

    while len(hits_t) < max_hits:
        m1, n1 = _rk4_step(alpha, m, n, h)
        step += 1
        if not (math.isfinite(m1) and math.isfinite(n1)):
            raise BlowupError(step, t + h)
        f1m = -alpha * n1 + m1 - m1**3 / 3.0
        f1n = alpha * m1 + n1 - n1**3 / 3.0
        if n < 0.0 <= n1:
            # upward section crossing inside (t, t+h]; bisect the Hermite
            # interpolant of n to width <= tol (<= 60 halvings)
            lo, hi = 0.0, 1.0
            for _ in range(60):
                if (hi - lo) * h <= tol:
                    break
                mid = 0.5 * (lo + hi)
                if _hermite(mid, h, n, fn, n1, f1n) < 0.0:
                    lo = mid
                else:
                    hi = mid
            s = 0.5 * (lo + hi)
            m_star = _hermite(s, h, m, fm, m1, f1m)
            n_star = _hermite(s, h, n, fn, n1, f1n)
            t_star = t + s * h
            if m_star > 0.0:
                hits_t.append(t_star)
                hits_m.append(m_star)
                k = len(hits_m) - 1
                if k >= warmup_hits + 1 and abs(hits_m[k] - hits_m[k - 1]) < tol:
                    period = hits_t[k] - hits_t[k - 1]
                    start_state = (m_star, n_star)
                    break
        m, n, fm, fn = m1, n1, f1m, f1n
        t += h

    if start_state is None:
        last_two = (hits_m[-2], hits_m[-1]) if len(hits_m) >= 2 else (math.nan, math.nan)
        raise CycleConvergenceError(max_hits, last_two)

    # resample exactly one period at n_samples uniform time points, with
    # enough substeps to keep the RK4 step at or below the search step
    n_sub = max(1, math.ceil(period / n_samples / h))
    hs = period / (n_samples * n_sub)
    samples = np.empty((n_samples, 2))
    m, n = start_state
    for k in range(n_samples):
        samples[k] = (m, n)
        for _ in range(n_sub):
            m, n = _rk4_step(alpha, m, n, hs)
    times = np.arange(n_samples) * (period / n_samples)
    return LimitCycle(alpha=alpha, period=period, samples=samples, sample_times=times)


def winding_number(traj: Trajectory, center: Point2) -> int:
    """Signed number of turns of the path around `center`.

    Sums wrapped angle increments; every per-step increment must stay below
    pi in magnitude, otherwise the sampling is too coarse to count turns and
    WindingAliasingError is raised.  No path point may coincide with center.
    """
    rel = traj.points - np.array([center.m, center.n])
    if np.any(np.all(rel == 0.0, axis=1)):
        raise ValueError("trajectory passes through the winding center")
    ang = np.arctan2(rel[:, 1], rel[:, 0])
    d = np.diff(ang)
    d -= 2.0 * np.pi * np.round(d / (2.0 * np.pi))
    if np.any(np.abs(d) >= np.pi):
        raise WindingAliasingError(
            "angle increment reached pi between consecutive samples; "
            "re-integrate with a smaller dt"
        )
    return int(round(float(d.sum()) / (2.0 * np.pi)))


def time_average(cycle: LimitCycle, observable: Callable[[Point2], float]) -> float:
    """Average of `observable` over one period of the cycle.

    With uniform time samples on a closed orbit, the trapezoidal rule with
    the closing segment reduces to the plain mean of the sampled values
    (and inherits spectral accuracy in the sample count).
    """
    vals = np.fromiter(
        (observable(Point2(float(m), float(n))) for m, n in cycle.samples),
        dtype=float,
        count=len(cycle.samples),
    )
    return float(vals.mean())

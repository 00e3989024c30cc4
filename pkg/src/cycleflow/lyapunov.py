"""Numerical certificate that the cycle attracts: positivity of the
normal-contraction quadratic form over the annulus, its exact split into
an alpha^2 leading term plus a remainder, and a direct sampled check of
the decay inequality F . grad g <= -c g near the cycle.

The annulus scan is a Lipschitz-margin grid sweep, not interval
arithmetic: the reported margin is (covering radius of the grid) times a
numerically estimated Lipschitz constant inflated by 2x, and `positive`
means the grid minimum clears that margin.  A non-positive report is data,
not an error.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .dynamics import Params, Point2, field_components
from .geometry import CycleGeometry, distance_to_cycle


@dataclass(frozen=True)
class CertReport:
    """Outcome of an annulus scan (optionally augmented with a decay check).

    positive == (inf_value - lipschitz_margin > 0); estimated_c and
    delta_used stay 0.0 until a decay check fills them in.
    """

    alpha: float
    grid_radial: int
    grid_angular: int
    inf_value: float
    argmin: Point2
    lipschitz_margin: float
    positive: bool
    estimated_c: float = 0.0
    delta_used: float = 0.0

    def with_decay(self, estimated_c: float, delta_used: float) -> "CertReport":
        return replace(self, estimated_c=estimated_c, delta_used=delta_used)


def _qform(alpha, m, n):
    f1, f2 = field_components(alpha, m, n)
    return (m**2 - 1.0) * f2**2 + (n**2 - 1.0) * f1**2


def quadratic_form(params: Params, p: Point2) -> float:
    """(m^2 - 1) F2^2 + (n^2 - 1) F1^2 at p.

    Up to the positive factor |F|^2 this is the negated normal-direction
    form nu . (grad F) nu along the unit normal nu = (F2, -F1)/|F|; it is
    deliberately left unnormalized.
    """
    return float(_qform(params.alpha, p.m, p.n))


def remainder(params: Params, p: Point2) -> float:
    """Sub-leading part of the quadratic form:

    (4 alpha / 3) m n (m^2 - n^2) + (m^2 - 1)(n - n^3/3)^2
                                  + (n^2 - 1)(m - m^3/3)^2,
    so that quadratic_form = alpha^2 (m^4 + n^4 - m^2 - n^2) + remainder.
    """
    m, n = p.m, p.n
    u = m - m**3 / 3.0
    v = n - n**3 / 3.0
    return (
        4.0 * params.alpha / 3.0 * m * n * (m * m - n * n)
        + (m * m - 1.0) * v * v
        + (n * n - 1.0) * u * u
    )


def _polar_grid(radial: int, angular: int) -> tuple[np.ndarray, np.ndarray]:
    # r^2 uniform over [3, 6] inclusive, theta uniform over [0, 2 pi)
    r = np.sqrt(np.linspace(3.0, 6.0, radial))[:, None]
    th = (np.arange(angular) * (2.0 * np.pi / angular))[None, :]
    return r * np.cos(th), r * np.sin(th)


def _covering_radius(radial: int, angular: int) -> float:
    # every annulus point lies within half a cell diagonal of a grid node;
    # bound the radial width at the inner radius and the arc at the outer
    dr2 = 3.0 / (radial - 1)
    dth = 2.0 * np.pi / angular
    return 0.5 * math.hypot(dr2 / (2.0 * math.sqrt(3.0)), math.sqrt(6.0) * dth)


def _lipschitz_estimate(alpha: float, radial: int, angular: int) -> float:
    """Max slope of the form between neighbors of a probe grid, inflated 2x."""
    m, n = _polar_grid(radial, angular)
    q = _qform(alpha, m, n)
    # radial neighbors
    dq_r = np.abs(np.diff(q, axis=0))
    dist_r = np.hypot(np.diff(m, axis=0), np.diff(n, axis=0))
    # angular neighbors, wrapping around
    dq_t = np.abs(q - np.roll(q, -1, axis=1))
    dist_t = np.hypot(m - np.roll(m, -1, axis=1), n - np.roll(n, -1, axis=1))
    slope = max(float((dq_r / dist_r).max()), float((dq_t / dist_t).max()))
    return 2.0 * slope


def certify_annulus(params: Params, radial: int, angular: int) -> CertReport:
    """Scan the quadratic form over a polar grid of the annulus.

    inf_value is the raw grid minimum; lipschitz_margin = covering radius
    of the grid times the 2x-inflated Lipschitz estimate from a 2x-finer
    probe grid; positive iff inf_value - lipschitz_margin > 0.
    """
    if radial < 64:
        raise ValueError("radial resolution must be >= 64")
    if angular < 256:
        raise ValueError("angular resolution must be >= 256")
    alpha = params.alpha
    m, n = _polar_grid(radial, angular)
    q = _qform(alpha, m, n)
    flat = int(np.argmin(q))
    i, j = np.unravel_index(flat, q.shape)
    inf_value = float(q[i, j])
    margin = _covering_radius(radial, angular) * _lipschitz_estimate(
        alpha, 2 * radial, 2 * angular
    )
    return CertReport(
        alpha=alpha,
        grid_radial=radial,
        grid_angular=angular,
        inf_value=inf_value,
        argmin=Point2(float(m[i, j]), float(n[i, j])),
        lipschitz_margin=float(margin),
        positive=inf_value - margin > 0.0,
    )


def decay_check(
    geom: CycleGeometry,
    params: Params,
    delta: float = 0.04,
    samples: int = 2000,
    offset_min: float = 1e-3,
) -> float:
    """Estimate the decay constant c in F . grad g <= -c g for g <= delta.

    Probes `samples` points on normal offsets of the cycle: evenly spaced
    cycle positions, both normal orientations, log-spaced offset magnitudes
    in [offset_min, sqrt(delta)].  Returns c = -max over probes of
    (F . grad g) / g; a positive value confirms the decay numerically.
    """
    if delta <= 0.0:
        raise ValueError("delta must be positive")
    if delta > geom.neighborhood_g:
        raise ValueError(
            f"delta = {delta:g} exceeds the projection neighborhood bound "
            f"{geom.neighborhood_g:g}"
        )
    alpha = params.alpha
    n_mag = 8
    mags = np.geomspace(offset_min, math.sqrt(delta), n_mag)
    n_pos = max(1, samples // (2 * n_mag))
    idxs = np.linspace(0, len(geom.cycle.samples) - 1, n_pos).astype(int)

    worst = -math.inf
    for i in idxs:
        p = geom.cycle.samples[i]
        f1, f2 = field_components(alpha, p[0], p[1])
        norm = math.hypot(f1, f2)
        nu = np.array([f2 / norm, -f1 / norm])
        for sign in (1.0, -1.0):
            for mag in mags:
                z = p + sign * mag * nu
                g, proj = distance_to_cycle(geom, Point2(float(z[0]), float(z[1])))
                if not 0.0 < g <= delta:
                    continue
                gx = 2.0 * (z[0] - proj.m)
                gy = 2.0 * (z[1] - proj.n)
                zf1, zf2 = field_components(alpha, z[0], z[1])
                worst = max(worst, (zf1 * gx + zf2 * gy) / g)
    if not math.isfinite(worst):
        raise RuntimeError("no valid probe points; delta too small?")
    return -worst

"""Interacting-particle approximation of the stochastic descent-ascent
dynamics: Euler-Maruyama stepping with the coupling frozen at the pre-step
empirical means, centered-moment diagnostics, and a trailing-window
classifier separating the oscillating regime from the convergent one.

Noise is counter-based (Philox): each step draws its 2N standard normals
from a substream keyed by (seed, step), laid out by particle slot and
coordinate, so runs are reproducible regardless of how the particle loop
is chunked.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .dynamics import Params

_NOISE_TAG = 0
_INIT_TAG = 1


class SimulationBlowupError(RuntimeError):
    """A particle left the representable range during stepping."""

    def __init__(self, step: int, particle: int):
        self.step = step
        self.particle = particle
        super().__init__(f"non-finite particle state at step {step}, particle {particle}")


class ConfigError(ValueError):
    """A run configuration failed validation; message names the field."""


def _generator(seed: int, tag: int, counter: int = 0) -> np.random.Generator:
    key = np.array([np.uint64(seed & 0xFFFFFFFFFFFFFFFF), np.uint64(tag)])
    return np.random.Generator(np.random.Philox(key=key, counter=counter << 128))


class NoiseStream:
    """Per-step substreams of standard normals for the particle update.

    Call k of normals(n) returns (xi, xi_prime), each of length n, drawn
    from the Philox substream keyed by (seed, k); slot i of each array is
    the noise for particle slot i.
    """

    def __init__(self, seed: int):
        self.seed = int(seed)
        self._cursor = 0

    def normals(self, n: int) -> tuple[np.ndarray, np.ndarray]:
        g = _generator(self.seed, _NOISE_TAG, self._cursor)
        self._cursor += 1
        block = g.standard_normal(2 * n)
        return block[:n], block[n:]

    def reset(self) -> None:
        self._cursor = 0


@dataclass(frozen=True)
class InitSpec:
    """Initial particle law: a Dirac mass or i.i.d. per-coordinate normals."""

    kind: str
    mean_x: float
    mean_y: float
    var: float = 0.0

    def __post_init__(self):
        if self.kind not in ("dirac", "gaussian_iid"):
            raise ConfigError(f"init.kind must be 'dirac' or 'gaussian_iid', got {self.kind!r}")
        if self.var < 0.0:
            raise ConfigError("init.var must be >= 0")
        if self.kind == "dirac" and self.var != 0.0:
            raise ConfigError("init.var must be 0 for a dirac initialization")


@dataclass
class Ensemble:
    """Particle positions at a common time."""

    x: np.ndarray
    y: np.ndarray
    t: float = 0.0

    @property
    def n(self) -> int:
        return len(self.x)


@dataclass(frozen=True)
class SimConfig:
    params: Params
    n: int
    dt: float
    t_end: float
    seed: int
    init: InitSpec
    snapshot_times: tuple[float, ...] = ()
    k_max: int = 4
    record_stride: int = 1

    def __post_init__(self):
        if self.n < 1:
            raise ConfigError("n must be >= 1")
        if self.dt <= 0.0:
            raise ConfigError("dt must be positive")
        if self.t_end < self.dt:
            raise ConfigError("t_end must be at least dt")
        if self.params.eps > 1.0:
            raise ConfigError("eps must be <= 1 for stochastic runs")
        if self.k_max < 2 or self.k_max % 2 != 0:
            raise ConfigError("k_max must be an even integer >= 2")
        if self.record_stride < 1:
            raise ConfigError("record_stride must be >= 1")
        for t in self.snapshot_times:
            if not 0.0 <= t <= self.t_end:
                raise ConfigError(f"snapshot time {t:g} outside [0, t_end]")


@dataclass
class MomentSeries:
    """Per-time empirical statistics of a run.

    cm_x[:, j-2] and cm_y[:, j-2] hold the j-th centered power means
    (1/N) sum (x_i - mean)^j for j = 2..k_max, with no unbiased-variance
    correction applied.
    """

    times: np.ndarray
    mean_x: np.ndarray
    mean_y: np.ndarray
    r2_mean: np.ndarray
    cm_x: np.ndarray
    cm_y: np.ndarray

    @property
    def var_x(self) -> np.ndarray:
        return self.cm_x[:, 0]

    @property
    def var_y(self) -> np.ndarray:
        return self.cm_y[:, 0]

    def mean_trajectory(self):
        """Mean path as a uniformly sampled Trajectory (drops a trailing
        off-stride sample if the recording ended mid-stride)."""
        from .flow import Trajectory

        t = self.times
        k = len(t)
        if k >= 3 and not math.isclose(t[-1] - t[-2], t[1] - t[0], rel_tol=1e-9):
            k -= 1
        pts = np.column_stack([self.mean_x[:k], self.mean_y[:k]])
        return Trajectory(self.times[:k].copy(), pts)


def init_ensemble(spec: InitSpec, n: int, seed: int) -> Ensemble:
    """Draw the initial ensemble from the seeded stream (bit-reproducible)."""
    if n < 1:
        raise ConfigError("n must be >= 1")
    if spec.kind == "dirac":
        return Ensemble(np.full(n, spec.mean_x), np.full(n, spec.mean_y), 0.0)
    g = _generator(seed, _INIT_TAG)
    sd = math.sqrt(spec.var)
    x = spec.mean_x + sd * g.standard_normal(n)
    y = spec.mean_y + sd * g.standard_normal(n)
    return Ensemble(x, y, 0.0)


def em_step(params: Params, e: Ensemble, dt: float, noise: NoiseStream | None) -> Ensemble:
    """One Euler-Maruyama step of the interacting system.

    The empirical means are computed once from the pre-step state (a fused
    in-place update would couple particles through a drifting mean).  With
    eps = 0 no noise is drawn and the stream, which may then be None, is
    left untouched.
    """
    x, y = e.x, e.y
    mx = x.mean()
    my = y.mean()
    alpha, eps = params.alpha, params.eps
    with np.errstate(over="ignore", invalid="ignore"):
        # overflow is handled below via the finiteness check
        x1 = x + (-alpha * my + x - x**3 / 3.0) * dt
        y1 = y + (alpha * mx + y - y**3 / 3.0) * dt
    if eps > 0.0:
        xi, xi_p = noise.normals(len(x))
        scale = math.sqrt(2.0 * eps * dt)
        x1 += scale * xi
        y1 += scale * xi_p
    if not (np.isfinite(x1).all() and np.isfinite(y1).all()):
        bad = np.flatnonzero(~(np.isfinite(x1) & np.isfinite(y1)))[0]
        raise SimulationBlowupError(int(round(e.t / dt)) + 1, int(bad))
    return Ensemble(x1, y1, e.t + dt)


def moments(e: Ensemble, k_max: int) -> dict[str, np.ndarray]:
    """Centered power means of orders 2..k_max per coordinate (plain
    (1/N)-averages; no unbiasedness correction)."""
    if k_max < 2 or k_max % 2 != 0:
        raise ValueError("k_max must be an even integer >= 2")
    out = {}
    for name, arr in (("x", e.x), ("y", e.y)):
        d = arr - arr.mean()
        out[name] = np.array([(d**j).mean() for j in range(2, k_max + 1)])
    return out


def simulate(config: SimConfig) -> tuple[MomentSeries, list[Ensemble]]:
    """Run Euler-Maruyama from the configured initialization to t_end.

    Moments are recorded every record_stride steps (plus the final step);
    snapshots capture full particle arrays at the grid times nearest the
    requested snapshot times.  Fully deterministic given the seed.
    """
    n_steps = max(1, round(config.t_end / config.dt))
    dt = config.dt
    snap_steps = sorted({min(n_steps, max(0, round(t / dt))) for t in config.snapshot_times})
    stream = NoiseStream(config.seed)
    e = init_ensemble(config.init, config.n, config.seed)

    rec_t: list[float] = []
    rec_mx: list[float] = []
    rec_my: list[float] = []
    rec_r2: list[float] = []
    rec_cx: list[np.ndarray] = []
    rec_cy: list[np.ndarray] = []
    snapshots: list[Ensemble] = []

    for s in range(n_steps + 1):
        t = s * dt
        if snap_steps and s == snap_steps[0]:
            snap_steps.pop(0)
            snapshots.append(Ensemble(e.x.copy(), e.y.copy(), t))
        if s % config.record_stride == 0 or s == n_steps:
            cm = moments(e, config.k_max)
            rec_t.append(t)
            rec_mx.append(float(e.x.mean()))
            rec_my.append(float(e.y.mean()))
            rec_r2.append(float((e.x**2 + e.y**2).mean()))
            rec_cx.append(cm["x"])
            rec_cy.append(cm["y"])
        if s < n_steps:
            e = em_step(config.params, e, dt, stream)

    series = MomentSeries(
        times=np.array(rec_t),
        mean_x=np.array(rec_mx),
        mean_y=np.array(rec_my),
        r2_mean=np.array(rec_r2),
        cm_x=np.vstack(rec_cx),
        cm_y=np.vstack(rec_cy),
    )
    return series, snapshots


@dataclass(frozen=True)
class Classification:
    verdict: str  # oscillating | converged | undecided
    std_mean_x: float
    mean_radius: float
    radius_drift: float


def classify(
    series: MomentSeries,
    window: float = 5.0,
    *,
    osc_threshold: float = 0.5,
    conv_threshold: float = 0.1,
    drift_threshold: float = 0.05,
) -> Classification:
    """Trailing-window verdict on the long-run behavior of the mean path.

    Over the last `window` time units: oscillating if the standard
    deviation of mean_x is >= osc_threshold; converged if it is <=
    conv_threshold and the mean radius drifts by <= drift_threshold between
    the window's halves; undecided otherwise.  Thresholds are calibrated to
    separate the two reference regimes (eps 0.25 vs 0.5) with margin.
    """
    horizon = series.times[-1] - series.times[0]
    if window > horizon / 2.0:
        raise ValueError("window must be at most half the recorded horizon")
    mask = series.times >= series.times[-1] - window
    mx = series.mean_x[mask]
    my = series.mean_y[mask]
    a = float(mx.std())
    radius = np.hypot(mx, my)
    b = float(radius.mean())
    half = len(radius) // 2
    drift = abs(float(radius[half:].mean()) - float(radius[:half].mean()))
    if a >= osc_threshold:
        verdict = "oscillating"
    elif a <= conv_threshold and drift <= drift_threshold:
        verdict = "converged"
    else:
        verdict = "undecided"
    return Classification(verdict, a, b, drift)

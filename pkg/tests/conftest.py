"""Shared fixtures: the acceptance alpha set's cycles and the two bundled
reference runs are expensive, so they are computed once per session and
shared across test modules."""
from __future__ import annotations

import time

import pytest

from cycleflow import InitSpec, Params, SimConfig, classify, find_limit_cycle, simulate

ACCEPTANCE_ALPHAS = (1.0, 1.5, 2.0, 5.0, 10.0, 20.0, 50.0, 100.0)


@pytest.fixture(scope="session")
def cycles():
    """alpha -> (LimitCycle, wall seconds) for the acceptance alpha set."""
    out = {}
    for alpha in ACCEPTANCE_ALPHAS:
        t0 = time.perf_counter()
        cycle = find_limit_cycle(Params(alpha), tol=1e-9)
        out[alpha] = (cycle, time.perf_counter() - t0)
    return out


@pytest.fixture(scope="session")
def paper_runs():
    """(run, seed) -> (series, classification, wall seconds) for the bundled
    reference configurations, seeds 0..4, dt = 1e-3."""
    init = InitSpec("gaussian_iid", -0.2, 0.4, 0.25)
    out = {}
    for run, eps in (("A", 0.25), ("B", 0.5)):
        for seed in range(5):
            config = SimConfig(
                params=Params(1.5, eps), n=500, dt=1e-3, t_end=20.0, seed=seed,
                init=init, snapshot_times=(), k_max=4, record_stride=10,
            )
            t0 = time.perf_counter()
            series, _ = simulate(config)
            wall = time.perf_counter() - t0
            out[(run, seed)] = (series, classify(series, 5.0), wall)
    return out

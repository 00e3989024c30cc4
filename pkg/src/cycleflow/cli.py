"""Experiment driver: every capability behind a reproducible subcommand.

Exit codes are a stable contract: 0 success/verified, 1 verification or
configuration failure, 2 numerical failure (blow-up or non-convergence).
Every command writes its outputs first and a manifest.json last, so the
manifest doubles as a completion marker.
"""
from __future__ import annotations

import argparse
import math
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .config import ClassifySettings, parse_sim_config, resolve_config_path
from .dynamics import ANNULUS, Params, Point2
from .flow import (
    BlowupError,
    CycleConvergenceError,
    LimitCycle,
    Trajectory,
    default_dt,
    find_limit_cycle,
    integrate,
    time_average,
    winding_number,
)
from .geometry import CycleGeometry, track_cycle
from .io import (
    write_cert_report_json,
    write_cycle_csv,
    write_cycle_descriptor,
    write_csv,
    write_manifest,
    write_series_csv,
    write_snapshot_csv,
    write_sweep_csv,
    write_trajectory_csv,
)
from .lyapunov import certify_annulus, decay_check
from .particles import ConfigError, InitSpec, SimConfig, SimulationBlowupError, classify, simulate

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_NUMERICAL = 2

PERIOD_TOL = 1e-6
ANNULUS_TOL = 1e-6


def _log(msg: str) -> None:
    print(f"[cycleflow] {msg}", flush=True)


def _slug(x: float) -> str:
    return ("%g" % x).replace(".", "p").replace("-", "m")


def _out_dir(args) -> Path:
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _manifest(out: Path, command: str, config: dict, seed, outputs: list[Path],
              roles: dict, verdicts: dict, t0: float) -> None:
    payload = {
        "command": command,
        "config": config,
        "seed": seed,
        "version": __version__,
        "outputs": [str(p) for p in outputs],
        "outputs_by_role": {k: (str(v) if isinstance(v, Path) else v) for k, v in roles.items()},
        "wall_time_s": time.perf_counter() - t0,
        "verdicts": verdicts,
    }
    write_manifest(out / "manifest.json", payload)


def _cycle_checks(cycle: LimitCycle) -> dict:
    r2 = cycle.r2()
    lo = 4.0 * math.pi / (2.0 * cycle.alpha + 1.0)
    hi = 4.0 * math.pi / (2.0 * cycle.alpha - 1.0)
    winding = winding_number(cycle.as_trajectory(), Point2(0.0, 0.0))
    return {
        "annulus_ok": bool(r2.min() >= ANNULUS.r2_min - ANNULUS_TOL
                           and r2.max() <= ANNULUS.r2_max + ANNULUS_TOL),
        "period_ok": bool(lo - PERIOD_TOL <= cycle.period <= hi + PERIOD_TOL),
        "winding": winding,
        "winding_ok": winding == 1,
        "period": cycle.period,
        "period_bracket": [lo, hi],
        "r2_min": float(r2.min()),
        "r2_max": float(r2.max()),
    }


def cmd_cycle(args) -> int:
    t0 = time.perf_counter()
    out = _out_dir(args)
    try:
        params = Params(alpha=args.alpha)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    _log(f"locating cycle at alpha = {args.alpha:g} (tol = {args.tol:g})")
    try:
        cycle = find_limit_cycle(params, tol=args.tol, max_hits=args.max_hits)
    except CycleConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    checks = _cycle_checks(cycle)
    slug = _slug(args.alpha)
    csv_path = out / f"cycle_alpha{slug}.csv"
    json_path = out / f"cycle_alpha{slug}.json"
    write_cycle_csv(csv_path, cycle)
    write_cycle_descriptor(json_path, cycle, checks["annulus_ok"], checks["winding"])
    _manifest(out, "cycle", {"alpha": args.alpha, "tol": args.tol}, None,
              [csv_path, json_path], {"cycle_csv": csv_path, "cycle_json": json_path},
              checks, t0)
    ok = checks["annulus_ok"] and checks["period_ok"] and checks["winding_ok"]
    if not ok:
        failed = [k for k in ("annulus_ok", "period_ok", "winding_ok") if not checks[k]]
        print(f"verification failed: {', '.join(failed)} "
              f"(period = {cycle.period:.9g}, bracket = {checks['period_bracket']}, "
              f"r2 range = [{checks['r2_min']:.6f}, {checks['r2_max']:.6f}], "
              f"winding = {checks['winding']})", file=sys.stderr)
        return EXIT_FAIL
    _log(f"period {cycle.period:.9g} inside bracket; annulus and winding verified")
    return EXIT_OK


def _certify_one(alpha: float, radial: int, angular: int, delta: float,
                 decay_samples: int, tol: float):
    params = Params(alpha=alpha)
    report = certify_annulus(params, radial, angular)
    cycle = find_limit_cycle(params, tol=tol)
    c = decay_check(CycleGeometry(cycle), params, delta, decay_samples)
    return report.with_decay(c, delta)


def cmd_certify(args) -> int:
    t0 = time.perf_counter()
    out = _out_dir(args)
    alphas = args.alphas
    reports = []
    for alpha in alphas:
        _log(f"certifying alpha = {alpha:g} on ({args.radial}, {args.angular}) grid")
        rep = _certify_one(alpha, args.radial, args.angular, args.delta,
                           args.decay_samples, args.tol)
        reports.append(rep)
        _log(f"alpha = {alpha:g}: inf = {rep.inf_value:.6g}, margin = "
             f"{rep.lipschitz_margin:.6g}, positive = {rep.positive}, "
             f"c = {rep.estimated_c:.4g}")
    outputs = []
    for rep in reports:
        p = out / f"cert_alpha{_slug(rep.alpha)}.json"
        write_cert_report_json(p, rep)
        outputs.append(p)
    sweep_path = out / "cert_sweep.csv"
    write_sweep_csv(sweep_path, reports)
    outputs.append(sweep_path)
    roles = {"sweep_csv": sweep_path}
    verdicts = {f"alpha_{_slug(r.alpha)}_positive": r.positive for r in reports}
    if args.refine:
        refined = []
        for alpha in alphas:
            _log(f"refining alpha = {alpha:g} on ({2 * args.radial}, {2 * args.angular}) grid")
            refined.append(_certify_one(alpha, 2 * args.radial, 2 * args.angular,
                                        args.delta, args.decay_samples, args.tol))
        refined_path = out / "cert_sweep_refined.csv"
        write_sweep_csv(refined_path, refined)
        outputs.append(refined_path)
        roles["sweep_refined_csv"] = refined_path
        base_pos = {r.alpha: r.positive for r in reports}
        verdicts["refinement_consistent"] = all(
            (not base_pos[r.alpha]) or r.positive for r in refined
        )
    _manifest(out, "certify",
              {"alphas": list(alphas), "radial": args.radial, "angular": args.angular,
               "delta": args.delta, "decay_samples": args.decay_samples},
              None, outputs, roles, verdicts, t0)
    return EXIT_OK


def cmd_simulate(args) -> int:
    t0 = time.perf_counter()
    out = _out_dir(args)
    try:
        cfg_path = resolve_config_path(args.config)
        config, settings = parse_sim_config(cfg_path)
        if args.seed is not None:
            config = SimConfig(
                params=config.params, n=config.n, dt=config.dt, t_end=config.t_end,
                seed=args.seed, init=config.init, snapshot_times=config.snapshot_times,
                k_max=config.k_max, record_stride=config.record_stride,
            )
    except (ConfigError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    _log(f"simulating {cfg_path.name}: n = {config.n}, alpha = {config.params.alpha:g}, "
         f"eps = {config.params.eps:g}, t_end = {config.t_end:g}, seed = {config.seed}")
    try:
        series, snapshots = simulate(config)
    except SimulationBlowupError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    result = classify(series, settings.window,
                      osc_threshold=settings.osc_threshold,
                      conv_threshold=settings.conv_threshold,
                      drift_threshold=settings.drift_threshold)
    _log(f"classifier verdict: {result.verdict} (std mean_x = {result.std_mean_x:.4g}, "
         f"mean radius = {result.mean_radius:.4g})")

    outputs = []
    series_path = out / "series.csv"
    write_series_csv(series_path, series)
    outputs.append(series_path)
    snap_roles = {}
    for snap in snapshots:
        p = out / f"snapshot_t{_slug(snap.t)}.csv"
        write_snapshot_csv(p, snap)
        outputs.append(p)
        snap_roles["%g" % snap.t] = str(p)
    det_path = out / "deterministic.csv"
    det = integrate(config.params, Point2(config.init.mean_x, config.init.mean_y),
                    config.t_end, config.dt)
    idx = np.rint(series.times / config.dt).astype(int)
    write_trajectory_csv(det_path, Trajectory(series.times.copy(), det.points[idx]))
    outputs.append(det_path)

    config_echo = {
        "config_file": str(cfg_path),
        "alpha": config.params.alpha, "eps": config.params.eps,
        "n": config.n, "dt": config.dt, "t_end": config.t_end,
        "seed": config.seed, "k_max": config.k_max,
        "record_stride": config.record_stride,
        "init": {"kind": config.init.kind, "mean_x": config.init.mean_x,
                 "mean_y": config.init.mean_y, "var": config.init.var},
        "snapshot_times": list(config.snapshot_times),
        "classify": {"window": settings.window,
                     "osc_threshold": settings.osc_threshold,
                     "conv_threshold": settings.conv_threshold,
                     "drift_threshold": settings.drift_threshold},
    }
    verdicts = {
        "classification": result.verdict,
        "std_mean_x": result.std_mean_x,
        "mean_radius": result.mean_radius,
        "radius_drift": result.radius_drift,
        "r2_mean_max": float(series.r2_mean.max()),
    }
    roles = {"series": series_path, "snapshots": snap_roles, "deterministic": det_path}
    _manifest(out, "simulate", config_echo, config.seed, outputs, roles, verdicts, t0)
    return EXIT_OK


def _period_windings(mean_path: Trajectory, period: float) -> list[int]:
    t0 = mean_path.times[0]
    winds = []
    k = 0
    while True:
        lo, hi = t0 + k * period, t0 + (k + 1) * period
        mask = (mean_path.times >= lo - 1e-12) & (mean_path.times <= hi + 1e-12)
        if mask.sum() < 3 or mean_path.times[mask][-1] < hi - mean_path.step:
            break
        sub = Trajectory(mean_path.times[mask], mean_path.points[mask])
        winds.append(winding_number(sub, Point2(0.0, 0.0)))
        k += 1
    return winds


def cmd_verify(args) -> int:
    t0 = time.perf_counter()
    out = _out_dir(args)
    try:
        params = Params(alpha=args.alpha, eps=args.eps)
        if args.n < 1:
            raise ValueError("n must be >= 1")
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    _log(f"verify pipeline: alpha = {args.alpha:g}, eps = {args.eps:g}, n = {args.n}, "
         f"{args.periods} periods, {args.seeds} seeds, delta = {args.delta:g}")
    try:
        cycle = find_limit_cycle(Params(alpha=args.alpha), tol=1e-9)
    except CycleConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    geom = CycleGeometry(cycle)
    dt = min(1e-3, cycle.period / 2000.0)
    spp = max(1, round(cycle.period / dt))
    n_steps = args.periods * spp
    stride = max(1, spp // 512)
    n_steps = int(math.ceil(n_steps / stride) * stride)
    t_end = n_steps * dt
    start = Point2(float(cycle.samples[0, 0]), float(cycle.samples[0, 1]))

    rows = []
    devs = []
    winding_ok = []
    for seed in range(args.seeds):
        config = SimConfig(
            params=params, n=args.n, dt=dt, t_end=t_end, seed=seed,
            init=InitSpec("dirac", start.m, start.n),
            snapshot_times=(), k_max=4, record_stride=stride,
        )
        try:
            series, _ = simulate(config)
        except SimulationBlowupError as exc:
            print(f"numerical failure: {exc}", file=sys.stderr)
            return EXIT_NUMERICAL
        mean_path = series.mean_trajectory()
        max_dev, _tracked = track_cycle(geom, params, mean_path, dt=dt)
        winds = _period_windings(mean_path, cycle.period)
        ok = len(winds) >= args.periods and all(w == 1 for w in winds[: args.periods])
        devs.append(max_dev)
        winding_ok.append(ok)
        rows.append((seed, max_dev, " ".join(str(w) for w in winds)))
        _log(f"seed {seed}: max deviation = {max_dev:.4g}, windings = {winds}")

    median_dev = float(np.median(devs))
    winding_majority = sum(winding_ok) > args.seeds // 2
    passed = median_dev <= args.delta and winding_majority
    csv_path = out / "verify_seeds.csv"
    write_csv(csv_path, ["seed", "max_deviation", "period_windings"], rows)
    verdicts = {
        "median_max_deviation": median_dev,
        "delta": args.delta,
        "winding_per_period_ok": winding_majority,
        "per_seed_max_deviation": devs,
        "high_variance_ensemble": args.n < 100,
        "passed": passed,
    }
    _manifest(out, "verify",
              {"alpha": args.alpha, "eps": args.eps, "n": args.n,
               "delta": args.delta, "periods": args.periods, "seeds": args.seeds,
               "dt": dt, "t_end": t_end},
              None, [csv_path], {"verify_csv": csv_path}, verdicts, t0)
    if not passed:
        print(f"verification failed: median max deviation = {median_dev:.6g} "
              f"(delta = {args.delta:g}), winding majority ok = {winding_majority}",
              file=sys.stderr)
        return EXIT_FAIL
    _log(f"verified: median max deviation {median_dev:.4g} <= {args.delta:g}, "
         f"winding advances 1 per period")
    return EXIT_OK


def cmd_sweep(args) -> int:
    t0 = time.perf_counter()
    out = _out_dir(args)
    rows = []
    verdicts = {}
    for alpha in args.alphas:
        _log(f"cycle sweep: alpha = {alpha:g}")
        try:
            cycle = find_limit_cycle(Params(alpha=alpha), tol=args.tol)
        except CycleConvergenceError as exc:
            print(f"error at alpha = {alpha:g}: {exc}", file=sys.stderr)
            return EXIT_NUMERICAL
        checks = _cycle_checks(cycle)
        avg_m = time_average(cycle, lambda p: p.m)
        avg_m2 = time_average(cycle, lambda p: p.m * p.m)
        r = np.sqrt(cycle.r2())
        rows.append((
            alpha, cycle.period, checks["period_ok"], checks["annulus_ok"],
            checks["winding"], avg_m, avg_m2, float(np.abs(r - 2.0).max()),
        ))
        verdicts[f"alpha_{_slug(alpha)}_ok"] = bool(
            checks["period_ok"] and checks["annulus_ok"] and checks["winding_ok"]
        )
    path = out / "cycles_sweep.csv"
    write_csv(path, ["alpha", "period", "period_ok", "annulus_ok", "winding",
                     "avg_m", "avg_m2", "max_abs_r_minus_2"], rows)
    _manifest(out, "sweep", {"alphas": list(args.alphas), "tol": args.tol}, None,
              [path], {"cycles_csv": path}, verdicts, t0)
    return EXIT_OK


def _alpha_list(raw: str) -> list[float]:
    return [float(tok) for tok in raw.replace(",", " ").split()]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cycleflow",
        description="Limit cycles, Lyapunov certificates, and interacting-particle "
                    "runs for the planar descent-ascent flow.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    default_out = os.environ.get("CYCLEFLOW_OUT", "out")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("cycle", help="locate and verify the limit cycle at one alpha")
    p.add_argument("--alpha", type=float, required=True,
                   help="coupling strength, dimensionless, >= 1")
    p.add_argument("--tol", type=float, default=1e-9,
                   help="section convergence and crossing tolerance, time units")
    p.add_argument("--max-hits", type=int, default=200,
                   help="maximum Poincare section hits before giving up")
    p.add_argument("--out-dir", default=default_out,
                   help="output directory (env CYCLEFLOW_OUT overrides the default)")
    p.set_defaults(func=cmd_cycle)

    p = sub.add_parser("certify", help="annulus positivity scan plus decay check per alpha")
    p.add_argument("--alphas", type=_alpha_list, required=True,
                   help="comma- or space-separated alpha values, dimensionless")
    p.add_argument("--radial", type=int, default=256,
                   help="radial grid nodes over r^2 in [3, 6], count >= 64")
    p.add_argument("--angular", type=int, default=1024,
                   help="angular grid nodes over [0, 2pi), count >= 256")
    p.add_argument("--delta", type=float, default=0.04,
                   help="decay-check neighborhood: squared distance bound, length^2")
    p.add_argument("--decay-samples", type=int, default=2000,
                   help="number of probe points for the decay check")
    p.add_argument("--tol", type=float, default=1e-9,
                   help="cycle-finder tolerance for the decay check, time units")
    p.add_argument("--refine", action="store_true",
                   help="re-run on a doubled grid and write cert_sweep_refined.csv")
    p.add_argument("--out-dir", default=default_out, help="output directory")
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("simulate", help="Euler-Maruyama particle run from a config file")
    p.add_argument("--config", required=True,
                   help="config path or bundled name (paper_runA, paper_runB, ...)")
    p.add_argument("--seed", type=int, default=None,
                   help="override the seed in the config file")
    p.add_argument("--out-dir", default=default_out, help="output directory")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("verify", help="cycle-tracking pipeline for the mean path")
    p.add_argument("--alpha", type=float, required=True,
                   help="coupling strength, dimensionless, >= 1")
    p.add_argument("--eps", type=float, required=True,
                   help="diffusion coefficient, dimensionless, in [0, 1]")
    p.add_argument("--n", type=int, required=True, help="particle count")
    p.add_argument("--delta", type=float, default=0.1,
                   help="max allowed tracking deviation, length units")
    p.add_argument("--periods", type=int, default=3, help="number of cycle periods to run")
    p.add_argument("--seeds", type=int, default=5, help="number of independent seeds")
    p.add_argument("--out-dir", default=default_out, help="output directory")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("sweep", help="deterministic cycle summary across alphas")
    p.add_argument("--alphas", type=_alpha_list, required=True,
                   help="comma- or space-separated alpha values, dimensionless")
    p.add_argument("--tol", type=float, default=1e-9,
                   help="cycle-finder tolerance, time units")
    p.add_argument("--out-dir", default=default_out, help="output directory")
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())

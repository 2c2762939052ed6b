"""Command line runner: config in, CSVs plus metadata sidecars out.

    bsv-tunnel <mode> --config <path> [--out <dir>] [--workers N] [--seed N]

Exit codes: 0 success, 2 config error, 3 numerical failure beyond the
tolerated threshold.  Identical config and seed produce byte-identical
CSVs, independent of the worker count (rows are computed as pure
functions and reduced in index order).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace

import numpy as np

from . import __version__
from .config import MODES, RunConfig, format_config, load_config
from .csvio import ensure_dir, write_csv, write_sidecar
from .ensemble import ScanResult, find_x_peak, scan_one_r, tunnel_scan_table, x_levels
from .errors import ConfigError, NumericalError
from .field import (FieldRealization, e_field, p_trajectory, rho,
                    sample_initial, sigma, x_trajectory)
from .solver import exit_trajectory, im_action, solve_saddle


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(
        prog="bsv-tunnel",
        description="Electron tunneling driven by bright squeezed vacuum: "
                    "Bohmian field trajectories, complex-time saddle points, "
                    "ensemble scans.")
    ap.add_argument("mode", choices=MODES)
    ap.add_argument("--config", help="flat key=value config file")
    ap.add_argument("--out", help="output directory (overrides config and "
                                  "BSV_TUNNEL_OUT)")
    ap.add_argument("--workers", type=int, help="worker processes for scans "
                                                "(overrides config and "
                                                "BSV_TUNNEL_WORKERS)")
    ap.add_argument("--seed", type=int, help="sampling seed override")
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0

    try:
        cfg = load_config(args.config) if args.config else RunConfig()
        cfg = _apply_overrides(cfg, args)
    except (ConfigError, OSError) as exc:
        _err(type(exc).__name__, str(exc))
        return 2

    t_start = time.monotonic()
    try:
        files, extra = _dispatch(cfg)
    except ConfigError as exc:
        _err(type(exc).__name__, str(exc))
        return 2
    except NumericalError as exc:
        _err(type(exc).__name__, str(exc))
        return 3
    wall = time.monotonic() - t_start

    cfg_text = format_config(cfg)
    h = cfg.config_hash()
    for path in files:
        write_sidecar(path, cfg_text, h, cfg.mode, __version__, wall,
                      extra=extra.get(os.path.basename(path)))
    for path in files:
        print(path)
    if extra.get("row_errors"):
        _err("RowFailures", "; ".join(extra["row_errors"]))
        return 3
    return 0


def _apply_overrides(cfg: RunConfig, args) -> RunConfig:
    updates = {"mode": args.mode}
    env_out = os.environ.get("BSV_TUNNEL_OUT")
    env_workers = os.environ.get("BSV_TUNNEL_WORKERS")
    if env_out:
        updates["output_dir"] = env_out
    if env_workers:
        try:
            updates["workers"] = int(env_workers)
        except ValueError:
            raise ConfigError(f"BSV_TUNNEL_WORKERS must be an integer, "
                              f"got '{env_workers}'") from None
    if args.out:
        updates["output_dir"] = args.out
    if args.workers is not None:
        updates["workers"] = args.workers
    if args.seed is not None:
        updates["seed"] = args.seed
    return replace(cfg, **updates)


def _err(kind: str, detail: str):
    print(json.dumps({"error": kind, "detail": detail}), file=sys.stderr)


def _dispatch(cfg: RunConfig):
    out = ensure_dir(cfg.output_dir)
    h = cfg.config_hash()
    runner = {
        "trajectories": _run_trajectories,
        "field_phase_space": _run_phase_space,
        "tunnel_scan": _run_tunnel_scan,
        "ptot_scan": _run_ptot_scan,
        "exit_trajectories": _run_exit_trajectories,
    }[cfg.mode]
    return runner(cfg, out, h)


# ---------------------------------------------------------------------------
# Modes

def _time_grid(cfg: RunConfig):
    return cfg.t_i + np.linspace(0.0, cfg.t_span, cfg.n_time_samples)


def _run_trajectories(cfg, out, h):
    """Bohmian trajectory bundle plus the density grid: realization 0 is
    the pinned x_i, the rest are sampled from rho(., t_i)."""
    p = cfg.squeezing()
    ts = _time_grid(cfg)
    x_init = [cfg.x_i] + list(sample_initial(p, cfg.t_i, cfg.n_realizations,
                                             cfg.seed))
    rows = []
    for rid, xi in enumerate(x_init):
        fr = FieldRealization(params=p, x_i=float(xi), t_i=cfg.t_i)
        xs = x_trajectory(fr, ts)
        ps = p_trajectory(fr, ts)
        es = [complex(e).real for e in np.atleast_1d(e_field(fr, ts))]
        rows.extend((float(t), rid, float(x), float(pv), float(e))
                    for t, x, pv, e in zip(ts, xs, ps, es))
    traj_path = os.path.join(out, "trajectories.csv")
    write_csv(traj_path, ("t", "realization_id", "X", "P", "E"), rows, h)

    sig_max = float(np.max(sigma(ts, p)))
    xg = np.linspace(-4.0 * sig_max, 4.0 * sig_max, 161)
    grows = []
    for t in ts:
        rv = rho(xg, float(t), p)
        grows.extend((float(t), float(x), float(rr)) for x, rr in zip(xg, rv))
    rho_path = os.path.join(out, "rho_grid.csv")
    write_csv(rho_path, ("t", "X", "rho"), grows, h)
    return [traj_path, rho_path], {}


def _run_phase_space(cfg, out, h):
    """(X, P) portrait of the pinned realization over the time span."""
    p = cfg.squeezing()
    ts = _time_grid(cfg)
    fr = FieldRealization(params=p, x_i=cfg.x_i, t_i=cfg.t_i)
    xs = x_trajectory(fr, ts)
    ps = p_trajectory(fr, ts)
    rows = [(float(t), float(x), float(pv)) for t, x, pv in zip(ts, xs, ps)]
    path = os.path.join(out, "phase_space.csv")
    write_csv(path, ("t", "X", "P"), rows, h)
    return [path], {}


def _run_tunnel_scan(cfg, out, h):
    res = tunnel_scan_table(cfg.squeezing(), cfg.t_i, cfg.barrier(),
                            cfg.quadrature())
    path = os.path.join(out, "tunnel_scan.csv")
    write_csv(path, res.columns, res.rows, h)
    extra = {"tunnel_scan.csv": {"row_errors": res.row_errors,
                                 "n_rows": len(res.rows)}}
    n_failed = sum(1 for row in res.rows if row[-1] == 0)
    if n_failed * 100 > len(res.rows):
        extra["row_errors"] = res.row_errors or [
            f"{n_failed}/{len(res.rows)} nodes failed"]
    return [path], extra


def _run_ptot_scan(cfg, out, h):
    p = cfg.squeezing()
    b = cfg.barrier()
    q = cfg.quadrature()
    r_sorted = sorted(cfg.r_list)
    n_workers = cfg.workers if cfg.workers > 0 else (os.cpu_count() or 1)
    rows = []
    errors = []
    if n_workers == 1 or len(r_sorted) == 1:
        results = (_scan_row_safe(r, p, cfg.t_i, b, q) for r in r_sorted)
        for item in results:
            _collect_row(item, rows, errors)
    else:
        with ProcessPoolExecutor(max_workers=min(n_workers, len(r_sorted))) as ex:
            futs = [ex.submit(_scan_row_safe, r, p, cfg.t_i, b, q)
                    for r in r_sorted]
            for fut in futs:          # index order: byte-stable reduction
                _collect_row(fut.result(), rows, errors)
    path = os.path.join(out, "ptot_scan.csv")
    write_csv(path, ("r", "sigma", "X_peak", "E_peak", "gamma_peak", "P_tot",
                     "n_failed_nodes"), rows, h)
    extra = {"ptot_scan.csv": {"row_errors": errors, "n_rows": len(rows)}}
    if errors:
        extra["row_errors"] = errors
    return [path], extra


def _scan_row_safe(r, p, t_i, b, q):
    """Worker-side row computation; exceptions come back as data."""
    from .field import SqueezingParams, sigma as sigma_fn
    try:
        return ("ok", scan_one_r(r, p, t_i, b, q))
    except (NumericalError, ValueError) as exc:
        pr = SqueezingParams(r=r, phi=p.phi, omega=p.omega,
                             field_scale=p.field_scale)
        sig = float(sigma_fn(t_i, pr))
        row = (r, sig, math.nan, math.nan, math.nan, math.nan, -1)
        return ("err", row, f"r = {r:g}: {type(exc).__name__}: {exc}")


def _collect_row(item, rows, errors):
    if item[0] == "ok":
        rows.append(item[1])
    else:
        rows.append(item[1])
        errors.append(item[2])


def _run_exit_trajectories(cfg, out, h):
    """Released-electron fan: level l = 0..levels_n-1 starts from the
    initial quadrature whose weighted probability is (1 - l/levels_n) of
    the peak (l = 0 is X_peak itself)."""
    p = cfg.squeezing()
    b = cfg.barrier()
    q = cfg.quadrature()
    fractions = [1.0 - l / cfg.levels_n for l in range(cfg.levels_n)]
    xs = x_levels(p, cfg.t_i, b, fractions, q)
    rows = []
    meta_levels = []
    for l, x in enumerate(xs):
        fr = FieldRealization(params=p, x_i=float(x), t_i=cfg.t_i)
        sol = solve_saddle(fr, b, cfg.contour())
        sol.im_action = im_action(fr, b, sol, cfg.contour())
        samples = exit_trajectory(fr, b, sol, sol.tau0 + cfg.exit_horizon,
                                  cfg.exit_n_samples)
        rows.extend((l, t, x_, v_) for t, x_, v_ in samples)
        meta_levels.append({"level_l": l, "X_i": float(x),
                            "tau0": sol.tau0, "im_S": sol.im_action})
    path = os.path.join(out, "exit_traj.csv")
    write_csv(path, ("level_l", "t", "x", "v"), rows, h)
    return [path], {"exit_traj.csv": {"levels": meta_levels}}


if __name__ == "__main__":
    sys.exit(main())

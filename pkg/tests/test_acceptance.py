"""Acceptance suite: one test per release criterion.

Each test name states the property it certifies; `pytest -v` on this
file prints one pass/fail line per criterion.  Oracles are independent
closed forms or general-purpose integrators, never the code under test.
"""

import math
import time

import numpy as np
import pytest

from bsv_tunnel import (BarrierSpec, ContourSpec, CosineDrive, ConstantDrive,
                        FieldRealization, QuadratureSpec, SqueezingParams,
                        c_coeff, exit_trajectory, find_x_peak, im_action,
                        sample_initial, scan_r, sigma, solve_saddle,
                        tunnel_probability, tunnel_scan_table, x_trajectory)
from bsv_tunnel.cli import main
from bsv_tunnel.field import u_val
from bsv_tunnel.errors import NoValidWindow
from bsv_tunnel.solver import im_action_drive, solve_saddle_drive

from oracles import (bohmian_log_fundamental, epsilon_of,
                     gaussian_central_moment_se, keldysh_exponent,
                     static_exponent)


OMEGA = 0.0285
PERIOD = 2.0 * math.pi / OMEGA


def test_bohmian_closed_form_matches_direct_ode_integration():
    """X(t) from the closed-form flow map equals direct integration of
    the hydrodynamic velocity field, 1e-8 over 3 optical periods."""
    ts = np.linspace(0.0, 3.0 * PERIOD, 241)
    rng = np.random.default_rng(7)
    for r in (0.0, 1.0, 5.0, 12.0):
        p = SqueezingParams(r=r)
        y_log = bohmian_log_fundamental(r, p.omega, ts)
        for x_i in rng.normal(size=20):
            fr = FieldRealization(params=p, x_i=float(x_i), t_i=0.0)
            got = np.asarray(x_trajectory(fr, ts), dtype=float)
            want = x_i * np.exp(y_log)
            assert np.max(np.abs(got - want)) <= 1e-8, f"r={r}, x_i={x_i}"


def test_gaussian_self_similarity_and_transported_moments():
    """X(t)/sigma(t) is conserved to 1e-10; a transported 1e5-sample
    ensemble keeps Gaussian central moments 1..4 and <X> = <P> = 0
    within 4 standard errors."""
    ts = np.linspace(0.0, 2.0 * PERIOD, 301)
    for r in (1.0, 5.0, 12.0):
        p = SqueezingParams(r=r)
        sig_t = np.asarray(sigma(ts, p), dtype=float)
        for x_i in (-3.1, 0.7, 1.9):
            fr = FieldRealization(params=p, x_i=x_i, t_i=0.0)
            ratio = np.asarray(x_trajectory(fr, ts), dtype=float) / sig_t
            assert np.max(np.abs(ratio - ratio[0])) <= 1e-10 * abs(ratio[0])

    p = SqueezingParams(r=1.5)
    n = 100_000
    xs = sample_initial(p, 0.0, n, seed=11)
    t = 0.4 * PERIOD
    scale = math.sqrt(float(u_val(t, p)) / float(u_val(0.0, p)))
    # the scalar transport map agrees with the trajectory function
    for x_i in np.asarray(xs[:25], dtype=float):
        got = float(np.asarray(x_trajectory(
            FieldRealization(params=p, x_i=x_i, t_i=0.0), [t])).ravel()[0])
        assert got == pytest.approx(x_i * scale, rel=1e-12, abs=1e-300)
    xt = np.asarray(xs, dtype=float) * scale
    targets = gaussian_central_moment_se(float(sigma(t, p)), n)
    mean = float(np.mean(xt))
    for order in (1, 2, 3, 4):
        target, se = targets[order]
        m = mean if order == 1 else float(np.mean((xt - mean) ** order))
        assert abs(m - target) < 4.0 * se, f"order {order}"
    ct = float(c_coeff(t, p))
    pt = -ct * xt
    assert abs(np.mean(pt)) < 4.0 * np.std(pt) / math.sqrt(n)


def test_classical_keldysh_oracle(barrier):
    """Monochromatic-drive exponent 2 Im S against the closed-form
    non-adiabatic ionization formula, 1e-6 relative."""
    pref = OMEGA * math.sqrt(2.0 * barrier.mass * barrier.delta_u) / barrier.charge
    for gamma in (0.2, 0.5, 1.0, 2.0, 5.0):
        drive = CosineDrive(pref / gamma, OMEGA)
        sol = solve_saddle_drive(drive, barrier)
        got = 2.0 * im_action_drive(drive, barrier, sol)
        want = keldysh_exponent(gamma, barrier.delta_u, OMEGA)
        assert got == pytest.approx(want, rel=1e-6), f"gamma={gamma}"


def test_static_field_oracle(barrier):
    """Constant-drive exponent against the triangular-barrier closed
    form, 1e-8 relative, three field strengths."""
    for e0 in (1e-3, 5e-3, 2e-2):
        drive = ConstantDrive(e0)
        sol = solve_saddle_drive(drive, barrier)
        got = 2.0 * im_action_drive(drive, barrier, sol)
        assert got == pytest.approx(static_exponent(e0, barrier.delta_u),
                                    rel=1e-8), f"e0={e0}"


def test_contour_independence_of_im_action(barrier):
    """Im S agrees to 1e-9 between the vertical-then-real and the
    straight-line contour for 10 realizations at r = 12."""
    p = SqueezingParams(r=12.0)
    sig = float(sigma(0.0, p))
    for f in np.geomspace(0.5, 8.0, 10):
        fr = FieldRealization(params=p, x_i=float(-f * sig), t_i=0.0)
        sol = solve_saddle(fr, barrier)
        a_vert = im_action(fr, barrier, sol)
        a_line = im_action(fr, barrier, sol, ContourSpec(shape="straight_line"),
                           t_end=sol.tau0 + 0.2 * p.period)
        assert abs(a_vert - a_line) <= 1e-9, f"x_i = {-f:.3g} sigma"


def test_exit_time_structure_epsilon_small(barrier):
    """Every converged saddle of the default per-realization scan at
    r in {11, 15, 20, 25} exits just after a field edge: the offset of
    omega Re t0 / 2pi from 1/4 (mod 1/2) lies in (0, 0.05)."""
    q = QuadratureSpec()
    for r in (11.0, 15.0, 20.0, 25.0):
        p = SqueezingParams(r=r)
        res = tunnel_scan_table(p, 0.0, barrier, q)
        conv = [row for row in res.rows if row[7] == 1]
        assert len(conv) == len(res.rows), f"failed nodes at r={r}"
        for row in conv:
            eps = epsilon_of(row[4], p.omega)
            assert 0.0 < eps < 0.05, f"r={r}, X_i={row[0]:.4g}, eps={eps}"


def test_directional_physics_monotone_exits_and_rejection(barrier):
    """Negative initial quadratures tunnel toward the counter-electrode
    monotonically; positive ones never see a launch window."""
    p = SqueezingParams(r=12.0)
    sig = float(sigma(0.0, p))
    for f in (1.0, 2.0, 4.0):
        fr = FieldRealization(params=p, x_i=-f * sig, t_i=0.0)
        sol = solve_saddle(fr, barrier)
        samples = exit_trajectory(fr, barrier, sol, sol.tau0 + 2.0 * p.period,
                                  n_samples=400)
        xs = np.array([s[1] for s in samples])
        assert np.all(np.diff(xs) > 0.0), f"x_i = {-f} sigma"
        assert xs[0] < xs[-1] <= barrier.gap_length + 1.0
    for x_pos in (0.5 * sig, 2.32):
        fr = FieldRealization(params=p, x_i=x_pos, t_i=0.0)
        with pytest.raises(NoValidWindow):
            solve_saddle(fr, barrier)
        assert tunnel_probability(x_pos, p, 0.0, barrier) == 0.0


def test_fig2_structure_interior_peak_moves_toward_zero(barrier):
    """rho * P has an interior maximum X_peak < 0 whose depth |X_peak| /
    sigma shrinks strictly with r but stays positive."""
    ratios = []
    for r in (11.0, 15.0, 20.0, 25.0):
        p = SqueezingParams(r=r)
        x_pk, g_max = find_x_peak(p, 0.0, barrier)
        sig = float(sigma(0.0, p))
        assert -8.0 * sig < x_pk < 0.0
        assert g_max > 0.0
        ratios.append(abs(x_pk) / sig)
    assert all(b < a for a, b in zip(ratios, ratios[1:])), ratios
    assert ratios[-1] > 0.0


def test_fig3_structure_gamma_decreases_ptot_increases_smoothly(barrier):
    """Full squeezing scan r = 11..25 at the default operating point:
    gamma_peak strictly falls, P_tot strictly rises, and log10 P_tot has
    bounded discrete curvature through the gamma ~ 1 crossover.
    Budgets: full scan 30 min, smoke subset {11, 18, 25} 3 min."""
    cfgp = SqueezingParams(r=0.0)
    assert cfgp.omega == 0.0285
    assert cfgp.field_scale == pytest.approx(math.sqrt(2.0) * 1e-8, rel=1e-15)
    assert barrier.delta_u == pytest.approx(5.0 / 27.211386, rel=1e-7)

    t0 = time.monotonic()
    smoke = scan_r([11.0, 18.0, 25.0], cfgp, 0.0, barrier, QuadratureSpec())
    t_smoke = time.monotonic() - t0
    assert t_smoke <= 180.0, f"smoke scan took {t_smoke:.1f} s"

    t0 = time.monotonic()
    res = scan_r([float(r) for r in range(11, 26)], cfgp, 0.0, barrier,
                 QuadratureSpec())
    t_full = time.monotonic() - t0
    assert t_full <= 1800.0, f"full scan took {t_full:.1f} s"

    assert [row[0] for row in res.rows] == [float(r) for r in range(11, 26)]
    assert all(row[6] == 0 for row in res.rows)
    gammas = [row[4] for row in res.rows]
    ptots = [row[5] for row in res.rows]
    assert all(b < a for a, b in zip(gammas, gammas[1:])), gammas
    assert all(b > a for a, b in zip(ptots, ptots[1:])), ptots
    assert gammas[0] > 1.0 > gammas[-1]
    assert all(0.0 < pv < 0.5 for pv in ptots)
    lp = np.log10(ptots)
    curvature = np.abs(np.diff(lp, n=2))
    assert np.max(curvature) < 2.0, curvature
    # the smoke subset reproduces the matching full-scan rows exactly
    full_by_r = {row[0]: row for row in res.rows}
    for row in smoke.rows:
        assert row == full_by_r[row[0]]


def test_determinism_byte_identical_scans(tmp_path, capsys):
    """Identical config and seed give byte-identical ptot_scan CSVs,
    independent of the worker count."""
    cfg = tmp_path / "run.cfg"
    cfg.write_text("mode = ptot_scan\nr_list = 11,18,25\n")
    blobs = []
    for tag, workers in (("a", 1), ("b", 1), ("c", 4)):
        out = tmp_path / tag
        code = main(["ptot_scan", "--config", str(cfg), "--out", str(out),
                     "--workers", str(workers)])
        capsys.readouterr()
        assert code == 0
        blobs.append((out / "ptot_scan.csv").read_bytes())
    assert blobs[0] == blobs[1] == blobs[2]

"""Tests for the flow integrators, the run driver and its diagnostics.

The blow-up scenario (degree-one data with outer angle pi + 0.5) is run
once per session on two radial grids and shared by the regression tests;
everything else uses small grids so the whole file stays fast.
"""

import numpy as np
import pytest

from hmflow.errors import DegenerateStepError, ParameterError, RangeError
from hmflow.fields import (
    Disc,
    Grid2D,
    RadialGrid,
    SphereField,
    dirichlet_energy,
    grad_max,
    render_equivariant,
    renormalize,
)
from hmflow.flow import (
    TIMESERIES_COLUMNS,
    BlowupVerdict,
    FlowParams,
    FlowState,
    TimeSeries,
    energy_identity_residual,
    estimate_blowup_time,
    initial_bubble_profile,
    initial_excess_angle,
    initial_random_smooth,
    initial_small_radial,
    local_energy_inequality_check,
    run_flow,
    step_equivariant,
    step_full2d,
)


# ---------------------------------------------------------------------------
# single-step contracts
# ---------------------------------------------------------------------------


def test_flow_state_validation():
    grid = RadialGrid.graded(1e-3, 2.0, k=1, ratio=1.1, h_max=0.05)
    f = initial_small_radial(grid)
    with pytest.raises(ParameterError):
        FlowState(-1.0, f, 0.01)
    with pytest.raises(ParameterError):
        FlowState(0.0, f, 0.0)


def test_constant_south_pole_is_stationary():
    # phi identically pi is the constant map to the south pole; every term
    # of the radial equation vanishes there.
    grid = RadialGrid.graded(1e-3, 2.0, k=1, ratio=1.1, h_max=0.05)
    f = SphereField(grid, np.full(grid.r.size, np.pi), phi_origin=np.pi)
    st = FlowState(0.0, f, 1e-3)
    for _ in range(20):
        st = step_equivariant(st)
    assert np.max(np.abs(st.field.values - np.pi)) < 1e-12


def test_harmonic_profile_drift_is_truncation_sized():
    # the bubble profile solves the stationary equation, so the discrete
    # motion over a fixed time is set by the O(h^2) spatial error
    grid = RadialGrid.graded(1e-3, 6.0, k=1, ratio=1.05, h_max=0.03)
    f = initial_bubble_profile(grid, lam=1.0)
    st = FlowState(0.0, f, 2e-4)
    while st.t < 0.05:
        st = step_equivariant(st)
    drift = np.max(np.abs(st.field.values - f.values))
    assert drift < 5e-4


def test_radial_energy_decreases():
    grid = RadialGrid.graded(1e-3, 2.0, k=1, ratio=1.06, h_max=0.03)
    f = initial_small_radial(grid, eps=0.5)
    e0 = dirichlet_energy(f)
    st = FlowState(0.0, f, 5e-4)
    energies = [e0]
    for _ in range(200):
        st = step_equivariant(st)
        energies.append(dirichlet_energy(st.field))
    diffs = np.diff(energies)
    assert np.all(diffs <= 1e-12)
    assert energies[-1] < 0.8 * e0


def test_step_kind_mismatch_rejected():
    grid = RadialGrid.graded(1e-3, 2.0, k=1, ratio=1.1, h_max=0.05)
    f = initial_small_radial(grid)
    g2 = Grid2D.square(1.0, 17)
    c = SphereField.constant(g2, (0.0, 0.0, 1.0))
    with pytest.raises(ParameterError):
        step_full2d(FlowState(0.0, f, 1e-4))
    with pytest.raises(ParameterError):
        step_equivariant(FlowState(0.0, c, 1e-4))
    with pytest.raises(ParameterError):
        step_equivariant(FlowState(0.0, f, 1e-4), dt=-1.0)


def test_2d_explicit_bound_enforced():
    g2 = Grid2D.square(1.0, 17)
    c = SphereField.constant(g2, (0.0, 0.0, 1.0))
    h = g2.h
    with pytest.raises(ParameterError):
        step_full2d(FlowState(0.0, c, 1.0), dt=h * h)
    st = step_full2d(FlowState(0.0, c, 0.2 * h * h))
    assert np.allclose(st.field.values, c.values)


# ---------------------------------------------------------------------------
# time series bookkeeping
# ---------------------------------------------------------------------------


def test_timeseries_rejects_time_reversal():
    s = TimeSeries()
    row = dict(E_total=1.0, tension_l2_sq=0.0, dissipation_cum=0.0,
               lambda_min_est=1.0, grad_max=1.0, dt=0.1)
    s.append(t=0.0, **row)
    s.append(t=0.5, **row)
    with pytest.raises(ParameterError):
        s.append(t=0.4, **row)


def test_timeseries_invariant_checks():
    def fresh(E_vals, d_vals):
        s = TimeSeries()
        for i, (e, d) in enumerate(zip(E_vals, d_vals)):
            s.append(t=float(i), E_total=e, tension_l2_sq=0.0,
                     dissipation_cum=d, lambda_min_est=1.0, grad_max=1.0,
                     dt=0.1)
        return s

    fresh([2.0, 1.5, 1.5], [0.0, 0.1, 0.2]).check_invariants()
    with pytest.raises(DegenerateStepError):
        fresh([2.0, 2.1], [0.0, 0.1]).check_invariants()
    with pytest.raises(DegenerateStepError):
        fresh([2.0, 1.5], [0.2, 0.1]).check_invariants()
    # rises inside the accounting tolerance pass
    fresh([2.0, 2.0 + 1e-11], [0.0, 0.1]).check_invariants()


def test_estimate_blowup_time_square_root_law():
    # lambda(t) = sqrt(T - t) crosses dyadic levels at a geometric
    # sequence of times, which Aitken extrapolates to T exactly
    T = 1.7
    t = np.linspace(0.0, T - 1e-6, 4000)
    lam = np.sqrt(T - t)
    est = estimate_blowup_time(t, lam)
    assert abs(est - T) < 2e-3
    with pytest.raises(RangeError):
        estimate_blowup_time([], [])


# ---------------------------------------------------------------------------
# smooth runs through the driver
# ---------------------------------------------------------------------------


@pytest.fixture(scope="module")
def smooth_radial_run():
    grid = RadialGrid.graded(1e-3, 3.0, k=1, ratio=1.05, h_max=0.03)
    f = initial_small_radial(grid, eps=0.6)
    params = FlowParams(t_final=0.5, cfl=0.2, dt_max=2e-3, record_every=2,
                        snapshot_dt=0.1)
    return run_flow(f, params)


def test_smooth_run_reaches_final_time(smooth_radial_run):
    series, snaps, verdict = smooth_radial_run
    assert verdict.kind == "reached-final-time"
    assert np.isnan(verdict.t_blowup)
    t = series.column("t")
    assert abs(t[-1] - 0.5) < 1e-9
    assert series.check_invariants(2)
    assert snaps[0][0] == 0.0
    assert abs(snaps[-1][0] - 0.5) < 1e-9
    times = [tt for tt, _ in snaps]
    assert all(b > a for a, b in zip(times, times[1:]))


def test_smooth_run_dissipation_accounts_for_energy_drop(smooth_radial_run):
    series, _, _ = smooth_radial_run
    E = series.column("E_total")
    d = series.column("dissipation_cum")
    drop = E[0] - E[-1]
    assert drop > 0
    assert abs(d[-1] - drop) < 0.01 * E[0]


def test_energy_identity_residual_contract(smooth_radial_run):
    series, _, _ = smooth_radial_run
    t = series.column("t")
    E = series.column("E_total")
    res = energy_identity_residual(series, t[0], t[-1])
    assert res < 0.01 * E[0]
    assert energy_identity_residual(series, t[3], t[3]) == 0.0
    with pytest.raises(RangeError):
        energy_identity_residual(series, t[0], t[-1] + 0.123)
    with pytest.raises(RangeError):
        energy_identity_residual(series, t[-1], t[0])


def test_local_energy_inequality_smooth(smooth_radial_run):
    series, snaps, _ = smooth_radial_run
    E0 = series.column("E_total")[0]
    t1, t2 = snaps[1][0], snaps[-1][0]
    rep = local_energy_inequality_check(snaps, Disc((0.0, 0.0), 0.5), t1, t2,
                                        E0)
    assert rep.holds
    assert rep.lhs <= rep.rhs
    assert rep.cutoff_radius == 0.5
    with pytest.raises(RangeError):
        local_energy_inequality_check(snaps, Disc((0.0, 0.0), 0.5), t1,
                                      t2 + 17.0, E0)
    with pytest.raises(RangeError):
        local_energy_inequality_check(snaps, Disc((0.0, 0.0), 0.5), t2, t1,
                                      E0)


def test_degenerate_step_verdict_partial_output():
    grid = RadialGrid.graded(1e-3, 2.0, k=1, ratio=1.06, h_max=0.03)
    f = initial_small_radial(grid, eps=0.5)
    params = FlowParams(t_final=4.0, dt_floor=1.0, dt_max=0.5)
    with pytest.warns(UserWarning):
        series, snaps, verdict = run_flow(f, params)
    assert verdict.kind == "degenerate-step"
    assert len(series) >= 1
    assert len(snaps) >= 1


def test_2d_random_data_decays_to_constant():
    grid = Grid2D.square(2.0, 61)
    f = initial_random_smooth(grid, seed=7, amplitude=0.6)
    e0 = dirichlet_energy(f)
    assert e0 > 0.05
    params = FlowParams(t_final=1.2, dt_max=1.0, record_every=20,
                        snapshot_dt=0.6)
    series, snaps, verdict = run_flow(f, params)
    assert verdict.kind == "reached-final-time"
    E = series.column("E_total")
    assert E[-1] < 0.01 * e0
    assert series.check_invariants(20)


def test_rendered_bubble_stationarity_order():
    # L-infinity drift of the rendered bubble over [0, t] should shrink
    # like h^2 under refinement; C t h^2 with a generous C at the coarse
    # resolution guards the absolute size
    from hmflow.bubbles import make_equivariant_bubble, render_bubble

    drifts = []
    for n in (81, 161):
        grid = Grid2D.square(6.0, n)
        f = render_bubble(make_equivariant_bubble(1, 1.0), grid)
        st = FlowState(0.0, f, 0.2 * grid.h**2)
        while st.t < 0.02:
            st = step_full2d(st)
        drifts.append(np.max(np.abs(st.field.values - f.values)))
    assert drifts[0] < 50.0 * 0.02 * (12.0 / 80) ** 2
    assert drifts[0] / drifts[1] > 2.5


def test_equivariant_and_2d_solvers_agree_in_energy():
    # identical degree-one initial data, both integrators, energies on a
    # common centered disc after a smooth stretch agree to 1%
    R2 = 4.0
    rgrid = RadialGrid.graded(1e-3, R2 * np.sqrt(2.0), k=1, ratio=1.05,
                              h_max=0.04)

    def profile(r):
        return 2.0 * np.arctan(r) * (1.0 + 0.25 * np.sin(np.pi * r / 6.0))

    fr = SphereField(rgrid, profile(rgrid.r), phi_origin=0.0)
    cgrid = Grid2D.square(R2, 161)
    f2 = render_equivariant(fr, cgrid)

    t_end = 0.05
    str_ = FlowState(0.0, fr, 1e-4)
    while str_.t < t_end - 1e-12:
        str_ = step_equivariant(str_, min(1e-4, t_end - str_.t))
    st2 = FlowState(0.0, f2, 0.2 * cgrid.h**2)
    while st2.t < t_end - 1e-12:
        st2 = step_full2d(st2, min(0.2 * cgrid.h**2, t_end - st2.t))

    probe = Disc((0.0, 0.0), 2.0)
    er = dirichlet_energy(str_.field, probe)
    e2 = dirichlet_energy(st2.field, probe)
    assert abs(er - e2) < 0.01 * er


# ---------------------------------------------------------------------------
# the blow-up scenario
# ---------------------------------------------------------------------------


@pytest.fixture(scope="module")
def blowup_runs():
    out = {}
    for name, (r0, ratio) in {
        "coarse": (2e-4, 1.06),
        "fine": (1e-4, 1.045),
    }.items():
        grid = RadialGrid.graded(r0, 2.0, k=1, ratio=ratio, h_max=0.02)
        f = initial_excess_angle(grid)
        params = FlowParams(t_final=3.0, cfl=0.2, dt_max=0.005,
                            record_every=8, stop_scale_nodes=16.0)
        out[name] = run_flow(f, params)
    return out


def test_blowup_detected_with_origin_concentration(blowup_runs):
    for name, (series, snaps, verdict) in blowup_runs.items():
        assert verdict.kind == "blow-up-detected", name
        assert np.isfinite(verdict.t_blowup)
        assert np.hypot(*verdict.concentration_point) < 0.05
        assert series.check_invariants(8)


def test_blowup_time_grid_refinement_agreement(blowup_runs):
    ta = blowup_runs["coarse"][2].t_blowup
    tb = blowup_runs["fine"][2].t_blowup
    # two-digit agreement between resolutions
    assert abs(ta - tb) <= 0.01 * max(ta, tb)


def test_blowup_scale_shrinks_by_decades(blowup_runs):
    series, snaps, verdict = blowup_runs["fine"]
    lam = series.column("lambda_min_est")
    assert lam[0] / lam.min() > 50.0
    # snapshots cluster near the end once the scale starts halving
    t = series.column("t")
    late = [tt for tt, _ in snaps if tt > 0.95 * t[-1]]
    assert len(late) >= 3


def test_blowup_scale_law_ratio_decreases(blowup_runs):
    # lambda(t)/sqrt(T+ - t) should trend down over the last decade of
    # T+ - t, the self-similar rate being strictly faster than sqrt
    series, _, verdict = blowup_runs["fine"]
    t = series.column("t")
    lam = series.column("lambda_min_est")
    T = verdict.t_blowup
    left = T - t
    keep = (left > 0) & (left < 10.0 * max(left[-1], 1e-12))
    ratio = lam[keep] / np.sqrt(left[keep])
    thirds = np.array_split(ratio, 3)
    means = [seg.mean() for seg in thirds]
    assert means[2] < means[1] < means[0]


def test_blowup_local_energy_inequality_at_concentration(blowup_runs):
    series, snaps, verdict = blowup_runs["fine"]
    E0 = series.column("E_total")[0]
    t1 = snaps[1][0]
    t2 = snaps[-1][0]
    rep = local_energy_inequality_check(
        snaps, Disc(verdict.concentration_point, 0.25), t1, t2, E0)
    assert rep.holds
    rep_away = local_energy_inequality_check(
        snaps, Disc((1.5, 0.0), 0.1), t1, t2, E0)
    assert rep_away.holds


def test_verdict_fields_frozen():
    v = BlowupVerdict("reached-final-time")
    with pytest.raises(AttributeError):
        v.kind = "other"
    assert set(TIMESERIES_COLUMNS) == {
        "t", "E_total", "tension_l2_sq", "dissipation_cum",
        "lambda_min_est", "grad_max", "dt"}

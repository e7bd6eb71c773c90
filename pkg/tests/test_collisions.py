"""Collision detection on proximity time series.

The detector contract is frozen here as a brute-force oracle: enumerate
all index pairs, keep those satisfying every episode constraint, then
drop pairs contained in another satisfying pair.  The library detector
must agree exactly on randomized series.
"""

import numpy as np
import pytest
from scipy.stats import spearmanr

from hmflow.bubbles import compute_scale, make_equivariant_bubble
from hmflow.collisions import (FOUR_PI, CollisionInterval, DeltaSeries,
                               UPPER_BOUND_NOTE, _disc_resolved,
                               build_delta_series, detect_collisions,
                               duration_law_check, quantization_check)
from hmflow.errors import ParameterError, RangeError
from hmflow.fields import Disc, Grid2D, RadialGrid, SphereField
from hmflow.flow import (FlowParams, initial_excess_angle,
                         initial_random_smooth, run_flow)

RNG = np.random.default_rng


# ---------------------------------------------------------------------------
# oracle, frozen before the detector was exercised
# ---------------------------------------------------------------------------


def oracle_pairs(t, d, rho, E, resolved, eps, eta, quant_tol):
    """All inclusion-maximal index pairs satisfying the episode rules."""
    t, d, rho, E = map(np.asarray, (t, d, rho, E))
    ok = (np.asarray(resolved) > 0) & np.isfinite(d)
    n = len(t)
    sat = []
    for i in range(n):
        if not (ok[i] and d[i] <= eps):
            continue
        K = round(E[i] / FOUR_PI)
        if abs(E[i] - FOUR_PI * K) > quant_tol:
            continue
        for j in range(i + 1, n):
            if not ok[i:j + 1].all():
                continue
            if np.any(np.diff(d[i:j + 1]) < 0):
                continue
            if d[j] >= eta and t[j] - t[i] <= eps * rho[i] ** 2:
                sat.append((i, j))
    return sorted(p for p in sat
                  if not any(q != p and q[0] <= p[0] and q[1] >= p[1]
                             for q in sat))


def hand_series(t, d, rho, E, resolved=None, lam=None, mode="global"):
    s = DeltaSeries((0.0, 0.0), mode)
    n = len(t)
    resolved = np.ones(n) if resolved is None else np.asarray(resolved)
    lam = np.full(n, 0.1) if lam is None else np.asarray(lam)
    for i in range(n):
        s.append(t=t[i], rho=rho[i], d_total=d[i], lambda_max=lam[i],
                 M=1.0, energy=E[i], resolved=resolved[i])
    return s


def detected_pairs(series, **kw):
    t = series.column("t")
    out = []
    for iv in detect_collisions(series, **kw):
        i = int(np.flatnonzero(t == iv.sigma)[0])
        j = int(np.flatnonzero(t == iv.tau)[0])
        out.append((i, j))
    return sorted(out)


# ---------------------------------------------------------------------------
# series plumbing
# ---------------------------------------------------------------------------


def test_series_mode_and_size_validation():
    with pytest.raises(ParameterError):
        DeltaSeries((0, 0), "sideways")
    grid = Grid2D.square(1.0, 11)
    f = SphereField.constant(grid, (0.0, 0.0, 1.0))
    snaps = [(0.5, f), (1.0, f)]
    with pytest.raises(ParameterError):
        build_delta_series(snaps, (0, 0), "global")
    snaps = [(0.5, f), (1.0, f), (1.5, f)]
    with pytest.raises(ParameterError):
        build_delta_series(snaps, (0, 0), "blow-up")


def test_series_time_and_rho_invariants():
    s = hand_series([1.0, 4.0], [0.1, 0.1], [1.0, 2.0], [0.0, 0.0])
    assert s.check_invariants()
    bad_rho = hand_series([1.0, 4.0], [0.1, 0.1], [1.0, 1.0], [0.0, 0.0])
    with pytest.raises(ParameterError):
        bad_rho.check_invariants()
    unordered = hand_series([1.0, 1.0], [0.1, 0.1], [1.0, 1.0], [0.0, 0.0])
    with pytest.raises(ParameterError):
        unordered.check_invariants()


def test_disc_resolution_rule():
    rgrid = RadialGrid.graded(1e-3, 4.0, 1, ratio=1.05)
    f = SphereField.equivariant(rgrid, lambda r: 2 * np.arctan(r))
    assert _disc_resolved(f, (0.0, 0.0), 0.01)
    assert not _disc_resolved(f, (0.0, 0.0), 0.0)
    # near the rim the local node spacing is ~0.2, so a thin ring has no nodes
    assert not _disc_resolved(f, (3.9, 0.0), 1e-3)
    cgrid = Grid2D.square(2.0, 61)
    g = SphereField.constant(cgrid, (0.0, 0.0, 1.0))
    assert _disc_resolved(g, (0.0, 0.0), 5 * cgrid.h)
    assert not _disc_resolved(g, (0.0, 0.0), 2 * cgrid.h)


def test_interval_validation():
    iv = CollisionInterval(1.0, 1.01, (0.0, 0.0), 1.0, 0.05, 0.3, 2, 0.01)
    assert iv.K_level == 2
    with pytest.raises(ParameterError):
        CollisionInterval(1.0, 0.9, (0.0, 0.0), 1.0, 0.05, 0.3, 2, -0.1)
    with pytest.raises(ParameterError):
        CollisionInterval(1.0, 1.01, (0.0, 0.0), 1.0, 0.05, 0.3, 2, 0.02)
    with pytest.raises(ParameterError):
        CollisionInterval(1.0, 1.2, (0.0, 0.0), 1.0, 0.05, 0.3, 2, 0.2)


# ---------------------------------------------------------------------------
# detector on hand-built series
# ---------------------------------------------------------------------------


def test_eps_eta_ordering_enforced():
    s = hand_series([0.0, 1.0, 2.0], [0.1] * 3, [1.0] * 3, [0.0] * 3)
    with pytest.raises(ParameterError):
        detect_collisions(s, eps=0.3, eta=0.3)
    with pytest.raises(ParameterError):
        detect_collisions(s, eps=0.4, eta=0.1)


def test_monotone_decreasing_series_empty():
    t = np.linspace(0.0, 1.0, 20)
    d = np.linspace(0.5, 0.01, 20)
    s = hand_series(t, d, np.full(20, 2.0), np.full(20, FOUR_PI))
    assert detect_collisions(s) == []


def test_hand_built_crossing_detected():
    t = [1.0, 1.008]
    d = [0.01, 0.5]
    rho = [1.0, 0.9]
    E = [2 * FOUR_PI + 0.3, 5.0]
    s = hand_series(t, d, rho, E)
    out = detect_collisions(s)
    assert len(out) == 1
    iv = out[0]
    assert iv.K_level == 2
    assert iv.sigma == 1.0 and iv.tau == 1.008
    assert iv.duration == pytest.approx(0.008)
    assert iv.rho == 1.0
    assert detected_pairs(s) == oracle_pairs(t, d, rho, E, [1, 1],
                                             0.05, 0.3, 0.2 * FOUR_PI)


def test_overlong_interval_filtered():
    # same crossing but spread over more than eps * rho^2 in time
    s = hand_series([1.0, 1.2], [0.01, 0.5], [1.0, 0.9],
                    [2 * FOUR_PI, 5.0])
    assert detect_collisions(s) == []


def test_off_level_energy_filtered():
    # energy at sigma half way between levels fails the quantization gate
    s = hand_series([1.0, 1.008], [0.01, 0.5], [1.0, 0.9],
                    [1.5 * FOUR_PI, 5.0])
    assert detect_collisions(s) == []
    assert detect_collisions(s, quant_tol=0.6 * FOUR_PI)


def test_unresolved_interior_blocks_crossing():
    t = [0.0, 0.004, 0.008]
    d = [0.01, 0.1, 0.5]
    rho = [1.0, 1.0, 1.0]
    E = [FOUR_PI, FOUR_PI, FOUR_PI]
    open_run = hand_series(t, d, rho, E)
    assert detected_pairs(open_run) == [(0, 2)]
    gapped = hand_series(t, d, rho, E, resolved=[1, 0, 1])
    assert detect_collisions(gapped) == []


def test_nonmonotone_interior_blocks_and_splits():
    t = [0.0, 0.002, 0.004, 0.006]
    d = [0.01, 0.4, 0.3, 0.5]
    rho = [1.0] * 4
    E = [FOUR_PI] * 4
    s = hand_series(t, d, rho, E)
    # the dip at index 2 blocks (0, 3); (0, 1) survives on its own
    assert detected_pairs(s) == [(0, 1)]


def test_maximality_keeps_longest():
    t = [0.0, 0.002, 0.004, 0.006]
    d = [0.01, 0.02, 0.31, 0.5]
    rho = [1.0] * 4
    E = [FOUR_PI] * 4
    s = hand_series(t, d, rho, E)
    assert detected_pairs(s) == [(0, 3)]


def test_detector_matches_brute_force():
    thresholds = [(0.05, 0.3), (0.1, 0.2), (0.02, 0.4)]
    hits = 0
    for trial in range(60):
        rng = RNG(1000 + trial)
        n = int(rng.integers(3, 201))
        t = np.cumsum(rng.uniform(0.01, 0.1, n))
        d = np.abs(np.cumsum(rng.normal(0.0, 0.08, n)))
        d[rng.random(n) < 0.05] = np.nan
        rho = rng.uniform(0.2, 3.0, n)
        E = FOUR_PI * rng.integers(0, 4, n) + rng.normal(0.0, 2.0, n)
        resolved = (rng.random(n) < 0.92).astype(float)
        eps, eta = thresholds[trial % len(thresholds)]
        s = hand_series(t, d, rho, E, resolved=resolved)
        got = detected_pairs(s, eps=eps, eta=eta)
        want = oracle_pairs(t, d, rho, E, resolved, eps, eta,
                            0.2 * FOUR_PI)
        assert got == want
        hits += len(want)
    assert hits > 10  # the ensemble must actually exercise the detector


def test_detector_soundness_on_random_series():
    for trial in range(10):
        rng = RNG(77 + trial)
        n = 120
        t = np.cumsum(rng.uniform(0.01, 0.05, n))
        d = np.abs(np.cumsum(rng.normal(0.0, 0.1, n)))
        rho = rng.uniform(0.5, 3.0, n)
        E = FOUR_PI * rng.integers(0, 3, n) + rng.normal(0.0, 1.5, n)
        s = hand_series(t, d, rho, E)
        tt = s.column("t")
        for iv in detect_collisions(s):
            i = int(np.flatnonzero(tt == iv.sigma)[0])
            j = int(np.flatnonzero(tt == iv.tau)[0])
            assert iv.sigma < iv.tau
            assert d[i] <= 0.05 and d[j] >= 0.3
            assert iv.duration <= 0.05 * rho[i] ** 2
            assert abs(E[i] - FOUR_PI * iv.K_level) <= 0.2 * FOUR_PI


def test_k_level_stability_under_energy_perturbation():
    for seed in range(20):
        rng = RNG(seed)
        n = 300
        t = np.cumsum(rng.uniform(0.01, 0.1, n))
        K_true = rng.integers(0, 5, n)
        E = FOUR_PI * K_true + rng.uniform(-0.99, 0.99, n)
        rho = np.sqrt(t)
        base = hand_series(t, np.full(n, 0.1), rho, E)
        shaken = hand_series(t, np.full(n, 0.1), rho,
                             E + rng.uniform(-0.499, 0.499, n))
        assert quantization_check(base).k_levels == \
            quantization_check(shaken).k_levels


def test_interval_k_level_stable_under_perturbation():
    t = [1.0, 1.008]
    d = [0.01, 0.5]
    rho = [1.0, 1.0]
    for delta in (-0.49, 0.0, 0.49):
        E = [2 * FOUR_PI + 0.8 + delta, 5.0]
        out = detect_collisions(hand_series(t, d, rho, E))
        assert len(out) == 1 and out[0].K_level == 2


# ---------------------------------------------------------------------------
# reports
# ---------------------------------------------------------------------------


def test_duration_report_arithmetic_and_flagging():
    t = [1.0, 1.05, 2.0, 2.0005]
    d = [0.01, 0.5, 0.01, 0.5]
    rho = [4.0, 4.0, 4.0, 4.0]
    E = [FOUR_PI] * 4
    lam = [0.1, 0.1, 0.1, 0.1]
    s = hand_series(t, d, rho, E, lam=lam)
    ivs = detect_collisions(s)
    assert len(ivs) == 2
    rep = duration_law_check(ivs, s, c0_floor=0.1)
    assert rep.entries[0].ratio == pytest.approx(0.05 / 0.1 ** 2)  # 5.0
    assert not rep.entries[0].flagged
    assert rep.entries[1].ratio == pytest.approx(0.05, rel=1e-6)
    assert rep.entries[1].flagged


def test_duration_report_requires_matching_record():
    s = hand_series([1.0, 1.008], [0.01, 0.5], [1.0, 1.0],
                    [FOUR_PI, FOUR_PI])
    iv = CollisionInterval(0.4, 0.401, (0.0, 0.0), 1.0, 0.05, 0.3, 1,
                          0.001)
    with pytest.raises(RangeError):
        duration_law_check([iv], s)


def test_empty_duration_report():
    s = hand_series([0.0, 1.0, 2.0], [0.5, 0.3, 0.1], [1.0] * 3,
                    [FOUR_PI] * 3)
    rep = duration_law_check([], s)
    assert rep.entries == ()
    assert rep.c0_floor == 0.1


def test_quantization_deviation_formula():
    E = [0.02, FOUR_PI * 0.97, 2 * FOUR_PI + 1.0]
    s = hand_series([1.0, 2.0, 3.0], [0.1] * 3, [1.0, np.sqrt(2), 2.0], E)
    rep = quantization_check(s)
    assert rep.k_levels == (0, 1, 2)
    assert rep.deviations[0] == pytest.approx(0.02 / FOUR_PI, rel=1e-12)
    assert rep.deviations[1] == pytest.approx(0.03, rel=1e-9)
    assert sum(rep.histogram[0]) == 3
    assert rep.within_tol == 1.0
    assert quantization_check(s, tol=0.1).within_tol == pytest.approx(1 / 3)
    assert "upper bound" in UPPER_BOUND_NOTE


# ---------------------------------------------------------------------------
# series built from real snapshots
# ---------------------------------------------------------------------------


def _strictly_increasing(snaps):
    out = []
    for t, f in snaps:
        if not out or t > out[-1][0]:
            out.append((t, f))
    return out


@pytest.fixture(scope="module")
def bubble_series():
    lam = 1e-3
    grid = RadialGrid.graded(1e-5, 8.0, 1, ratio=1.06)
    f = SphereField.equivariant(grid, lambda r: 2 * np.arctan(r / lam))
    snaps = [(0.5, f), (0.8, f), (1.0, f)]
    series = build_delta_series(snaps, (0.0, 0.0), "global")
    return lam, series


def test_stationary_bubble_series_is_flat(bubble_series):
    lam, series = bubble_series
    d = series.column("d_total")
    assert np.all(series.column("resolved") > 0)
    assert np.all(series.column("M") == 1)
    assert np.all(d < 1.2)
    assert d.max() - d.min() < 0.4
    ref = compute_scale(make_equivariant_bubble(1, lam))
    assert series.column("lambda_max") == pytest.approx(ref, rel=0.12)


def test_stationary_bubble_energy_quantization(bubble_series):
    _, series = bubble_series
    rep = quantization_check(series)
    assert rep.k_levels == (1, 1, 1)
    assert max(rep.deviations) <= 1e-3
    assert rep.within_tol == 1.0


def test_stationary_bubble_no_collisions(bubble_series):
    _, series = bubble_series
    ivs = detect_collisions(series)
    assert ivs == []
    assert duration_law_check(ivs, series).entries == ()


@pytest.fixture(scope="module")
def decay_series():
    grid = Grid2D.square(2.0, 61)
    f0 = initial_random_smooth(grid, seed=7, amplitude=0.6)
    params = FlowParams(t_final=1.2, cfl=0.2, dt_max=2e-3, record_every=8,
                        snapshot_dt=0.3)
    series, snaps, verdict = run_flow(f0, params)
    assert verdict.kind == "reached-final-time"
    # the t = 0 snapshot has rho = 0 in global mode: an unresolvable disc
    return build_delta_series(_strictly_increasing(snaps), (0.0, 0.0),
                              "global")


def test_global_decay_series_empties_out(decay_series):
    s = decay_series
    assert s.check_invariants()
    assert s.column("resolved")[0] == 0.0
    assert np.isnan(s.column("d_total")[0])
    assert s.column("M")[-1] == 0
    # with no bubbles left, d is the outer-radius overhead alone: the nu
    # ladder stops at the grid edge, so the floor is rho / half_width
    d_last = s.column("d_total")[-1]
    floor = s.column("rho")[-1] / 2.0
    assert floor * 0.99 < d_last < floor + 0.1
    assert detect_collisions(s) == []


def test_global_decay_quantization_exact_at_zero(decay_series):
    s = decay_series
    rep = quantization_check(s)
    assert rep.k_levels[-1] == 0
    E_last = s.column("energy")[-1]
    assert rep.deviations[-1] == pytest.approx(E_last / FOUR_PI, rel=1e-12)


@pytest.fixture(scope="module")
def blowup_delta():
    grid = RadialGrid.graded(2e-4, 2.0, 1, ratio=1.06, h_max=0.02)
    f0 = initial_excess_angle(grid)
    params = FlowParams(t_final=3.0, cfl=0.2, dt_max=0.005, record_every=8,
                        stop_scale_nodes=16.0)
    series, snaps, verdict = run_flow(f0, params)
    assert verdict.kind == "blow-up-detected"
    t_plus = verdict.t_blowup
    snaps = [sf for sf in _strictly_increasing(snaps) if sf[0] < t_plus]
    assert len(snaps) >= 10
    delta = build_delta_series(snaps[-12:], (0.0, 0.0), "blow-up",
                               t_plus=t_plus)
    return delta


def test_blowup_delta_series_shape(blowup_delta):
    s = blowup_delta
    assert s.mode == "blow-up"
    assert s.check_invariants()
    res = s.column("resolved")
    assert np.all(res > 0)
    assert np.all(s.column("M")[-5:] >= 1)


def test_blowup_proximity_trend_negative(blowup_delta):
    s = blowup_delta
    t = s.column("t")[-10:]
    d = s.column("d_total")[-10:]
    assert np.all(np.isfinite(d))
    rho = spearmanr(t, d).statistic
    assert rho < 0


def test_blowup_quantization_tightens(blowup_delta):
    s = blowup_delta
    rep = quantization_check(s)
    dev = np.asarray(rep.deviations)
    t = s.column("t")
    assert rep.k_levels[-1] == 1
    rho = spearmanr(t[-10:], dev[-10:]).statistic
    assert rho < 0

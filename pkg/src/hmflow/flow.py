"""Time integration of the harmonic map heat flow u_t = Lap u + u |grad u|^2.

Two integrators:

* ``step_equivariant``: the k-equivariant radial reduction
  phi_t = phi_rr + phi_r/r - k^2 sin(2 phi)/(2 r^2), advanced by a
  linearly implicit step: diffusion and the Jacobian of the sine term
  (a diagonal, k^2 cos(2 phi)/r^2) go into one tridiagonal solve, the
  sine nonlinearity itself is evaluated at the current state.  Treating
  the sine term fully explicitly is unstable for dt above ~ r^2 at the
  innermost nodes, which on graded grids reaching r ~ 1e-5 would cap dt
  around 1e-10; folding its linearization into the solve removes that
  ceiling, so accuracy (dt ~ scale^2), not stiffness, sets the step.
* ``step_full2d``: explicit Euler plus renormalization on a Cartesian
  grid, stable for dt <= h^2/4.

``run_flow`` drives either one with adaptive dt proportional to the square
of the smallest resolved scale (estimated as 1/max|grad u|), records a
time series for the energy identity

    E(u(t2)) + int_{t1}^{t2} ||T(u)||^2 dt = E(u(t1)),

and watches for blow-up: a sustained gradient spike combined with at least
3 pi of energy inside a disc shrinking with the gradient scale.
"""

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_banded

from .errors import DegenerateStepError, ParameterError, RangeError
from .fields import (
    Disc,
    Grid2D,
    SphereField,
    dirichlet_energy,
    field_samples,
    grad_argmax,
    grad_max,
    renormalize,
    tension,
    tension_l2_sq,
)
from .geometry import smooth_cutoff

TIMESERIES_COLUMNS = (
    "t",
    "E_total",
    "tension_l2_sq",
    "dissipation_cum",
    "lambda_min_est",
    "grad_max",
    "dt",
)


@dataclass
class FlowState:
    """One instant of a flow: time, field, the dt in force, a step count."""

    t: float
    field: SphereField
    dt: float
    step_count: int = 0

    def __post_init__(self):
        if self.t < 0 or self.dt <= 0:
            raise ParameterError("flow state needs t >= 0 and dt > 0")


class TimeSeries:
    """Append-only history of a run, one row per recorded step.

    Columns: t, E_total, tension_l2_sq, dissipation_cum, lambda_min_est,
    grad_max, dt.  Energy may not increase between records beyond the
    accounting tolerance; cumulative dissipation never decreases.
    """

    def __init__(self):
        self._rows = {c: [] for c in TIMESERIES_COLUMNS}

    def append(self, **kw):
        if self._rows["t"] and kw["t"] < self._rows["t"][-1]:
            raise ParameterError("time series records must advance in time")
        for c in TIMESERIES_COLUMNS:
            self._rows[c].append(float(kw[c]))

    def column(self, name):
        return np.asarray(self._rows[name])

    def __len__(self):
        return len(self._rows["t"])

    def check_invariants(self, steps_per_record=1):
        E = self.column("E_total")
        if E.size >= 2:
            # roundoff through the stiff implicit solve reaches a few
            # eps * dt / h_min^2 per step, so the slack is not plain eps
            allowed = 1e-9 * np.maximum(E[:-1], 1.0) * max(steps_per_record, 1)
            if np.any(np.diff(E) > allowed):
                raise DegenerateStepError("energy increased between records")
        d = self.column("dissipation_cum")
        if d.size >= 2 and np.any(np.diff(d) < -1e-14):
            raise DegenerateStepError("cumulative dissipation decreased")
        return True


@dataclass(frozen=True)
class BlowupVerdict:
    """Outcome of a run: 'reached-final-time', 'blow-up-detected' or
    'degenerate-step', with the extrapolated blow-up time and the
    concentration point when one was tracked."""

    kind: str
    t_blowup: float = np.nan
    concentration_point: tuple = (np.nan, np.nan)


@dataclass(frozen=True)
class FlowParams:
    """Run controls.

    cfl scales the adaptive step dt = cfl * lambda_min^2 with
    lambda_min = 1/max|grad u|.  Snapshots fire every snapshot_dt and,
    once a spike is being tracked, at every halving of lambda_min.  h_ref
    is the declaration length (a gradient above 1/(grad_factor * h_ref)
    counts as a spike); by default the grid spacing for 2D grids and 10x
    the innermost radius for graded radial grids.
    """

    t_final: float = 1.0
    cfl: float = 0.2
    dt_max: float = 0.02
    dt_floor: float = 1e-14
    record_every: int = 1
    snapshot_dt: float = None
    max_steps: int = 20_000_000
    theta: float = 1.0
    h_ref: float = None
    grad_factor: float = 4.0
    blowup_sustain: int = 10
    blowup_energy: float = 3.0 * np.pi
    blowup_probe: float = 8.0
    stop_scale_nodes: float = 16.0
    max_snapshots: int = 400


def _reference_length(grid, params):
    if params.h_ref is not None:
        return params.h_ref
    if isinstance(grid, Grid2D):
        return grid.h
    return 10.0 * grid.r[0]


# ---------------------------------------------------------------------------
# single steps
# ---------------------------------------------------------------------------


def _radial_operator(grid):
    """Tridiagonal coefficients of phi_rr + phi_r/r on the graded grid,
    ghost node at r = 0 included.  Returns (lower a, diag b, upper c) for
    the n-1 interior rows; the outer node is pinned."""
    r = grid.r
    re = np.concatenate([[0.0], r])
    hm = re[1:-1] - re[:-2]
    hp = re[2:] - re[1:-1]
    ri = r[:-1]
    a = (2.0 - hp / ri) / (hm * (hm + hp))
    b = (-2.0 / (hm * hp)) + (hp - hm) / (hm * hp * ri)
    c = (2.0 + hm / ri) / (hp * (hm + hp))
    return a, b, c


def step_equivariant(state, dt=None, theta=1.0):
    """Advance a radial FlowState by one linearly implicit step.

    Writes the update in increment form: with L the discrete
    phi_rr + phi_r/r, N(phi) = k^2 sin(2 phi)/(2 r^2) and
    N' = k^2 cos(2 phi)/r^2 its diagonal Jacobian,

        (I - dt theta (L - N')) delta = dt (L phi - N(phi)),

    one tridiagonal solve per step.  The outer boundary value and the
    r = 0 ghost stay fixed.  Raises DegenerateStepError on non-finite
    output.
    """
    if dt is None:
        dt = state.dt
    if dt <= 0 or not np.isfinite(dt):
        raise ParameterError(f"bad dt = {dt!r}")
    f = state.field
    if not f.is_radial():
        raise ParameterError("step_equivariant expects a radial field")
    grid = f.grid
    r = grid.r
    k = grid.k
    phi = f.values
    n = r.size
    a, b, c = _radial_operator(grid)

    ri = r[:-1]
    react = k * k * np.sin(2.0 * phi[:-1]) / (2.0 * ri**2)
    dreact = k * k * np.cos(2.0 * phi[:-1]) / ri**2
    Lphi = b * phi[:-1] + c * phi[1:]
    Lphi[1:] += a[1:] * phi[:-2]
    Lphi[0] += a[0] * f.phi_origin
    rhs = dt * (Lphi - react)

    ab = np.zeros((3, n - 1))
    ab[0, 1:] = -dt * theta * c[:-1]
    ab[1, :] = 1.0 - dt * theta * (b - dreact)
    ab[2, :-1] = -dt * theta * a[1:]
    new = np.empty(n)
    new[:-1] = phi[:-1] + solve_banded((1, 1), ab, rhs)
    new[-1] = phi[-1]
    if not np.all(np.isfinite(new)):
        raise DegenerateStepError("equivariant step produced non-finite angles")
    out = SphereField(grid, new, f.phi_origin)
    return FlowState(state.t + dt, out, dt, state.step_count + 1)


def step_full2d(state, dt=None):
    """Explicit Euler step u -> u + dt T(u), renormalized back to the
    sphere.  Requires dt <= h^2/4; boundary values are frozen."""
    if dt is None:
        dt = state.dt
    f = state.field
    if f.is_radial():
        raise ParameterError("step_full2d expects a 2D field")
    h = f.grid.h
    if dt > 0.25 * h * h * (1 + 1e-12):
        raise ParameterError(f"dt = {dt!r} exceeds the explicit bound h^2/4")
    T = tension(f, check=False)
    new = f.values + dt * T
    if not np.all(np.isfinite(new)):
        raise DegenerateStepError("2D step produced non-finite values")
    out = renormalize(SphereField(f.grid, new))
    return FlowState(state.t + dt, out, dt, state.step_count + 1)


# ---------------------------------------------------------------------------
# blow-up time extrapolation
# ---------------------------------------------------------------------------


def _aitken(t0, t1, t2):
    d1, d2 = t1 - t0, t2 - t1
    denom = d2 - d1
    if abs(denom) < 1e-30:
        return t2 + d2
    return t2 - d2 * d2 / denom


class _CrossingTracker:
    """First times at which a shrinking scale crosses dyadic levels."""

    def __init__(self, lam0):
        self.level = lam0 / 2.0
        self.times = []

    def update(self, t, lam):
        while lam <= self.level:
            self.times.append(t)
            self.level /= 2.0

    def extrapolate(self, fallback):
        ts = self.times
        if len(ts) >= 3:
            return float(_aitken(ts[-3], ts[-2], ts[-1]))
        if len(ts) == 2:
            return float(2 * ts[-1] - ts[-2])
        return float(fallback)


def estimate_blowup_time(times, scales):
    """Blow-up time from the dyadic crossing times of a scale history,
    Aitken-accelerated."""
    tracker = None
    for t, s in zip(np.asarray(times, float), np.asarray(scales, float)):
        if tracker is None:
            tracker = _CrossingTracker(s)
        tracker.update(t, s)
    if tracker is None:
        raise RangeError("empty scale history")
    return tracker.extrapolate(times[-1])


# ---------------------------------------------------------------------------
# the driver
# ---------------------------------------------------------------------------


def run_flow(initial, params=None):
    """Integrate the flow from `initial` until t_final, blow-up, or a
    degenerate step.

    Returns (TimeSeries, snapshots, BlowupVerdict); snapshots is a list of
    (t, SphereField) pairs taken at the regular cadence plus, once a spike
    is tracked, at every halving of the resolved scale.

    Blow-up is declared when max|grad u| exceeds 1/(grad_factor * h_ref)
    for blowup_sustain consecutive steps while the disc of radius
    blowup_probe/max|grad u| around the gradient maximizer holds at least
    blowup_energy.  The run then continues down to stop_scale_nodes grid
    lengths to populate the approach, and reports an extrapolated blow-up
    time from dyadic scale crossings.
    """
    if params is None:
        params = FlowParams()
    f = initial
    radial = f.is_radial()
    h_ref = _reference_length(f.grid, params)
    h_min = f.grid.r[0] if radial else f.grid.h

    def advance(st, dt):
        if radial:
            return step_equivariant(st, dt, params.theta)
        return step_full2d(st, dt)

    g = grad_max(f)
    lam = 1.0 / max(g, 1e-300)
    dt0 = min(params.dt_max, params.cfl * lam * lam)
    if not radial:
        dt0 = min(dt0, 0.25 * f.grid.h**2)
    state = FlowState(0.0, f, dt0)

    series = TimeSeries()
    snaps = [(0.0, f.copy())]
    snap_dt = params.snapshot_dt or params.t_final / 20.0
    next_snap = snap_dt
    diss = 0.0
    t_rec = 0.0
    tl2_rec = tension_l2_sq(f)
    series.append(t=0.0, E_total=dirichlet_energy(f), tension_l2_sq=tl2_rec,
                  dissipation_cum=0.0, lambda_min_est=lam, grad_max=g, dt=dt0)

    declare_grad = 1.0 / (params.grad_factor * h_ref)
    tracker = _CrossingTracker(lam)
    spike_run = 0
    detected = False
    snap_scale = lam
    conc = (np.nan, np.nan)

    def finish(kind):
        if snaps[-1][0] < state.t:
            snaps.append((state.t, state.field.copy()))
        series.check_invariants(params.record_every)
        if kind == "blow-up-detected":
            t_plus = max(tracker.extrapolate(state.t), state.t)
            return series, snaps, BlowupVerdict(kind, t_plus, conc)
        return series, snaps, BlowupVerdict(kind, np.nan, conc)

    while state.t < params.t_final and state.step_count < params.max_steps:
        t_rem = params.t_final - state.t
        if t_rem <= params.dt_floor:
            break
        lam = 1.0 / max(g, 1e-300)
        dt = min(params.dt_max, params.cfl * lam * lam, t_rem)
        if not radial:
            dt = min(dt, 0.25 * state.field.grid.h**2)
        if dt < params.dt_floor:
            warnings.warn("aborting: adaptive dt fell below the floor")
            return finish("degenerate-step")
        stepped = False
        for _ in range(8):
            try:
                state = advance(state, dt)
                stepped = True
                break
            except DegenerateStepError:
                dt *= 0.5
                if dt < params.dt_floor:
                    break
        if not stepped:
            warnings.warn("aborting: step degenerated down to the dt floor")
            return finish("degenerate-step")

        g = grad_max(state.field)
        lam_now = 1.0 / max(g, 1e-300)
        tracker.update(state.t, lam_now)

        if (state.step_count % params.record_every == 0
                or state.t >= params.t_final * (1.0 - 1e-12)):
            tl2 = tension_l2_sq(state.field)
            diss += 0.5 * (tl2 + tl2_rec) * (state.t - t_rec)
            tl2_rec = tl2
            t_rec = state.t
            series.append(t=state.t, E_total=dirichlet_energy(state.field),
                          tension_l2_sq=tl2, dissipation_cum=diss,
                          lambda_min_est=lam_now, grad_max=g, dt=dt)

        if g > declare_grad:
            spike_run += 1
        else:
            spike_run = 0
        if not detected and spike_run >= params.blowup_sustain:
            y = grad_argmax(state.field)
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                e_loc = dirichlet_energy(state.field, Disc(y, params.blowup_probe / g))
            if e_loc >= params.blowup_energy:
                detected = True
                conc = y
        if detected:
            conc = grad_argmax(state.field)
            if lam_now <= 0.5 * snap_scale and len(snaps) < params.max_snapshots:
                snaps.append((state.t, state.field.copy()))
                snap_scale = lam_now
            if lam_now < params.stop_scale_nodes * h_min:
                return finish("blow-up-detected")
        if state.t >= next_snap and len(snaps) < params.max_snapshots:
            # a halving snapshot in the same step already covers this time
            if not snaps or snaps[-1][0] < state.t:
                snaps.append((state.t, state.field.copy()))
            next_snap += snap_dt

    return finish("blow-up-detected" if detected else "reached-final-time")


# ---------------------------------------------------------------------------
# diagnostics
# ---------------------------------------------------------------------------


def energy_identity_residual(series, t1, t2):
    """|E(t2) + int_t1^t2 ||T||^2 dt - E(t1)| by trapezoid on the records.

    t1 and t2 must be record times of the series.
    """
    t = series.column("t")
    if t2 < t1:
        raise RangeError("need t1 <= t2")
    i1 = int(np.argmin(np.abs(t - t1)))
    i2 = int(np.argmin(np.abs(t - t2)))
    tol = 1e-9 * max(1.0, abs(t[-1]))
    if abs(t[i1] - t1) > tol or abs(t[i2] - t2) > tol:
        raise RangeError("t1/t2 are not record times of this series")
    if i1 == i2:
        return 0.0
    E = series.column("E_total")
    tl2 = series.column("tension_l2_sq")
    integral = float(np.trapezoid(tl2[i1 : i2 + 1], t[i1 : i2 + 1]))
    return abs(E[i2] + integral - E[i1])


@dataclass(frozen=True)
class LocalEnergyReport:
    lhs: float
    rhs: float
    holds: bool
    cutoff_radius: float
    constant: float


def _weighted_grad_sq(fld, disc, outer):
    pts, w, _, grads = field_samples(fld)
    d = np.hypot(pts[:, 0] - disc.center[0], pts[:, 1] - disc.center[1])
    psi = smooth_cutoff(d, disc.radius, outer)
    return float(np.sum(w * psi**2 * np.sum(grads**2, axis=(1, 2))))


def local_energy_inequality_check(snapshots, disc, t1, t2, total_energy0,
                                  constant=4.0):
    """Localized energy growth bound between two snapshot times.

    Checks int |grad u(t2)|^2 psi^2 <= int |grad u(t1)|^2 psi^2
    + constant * E(u0) * (t2 - t1) / R^2 with a smooth cutoff psi equal to
    1 on the disc, supported on 2.5 R, slope below 1/R.  Returns both
    sides in a report; raises RangeError when a requested time has no
    snapshot.
    """
    if t2 < t1:
        raise RangeError("need t1 <= t2")
    ts = np.array([t for t, _ in snapshots])

    def pick(tq):
        i = int(np.argmin(np.abs(ts - tq)))
        if abs(ts[i] - tq) > 1e-9 * max(1.0, abs(ts[-1])):
            raise RangeError(f"no snapshot at t = {tq!r}")
        return snapshots[i][1]

    f1 = pick(t1)
    f2 = pick(t2)
    R = disc.radius
    outer = 2.5 * R
    lhs = _weighted_grad_sq(f2, disc, outer)
    base = _weighted_grad_sq(f1, disc, outer)
    rhs = base + constant * total_energy0 * (t2 - t1) / (R * R)
    return LocalEnergyReport(lhs, rhs, lhs <= rhs * (1 + 1e-9), R, constant)


# ---------------------------------------------------------------------------
# initial data families
# ---------------------------------------------------------------------------


def initial_bubble_profile(grid, lam):
    """Radial bubble angle phi = 2 arctan((r/lam)^k) on the given grid."""
    phi = 2.0 * np.arctan((grid.r / lam) ** grid.k)
    return SphereField(grid, phi, phi_origin=0.0)


def initial_excess_angle(grid, amplitude=np.pi + 0.5):
    """Degree-one class data with excess outer angle: phi(0) = 0,
    phi(R) = amplitude > pi.  The classical finite-time concentration
    scenario for the k = 1 reduction.  The profile is linear near the
    origin (phi ~ 2 A r / R), as smooth equivariant data must be."""
    s = grid.r / grid.r[-1]
    phi = amplitude * s * (2.0 - s)
    return SphereField(grid, phi, phi_origin=0.0)


def initial_small_radial(grid, eps=0.3):
    """Low-energy radial data vanishing at both ends."""
    phi = eps * np.sin(np.pi * grid.r / grid.r[-1])
    return SphereField(grid, phi, phi_origin=0.0)


def initial_random_smooth(grid, seed=0, amplitude=0.5, modes=3):
    """Seeded low-frequency perturbation of the constant vertical state on
    a 2D grid; the amplitude keeps the energy well below one bubble."""
    rng = np.random.default_rng(seed)
    X, Y = grid.meshgrid()
    Lx = grid.xs[-1] - grid.xs[0]
    Ly = grid.ys[-1] - grid.ys[0]
    wx = np.pi * (X - grid.xs[0]) / Lx
    wy = np.pi * (Y - grid.ys[0]) / Ly
    vx = np.zeros_like(X)
    vy = np.zeros_like(X)
    for mx in range(1, modes + 1):
        for my in range(1, modes + 1):
            cx, cy = rng.normal(scale=amplitude / (mx * my), size=2)
            bump = np.sin(mx * wx) * np.sin(my * wy)
            vx += cx * bump
            vy += cy * bump
    vals = np.stack([vx, vy, np.ones_like(vx)], axis=-1)
    return renormalize(SphereField(grid, vals))

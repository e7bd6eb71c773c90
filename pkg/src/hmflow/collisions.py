"""Post-processing of flow snapshots on self-similar discs.

``build_delta_series`` runs the configuration fit on every snapshot over
the disc D(y, rho(t)) with rho = sqrt(T_plus - t) for finite-time
concentration and rho = sqrt(t) for global runs, recording the fitted
proximity upper bound, the largest fitted bubble scale, the bubble count
and the disc energy.

``detect_collisions`` scans such a series for bubble-collision episodes:
a time sigma where the field sits close to the configuration family
(d <= eps) followed by a time tau where it is far from the searched
family (d >= eta), with d climbing monotonically in between, the episode
no longer than eps * rho(sigma)^2, and the energy at sigma within the
quantization tolerance of a level 4 pi K.  Only inclusion-maximal
episodes are reported.  Note the series stores a fitted upper bound, so
"far" certifies distance from the searched family, not from every
configuration.

``duration_law_check`` reports the ratio (tau - sigma)/lambda_max^2 per
episode, flagging values under a floor, and ``quantization_check``
measures how close disc energies sit to the 4 pi K ladder.
"""

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError, RangeError
from .fields import Disc, dirichlet_energy
from .fitting import extract_bubbles, fit_config

FOUR_PI = 4.0 * np.pi

# Every report derived from a DeltaSeries must carry this caveat: the fit
# minimizes over one parametrized family, so d_total only bounds the true
# distance from above and a large value rules out the searched family only.
UPPER_BOUND_NOTE = ("d_total is a fitted upper bound for the distance to "
                    "the configuration family, not the infimum")

DELTA_COLUMNS = ("t", "rho", "d_total", "lambda_max", "M", "energy",
                 "resolved")


class DeltaSeries:
    """Per-snapshot fit results on self-similar discs about a point y.

    Columns: t, rho, d_total, lambda_max, M, energy, resolved.  The
    resolved flag marks records whose disc the snapshot grid can resolve;
    unresolved records carry NaN fit values and break detector scans.
    """

    def __init__(self, y, mode, t_plus=np.nan):
        if mode not in ("blow-up", "global"):
            raise ParameterError(f"unknown mode {mode!r}")
        self.y = (float(y[0]), float(y[1]))
        self.mode = mode
        self.t_plus = float(t_plus)
        self._rows = {c: [] for c in DELTA_COLUMNS}

    def append(self, **kw):
        for c in DELTA_COLUMNS:
            self._rows[c].append(float(kw[c]))

    def column(self, name):
        return np.asarray(self._rows[name])

    def __len__(self):
        return len(self._rows["t"])

    def check_invariants(self):
        t = self.column("t")
        rho = self.column("rho")
        if len(t) > 1 and np.any(np.diff(t) <= 0):
            raise ParameterError("record times must increase strictly")
        if self.mode == "blow-up":
            want = np.sqrt(np.maximum(self.t_plus - t, 0.0))
        else:
            want = np.sqrt(np.maximum(t, 0.0))
        if not np.allclose(rho, want, rtol=1e-12, atol=1e-12):
            raise ParameterError("rho(t) does not follow the run mode")
        return True


def _disc_resolved(field, y, rho):
    """Whether the grid meaningfully resolves D(y, rho): a few node rings
    inside the radial shadow, or four spacings across the radius."""
    if rho <= 0:
        return False
    if field.is_radial():
        r = field.grid.r
        s = float(np.hypot(y[0], y[1]))
        inside = np.sum((r > s - rho) & (r < s + rho))
        return bool(inside >= 4)
    return rho >= 4.0 * field.grid.h


def build_delta_series(snapshots, y, mode="blow-up", t_plus=None,
                       gamma0=None, eps0=None):
    """Fit every snapshot on its self-similar disc.

    snapshots: (t, SphereField) pairs; mode "blow-up" needs the blow-up
    time estimate t_plus.  Returns a DeltaSeries; records the grid cannot
    resolve get NaN fit values and a cleared resolved flag instead of an
    error.
    """
    if len(snapshots) < 3:
        raise ParameterError("need at least 3 snapshots for a trend")
    if mode == "blow-up":
        if t_plus is None or not np.isfinite(t_plus):
            raise ParameterError("blow-up mode needs a finite t_plus")
    series = DeltaSeries(y, mode, np.nan if mode == "global" else t_plus)
    for t, field in snapshots:
        rho = np.sqrt(max(t_plus - t, 0.0)) if mode == "blow-up" \
            else np.sqrt(max(t, 0.0))
        resolved = _disc_resolved(field, y, rho)
        disc = Disc(y, rho) if rho > 0 else None
        if disc is not None:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                energy = dirichlet_energy(field, disc)
        else:
            energy = 0.0
        if resolved:
            seeds = extract_bubbles(field, disc, eps0)
            out = fit_config(field, disc, seeds, gamma0)
            scales = [e.scale for e in out.config.bubbles]
            series.append(t=t, rho=rho, d_total=out.report.total,
                          lambda_max=max(scales) if scales else 0.0,
                          M=out.config.M, energy=energy, resolved=1.0)
        else:
            series.append(t=t, rho=rho, d_total=np.nan, lambda_max=np.nan,
                          M=0.0, energy=energy, resolved=0.0)
    series.check_invariants()
    return series


# ---------------------------------------------------------------------------
# collision detection
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CollisionInterval:
    """One detected episode: close to the family at sigma, far at tau."""

    sigma: float
    tau: float
    y: tuple
    rho: float
    eps: float
    eta: float
    K_level: int
    duration: float

    def __post_init__(self):
        if not self.sigma < self.tau:
            raise ParameterError("need sigma < tau")
        if abs(self.duration - (self.tau - self.sigma)) > 1e-12 * max(
                1.0, self.tau):
            raise ParameterError("duration must equal tau - sigma")
        if self.duration > self.eps * self.rho**2 * (1 + 1e-12):
            raise ParameterError(
                "episode longer than eps * rho^2 is not a collision")


def default_quantization_tolerance():
    return 0.2 * FOUR_PI


def detect_collisions(series, eps=0.05, eta=0.3, quant_tol=None):
    """Inclusion-maximal collision episodes of a DeltaSeries.

    A pair of record indices (i, j) qualifies when d[i] <= eps,
    d[j] >= eta, every record from i to j is resolved with d
    nondecreasing, t[j] - t[i] <= eps * rho[i]^2 and the disc energy at i
    sits within quant_tol of its nearest 4 pi K.  Episodes contained in a
    longer qualifying episode are dropped.
    """
    if not eps < eta:
        raise ParameterError("need eps < eta")
    if quant_tol is None:
        quant_tol = default_quantization_tolerance()
    t = series.column("t")
    d = series.column("d_total")
    rho = series.column("rho")
    E = series.column("energy")
    ok = (series.column("resolved") > 0) & np.isfinite(d)

    best_j = {}
    n = len(series)
    for i in range(n):
        if not ok[i] or d[i] > eps:
            continue
        K = int(round(E[i] / FOUR_PI))
        if abs(E[i] - FOUR_PI * K) > quant_tol:
            continue
        for j in range(i + 1, n):
            if not ok[j] or d[j] < d[j - 1]:
                break
            if t[j] - t[i] > eps * rho[i] ** 2:
                break
            if d[j] >= eta:
                best_j[i] = j
    out = []
    covered = -1
    for i in sorted(best_j):
        j = best_j[i]
        if j > covered:
            K = int(round(E[i] / FOUR_PI))
            out.append(CollisionInterval(float(t[i]), float(t[j]), series.y,
                                         float(rho[i]), eps, eta, K,
                                         float(t[j] - t[i])))
            covered = j
    return out


# ---------------------------------------------------------------------------
# diagnostic reports
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DurationEntry:
    interval: CollisionInterval
    lambda_max: float
    ratio: float
    flagged: bool


@dataclass(frozen=True)
class DurationReport:
    entries: tuple
    c0_floor: float


def duration_law_check(intervals, series, c0_floor=0.1):
    """Ratio duration/lambda_max(sigma)^2 per episode; purely diagnostic.

    lambda_max is read off the series record at t = sigma.  Ratios below
    the floor are flagged.  An empty interval list yields an empty report.
    """
    t = series.column("t")
    lam = series.column("lambda_max")
    entries = []
    for iv in intervals:
        i = int(np.argmin(np.abs(t - iv.sigma)))
        if abs(t[i] - iv.sigma) > 1e-9 * max(1.0, abs(t[-1])):
            raise RangeError(f"no record at sigma = {iv.sigma!r}")
        ratio = iv.duration / lam[i] ** 2 if lam[i] > 0 else np.inf
        entries.append(DurationEntry(iv, float(lam[i]), float(ratio),
                                     bool(ratio < c0_floor)))
    return DurationReport(tuple(entries), c0_floor)


@dataclass(frozen=True)
class QuantizationReport:
    k_levels: tuple
    deviations: tuple        # |E - 4 pi K| / 4 pi, one per record
    histogram: tuple         # (counts, bin edges) over [0, 0.5]
    tol: float
    within_tol: float        # fraction of records within tol

    def __len__(self):
        return len(self.k_levels)


def quantization_check(series, tol=None):
    """Nearest energy level 4 pi K and relative deviation per record."""
    if tol is None:
        tol = default_quantization_tolerance()
    E = series.column("energy")
    K = np.rint(E / FOUR_PI).astype(int)
    dev = np.abs(E - FOUR_PI * K) / FOUR_PI
    counts, edges = np.histogram(dev, bins=10, range=(0.0, 0.5))
    within = float(np.mean(np.abs(E - FOUR_PI * K) <= tol)) if E.size else 1.0
    return QuantizationReport(tuple(int(k) for k in K),
                              tuple(float(x) for x in dev),
                              (tuple(int(c) for c in counts), tuple(edges)),
                              float(tol), within)

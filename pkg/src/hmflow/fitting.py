"""Multi-bubble configurations and the localized distance to them.

A configuration is a constant ``omega`` plus a finite sum of harmonic
maps, each re-based at its value at infinity:

    Q(x) = omega + sum_j (omega_j(x) - omega_j(oo)).

The localized distance between a field u and a configuration, on a disc
D(y, rho) with an admissible hierarchy of radii xi <= rho <= nu and
per-bubble radii (nu_j, xi_j), adds up eight ingredients: the Dirichlet
energy of u - Q on D(y, rho); for each bubble the sup of |u - omega_j|
over its disc D(a_j, nu_j) punctured at other centers; the sup of
|u - omega| and the energy of u over the outer neck annulus; the ratios
xi/rho + rho/nu; reciprocals of the pairwise separation quotients; scale
vs. containment ratios per bubble; and the puncture-radius ratios for
nested centers.  Every summand is dimensionless or scale-invariant, so a
joint rescaling of field, configuration, disc and radii leaves the value
unchanged up to quadrature error.

``extract_bubbles`` peels concentrations greedily (smallest disc holding
an energy quantum, mask, repeat), ``fit_config`` refines library bubbles
through least squares on the gradient mismatch and picks radii on dyadic
grids, reporting an upper bound for the proximity of u to the whole
configuration family.
"""

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.optimize import least_squares

from .bubbles import (
    BubbleMap,
    bubble_gradient,
    check_gamma0,
    compute_center,
    compute_scale,
    default_gamma0,
    evaluate_bubble,
    make_equivariant_bubble,
)
from .errors import AdmissibilityError, ConstraintViolationError, ParameterError
from .fields import Disc, dirichlet_energy, field_samples
from .geometry import gauss_legendre_panels, geometric_edges

FOUR_PI = 4.0 * np.pi


# ---------------------------------------------------------------------------
# configurations
# ---------------------------------------------------------------------------


def bubble_limit(b):
    """Value of the bubble at infinity, exact from the leading coefficients."""
    p, q = b.rational.num, b.rational.den
    dp, dq = p.size - 1, q.size - 1
    if dp > dq:
        return np.array([0.0, 0.0, -1.0])
    if dp < dq:
        return np.array([0.0, 0.0, 1.0])
    w = p[-1] / q[-1]
    if b.orientation < 0:
        w = np.conj(w)
    s = abs(w) ** 2
    return np.array([2.0 * w.real, 2.0 * w.imag, 1.0 - s]) / (1.0 + s)


@dataclass(frozen=True)
class ConfigBubble:
    """One summand: the map plus its center, scale and orientation flag."""

    map: BubbleMap
    center: tuple
    scale: float
    orientation: int


def bubble_entry(b, gamma0=None):
    """Wrap a BubbleMap with its concentration center and scale."""
    lam = compute_scale(b, gamma0)
    a = compute_center(b, gamma0)
    return ConfigBubble(b, (float(a[0]), float(a[1])), float(lam),
                        b.orientation)


class BubbleConfig:
    """omega + sum of re-based bubbles; M = 0 is the constant map."""

    def __init__(self, omega_inf, bubbles=()):
        v = np.asarray(omega_inf, dtype=float).reshape(3)
        n = np.linalg.norm(v)
        if abs(n - 1.0) > 1e-6:
            raise ConstraintViolationError(
                f"omega must be a unit vector, |omega| = {n!r}")
        self.omega_inf = v / n
        self.bubbles = list(bubbles)
        for entry in self.bubbles:
            if not isinstance(entry, ConfigBubble):
                raise ParameterError("bubbles must be ConfigBubble entries")

    @property
    def M(self):
        return len(self.bubbles)

    @classmethod
    def from_maps(cls, omega_inf, maps, gamma0=None):
        return cls(omega_inf, [bubble_entry(b, gamma0) for b in maps])


def evaluate_config(c, points):
    """Superposition value at planar points; not unit-length in general."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    out = np.tile(c.omega_inf, (pts.shape[0], 1))
    for entry in c.bubbles:
        out = out + evaluate_bubble(entry.map, pts) - bubble_limit(entry.map)
    if np.asarray(points).ndim == 1:
        return out[0]
    return out


def config_gradient(c, points):
    """Spatial gradient of the superposition, (N, 3, 2); constants drop."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    out = np.zeros((pts.shape[0], 3, 2))
    for entry in c.bubbles:
        out += bubble_gradient(entry.map, pts)
    return out


def config_energy(c, disc, n_theta=256, per_decade=10, order=8):
    """Dirichlet energy of the superposition over a disc.

    Polar quadrature about the disc center.  Panels are graded down to
    the smallest bubble core, and extra edges cluster around the radius
    of every off-center bubble so that its core is resolved too; the
    angle count grows with the largest center-distance to core ratio.
    """
    if not c.bubbles:
        return 0.0
    y = np.asarray(disc.center, dtype=float)
    # the stored scale is the gamma0 scale, well above the concentration
    # length of the profile; panels must reach below the core length
    cores = [e.scale / 40.0 for e in c.bubbles]
    dists = [float(np.hypot(e.center[0] - y[0], e.center[1] - y[1]))
             for e in c.bubbles]
    inner = min(min(cores) / 8.0, disc.radius / 8.0)
    edges = [geometric_edges(inner, disc.radius, per_decade)]
    for s, d in zip(cores, dists):
        if d > s:
            # ladder of edges accumulating at r = d from both sides
            t = geometric_edges(s / 4.0, d, per_decade)
            edges.append(np.clip(d - t, 0.0, disc.radius))
            edges.append(np.clip(d + t, 0.0, disc.radius))
            n_theta = max(n_theta, min(4096, int(24.0 * d / s)))
    edges = np.unique(np.concatenate([[0.0, disc.radius]] + edges))
    r, wr = gauss_legendre_panels(edges, order)
    th = (np.arange(n_theta) + 0.5) * (2.0 * np.pi / n_theta)
    R, TH = np.meshgrid(r, th, indexing="ij")
    pts = np.stack([y[0] + (R * np.cos(TH)).ravel(),
                    y[1] + (R * np.sin(TH)).ravel()], axis=-1)
    g = config_gradient(c, pts)
    dens = np.sum(g * g, axis=(1, 2)).reshape(R.shape)
    return float(0.5 * (2.0 * np.pi / n_theta)
                 * np.sum(wr * r * np.sum(dens, axis=1)))


# ---------------------------------------------------------------------------
# admissible radii and the distance
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AdmissibleRadii:
    """Outer pair (nu, xi) and per-bubble pairs (nu_j, xi_j)."""

    nu: float
    xi: float
    nu_j: tuple = ()
    xi_j: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "nu_j", tuple(float(v) for v in self.nu_j))
        object.__setattr__(self, "xi_j", tuple(float(v) for v in self.xi_j))
        if len(self.nu_j) != len(self.xi_j):
            raise AdmissibilityError("nu_j and xi_j must have equal lengths")

    @property
    def nu_vec(self):
        return (self.nu,) + self.nu_j

    @property
    def xi_vec(self):
        return (self.xi,) + self.xi_j


def check_admissibility(radii, config, disc):
    """Raise AdmissibilityError naming the first violated constraint."""
    y = np.asarray(disc.center, dtype=float)
    rho = disc.radius
    if not (0.0 < radii.xi <= rho <= radii.nu):
        raise AdmissibilityError(
            f"need 0 < xi <= rho <= nu, got xi={radii.xi!r} rho={rho!r} "
            f"nu={radii.nu!r}")
    if len(radii.nu_j) != config.M:
        raise AdmissibilityError(
            f"{len(radii.nu_j)} per-bubble radii for M={config.M} bubbles")
    for j, entry in enumerate(config.bubbles):
        dj = float(np.hypot(entry.center[0] - y[0], entry.center[1] - y[1]))
        if dj >= radii.xi:
            raise AdmissibilityError(
                f"center of bubble {j} lies outside D(y, xi)")
        if radii.nu_j[j] <= 0 or radii.xi_j[j] <= 0:
            raise AdmissibilityError(f"radii for bubble {j} must be positive")
        if dj + radii.nu_j[j] > radii.xi * (1 + 1e-12):
            raise AdmissibilityError(
                f"D(a_{j}, nu_{j}) is not contained in D(y, xi)")
        if not radii.xi_j[j] < entry.scale:
            raise AdmissibilityError(
                f"xi_{j} must stay below the scale of bubble {j}")
    return True


@dataclass(frozen=True)
class ProximityReport:
    """The eight summands of the localized distance, plus their total.

    energy_mismatch   E(u - Q; D(y, rho))
    bubble_sup        sum_j sup |u - omega_j| over the punctured D(a_j, nu_j)
    neck_sup          sup |u - omega| over D(y, nu) \\ D(y, xi)
    neck_energy       E(u; D(y, nu) \\ D(y, xi))
    radii_ratio       xi/rho + rho/nu
    separation        sum over ordered pairs of 1/(quotient)
    containment       sum_j lambda_j/dist + lambda_j/nu_j + xi_j/lambda_j
    nested_exclusion  sum_j sum_{k nested in j} xi_j/dist(a_k, boundary)
    """

    energy_mismatch: float
    bubble_sup: float
    neck_sup: float
    neck_energy: float
    radii_ratio: float
    separation: float
    containment: float
    nested_exclusion: float
    total: float

    def terms(self):
        return (self.energy_mismatch, self.bubble_sup, self.neck_sup,
                self.neck_energy, self.radii_ratio, self.separation,
                self.containment, self.nested_exclusion)

    def __post_init__(self):
        t = self.terms()
        if min(t) < 0:
            raise ConstraintViolationError("distance summands must be >= 0")
        if abs(self.total - sum(t)) > 1e-9 * max(1.0, abs(self.total)):
            raise ConstraintViolationError("total must equal the term sum")


class _DistanceWorkspace:
    """Cached sample data for repeated distance evaluations with varying
    radii: u's quadrature samples, per-bubble values, the superposition
    gradient on the analysis disc, and memoized disc energies of u."""

    def __init__(self, u, config, disc, gamma0=None):
        self.u = u
        self.config = config
        self.disc = disc
        self.gamma0 = check_gamma0(gamma0) if gamma0 is not None \
            else default_gamma0()
        pts, w, vals, grads = field_samples(u)
        self.pts = pts
        self.w = w
        self.vals = vals
        self.grads = grads
        y = np.asarray(disc.center, dtype=float)
        self.dist_y = np.hypot(pts[:, 0] - y[0], pts[:, 1] - y[1])
        self.in_rho = self.dist_y <= disc.radius
        self.qgrad = config_gradient(config, pts[self.in_rho])
        self.bubble_vals = [evaluate_bubble(e.map, pts)
                            for e in config.bubbles]
        self.dist_a = [np.hypot(pts[:, 0] - e.center[0],
                                pts[:, 1] - e.center[1])
                       for e in config.bubbles]
        self.center_dist_y = [float(np.hypot(e.center[0] - y[0],
                                             e.center[1] - y[1]))
                              for e in config.bubbles]
        self._disc_energy_cache = {}

    def _energy_in(self, radius):
        key = round(float(radius), 15)
        if key not in self._disc_energy_cache:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                self._disc_energy_cache[key] = dirichlet_energy(
                    self.u, Disc(self.disc.center, float(radius)))
        return self._disc_energy_cache[key]

    def terms(self, radii):
        check_admissibility(radii, self.config, self.disc)
        cfg = self.config
        rho = self.disc.radius

        diff = self.grads[self.in_rho] - self.qgrad
        t_energy = 0.5 * float(np.sum(self.w[self.in_rho]
                                      * np.sum(diff * diff, axis=(1, 2))))

        centers = [np.asarray(e.center) for e in cfg.bubbles]
        nested = []
        for j in range(cfg.M):
            members = []
            for k in range(cfg.M):
                if k == j:
                    continue
                d_jk = float(np.hypot(*(centers[k] - centers[j])))
                # strict containment of D(a_k, xi_j) in D(a_j, nu_j);
                # straddling discs are simply not members
                if d_jk + radii.xi_j[j] <= radii.nu_j[j]:
                    members.append((k, d_jk))
            nested.append(members)

        t_sup = 0.0
        for j in range(cfg.M):
            mask = self.dist_a[j] <= radii.nu_j[j]
            for k, _ in nested[j]:
                mask &= self.dist_a[k] > radii.xi_j[j]
            if np.any(mask):
                d = self.vals[mask] - self.bubble_vals[j][mask]
                t_sup += float(np.max(np.linalg.norm(d, axis=1)))

        ann = (self.dist_y > radii.xi) & (self.dist_y <= radii.nu)
        if np.any(ann):
            d = self.vals[ann] - cfg.omega_inf
            t_neck_sup = float(np.max(np.linalg.norm(d, axis=1)))
        else:
            t_neck_sup = 0.0
        t_neck_energy = max(self._energy_in(radii.nu)
                            - self._energy_in(radii.xi), 0.0)

        t_ratio = radii.xi / rho + rho / radii.nu

        t_sep = 0.0
        for j in range(cfg.M):
            for k in range(cfg.M):
                if k == j:
                    continue
                lj, lk = cfg.bubbles[j].scale, cfg.bubbles[k].scale
                gap = float(np.hypot(*(centers[j] - centers[k])))
                t_sep += 1.0 / (lj / lk + lk / lj + gap / lj)

        t_contain = 0.0
        for j in range(cfg.M):
            lj = cfg.bubbles[j].scale
            edge = radii.xi - self.center_dist_y[j]
            t_contain += lj / edge + lj / radii.nu_j[j] + radii.xi_j[j] / lj

        t_nested = 0.0
        for j in range(cfg.M):
            for k, d_jk in nested[j]:
                t_nested += radii.xi_j[j] / (radii.nu_j[j] - d_jk)

        total = (t_energy + t_sup + t_neck_sup + t_neck_energy + t_ratio
                 + t_sep + t_contain + t_nested)
        return ProximityReport(t_energy, t_sup, t_neck_sup, t_neck_energy,
                               t_ratio, t_sep, t_contain, t_nested, total)


def distance_d(u, config, disc, radii, gamma0=None):
    """Localized distance between a field and a configuration.

    Every summand is evaluated on u's own quadrature samples (sup norms as
    grid maxima of the pointwise difference in R^3, energies by the same
    weights that back dirichlet_energy), so the value is covariant under a
    joint rescaling of all inputs.  Raises AdmissibilityError when the
    radii violate the containment rules.
    """
    return _DistanceWorkspace(u, config, disc, gamma0).terms(radii)


# ---------------------------------------------------------------------------
# greedy extraction
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Extraction:
    center: tuple
    scale: float
    energy: float


@dataclass(frozen=True)
class ExtractionSet:
    """Peeled concentrations: each entry holds at least the threshold
    energy, and entries are pairwise separated (quotient of scales plus
    normalized center gap above the separation factor)."""

    entries: tuple
    threshold: float
    separation_factor: float

    def __post_init__(self):
        for e in self.entries:
            if e.energy < self.threshold * (1 - 1e-9):
                raise ConstraintViolationError(
                    "extraction below the energy threshold")
        for i, a in enumerate(self.entries):
            for b in self.entries[i + 1:]:
                if _separation_quotient(a, b) <= self.separation_factor:
                    raise ConstraintViolationError(
                        "extractions are not separated")

    def __len__(self):
        return len(self.entries)


def _separation_quotient(a, b):
    gap = float(np.hypot(a.center[0] - b.center[0],
                         a.center[1] - b.center[1]))
    q_ab = a.scale / b.scale + b.scale / a.scale + gap / a.scale
    q_ba = a.scale / b.scale + b.scale / a.scale + gap / b.scale
    return min(q_ab, q_ba)


def _peel_candidates(pts, avail, w, limit=8):
    dens = avail / w
    order = np.argsort(-dens)
    picked = []
    for i in order[: 40 * limit]:
        if dens[i] <= 0:
            break
        p = pts[i]
        if all(np.hypot(p[0] - q[0], p[1] - q[1]) > 4.0 * spacing
               for q, spacing in picked):
            picked.append((p, np.sqrt(w[i])))
        if len(picked) >= limit:
            break
    return [p for p, _ in picked]


def extract_bubbles(u, disc, eps0=None, separation_factor=5.0,
                    mask_factor=10.0, max_bubbles=8):
    """Greedy energy peeling on a disc.

    Repeatedly finds the smallest disc (over a thinned set of high-density
    candidate centers) whose unassigned energy reaches eps0, records it,
    then masks a neighborhood mask_factor times larger: a single bubble
    keeps 4 pi/(1 + (R/lam)^2) outside radius R, so masking well beyond
    the capture radius stops tails from seeding phantom captures.  Peels
    closer than the separation factor are merged by energy barycenter.
    """
    eps0 = np.pi if eps0 is None else float(eps0)
    if not 0.0 < eps0 < FOUR_PI:
        raise ParameterError(f"eps0 = {eps0!r} must lie in (0, 4 pi)")
    pts, w, _, grads = field_samples(u)
    y = np.asarray(disc.center, dtype=float)
    cell = 0.5 * w * np.sum(grads * grads, axis=(1, 2))
    cell[np.hypot(pts[:, 0] - y[0], pts[:, 1] - y[1]) > disc.radius] = 0.0

    avail = cell.copy()
    found = []
    for _ in range(max_bubbles):
        if avail.sum() < eps0:
            break
        best = None
        for c in _peel_candidates(pts, avail, w):
            d = np.hypot(pts[:, 0] - c[0], pts[:, 1] - c[1])
            order = np.argsort(d)
            cum = np.cumsum(avail[order])
            i = int(np.searchsorted(cum, eps0))
            if i >= d.size:
                continue
            r = float(d[order[i]])
            key = (r, float(c[0]), float(c[1]))
            if best is None or key < best[0]:
                best = (key, c, r, float(cum[i]), d)
        if best is None or best[2] > 2.0 * disc.radius:
            break
        _, c, r, captured, d = best
        found.append(Extraction((float(c[0]), float(c[1])), r, captured))
        avail[d <= mask_factor * r] = 0.0

    merged = _merge_extractions(found, separation_factor)
    return ExtractionSet(tuple(merged), eps0, separation_factor)


def _merge_extractions(entries, separation_factor):
    entries = list(entries)
    changed = True
    while changed and len(entries) > 1:
        changed = False
        for i in range(len(entries)):
            for j in range(i + 1, len(entries)):
                a, b = entries[i], entries[j]
                if _separation_quotient(a, b) <= separation_factor:
                    wa, wb = a.energy, b.energy
                    cx = (a.center[0] * wa + b.center[0] * wb) / (wa + wb)
                    cy = (a.center[1] * wa + b.center[1] * wb) / (wa + wb)
                    entries[i] = Extraction((cx, cy), max(a.scale, b.scale),
                                            wa + wb)
                    del entries[j]
                    changed = True
                    break
            if changed:
                break
    return entries


# ---------------------------------------------------------------------------
# configuration fitting
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FitOutcome:
    """fit_config result; iterates as (config, radii, report) and carries
    the optimizer convergence flag."""

    config: BubbleConfig
    radii: AdmissibleRadii
    report: ProximityReport
    converged: bool

    def __iter__(self):
        return iter((self.config, self.radii, self.report))


def _seed_family(seed, eps0):
    """Initial (k, lam) consistent with the captured energy and radius:
    a degree-k profile holds 4 pi k S/(1+S), S = (R/lam)^{2k}, in radius
    R, so the capture radius pins lam once k is chosen by the nearest
    energy quantum."""
    k = int(np.clip(round(seed.energy / FOUR_PI), 1, 3))
    frac = min(seed.energy / (FOUR_PI * k), 0.9)
    S = frac / (1.0 - frac)
    lam = seed.scale / S ** (1.0 / (2 * k))
    return k, lam


def _pick_orientation(vals, grads, w):
    """Sign of the signed-area integral u . (u_x x u_y); +-4 pi k per
    bubble, so its sign is the orientation regardless of phase."""
    cross = np.cross(grads[:, :, 0], grads[:, :, 1])
    j = float(np.sum(w * np.sum(vals * cross, axis=1)))
    return 1 if j >= 0.0 else -1


def _dyadic_sweep(value_fn, choices, current):
    """One coordinate-descent pass: for each key, keep the choice with the
    smallest finite value."""
    best_val = value_fn(current)
    for key, options in choices.items():
        for opt in options:
            trial = dict(current)
            trial[key] = opt
            try:
                v = value_fn(trial)
            except AdmissibilityError:
                continue
            if v < best_val:
                best_val = v
                current = trial
    return current, best_val


def fit_config(u, disc, seeds, gamma0=None, max_nfev=120):
    """Fit a configuration to a field from extraction seeds.

    Per seed: degree from the nearest 4 pi k, orientation by gradient
    sign fit, then joint least squares over all (center, log scale,
    phase) against the gradient mismatch on the disc.  The constant is
    the renormalized average of u over the outer neck annulus, and the
    radii hierarchy is chosen by coordinate descent over dyadic grids.
    The report is an upper bound for the configuration proximity of u;
    a failed optimizer leaves converged False on the outcome.
    """
    gamma0 = check_gamma0(gamma0) if gamma0 is not None else default_gamma0()
    y = np.asarray(disc.center, dtype=float)
    rho = disc.radius
    pts, w, vals, grads = field_samples(u)
    dist_y = np.hypot(pts[:, 0] - y[0], pts[:, 1] - y[1])
    sel = dist_y <= rho
    P, W, G = pts[sel], w[sel], grads[sel]

    converged = True
    maps = []
    if len(seeds) > 0:
        ks, orients, x0 = [], [], []
        for seed in seeds.entries:
            k, lam = _seed_family(seed, seeds.threshold)
            near = np.hypot(pts[:, 0] - seed.center[0],
                            pts[:, 1] - seed.center[1]) <= 4.0 * seed.scale
            orient = _pick_orientation(vals[near], grads[near], w[near])
            ks.append(k)
            orients.append(orient)
            x0.extend([seed.center[0], seed.center[1], np.log(lam), 0.0])

        sqw = np.sqrt(0.5 * W)[:, None]

        def residual(x):
            g = np.zeros_like(G)
            for j, k in enumerate(ks):
                cx, cy, loglam, phase = x[4 * j : 4 * j + 4]
                b = make_equivariant_bubble(k, np.exp(loglam), (cx, cy),
                                            phase, orients[j])
                g += bubble_gradient(b, P)
            return (sqw * (G - g).reshape(-1, 6)).ravel()

        x0 = np.array(x0)
        span = np.tile([2.0 * rho, 2.0 * rho, np.log(256.0), 4.0 * np.pi],
                       len(ks))
        res = least_squares(residual, x0, bounds=(x0 - span, x0 + span),
                            max_nfev=max_nfev)
        converged = bool(res.success) and res.status > 0
        for j, k in enumerate(ks):
            cx, cy, loglam, phase = res.x[4 * j : 4 * j + 4]
            maps.append(make_equivariant_bubble(k, np.exp(loglam), (cx, cy),
                                                phase, orients[j]))

    # domain cap for the outer radius: u must be defined there
    if u.is_radial():
        domain_cap = u.grid.r[-1] - float(np.hypot(*y))
    else:
        domain_cap = min(u.grid.xs[-1] - y[0], y[0] - u.grid.xs[0],
                         u.grid.ys[-1] - y[1], y[1] - u.grid.ys[0])
    domain_cap = max(domain_cap, rho)

    nu0 = min(rho * 2.0 ** 10, domain_cap)
    ann0 = (dist_y > 0.5 * rho) & (dist_y <= nu0)
    omega = vals[ann0].mean(axis=0) if np.any(ann0) else vals[-1]
    nrm = np.linalg.norm(omega)
    omega = omega / nrm if nrm > 1e-8 else np.array([0.0, 0.0, 1.0])

    entries = [bubble_entry(b, gamma0) for b in maps]
    # no radii hierarchy is admissible for a center outside the disc
    inside = [e for e in entries
              if np.hypot(e.center[0] - y[0], e.center[1] - y[1]) < 0.99 * rho]
    if len(inside) < len(entries):
        warnings.warn("dropping fitted bubbles centered outside the disc")
        converged = False
    config = BubbleConfig(omega, inside)
    ws = _DistanceWorkspace(u, config, disc, gamma0)

    # dyadic grids: outer pair relative to rho, per-bubble pairs tied to
    # the bubble scale and the containment cap
    xi_opts = [rho * 2.0 ** (-m) for m in range(1, 11)]
    nu_opts = [min(rho * 2.0 ** m, domain_cap) for m in range(1, 11)]
    scales = [e.scale for e in config.bubbles]
    offsets = [ws.center_dist_y[j] for j in range(config.M)]

    def build(choice):
        xi = choice["xi"]
        nu_j = tuple(min(choice[("nu", j)], (xi - offsets[j]) * 0.999)
                     for j in range(config.M))
        xi_j = tuple(choice[("xi", j)] for j in range(config.M))
        return AdmissibleRadii(choice["nu"], xi, nu_j, xi_j)

    def value(choice):
        return ws.terms(build(choice)).total

    def legal_hierarchy():
        c = {"xi": rho, "nu": max(nu0, rho)}
        for j in range(config.M):
            c[("nu", j)] = (rho - offsets[j]) * 0.5
            c[("xi", j)] = min(scales[j] / 8.0, (rho - offsets[j]) * 0.25)
        return c

    choice = {"xi": rho / 2.0, "nu": nu0}
    for j in range(config.M):
        choice[("nu", j)] = (choice["xi"] - offsets[j]) * 0.5
        choice[("xi", j)] = scales[j] / 4.0
    options = {"xi": xi_opts, "nu": nu_opts}
    for j in range(config.M):
        options[("nu", j)] = [rho * 2.0 ** (-m) for m in range(1, 8)]
        options[("xi", j)] = [scales[j] * 2.0 ** (-m) for m in range(1, 9)]

    swept = False
    for _ in range(2):
        try:
            choice, _ = _dyadic_sweep(value, options, choice)
            swept = True
        except AdmissibilityError:
            choice = legal_hierarchy()
    if not swept:
        choice = legal_hierarchy()
    radii = build(choice)

    # re-base the constant on the annulus the chosen radii single out
    ann = (dist_y > radii.xi) & (dist_y <= radii.nu)
    if np.any(ann):
        om = vals[ann].mean(axis=0)
        n = np.linalg.norm(om)
        if n > 1e-8 and not np.allclose(om / n, config.omega_inf):
            config = BubbleConfig(om / n, config.bubbles)
            ws = _DistanceWorkspace(u, config, disc, gamma0)
    report = ws.terms(radii)
    return FitOutcome(config, radii, report, converged)

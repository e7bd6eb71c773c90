"""Harmonic maps from the plane to the sphere (bubbles) as rational maps
composed with inverse stereographic projection, their exact energies, and
the concentration scale/center functionals.

Chart convention, fixed once: a complex value w corresponds to the sphere
point

    Phi(w) = (2 Re w, 2 Im w, 1 - |w|^2) / (1 + |w|^2),

so w = 0 is the pole (0, 0, 1), w = infinity is (0, 0, -1), and w = 1 is
(1, 0, 0).  A bubble of degree k carries energy exactly 4 pi k.

Energy in a disc is computed from the identity

    density = Lap log(|P|^2 + |Q|^2)        (w = P/Q, P, Q coprime)

whose right side is smooth because |P|^2 + |Q|^2 never vanishes, so

    E(D) = int_{boundary D} d/dn log(|P|^2 + |Q|^2) ds.

A periodic trapezoid rule on the circle converges spectrally, which is what
makes the scale bisection cheap and exactly covariant under rescaling.
"""

import warnings
from numpy.polynomial import polynomial as npoly

import numpy as np
from scipy.special import expit

from .errors import (
    ConstraintViolationError,
    NoScaleError,
    OutOfRegimeError,
    ParameterError,
    RangeError,
)
from .fields import Disc, SphereField, dirichlet_energy

FOUR_PI = 4.0 * np.pi

# bisection on the scale; the contract asks for 1e-4 relative
SCALE_RTOL = 1e-4
_INNER_RTOL = 2e-5


def default_gamma0(total_energy=None):
    """The capture tolerance gamma0: 0.01 standalone, tightened to
    1/(100 E) for flows with large initial energy."""
    if total_energy is None:
        return 0.01
    return min(0.01, 1.0 / (100.0 * total_energy))


def check_gamma0(value, total_energy=None):
    if not (0.0 < value < 2.0 * np.pi):
        raise ParameterError(f"gamma0 = {value!r} outside (0, 2 pi)")
    if total_energy is not None and value > default_gamma0(total_energy) * (1 + 1e-12):
        raise ParameterError(
            f"gamma0 = {value!r} too large for total energy {total_energy!r}"
        )
    return float(value)


def _trim(coeffs):
    c = np.atleast_1d(np.asarray(coeffs, dtype=complex))
    nz = np.nonzero(np.abs(c) > 0)[0]
    if nz.size == 0:
        return np.zeros(1, dtype=complex)
    return c[: nz[-1] + 1]


def _resultant(p, q):
    """Sylvester resultant of two polynomials (ascending coefficients)."""
    m = p.size - 1
    n = q.size - 1
    if m == 0 or n == 0:
        return 1.0  # a nonzero constant shares no root with anything
    S = np.zeros((m + n, m + n), dtype=complex)
    pd = p[::-1]
    qd = q[::-1]
    for i in range(n):
        S[i, i : i + m + 1] = pd
    for i in range(m):
        S[n + i, i : i + n + 1] = qd
    return np.linalg.det(S)


def _affine_compose(coeffs, alpha, beta):
    """Coefficients of P(beta + alpha z) from those of P (ascending)."""
    out = np.zeros(1, dtype=complex)
    for c in coeffs[::-1]:
        out = npoly.polymul(out, np.array([beta, alpha], dtype=complex))
        out = npoly.polyadd(out, np.array([c], dtype=complex))
    return _trim(out)


class RationalMap:
    """w(z) = P(z)/Q(z) with coprime P, Q, not both constant.

    Coefficients are stored in ascending order.  Coprimality is checked
    through the resultant of the max-normalized pair; a magnitude below
    1e-10 means a numerically common root and is rejected.
    """

    def __init__(self, num, den=(1.0,)):
        p = _trim(num)
        q = _trim(den)
        if np.all(p == 0) or np.all(q == 0):
            raise ConstraintViolationError("P and Q must be nonzero polynomials")
        if p.size == 1 and q.size == 1:
            raise ConstraintViolationError("constant map is not a bubble")
        pn = p / np.max(np.abs(p))
        qn = q / np.max(np.abs(q))
        if abs(_resultant(pn, qn)) <= 1e-10:
            raise ConstraintViolationError("P and Q share a root (resultant ~ 0)")
        self.num = p
        self.den = q
        self.degree = max(p.size, q.size) - 1
        # Wronskian P'Q - PQ': its zeros are the critical points
        self._wron = _trim(
            npoly.polysub(
                npoly.polymul(npoly.polyder(p), q), npoly.polymul(p, npoly.polyder(q))
            )
        )

    def homogeneous(self, z):
        """Return (pv, qv) with w = pv/qv, scaled per point so the larger
        modulus is 1; safe at poles and for large |z|."""
        z = np.asarray(z, dtype=complex)
        pv = npoly.polyval(z, self.num)
        qv = npoly.polyval(z, self.den)
        m = np.maximum(np.abs(pv), np.abs(qv))
        m = np.where(m > 0, m, 1.0)
        return pv / m, qv / m

    def roots(self):
        """Zeros and poles of w (roots of P and of Q)."""
        zs = npoly.polyroots(self.num) if self.num.size > 1 else np.array([])
        ps = npoly.polyroots(self.den) if self.den.size > 1 else np.array([])
        return zs, ps


class BubbleMap:
    """A harmonic map: rational map plus an orientation flag.

    orientation +1 evaluates Phi(w(z)); -1 evaluates Phi(conj w(z)), the
    orientation-reversed (anti-holomorphic) partner, which flips the second
    component and negates the topological degree but changes no energy.

    ``scale``/``center``/``gamma0`` cache the concentration scale and center
    once computed; the object is otherwise immutable and safe to share.
    """

    def __init__(self, rational, orientation=1, family=None):
        if orientation not in (1, -1):
            raise ParameterError("orientation must be +1 or -1")
        self.rational = rational
        self.orientation = int(orientation)
        self.degree = rational.degree
        self.family = dict(family) if family else None
        self.scale = None
        self.center = None
        self.gamma0 = None

    @property
    def signed_degree(self):
        return self.orientation * self.degree

    def anchor(self):
        """(point, length) the quadratures are built around: the family
        parameters when known, else the critical-point cloud of w."""
        if self.family is not None:
            a = self.family["center"]
            return complex(a[0], a[1]), float(self.family["lam"])
        zs, ps = self.rational.roots()
        pts = np.concatenate([zs, ps])
        if pts.size == 0:
            return 0.0 + 0.0j, 1.0
        c = pts.mean()
        spread = float(np.median(np.abs(pts - c))) if pts.size > 1 else 0.0
        return complex(c), max(spread, 1.0)


def make_equivariant_bubble(k, lam, a=(0.0, 0.0), phase=0.0, orientation=1):
    """The standard degree-k family w(z) = e^{i phase} ((z - a)/lam)^k.

    Its polar-angle profile about a is phi(r) = 2 arctan((r/lam)^k) and its
    energy is 4 pi k.

    Parameters
    ----------
    k : int
        Degree, >= 1.
    lam : float
        Concentration length of the family, > 0.
    a : pair of floats
        Center in the plane.
    phase : float
        Rotation of the image about the vertical axis.
    orientation : +1 or -1
        -1 gives the orientation-reversed partner.
    """
    if int(k) < 1:
        raise ParameterError(f"degree k = {k!r} must be a positive integer")
    if lam <= 0:
        raise ParameterError(f"scale lam = {lam!r} must be positive")
    k = int(k)
    az = complex(a[0], a[1])
    # ((z - a)/lam)^k, ascending
    base = np.array([-az / lam, 1.0 / lam], dtype=complex)
    num = np.exp(1j * phase) * npoly.polypow(base, k)
    rat = RationalMap(num, (1.0,))
    fam = {"kind": "power", "k": k, "lam": float(lam),
           "center": (float(a[0]), float(a[1])), "phase": float(phase)}
    return BubbleMap(rat, orientation=orientation, family=fam)


def transform_bubble(b, mu=1.0, shift=(0.0, 0.0)):
    """The rescaled/translated bubble z -> w((z - shift)/mu).

    Scale multiplies by mu, centers move to mu a + shift; orientation and
    degree are unchanged.
    """
    if mu <= 0:
        raise ParameterError("mu must be positive")
    if b.family is not None and b.family["kind"] == "power":
        f = b.family
        a = (f["center"][0] * mu + shift[0], f["center"][1] * mu + shift[1])
        return make_equivariant_bubble(f["k"], f["lam"] * mu, a, f["phase"],
                                       b.orientation)
    beta = complex(-shift[0] / mu, -shift[1] / mu)
    alpha = 1.0 / mu
    num = _affine_compose(b.rational.num, alpha, beta)
    den = _affine_compose(b.rational.den, alpha, beta)
    return BubbleMap(RationalMap(num, den), orientation=b.orientation)


def conjugate_bubble(b):
    """Orientation-reversed partner (same energies, opposite degree sign)."""
    return BubbleMap(b.rational, orientation=-b.orientation, family=b.family)


# ---------------------------------------------------------------------------
# evaluation
# ---------------------------------------------------------------------------


def _as_complex(points):
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    return pts[:, 0] + 1j * pts[:, 1], pts.shape


def evaluate_bubble(b, points):
    """Sphere values of the bubble at planar points (N, 2) -> (N, 3).

    Unit to machine precision; poles of w land exactly on (0, 0, -1).
    """
    z, shape = _as_complex(points)
    if np.any(np.abs(z) > 1e30):
        raise RangeError("evaluation points too far out for stable polynomials")
    pv, qv = b.rational.homogeneous(z)
    s = np.abs(pv) ** 2 + np.abs(qv) ** 2
    cross = pv * np.conj(qv)
    u = np.stack(
        [2.0 * cross.real, 2.0 * cross.imag, np.abs(qv) ** 2 - np.abs(pv) ** 2],
        axis=-1,
    ) / s[:, None]
    if b.orientation < 0:
        u[:, 1] = -u[:, 1]
    return u[0] if shape[0] == 1 and np.asarray(points).ndim == 1 else u


def bubble_gradient(b, points):
    """Spatial gradient of the bubble map: (N, 3, 2) array d u_c / d x_j."""
    z, _ = _as_complex(points)
    p = npoly.polyval(z, b.rational.num)
    q = npoly.polyval(z, b.rational.den)
    dp = npoly.polyval(z, npoly.polyder(b.rational.num))
    dq = npoly.polyval(z, npoly.polyder(b.rational.den))
    m = np.maximum(np.abs(p), np.abs(q))
    m = np.where(m > 0, m, 1.0)
    p, q, dp, dq = p / m, q / m, dp / m, dq / m
    s = np.abs(p) ** 2 + np.abs(q) ** 2
    c = p * np.conj(q)
    # holomorphy: p_x = p', p_y = i p', same for q; push through the
    # homogeneous form (2 p conj q, |q|^2 - |p|^2) / (|p|^2 + |q|^2)
    out = np.empty((z.size, 3, 2))
    for j, (px, qx) in enumerate([(dp, dq), (1j * dp, 1j * dq)]):
        sx = 2.0 * (np.conj(p) * px).real + 2.0 * (np.conj(q) * qx).real
        cx = px * np.conj(q) + p * np.conj(qx)
        w12 = 2.0 * (cx * s - c * sx) / s**2
        n3 = np.abs(q) ** 2 - np.abs(p) ** 2
        n3x = 2.0 * (np.conj(q) * qx).real - 2.0 * (np.conj(p) * px).real
        out[:, 0, j] = w12.real
        out[:, 1, j] = w12.imag
        out[:, 2, j] = (n3x * s - n3 * sx) / s**2
    if b.orientation < 0:
        out[:, 1, :] = -out[:, 1, :]
    return out


def bubble_energy_density(b, points):
    """Pointwise energy density 4 |W|^2 / (|P|^2 + |Q|^2)^2 with W the
    Wronskian P'Q - PQ'."""
    z, _ = _as_complex(points)
    p = npoly.polyval(z, b.rational.num)
    q = npoly.polyval(z, b.rational.den)
    m = np.maximum(np.abs(p), np.abs(q))
    m = np.where(m > 0, m, 1.0)
    wv = npoly.polyval(z, b.rational._wron) / m**2
    s = np.abs(p / m) ** 2 + np.abs(q / m) ** 2
    return 4.0 * np.abs(wv) ** 2 / s**2


def total_energy(b):
    """Exact quantized energy 4 pi deg; the quadrature consistency of this
    value is exercised by the test suite rather than recomputed here."""
    return FOUR_PI * b.degree


def render_bubble(b, grid):
    """Sample the bubble on a 2D grid as a SphereField."""
    X, Y = grid.meshgrid()
    pts = np.stack([X.ravel(), Y.ravel()], axis=-1)
    vals = evaluate_bubble(b, pts).reshape(grid.nx, grid.ny, 3)
    return SphereField(grid, vals)


# ---------------------------------------------------------------------------
# disc energies via the boundary integral
# ---------------------------------------------------------------------------


def _boundary_integrand(b, z, nhat):
    """d/dn log(|P|^2 + |Q|^2) at circle points z with outward normal nhat
    (as a unit complex number)."""
    fam = b.family
    if fam is not None and fam["kind"] == "power":
        k = fam["k"]
        lam = fam["lam"]
        zeta = z - complex(fam["center"][0], fam["center"][1])
        r = np.abs(zeta)
        proj = (nhat * np.conj(zeta)).real
        if k == 1:
            # t/(1+t) / r^2 = 1/(lam^2 + r^2): finite through r = 0
            return 2.0 * proj / (lam**2 + r**2)
        # t/(1+t) with t = (r/lam)^(2k), overflow-safe via the sigmoid
        with np.errstate(divide="ignore"):
            frac = expit(2.0 * k * (np.log(r) - np.log(lam)))
        return np.where(r > 0, 2.0 * k * frac * proj / np.maximum(r, 1e-300) ** 2, 0.0)
    p = npoly.polyval(z, b.rational.num)
    q = npoly.polyval(z, b.rational.den)
    dp = npoly.polyval(z, npoly.polyder(b.rational.num))
    dq = npoly.polyval(z, npoly.polyder(b.rational.den))
    m = np.maximum(np.abs(p), np.abs(q))
    m = np.where(m > 0, m, 1.0)
    p, q, dp, dq = p / m, q / m, dp / m, dq / m
    s = np.abs(p) ** 2 + np.abs(q) ** 2
    return 2.0 * (nhat * (np.conj(p) * dp + np.conj(q) * dq)).real / s


def disc_energy(b, disc, rtol=1e-10, max_nodes=1 << 15):
    """Dirichlet energy of the bubble inside a disc.

    The boundary-integral form converges spectrally in the number of circle
    nodes; the node count doubles until two successive values agree to rtol.
    """
    c = complex(disc.center[0], disc.center[1])
    rho = float(disc.radius)
    prev = None
    m = 64
    val = 0.0
    while m <= max_nodes:
        th = (np.arange(m) + 0.5) * (2.0 * np.pi / m)
        nhat = np.exp(1j * th)
        f = _boundary_integrand(b, c + rho * nhat, nhat)
        val = rho * (2.0 * np.pi / m) * float(np.sum(f))
        if prev is not None and abs(val - prev) <= rtol * max(abs(val), 1.0):
            return val
        prev = val
        m *= 2
    warnings.warn("disc_energy circle quadrature hit its node cap")
    return val


def exterior_energy(b, R, gamma0=None):
    """Tail energy outside D(center, R * scale); valid for R >= 2.

    The scale/center functionals are computed (and cached) with the given
    gamma0 first.  The returned value satisfies the decay bound pi R^{-2}
    for actual harmonic maps.
    """
    if R < 2.0:
        raise OutOfRegimeError(f"decay regime needs R >= 2, got {R!r}")
    lam = compute_scale(b, gamma0)
    a = compute_center(b, gamma0)
    return total_energy(b) - disc_energy(b, Disc((a[0], a[1]), R * lam))


# ---------------------------------------------------------------------------
# scale and center
# ---------------------------------------------------------------------------


def _candidate_centers(b):
    """Initial center candidates: critical points of w plus their mean."""
    zs, ps = b.rational.roots()
    pts = [complex(z) for z in np.concatenate([zs, ps])]
    if b.family is not None:
        a = b.family["center"]
        pts.append(complex(a[0], a[1]))
    if pts:
        pts.append(np.mean(pts))
    else:
        pts.append(0.0 + 0.0j)
    uniq = []
    for z in sorted(pts, key=lambda z: (z.real, z.imag)):
        if not any(abs(z - u) < 1e-12 for u in uniq):
            uniq.append(z)
    return uniq


def _lex_best(cands, energies, tol):
    e = np.asarray(energies)
    best = float(np.max(e))
    tied = [c for c, ei in zip(cands, e) if ei >= best - tol]
    return min(tied, key=lambda z: (z.real, z.imag)), best


def _best_capture(energy_fn, cands0, lam, levels=3, factor=4):
    """max_a E(D(a, lam)) by multiresolution refinement around the best
    initial candidate (5x5 stencils, spacing shrinking by `factor`)."""
    tol = 1e-11 * max(1.0, lam)
    es = [energy_fn(c, lam) for c in cands0]
    best, e_best = _lex_best(cands0, es, 1e-12 * (1 + abs(max(es))))
    spacing = lam / factor
    offs = np.array([complex(i, j) for i in range(-2, 3) for j in range(-2, 3)])
    for _ in range(levels):
        cands = sorted(best + spacing * offs, key=lambda z: (z.real, z.imag))
        es = [energy_fn(c, lam) for c in cands]
        cand_best, cand_e = _lex_best(cands, es, 1e-12 * (1 + abs(max(es))))
        if cand_e > e_best + tol or (
            cand_e >= e_best - tol and (cand_best.real, cand_best.imag) < (best.real, best.imag)
        ):
            best, e_best = cand_best, cand_e
        spacing /= factor
    return best, e_best


def _scale_problem(obj, gamma0):
    """Uniform view of the scale search: total energy, a disc-energy
    callable, candidate centers, and a starting length."""
    if isinstance(obj, BubbleMap):
        E = total_energy(obj)

        def efn(c, lam):
            return disc_energy(obj, Disc((c.real, c.imag), lam))

        _, s0 = obj.anchor()
        return E, efn, _candidate_centers(obj), s0
    if isinstance(obj, SphereField):
        E = dirichlet_energy(obj)

        def efn(c, lam):
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                return dirichlet_energy(obj, Disc((c.real, c.imag), lam))

        if obj.is_radial():
            cands = [0.0 + 0.0j]
            s0 = float(np.sqrt(obj.grid.r[0] * obj.grid.r[-1]))
        else:
            from .fields import energy_density_2d

            dens = energy_density_2d(obj)
            flat = np.argsort(dens.ravel())[::-1]
            xs, ys = obj.grid.xs, obj.grid.ys
            cands = []
            for idx in flat:
                i, j = np.unravel_index(idx, dens.shape)
                z = complex(xs[i], ys[j])
                if all(abs(z - c) > 4 * obj.grid.h for c in cands):
                    cands.append(z)
                if len(cands) >= 8:
                    break
            cands.sort(key=lambda z: (z.real, z.imag))
            s0 = 0.25 * (xs[-1] - xs[0])
        return E, efn, cands, s0
    raise ParameterError(f"cannot compute a scale for {type(obj).__name__}")


def compute_scale(obj, gamma0=None, rtol=SCALE_RTOL):
    """Concentration scale: the smallest radius such that some disc of that
    radius captures all but gamma0 of the energy.

    Bisection on the radius (relative tolerance `rtol`); each trial radius
    maximizes energy-in-disc over centers with a density-guided
    multiresolution search.  The feasible endpoint is returned, so the
    result never undershoots the true infimum by more than the tolerance.

    Parameters
    ----------
    obj : BubbleMap or SphereField
    gamma0 : float, optional
        Capture tolerance; defaults to 0.01.

    Raises
    ------
    NoScaleError
        If the total energy does not exceed gamma0 (constant-like maps).
    """
    if gamma0 is None:
        gamma0 = default_gamma0()
    gamma0 = check_gamma0(gamma0)
    cache = isinstance(obj, BubbleMap)
    if cache and obj.scale is not None and obj.gamma0 == gamma0:
        return obj.scale
    E, efn, cands, s0 = _scale_problem(obj, gamma0)
    target = E - gamma0
    if target <= 0:
        raise NoScaleError(
            f"total energy {E!r} does not exceed gamma0 = {gamma0!r}"
        )
    hi = s0
    for _ in range(80):
        _, e_hi = _best_capture(efn, cands, hi)
        if e_hi >= target:
            break
        hi *= 2.0
    else:
        raise RangeError("no disc captures the target energy at any scale")
    lo = hi / 2.0
    for _ in range(80):
        _, e_lo = _best_capture(efn, cands, lo)
        if e_lo < target:
            break
        hi = lo
        lo /= 2.0
    else:
        raise RangeError("capture radius shrank without losing energy")
    while hi - lo > _INNER_RTOL * hi:
        mid = 0.5 * (lo + hi)
        _, e_mid = _best_capture(efn, cands, mid)
        if e_mid >= target:
            hi = mid
        else:
            lo = mid
    if cache:
        obj.scale = hi
        obj.gamma0 = gamma0
        obj.center = None
    return hi


def compute_center(obj, gamma0=None):
    """A center whose disc of radius scale * (1 + 1e-4) captures all but
    gamma0 of the energy.  Only defined up to a slack of twice the scale;
    ties in the search are broken lexicographically in (x, y)."""
    if gamma0 is None:
        gamma0 = default_gamma0()
    gamma0 = check_gamma0(gamma0)
    cache = isinstance(obj, BubbleMap)
    if cache and obj.center is not None and obj.gamma0 == gamma0:
        return obj.center
    lam = compute_scale(obj, gamma0)
    E, efn, cands, _ = _scale_problem(obj, gamma0)
    best, _ = _best_capture(efn, cands, lam * (1.0 + SCALE_RTOL))
    out = (best.real, best.imag)
    if cache:
        obj.center = out
    return out


# ---------------------------------------------------------------------------
# library files
# ---------------------------------------------------------------------------


def _fmt(x):
    return repr(float(x))


def write_bubble_library(bubbles, path):
    """Plain-text bubble library; floats print with full precision so the
    file round-trips exactly."""
    lines = ["# bubble library v1"]
    for b in bubbles:
        lines.append("[bubble]")
        lines.append(f"degree = {b.degree}")
        lines.append(f"orientation = {b.orientation}")
        num = " ".join(f"{_fmt(c.real)} {_fmt(c.imag)}" for c in b.rational.num)
        den = " ".join(f"{_fmt(c.real)} {_fmt(c.imag)}" for c in b.rational.den)
        lines.append(f"num = {num}")
        lines.append(f"den = {den}")
        if b.family is not None and b.family["kind"] == "power":
            f = b.family
            lines.append(
                "family = power "
                f"{f['k']} {_fmt(f['lam'])} {_fmt(f['center'][0])} "
                f"{_fmt(f['center'][1])} {_fmt(f['phase'])}"
            )
        if b.scale is not None:
            lines.append(f"scale = {_fmt(b.scale)}")
            lines.append(f"gamma0 = {_fmt(b.gamma0)}")
        if b.center is not None:
            lines.append(f"center = {_fmt(b.center[0])} {_fmt(b.center[1])}")
        lines.append("")
    with open(path, "w") as fh:
        fh.write("\n".join(lines))


def _pairs_to_complex(tokens):
    vals = [float(t) for t in tokens]
    re = vals[0::2]
    im = vals[1::2]
    return np.array([complex(a, bb) for a, bb in zip(re, im)])


def read_bubble_library(path):
    with open(path) as fh:
        lines = [ln.strip() for ln in fh]
    bubbles = []
    cur = None

    def flush():
        if cur is None:
            return
        fam = None
        if "family" in cur:
            t = cur["family"].split()
            if t[0] == "power":
                fam = {"kind": "power", "k": int(t[1]), "lam": float(t[2]),
                       "center": (float(t[3]), float(t[4])), "phase": float(t[5])}
        b = BubbleMap(
            RationalMap(_pairs_to_complex(cur["num"].split()),
                        _pairs_to_complex(cur["den"].split())),
            orientation=int(cur.get("orientation", "1")),
            family=fam,
        )
        if int(cur["degree"]) != b.degree:
            raise ConstraintViolationError(
                f"library degree {cur['degree']} does not match coefficients"
            )
        if "scale" in cur:
            b.scale = float(cur["scale"])
            b.gamma0 = float(cur["gamma0"])
        if "center" in cur:
            b.center = tuple(float(t) for t in cur["center"].split())
        bubbles.append(b)

    for ln in lines:
        if not ln or ln.startswith("#"):
            continue
        if ln == "[bubble]":
            flush()
            cur = {}
            continue
        key, _, val = ln.partition("=")
        cur[key.strip()] = val.strip()
    flush()
    return bubbles


def standard_library():
    """A small spread of bubbles used across the test suite: plain and
    phased powers, a conjugated map, and two genuinely multi-core rational
    maps."""
    out = [
        make_equivariant_bubble(1, 1.0),
        make_equivariant_bubble(1, 0.5, (1.0, 0.0), phase=np.pi / 3),
        make_equivariant_bubble(2, 0.5, (1.0, -0.5)),
        make_equivariant_bubble(3, 2.0),
        make_equivariant_bubble(1, 1.0, (-2.0, 1.0), orientation=-1),
        BubbleMap(RationalMap(np.array([-1.0, 0.0, 1.0]), np.array([0.0, 0.5]))),
        BubbleMap(RationalMap(np.array([0.3, 0.0, 1.0]), np.array([0.0, 1.0]))),
    ]
    return out

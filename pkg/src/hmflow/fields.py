"""Sphere-valued fields on Cartesian and radial grids, with the discrete
differential operators used throughout: gradient, Dirichlet energy (full
domain or disc), and the tension field T(u) = Lap u + u |grad u|^2.

Two representations are supported:

* ``Grid2D`` fields store a unit 3-vector per node (shape (nx, ny, 3)).
* ``RadialGrid`` fields store the polar angle phi(r) of a k-equivariant map
  u(r, theta) = (sin phi cos k theta, sin phi sin k theta, cos phi).
  The origin is excluded (r0 > 0); phi(0) enters as a ghost value fixed by
  the topological class (0 or pi).

Energy quadratures weight cells cut by a disc boundary with their exact
intersection area, so energy-in-disc is continuous in the radius.
"""

import io
import struct
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import (
    ConstraintViolationError,
    DegenerateFieldError,
    ParameterError,
    ResolutionError,
    SnapshotFormatError,
)
from .geometry import disc_cell_fractions, ring_disc_angle

UNIT_TOL = 1e-12
DEGENERATE_NORM = 1e-8

_MAGIC = b"HMHF1"


@dataclass(frozen=True)
class Disc:
    """Open disc D(center, radius) in the plane."""

    center: tuple
    radius: float

    def __post_init__(self):
        if self.radius <= 0:
            raise ParameterError("disc radius must be positive")


def sphere_point(x, y, z, tol=1e-9):
    """Validate and return a unit 3-vector as a numpy array."""
    p = np.array([x, y, z], dtype=float)
    n = np.linalg.norm(p)
    if abs(n - 1.0) > tol:
        raise ConstraintViolationError(f"not a unit vector: |p| = {n!r}")
    return p / n


def project_tangent(u, v):
    """Project v onto the tangent plane of the sphere at u.

    Parameters
    ----------
    u : array-like, shape (3,)
        Unit vector (checked to 1e-9).
    v : array-like, shape (3,)

    Returns
    -------
    ndarray, shape (3,)
        v - (u.v) u, orthogonal to u.
    """
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    n = np.linalg.norm(u)
    if abs(n - 1.0) > 1e-9:
        raise ConstraintViolationError(f"project_tangent needs |u| = 1, got {n!r}")
    return v - np.dot(u, v) * u


class Grid2D:
    """Uniform Cartesian grid: nodes x_i = x0 + i h, y_j = y0 + j h."""

    kind = "cartesian"

    def __init__(self, origin, spacing, nx, ny):
        if spacing <= 0:
            raise ParameterError("grid spacing must be positive")
        if nx < 3 or ny < 3:
            raise ParameterError("grids need at least 3 nodes per direction")
        self.origin = (float(origin[0]), float(origin[1]))
        self.h = float(spacing)
        self.nx = int(nx)
        self.ny = int(ny)
        self.xs = self.origin[0] + self.h * np.arange(self.nx)
        self.ys = self.origin[1] + self.h * np.arange(self.ny)

    @classmethod
    def square(cls, half_width, n):
        """Symmetric grid on [-half_width, half_width]^2 with n nodes per side."""
        h = 2.0 * half_width / (n - 1)
        return cls((-half_width, -half_width), h, n, n)

    def meshgrid(self):
        return np.meshgrid(self.xs, self.ys, indexing="ij")

    def __eq__(self, other):
        return (
            isinstance(other, Grid2D)
            and self.origin == other.origin
            and self.h == other.h
            and self.nx == other.nx
            and self.ny == other.ny
        )


class RadialGrid:
    """Strictly increasing positive radii for k-equivariant fields.

    The node ratio r_{i+1}/r_i must stay <= 1.2 so the nonuniform 3-point
    stencils keep their accuracy; graded grids resolve many decades of scale
    with few nodes.
    """

    kind = "radial"
    MAX_NODE_RATIO = 1.2

    def __init__(self, nodes, k):
        nodes = np.asarray(nodes, dtype=float)
        if nodes.ndim != 1 or nodes.size < 3:
            raise ParameterError("radial grid needs at least 3 nodes")
        if nodes[0] <= 0:
            raise ParameterError("radial nodes must be positive (origin excluded)")
        if np.any(np.diff(nodes) <= 0):
            raise ParameterError("radial nodes must be strictly increasing")
        ratio = nodes[1:] / nodes[:-1]
        if np.any(ratio > self.MAX_NODE_RATIO * (1 + 1e-12)):
            raise ParameterError(
                f"node ratio {ratio.max():.4f} exceeds {self.MAX_NODE_RATIO}"
            )
        if int(k) < 1:
            raise ParameterError("equivariance degree k must be >= 1")
        self.r = nodes
        self.k = int(k)

    @classmethod
    def graded(cls, r_min, r_max, k, ratio=1.05, h_max=None):
        """Geometric grading from r_min by `ratio`, optionally switching to a
        uniform spacing h_max once the geometric spacing reaches it."""
        if not (1.0 < ratio <= cls.MAX_NODE_RATIO):
            raise ParameterError("ratio must be in (1, 1.2]")
        nodes = [float(r_min)]
        while nodes[-1] < r_max:
            r = nodes[-1]
            step = r * (ratio - 1.0)
            if h_max is not None and step > h_max:
                step = h_max
            nodes.append(r + step)
        nodes[-1] = float(r_max)
        if nodes[-1] - nodes[-2] < 1e-12 * r_max:
            del nodes[-2]
        return cls(np.array(nodes), k)

    def refined(self, factor=2):
        """Subdivide every interval `factor` times.

        The stretch below the first node is extended by a geometric ladder
        from r0/factor so the node-ratio bound survives the refinement.
        """
        if factor < 2:
            return RadialGrid(self.r.copy(), self.k)
        m = int(np.ceil(np.log(factor) / np.log(1.19)))
        pieces = [np.geomspace(self.r[0] / factor, self.r[0], m + 1)]
        for a, b in zip(self.r[:-1], self.r[1:]):
            pieces.append(np.linspace(a, b, factor + 1)[1:])
        return RadialGrid(np.concatenate(pieces), self.k)

    def __eq__(self, other):
        return (
            isinstance(other, RadialGrid)
            and self.k == other.k
            and self.r.shape == other.r.shape
            and bool(np.all(self.r == other.r))
        )


class SphereField:
    """A sphere-valued map sampled on a grid.

    For ``Grid2D`` the values array has shape (nx, ny, 3); for ``RadialGrid``
    it holds the polar angles phi_i (shape (n,)) and ``phi_origin`` carries
    the ghost value at r = 0 (0 or pi depending on the topological class).
    """

    def __init__(self, grid, values, phi_origin=None):
        self.grid = grid
        if grid.kind == "cartesian":
            values = np.asarray(values, dtype=float)
            if values.shape != (grid.nx, grid.ny, 3):
                raise ParameterError(
                    f"expected values of shape {(grid.nx, grid.ny, 3)}, got {values.shape}"
                )
            self.values = values
            self.phi_origin = None
        else:
            values = np.asarray(values, dtype=float)
            if values.shape != grid.r.shape:
                raise ParameterError("phi array must match the radial nodes")
            if not np.all(np.isfinite(values)):
                raise DegenerateFieldError("phi contains non-finite entries")
            if phi_origin is None:
                phi_origin = 0.0
            self.values = values
            self.phi_origin = float(phi_origin)

    # -- construction helpers -------------------------------------------------

    def copy(self):
        return SphereField(self.grid, self.values.copy(), self.phi_origin)

    @classmethod
    def constant(cls, grid, point):
        p = sphere_point(*point)
        vals = np.broadcast_to(p, (grid.nx, grid.ny, 3)).copy()
        return cls(grid, vals)

    @classmethod
    def equivariant(cls, grid, profile, phi_origin=0.0):
        """Build a radial field from a callable phi = profile(r)."""
        return cls(grid, np.asarray(profile(grid.r), dtype=float), phi_origin)

    # -- basic geometry -------------------------------------------------------

    def is_radial(self):
        return self.grid.kind == "radial"

    def vectors(self):
        """Unit-vector samples: (nx, ny, 3) on 2D grids, (n, 3) on rings
        evaluated at theta = 0 for radial fields."""
        if not self.is_radial():
            return self.values
        phi = self.values
        return np.stack([np.sin(phi), np.zeros_like(phi), np.cos(phi)], axis=-1)


def renormalize(field):
    """Rescale every value back to unit length (2D fields).

    Radial fields store angles and are returned unchanged.  Raises
    ``DegenerateFieldError`` if any value has norm below 1e-8, which signals
    the time step was too large.
    """
    if field.is_radial():
        return field
    norms = np.linalg.norm(field.values, axis=-1)
    if np.any(norms < DEGENERATE_NORM):
        raise DegenerateFieldError(
            f"field value collapsed to |u| = {norms.min():.3e}"
        )
    return SphereField(field.grid, field.values / norms[..., None])


# ---------------------------------------------------------------------------
# discrete derivatives
# ---------------------------------------------------------------------------


def _axis_derivative(values, h, axis):
    # centered in the interior, 2nd-order one-sided at the edges
    d = np.gradient(values, h, axis=axis, edge_order=2)
    return d


def gradient_2d(field):
    """Gradient arrays (nx, ny, 3, 2): d/dx and d/dy of each component."""
    v = field.values
    h = field.grid.h
    gx = _axis_derivative(v, h, 0)
    gy = _axis_derivative(v, h, 1)
    return np.stack([gx, gy], axis=-1)


def _nonuniform_first_derivative(phi, r, phi_origin):
    # 3-point nonuniform stencil; ghost node (0, phi_origin) closes the left end
    re = np.concatenate([[0.0], r])
    pe = np.concatenate([[phi_origin], phi])
    n = r.size
    out = np.empty(n)
    hm = re[1:-1] - re[:-2]
    hp = re[2:] - re[1:-1]
    out[:-1] = (hm**2 * pe[2:] - hp**2 * pe[:-2] + (hp**2 - hm**2) * pe[1:-1]) / (
        hm * hp * (hm + hp)
    )
    # one-sided at the outer boundary
    h1 = r[-1] - r[-2]
    h2 = r[-2] - r[-3]
    out[-1] = (phi[-1] * (2 * h1 + h2) / (h1 * (h1 + h2))
               - phi[-2] * (h1 + h2) / (h1 * h2)
               + phi[-3] * h1 / (h2 * (h1 + h2)))
    return out


def _nonuniform_second_derivative(phi, r, phi_origin):
    re = np.concatenate([[0.0], r])
    pe = np.concatenate([[phi_origin], phi])
    hm = re[1:-1] - re[:-2]
    hp = re[2:] - re[1:-1]
    inner = 2.0 * (hm * pe[2:] + hp * pe[:-2] - (hm + hp) * pe[1:-1]) / (
        hm * hp * (hm + hp)
    )
    out = np.empty(r.size)
    out[:-1] = inner
    out[-1] = inner[-1]
    return out


def radial_phi_r(field):
    """d phi / dr at the radial nodes."""
    return _nonuniform_first_derivative(field.values, field.grid.r, field.phi_origin)


# ---------------------------------------------------------------------------
# energies
# ---------------------------------------------------------------------------


def energy_density_2d(field):
    """Pointwise energy density (1/2)|grad u|^2 on the nodes."""
    g = gradient_2d(field)
    return 0.5 * np.sum(g * g, axis=(2, 3))


def _radial_midpoint_density(field):
    """Midpoint samples of the energy density e(r) = (1/2)(phi_r^2 +
    k^2 sin^2 phi / r^2) on the intervals [0, r0], [r0, r1], ..."""
    r = field.grid.r
    k = field.grid.k
    re = np.concatenate([[0.0], r])
    pe = np.concatenate([[field.phi_origin], field.values])
    dr = np.diff(re)
    rm = 0.5 * (re[:-1] + re[1:])
    dphi = np.diff(pe) / dr
    phim = 0.5 * (pe[:-1] + pe[1:])
    dens = 0.5 * (dphi**2 + (k * np.sin(phim) / rm) ** 2)
    return rm, dr, dens


def dirichlet_energy(field, region=None):
    """Dirichlet energy (1/2) integral of |grad u|^2 over a disc or the full
    computational domain.

    Parameters
    ----------
    field : SphereField
    region : Disc or None
        None integrates over the whole grid.  A disc that misses the grid
        entirely yields 0.0 with a warning.
    """
    if field.is_radial():
        rm, dr, dens = _radial_midpoint_density(field)
        if region is None:
            return float(np.sum(dens * 2.0 * np.pi * rm * dr))
        c = float(np.hypot(*region.center))
        rho = region.radius
        if c - rho >= field.grid.r[-1]:
            warnings.warn("disc does not intersect the radial domain")
            return 0.0
        if c < 1e-14 * max(rho, 1.0):
            # centered disc: clip each interval at rho for continuity in rho
            re = np.concatenate([[0.0], field.grid.r])
            lo = np.minimum(re[:-1], rho)
            hi = np.minimum(re[1:], rho)
            seg = np.maximum(hi - lo, 0.0)
            mid = 0.5 * (lo + hi)
            return float(np.sum(dens * 2.0 * np.pi * np.where(seg > 0, mid, 0.0) * seg))
        ang = ring_disc_angle(rm, c, rho)
        return float(np.sum(dens * ang * rm * dr))

    dens = energy_density_2d(field)
    h = field.grid.h
    if region is None:
        return float(np.sum(dens) * h * h)
    X, Y = field.grid.meshgrid()
    frac = disc_cell_fractions(region.center[0], region.center[1], region.radius, X, Y, h)
    if not np.any(frac > 0):
        warnings.warn("disc does not intersect the grid")
        return 0.0
    return float(np.sum(dens * frac) * h * h)


# ---------------------------------------------------------------------------
# tension
# ---------------------------------------------------------------------------


def _check_resolved(field):
    if field.is_radial():
        pe = np.concatenate([[field.phi_origin], field.values])
        if np.max(np.abs(np.diff(pe))) > 0.5 * np.pi:
            raise ResolutionError("angular jump between neighbors exceeds pi/2")
        return
    v = field.values
    for axis in (0, 1):
        a = np.take(v, np.arange(v.shape[axis] - 1), axis=axis)
        b = np.take(v, np.arange(1, v.shape[axis]), axis=axis)
        dots = np.sum(a * b, axis=-1)
        if np.min(dots) < 0.0:
            raise ResolutionError("angle between neighboring values exceeds pi/2")


def tension(field, check=True):
    """Discrete tension T(u) = Lap u + u |grad u|^2.

    Returns the (nx, ny, 3) tension field (zero on the boundary ring) for 2D
    fields, or the radial residual phi_rr + phi_r/r - k^2 sin(2 phi)/(2 r^2)
    (zero at the pinned outer node) for equivariant fields.
    """
    if check:
        _check_resolved(field)
    if field.is_radial():
        r = field.grid.r
        k = field.grid.k
        phi = field.values
        pr = _nonuniform_first_derivative(phi, r, field.phi_origin)
        prr = _nonuniform_second_derivative(phi, r, field.phi_origin)
        res = prr + pr / r - k * k * np.sin(2.0 * phi) / (2.0 * r * r)
        res[-1] = 0.0
        return res
    v = field.values
    h = field.grid.h
    lap = np.zeros_like(v)
    lap[1:-1, 1:-1] = (
        v[2:, 1:-1] + v[:-2, 1:-1] + v[1:-1, 2:] + v[1:-1, :-2] - 4.0 * v[1:-1, 1:-1]
    ) / (h * h)
    g = gradient_2d(field)
    grad_sq = np.sum(g * g, axis=(2, 3))
    t = lap + v * grad_sq[..., None]
    t[0, :] = t[-1, :] = 0.0
    t[:, 0] = t[:, -1] = 0.0
    return t


def tension_l2_sq(field, tension_field=None):
    """Squared L^2 norm of the tension by quadrature."""
    if tension_field is None:
        tension_field = tension(field)
    if field.is_radial():
        r = field.grid.r
        res_sq = tension_field**2
        # trapezoid in r of 2 pi r res^2, extended to r = 0 where res -> finite
        re = np.concatenate([[0.0], r])
        integ = np.concatenate([[0.0], res_sq * r])
        return float(2.0 * np.pi * np.trapezoid(integ, re))
    h = field.grid.h
    return float(np.sum(tension_field**2) * h * h)


def grad_max(field):
    """Max pointwise |grad u| (the reciprocal is the smallest resolved scale)."""
    if field.is_radial():
        r = field.grid.r
        pr = radial_phi_r(field)
        mag_sq = pr**2 + (field.grid.k * np.sin(field.values) / r) ** 2
        return float(np.sqrt(np.max(mag_sq)))
    g = gradient_2d(field)
    return float(np.sqrt(np.max(np.sum(g * g, axis=(2, 3)))))


def grad_argmax(field):
    """Location of the gradient maximizer."""
    if field.is_radial():
        r = field.grid.r
        pr = radial_phi_r(field)
        mag_sq = pr**2 + (field.grid.k * np.sin(field.values) / r) ** 2
        i = int(np.argmax(mag_sq))
        return (r[i], 0.0) if r[i] > 2.0 * r[0] else (0.0, 0.0)
    g = gradient_2d(field)
    mag = np.sum(g * g, axis=(2, 3))
    i, j = np.unravel_index(np.argmax(mag), mag.shape)
    return (field.grid.xs[i], field.grid.ys[j])


# ---------------------------------------------------------------------------
# point sampling
# ---------------------------------------------------------------------------


def evaluate_field(field, points):
    """Interpolate unit-sphere values at arbitrary points (N, 2) -> (N, 3).

    Bilinear on 2D grids (renormalized); linear in r on the angle for radial
    fields, then mapped through the equivariant ansatz.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if field.is_radial():
        r = np.hypot(pts[:, 0], pts[:, 1])
        th = np.arctan2(pts[:, 1], pts[:, 0])
        re = np.concatenate([[0.0], field.grid.r])
        pe = np.concatenate([[field.phi_origin], field.values])
        phi = np.interp(r, re, pe)
        k = field.grid.k
        return np.stack(
            [np.sin(phi) * np.cos(k * th), np.sin(phi) * np.sin(k * th), np.cos(phi)],
            axis=-1,
        )
    g = field.grid
    fx = np.clip((pts[:, 0] - g.origin[0]) / g.h, 0.0, g.nx - 1.0)
    fy = np.clip((pts[:, 1] - g.origin[1]) / g.h, 0.0, g.ny - 1.0)
    i0 = np.clip(fx.astype(int), 0, g.nx - 2)
    j0 = np.clip(fy.astype(int), 0, g.ny - 2)
    tx = (fx - i0)[:, None]
    ty = (fy - j0)[:, None]
    v = field.values
    out = (
        v[i0, j0] * (1 - tx) * (1 - ty)
        + v[i0 + 1, j0] * tx * (1 - ty)
        + v[i0, j0 + 1] * (1 - tx) * ty
        + v[i0 + 1, j0 + 1] * tx * ty
    )
    n = np.linalg.norm(out, axis=-1, keepdims=True)
    return out / np.maximum(n, 1e-300)


def field_samples(field, n_theta=64):
    """Flat sample arrays for quadrature/extrema scans over regions.

    Returns (points (N,2), weights (N,), values (N,3), grads (N,3,2)).
    Weights integrate smooth densities over the grid's footprint; radial
    fields are sampled on rings of n_theta angles.
    """
    if not field.is_radial():
        g = field.grid
        X, Y = g.meshgrid()
        pts = np.stack([X.ravel(), Y.ravel()], axis=-1)
        w = np.full(pts.shape[0], g.h * g.h)
        vals = field.values.reshape(-1, 3)
        grads = gradient_2d(field).reshape(-1, 3, 2)
        return pts, w, vals, grads
    r = field.grid.r
    k = field.grid.k
    phi = field.values
    pr = radial_phi_r(field)
    theta = (np.arange(n_theta) + 0.5) * (2.0 * np.pi / n_theta)
    mids = 0.5 * (r[:-1] + r[1:])
    edges = np.concatenate([[0.0], mids, [r[-1]]])
    dr = np.diff(edges)
    # ring weight: r * dr * dtheta
    R, TH = np.meshgrid(r, theta, indexing="ij")
    pts = np.stack([(R * np.cos(TH)).ravel(), (R * np.sin(TH)).ravel()], axis=-1)
    w = (R * dr[:, None] * (2.0 * np.pi / n_theta)).ravel()
    sp, cp = np.sin(phi), np.cos(phi)
    ckt, skt = np.cos(k * TH), np.sin(k * TH)
    vals = np.stack([sp[:, None] * ckt, sp[:, None] * skt,
                     np.broadcast_to(cp[:, None], ckt.shape)], axis=-1)
    # grad u = u_r rhat^T + (u_theta / r) thetahat^T
    u_r = np.stack([(pr * cp)[:, None] * ckt, (pr * cp)[:, None] * skt,
                    np.broadcast_to((-pr * sp)[:, None], ckt.shape)], axis=-1)
    ang = (k * sp / r)[:, None]
    u_t = np.stack([-ang * skt, ang * ckt, np.zeros_like(ckt)], axis=-1)
    ct, st = np.cos(TH), np.sin(TH)
    rhat = np.stack([ct, st], axis=-1)
    that = np.stack([-st, ct], axis=-1)
    grads = u_r[..., None] * rhat[:, :, None, :] + u_t[..., None] * that[:, :, None, :]
    return pts, w, vals.reshape(-1, 3), grads.reshape(-1, 3, 2)


def render_equivariant(field, grid):
    """Sample a radial field onto a 2D grid as unit vectors."""
    X, Y = grid.meshgrid()
    pts = np.stack([X.ravel(), Y.ravel()], axis=-1)
    vals = evaluate_field(field, pts).reshape(grid.nx, grid.ny, 3)
    return SphereField(grid, vals)


# ---------------------------------------------------------------------------
# snapshot files
# ---------------------------------------------------------------------------


def write_snapshot(field, path):
    """Fixed-layout little-endian binary snapshot (magic "HMHF1")."""
    buf = io.BytesIO()
    buf.write(_MAGIC)
    if field.is_radial():
        buf.write(struct.pack("<B", 1))
        buf.write(struct.pack("<q", field.grid.k))
        buf.write(struct.pack("<q", field.grid.r.size))
        buf.write(struct.pack("<d", field.phi_origin))
        buf.write(field.grid.r.astype("<f8").tobytes())
        buf.write(field.values.astype("<f8").tobytes())
    else:
        buf.write(struct.pack("<B", 0))
        buf.write(struct.pack("<dd", *field.grid.origin))
        buf.write(struct.pack("<d", field.grid.h))
        buf.write(struct.pack("<qq", field.grid.nx, field.grid.ny))
        buf.write(np.ascontiguousarray(field.values, dtype="<f8").tobytes())
    with open(path, "wb") as f:
        f.write(buf.getvalue())


def read_snapshot(path):
    with open(path, "rb") as f:
        data = f.read()
    if data[:5] != _MAGIC:
        raise SnapshotFormatError(f"bad magic in snapshot file {path}")
    kind = data[5]
    off = 6
    if kind == 1:
        k, n = struct.unpack_from("<qq", data, off)
        off += 16
        (phi_origin,) = struct.unpack_from("<d", data, off)
        off += 8
        r = np.frombuffer(data, dtype="<f8", count=n, offset=off).copy()
        off += 8 * n
        phi = np.frombuffer(data, dtype="<f8", count=n, offset=off).copy()
        return SphereField(RadialGrid(r, k), phi, phi_origin)
    if kind == 0:
        x0, y0, h = struct.unpack_from("<ddd", data, off)
        off += 24
        nx, ny = struct.unpack_from("<qq", data, off)
        off += 16
        vals = np.frombuffer(data, dtype="<f8", count=nx * ny * 3, offset=off)
        return SphereField(Grid2D((x0, y0), h, nx, ny), vals.reshape(nx, ny, 3).copy())
    raise SnapshotFormatError(f"unknown grid kind byte {kind} in {path}")

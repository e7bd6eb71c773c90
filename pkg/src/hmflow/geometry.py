"""Planar geometry helpers: exact disc/cell overlap areas, ring/disc
intersection angles, and Gauss-Legendre panel rules.

These back the disc quadratures; cells cut by a disc boundary contribute
their exact intersection area so that energy-in-disc is continuous in the
disc radius.
"""

import numpy as np


def _antiderivative_halfchord(u, radius):
    # int sqrt(R^2 - u^2) du, with u clamped to [-R, R]
    u = np.clip(u, -radius, radius)
    c = np.sqrt(np.maximum(radius * radius - u * u, 0.0))
    return 0.5 * (u * c + radius * radius * np.arcsin(np.clip(u / radius, -1.0, 1.0)))


def quadrant_disc_area(x, y, radius):
    """Area of {(u,v): u <= x, v <= y} intersected with the disc of given
    radius centered at the origin.  Vectorized over x, y."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if radius <= 0.0:
        return np.zeros(np.broadcast(x, y).shape)
    xm = np.minimum(x, radius)
    i1 = _antiderivative_halfchord
    full = 2.0 * (i1(xm, radius) - i1(-radius, radius))

    s = np.sqrt(np.maximum(radius * radius - y * y, 0.0))
    lo = np.maximum(-s, -radius)
    hi = np.minimum(xm, s)
    has_mid = hi > lo
    # middle band |u| < s where the chord is cut by the horizontal line v = y
    mid = np.where(has_mid, y * (hi - lo) + i1(hi, radius) - i1(lo, radius), 0.0)

    # y >= 0: full half-chords outside the band, cut chords inside
    left = 2.0 * (i1(np.minimum(xm, lo), radius) - i1(-radius, radius))
    right = np.where(xm > s, 2.0 * (i1(xm, radius) - i1(s, radius)), 0.0)
    area_pos = left + mid + right
    # y < 0: only the band contributes
    area_neg = np.where(has_mid, mid, 0.0)

    area = np.where(y >= 0.0, area_pos, area_neg)
    area = np.where(y >= radius, full, area)
    area = np.where((x <= -radius) | (y <= -radius), 0.0, area)
    return area


def disc_cell_overlap(cx, cy, radius, x0, x1, y0, y1):
    """Exact area of disc((cx,cy), radius) intersected with the axis-aligned
    rectangles [x0,x1] x [y0,y1].  All rectangle bounds may be arrays."""
    aq = quadrant_disc_area
    return (
        aq(x1 - cx, y1 - cy, radius)
        - aq(x0 - cx, y1 - cy, radius)
        - aq(x1 - cx, y0 - cy, radius)
        + aq(x0 - cx, y0 - cy, radius)
    )


def disc_cell_fractions(cx, cy, radius, xc, yc, h):
    """Fraction of each h x h cell (centered at (xc, yc)) covered by the disc.

    Cells strictly inside/outside are resolved by a distance test; only the
    boundary band pays for the exact overlap computation.
    """
    xc = np.asarray(xc, dtype=float)
    yc = np.asarray(yc, dtype=float)
    d = np.hypot(xc - cx, yc - cy)
    half_diag = 0.5 * np.sqrt(2.0) * h
    frac = np.zeros(d.shape)
    frac[d <= radius - half_diag] = 1.0
    band = (d > radius - half_diag) & (d < radius + half_diag)
    if np.any(band):
        xb = xc[band]
        yb = yc[band]
        area = disc_cell_overlap(cx, cy, radius, xb - 0.5 * h, xb + 0.5 * h,
                                 yb - 0.5 * h, yb + 0.5 * h)
        frac[band] = np.clip(area / (h * h), 0.0, 1.0)
    return frac


def ring_disc_angle(r, center_dist, radius):
    """Angular measure (in radians) of the circle of radius r about the origin
    lying inside a disc of given radius whose center is center_dist away."""
    r = np.asarray(r, dtype=float)
    if radius <= 0.0:
        return np.zeros(r.shape)
    if center_dist < 1e-14 * max(radius, 1.0):
        return np.where(r <= radius, 2.0 * np.pi, 0.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        cosa = (r * r + center_dist * center_dist - radius * radius) / (2.0 * r * center_dist)
    cosa = np.where(r > 0, cosa, np.inf if center_dist > radius else -np.inf)
    return 2.0 * np.arccos(np.clip(cosa, -1.0, 1.0))


def gauss_legendre_panels(edges, order=8):
    """Composite Gauss-Legendre nodes/weights on the panels defined by the
    sorted breakpoints in `edges`.  Returns (nodes, weights) flattened."""
    edges = np.asarray(edges, dtype=float)
    x, w = np.polynomial.legendre.leggauss(order)
    a = edges[:-1]
    b = edges[1:]
    mid = 0.5 * (a + b)[:, None]
    half = 0.5 * (b - a)[:, None]
    nodes = (mid + half * x[None, :]).ravel()
    weights = (half * w[None, :]).ravel()
    return nodes, weights


def geometric_edges(inner, outer, per_decade=8):
    """Geometrically spaced breakpoints from inner to outer (both included)."""
    if inner <= 0 or outer <= inner:
        return np.array([inner, outer], dtype=float)
    n = max(2, int(np.ceil(per_decade * np.log10(outer / inner))) + 1)
    return np.geomspace(inner, outer, n)


def smooth_cutoff(dist, r_inner, r_outer):
    """C^1 cutoff: 1 for dist <= r_inner, 0 for dist >= r_outer, cubic
    smoothstep in between.  Max slope is 1.5/(r_outer - r_inner)."""
    s = np.clip((r_outer - np.asarray(dist, dtype=float)) / (r_outer - r_inner), 0.0, 1.0)
    return s * s * (3.0 - 2.0 * s)

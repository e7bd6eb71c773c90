"""
Bubbles, their energies, and parameter recovery
===============================================

A quick tour of the static side of the library: the degree-k bubble
family, closed-form disc energies against quadrature, scale/center
covariance, tail decay, and a round trip through the fitter.
"""

import numpy as np

from hmflow import (
    Disc,
    Grid2D,
    compute_center,
    compute_scale,
    disc_energy,
    exterior_energy,
    extract_bubbles,
    fit_config,
    make_equivariant_bubble,
    render_bubble,
    standard_library,
    total_energy,
    transform_bubble,
)

FOUR_PI = 4.0 * np.pi

# every bubble carries an integer multiple of 4 pi
print("library energies (units of 4 pi):")
for b in standard_library():
    print(f"  degree {b.signed_degree:+d}  E/4pi = {total_energy(b) / FOUR_PI:.6f}")

# disc energies of the canonical degree-1 bubble follow
# E(D(0,R)) = 4 pi R^2 / (1 + R^2)
b = make_equivariant_bubble(1, 1.0)
print("\ndisc energy vs closed form:")
for R in (0.5, 1.0, 2.0, 10.0):
    got = disc_energy(b, Disc((0.0, 0.0), R))
    want = FOUR_PI * R * R / (1.0 + R * R)
    print(f"  R = {R:5.1f}   quadrature {got:.6f}   closed form {want:.6f}")

# the concentration scale and center transform with the map
mu, shift = 10.0, (3.0, 4.0)
tb = transform_bubble(b, mu, shift)
print(f"\nscale of b:       {compute_scale(b):.4f}")
print(f"scale of T(b):    {compute_scale(tb):.4f}   (expect x{mu:.0f})")
print(f"center of T(b):   ({compute_center(tb)[0]:.3f}, {compute_center(tb)[1]:.3f})"
      f"   (expect near {shift})")

# outside R times the scale only a pi/R^2 sliver of energy survives
print("\ntail decay (bound pi R^-2):")
for R in (2.0, 4.0, 8.0):
    tail = exterior_energy(b, R, gamma0=0.01)
    print(f"  R = {R:3.0f}   tail {tail:.2e}   bound {np.pi / R**2:.2e}")

# plant a bubble on a grid, then ask the fitter for it back
lam, a = 0.35, (0.4, -0.25)
u = render_bubble(make_equivariant_bubble(1, lam, a, phase=1.1), Grid2D.square(6.0, 241))
out = fit_config(u, Disc((0.0, 0.0), 4.0),
                 extract_bubbles(u, Disc((0.0, 0.0), 4.0), eps0=2.0 * np.pi))
fam = out.config.bubbles[0].map.family
print(f"\nplanted  lam = {lam}, a = {a}")
print(f"fitted   lam = {fam['lam']:.4f}, a = ({fam['center'][0]:.4f}, {fam['center'][1]:.4f})")
print(f"fit distance (upper bound): {out.report.total:.4f}")

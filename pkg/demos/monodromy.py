"""Monodromy around the origin: determinant law, unipotence on the surfaces, and the Stokes product."""

import numpy as np

from heunlab import monodromy as md
from heunlab import polysol as ps
from heunlab.spectral import SurfaceSpec

r = md.monodromy_matrix(md.LinearSystemSpec.extended(0.3, 0.2 + 0.1j, 0.7, 1.1))
print("det M =", r.det, " expected", np.exp(2j * np.pi * 0.3))

rng = np.random.default_rng(5)
for ell in range(1, 5):
    pt = ps.random_surface_points(SurfaceSpec(ell, "plus"), 1, rng)[0]
    r = md.monodromy_matrix(md.LinearSystemSpec.extended(ell, pt.chi, pt.a, pt.s))
    print(f"ell={ell}: tr M = {r.trace:.10f}, |M - I| = {r.gap:.3f}")

c, r = md.stokes_product_check()
print("\nproduct of Stokes multipliers:", c)

for ell in range(1, 5):
    print(f"residue integral ell={ell}: quadrature error",
          abs(md.residue_quadrature(ell, 1.0) - md.residue_closed_form(ell, 1.0)))
print("\nmodel system at 0, monodromy in the explicit basis:\n", np.round(md.model_monodromy("model0", 1, 1.0, 0.7), 10))

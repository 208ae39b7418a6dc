"""Sample points on a surface and recover the polynomial solutions of the linear system."""

import numpy as np

from heunlab import polysol as ps
from heunlab.spectral import SurfaceSpec

spec = SurfaceSpec(1, "plus")
pt = ps.sample_surface(spec, chi=1, s=1)[0]
sol = ps.solve_polynomial_solution(spec, pt)
print("a on the slice chi=1, s=1:", pt.a)
print("Y2 coefficients (scaled so the constant term is 1):", sol.y2 / sol.y2[0])

rng = np.random.default_rng(0)
for ell in range(1, 7):
    spec = SurfaceSpec(ell, "minus")
    worst = 0.0
    for pt in ps.random_surface_points(spec, 10, rng):
        worst = max(worst, ps.verify_solution(spec, pt, ps.solve_polynomial_solution(spec, pt)))
    print(f"ell={ell}: worst residual over 10 points {worst:.2e}")

# at chi = 0 the second component solves a confluent Heun equation
spec = SurfaceSpec(3, "plus")
pt = ps.sample_surface(spec, 0, 1.3)[0]
E = ps.solve_polynomial_solution(spec, pt).y2
lam, mu = ps.heun_parameters(pt.a, pt.s)
print("\nHeun residual at chi=0:", ps.heun_residual(3, lam, mu, E, ps.unit_circle()))

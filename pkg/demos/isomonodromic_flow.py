"""Flow a surface point in s and watch it stay on the surface; w = a/(2 s chi) solves Painleve III."""

import numpy as np

from heunlab import painleve as pl
from heunlab import polysol as ps
from heunlab.spectral import SurfaceSpec

spec = SurfaceSpec(3, "plus")
print("multiplier h with L_v P = h P:", pl.multiplier(spec))

pts = sorted((p for p in ps.sample_surface(spec, 1, 1) if abs(p.a.imag) < 1e-12), key=lambda p: p.a.real)
for p in pts:
    try:
        traj = pl.flow(pl.FlowState(p.chi, p.a.real, 1, 3), 2, spec=spec)
        break
    except pl.FlowError as exc:
        print("start a =", p.a.real, "runs into a pole:", exc)

print(f"start a = {traj.a[0].real:.6f}, {len(traj.s)} steps")
print("max relative |P| along the path:", np.max(traj.membership()))
for h in (0.1, 0.05, 0.025):
    print(f"Painleve III residual with stencil step {h}: {pl.p3_residual(traj, h)[0]:.2e}")
print("Hamiltonian convention (p, q), deviation:", pl.hamiltonian_convention(traj)[:2])

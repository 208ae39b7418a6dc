"""Rotation numbers of the Josephson torus flow and the integer phase-lock plateaus."""

import numpy as np

from heunlab import josephson as js

for B in (np.sqrt(2), 2.0, 3.0):
    est = js.rotation_number(js.TorusParams(B, 0.0))
    print(f"A=0, B={B:.4f}: rho = {est.rho:.6f} +- {est.bound:.1e}  (closed form {np.sqrt(B * B - 1):.6f})")

print("\ngrowth points:", [round(js.growth_point(r), 5) for r in (1, 2)])

Bs = js.parse_range("-3:3:0.25")
As = js.parse_range("0:4:0.5")
rows = js.scan(Bs, As, workers=js.default_workers())
grid = {(B, A): (rho, locked) for B, A, rho, _, locked in rows}
print("\nlocked cells show their integer; others show '.'")
for A in As[::-1]:
    line = "".join(f"{int(grid[(B, A)][0]):+d}"[-2:] if grid[(B, A)][1] else " ." for B in Bs)
    print(f"A={A:3.1f} {line}")

"""
Static field without drive
==========================

With ``h = 0`` and a static field ``V0`` the frequency-space solution is a
single number, ``1 / (1 + i V0 j(xi, 0))``.  The time-domain solution does
not settle onto it: the field binds a state outside the band, and that
state keeps oscillating with constant amplitude.
"""

# %%
import numpy as np

from reedsim.convergence import static_bound_state, static_state
from reedsim.drive import DriveSpec
from reedsim.volterra import TimeGrid, evolve

spec = DriveSpec.cosine(1.0, 4.0, 0.0, V0=0.5)
xi = 0.0
series = evolve(spec, xi, TimeGrid(0.0, 300.0, 0.01))
psi0 = static_state(spec, xi)
w, R = static_bound_state(xi, 0.5, 1.0)
print(f"static value {psi0:.4f}; bound state frequency {w:.4f}, amplitude {abs(R):.4f}")

# %%
# Subtracting the bound-state oscillation leaves a remainder that decays
# at least as fast as ``t^{-1/2}``; without the subtraction the deviation stays near |R|.
t = series.times
for T in (30.0, 100.0, 300.0):
    m = (t >= T - 5) & (t <= T)
    plain = np.abs(series.values[m] - psi0).max()
    rest = np.abs(series.values[m] - psi0 - R * np.exp(1j * w * t[m])).max()
    print(f"t = {T:5.0f}  |psi - psi0| = {plain:.3f}   after subtraction = {rest:.2e}  (x sqrt t = {rest * np.sqrt(T):.3f})")

"""
How fast the memory fades
=========================

Start the drive at a range of times ``t0`` and compare each solution to
the periodic state at a common later time.  The deviation decays like
``(t - t0)^{-1/2}``.  Starts are placed a whole number of drive periods
apart so they all see the drive at the same phase.
"""

# %%
import numpy as np

from reedsim.convergence import log_spaced_offsets, mean_scaling, measure_delta, memory_tail_q0
from reedsim.drive import DriveSpec

spec = DriveSpec.cosine(1.0, 4.0, 0.1)
horizon = 400.0
report = measure_delta(spec, 0.5, horizon - log_spaced_offsets(10, 390, 12), horizon)
print(f"slope {report.slope:.3f}  95% CI {np.round(report.slope_ci, 3)}  sqrt-scaled max {report.bound_constant:.4f}")
for t, e in report.samples[::3]:
    print(f"  t - t0 = {t:7.2f}  envelope = {e:.3e}")

# %%
# The leading memory correction for each harmonic is the missing tail of
# the half-line integral, scaled by that harmonic's amplitude.  Its
# modulus beats with period ``pi / g``, so look at the sup over one beat.
span = np.linspace(0.0, np.pi / spec.g, 9)
for T in (10.0, 100.0, 1000.0):
    sup = max(abs(memory_tail_q0(spec, 0.5, 1, T + s)) for s in span)
    print(f"T = {T:6.0f}  sup |q0 for n = 1| = {sup:.2e}  (x sqrt T = {sup * np.sqrt(T):.4f})")

# %%
# The time-averaged state moves away from its undriven value at second
# order in the drive amplitude.
print(mean_scaling(spec, [0.1, 0.05, 0.025], xi=0.5))

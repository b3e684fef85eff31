"""
Propagators and regimes
=======================

In frequency space each harmonic ``k`` of the periodic state is carried by
a propagator ``j_k(xi)``.  Whether it is finite, real or imaginary depends
on where ``k - alpha xi`` sits relative to the band ``[-alpha, alpha]``
with ``alpha = g / omega``.
"""

# %%
import numpy as np

from reedsim.drive import DriveSpec, classify
from reedsim.propagators import (
    RenormContext,
    chebyshev_nodes,
    epsilon_bar,
    j0_renorm_recursive,
    j0_renorm_resonant,
    j_bar,
    j_continuous,
    j_k,
)

# %%
# Classify a few drives.  Fast driving with no static field is the
# moderately resonant case; a static field makes the problem
# non-degenerate; slow driving without a field is not covered.
for omega, V0 in ((4.0, 0.0), (4.0, 2.0), (1.9, 0.0)):
    spec = DriveSpec.cosine(1.0, omega, 0.2, V0=V0)
    print(f"omega = {omega}, V0 = {V0}: {classify(spec).tag.value}")

# %%
# In the resonant regime only ``k = 0`` lives inside the band.  All other
# propagators are bounded, and pairs ``j_n + j_-n`` are purely imaginary.
alpha = 0.25
xi = chebyshev_nodes(33)
print("j_0 at centre:", j_k(0, 0.0, alpha))
print("max |j_k|, k != 0:", max(np.abs(j_k(k, xi, alpha)).max() for k in (-2, -1, 1, 2)), "bound", 1 / np.sqrt(2 * epsilon_bar(alpha)))
print("max |Re j_bar_1|:", np.abs(j_bar(1, xi, alpha).real).max())

# %%
# Summing the drive insertions on zero-momentum lines tames ``j_0`` near
# the band edges.  The closed form and the mode-by-mode recursion agree.
# A finer edge guard lets us look very close to ``xi = 1``.
ctx = RenormContext.from_spec(DriveSpec.cosine(1.0, 4.0, 0.2), band=1e-12)
edge = 1.0 - np.array([1e-4, 1e-6, 1e-8])
print("|j_0| near the edge:          ", np.abs(j_k(0, edge, alpha, band=1e-12)))
print("|j_0 renormalized| near edge: ", np.abs(j0_renorm_resonant(edge, ctx)))
print("closed form vs recursion:     ", np.abs(j0_renorm_resonant(xi, ctx) - j0_renorm_recursive(xi, ctx)).max())

# %%
# The mode propagators are samples of one continuous function of the
# frequency offset.
print(j_k(1, 0.3, alpha), 4.0 * j_continuous(0.3, -4.0, 1.0))

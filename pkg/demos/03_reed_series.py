"""
The periodic state from the reed series
=======================================

The long-time state is periodic with the drive.  Its Fourier modes are a
sum over ordered mode sequences ("reeds"), organised so that dangerous
zero-momentum chains are resummed into the propagators.  Here we build the
series, compare it to a direct linear solve and check the mode equations.
"""

# %%
import numpy as np

from reedsim.drive import DriveSpec
from reedsim.propagators import RenormContext, chebyshev_nodes
from reedsim.reed_series import assemble_state, enumerate_reeds, fixed_point_oracle, psi_coefficients, residual

spec = DriveSpec.cosine(1.0, 4.0, 0.2)
ctx = RenormContext.from_spec(spec)
print(f"alpha = {ctx.alpha}, gamma = {ctx.gamma}, regime = {ctx.regime.tag.value}")

# %%
# Reeds of order 4 returning to zero momentum with modes +-1.  In the
# resonant regime the pattern zero - line - zero is excluded.
for r in enumerate_reeds(4, 0, 1, ctx.regime):
    print(r.modes, "momenta", r.momenta)

# %%
# Sum the series to eighth order on a Chebyshev grid and compare with the
# truncated mode system solved directly.
xi = chebyshev_nodes(33)
series = psi_coefficients(xi, ctx, N_max=8, mu_cutoff=4)
oracle = fixed_point_oracle(xi, ctx, M=32)
diff = np.abs(series.values - oracle.values[28:37]).max()
print(f"series vs direct solve: {diff:.1e}   reported truncation error: {series.trunc_err.max():.1e}")

# %%
# Mode amplitudes fall off exponentially in ``|mu|``.
for mu in range(0, 5):
    print(f"mu = {mu}: max |psi_mu - delta| = {np.abs(oracle[mu]).max():.2e}")

# %%
# Plug the coefficients back into the mode equations, and assemble the
# periodic state over one drive cycle at one grid node.
print("residual (direct solve):", residual(oracle, ctx=ctx))
print("residual (series):      ", residual(psi_coefficients(xi, ctx, 8, mu_cutoff=8), ctx=ctx))
phi = np.linspace(0, 2 * np.pi, 5)
print("psi(phi) at xi =", xi[16], ":", np.round(assemble_state(series, phi, node=16), 6))

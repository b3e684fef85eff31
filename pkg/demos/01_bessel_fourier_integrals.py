"""
Oscillatory Bessel integrals
============================

The memory kernel of the impurity equation is a Bessel function times a
phase, so every analytic statement about the dynamics rests on a handful
of Fourier integrals of ``J_0``.  This script evaluates them and checks
that the pieces fit together.
"""

# %%
# The half-line transform has a closed form with a square-root branch
# point at the band edges ``tau = +-1``.  Inside the band it is real,
# outside it is purely imaginary.
import numpy as np

from reedsim.special_functions import (
    bessel_j,
    finite_bessel_fourier,
    halfline_bessel_fourier,
    hilbert_of_bessel_fourier,
    sqrt_weighted_bessel_integral,
    sqrt_weighted_limit,
    tail_bessel_fourier,
    tail_leading_term,
)

for tau in (0.0, 0.5, 2.0, -3.0):
    print(f"tau = {tau:+.1f}   int_0^inf J0(s) e^(i tau s) ds = {halfline_bessel_fourier(tau):.6f}")

# %%
# Split the half line at ``a``.  The finite part is computed by adaptive
# quadrature, the tail by an asymptotic expansion of ``J_0``; their sum
# must reproduce the closed form.
a = 50.0
for tau in (0.0, 0.5, 2.0, 5.0):
    fin = finite_bessel_fourier(a, tau)
    tail = tail_bessel_fourier(a, tau)
    gap = abs(fin + tail - halfline_bessel_fourier(tau))
    print(f"tau = {tau:.1f}  finite + tail - closed = {gap:.1e}")

# %%
# The tail decays like ``a^{-1/2}``.  Its leading term is a pair of
# phases that beat against each other, so the modulus wobbles while the
# envelope shrinks.
for a in (20.0, 80.0, 320.0):
    t = tail_bessel_fourier(a, 0.3)
    lead = tail_leading_term(a, 0.3)
    print(f"a = {a:5.0f}  |tail| = {abs(t):.4e}  leading term error = {abs(t - lead):.1e}  sqrt(a)|tail| = {np.sqrt(a) * abs(t):.3f}")

# %%
# At the band edge the transform diverges; weighting by ``sqrt(a - s)``
# tames it and the weighted integral approaches a finite limit.
for a in (50.0, 200.0, 800.0):
    print(f"a = {a:5.0f}  weighted integral at tau = 1: {sqrt_weighted_bessel_integral(a, 1.0):.5f}")
print(f"limit: {sqrt_weighted_limit(1):.5f}")

# %%
# Two loose ends: the Bessel evaluator itself and the Hilbert-transform
# companion, which is odd in ``tau``.
print("J_3(7.5) =", bessel_j(3, 7.5))
print("Hilbert side at tau = +-2:", hilbert_of_bessel_fourier(2.0), hilbert_of_bessel_fourier(-2.0))

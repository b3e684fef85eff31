"""Frequency-domain propagators ``j_k(xi)`` and their renormalized forms.

With ``psi(phi) = sum_mu psi_mu e^{i mu phi}`` the memory integral maps
mode ``mu`` to ``j_mu(xi) = int_0^inf J_0(alpha s) e^{i(alpha xi - mu) s} ds``.
Inside the band ``|mu - alpha xi| < alpha`` this is real,
``1/sqrt(alpha^2 - (mu - alpha xi)^2)``; outside it is purely imaginary
with sign ``-sign(mu - alpha xi)``.

Three conventions are kept side by side so the sign can be discriminated
against the time-domain solver:

``"causal"``      the transform above (default, matches the Volterra solution)
``"anticausal"``  its complex conjugate
``"literal"``     ``(chi_in - i chi_out)/sqrt|(k + alpha xi)^2 - alpha^2|``,
                  i.e. a constant ``-i`` outside the band and ``k + alpha xi``
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Optional

import numpy as np

from .drive import DEFAULT_EPSILON, DriveSpec, Regime, RegimeTag, classify, default_mode_cutoff
from .errors import BandEdgeSingular, DegenerateDenominator, UnsupportedRegime
from .special_functions import BAND_GUARD, halfline_bessel_fourier

__all__ = [
    "CONVENTIONS",
    "SIGN_CONVENTION",
    "RenormContext",
    "j_k",
    "j_bar",
    "j_renorm_nondegenerate",
    "j0_renorm_resonant",
    "j0_renorm_recursive",
    "resonant_self_energy",
    "j_continuous",
    "epsilon_bar",
    "epsilon_bar_band",
    "chebyshev_nodes",
]

CONVENTIONS = ("causal", "anticausal", "literal")
#: Convention selected by the time-domain oracle comparison.
SIGN_CONVENTION = "causal"

DENOMINATOR_FLOOR = 1e-14


def _convention(conv: Optional[str]) -> str:
    conv = SIGN_CONVENTION if conv is None else conv
    if conv not in CONVENTIONS:
        raise ValueError(f"unknown convention {conv!r}; expected one of {CONVENTIONS}")
    return conv


def chebyshev_nodes(n: int) -> np.ndarray:
    """``cos(pi (2m+1) / (2n))`` for ``m = 0..n-1``; never hits ``+-1``."""
    m = np.arange(n)
    return np.cos(np.pi * (2 * m + 1) / (2 * n))


def j_k(k: int, xi, alpha: float, convention: Optional[str] = None, band: float = BAND_GUARD):
    """Propagator of harmonic ``k`` at band variable ``xi`` (scalar or array)."""
    conv = _convention(convention)
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    x = np.asarray(xi, dtype=float)
    shift = (k + alpha * x) if conv == "literal" else (k - alpha * x)
    # guard measured in the rescaled variable (k -+ alpha xi)/alpha, as for the half-line transform
    gap = np.abs(shift) / alpha - 1.0
    if np.any(np.abs(gap) < band):
        raise BandEdgeSingular(f"k={k}: |k -+ alpha xi| / alpha within {band:g} of 1")
    root = np.sqrt(np.abs(shift * shift - alpha * alpha))
    inside = gap < 0
    if conv == "literal":
        out_im = -1.0
    else:
        out_im = -np.sign(shift) if conv == "causal" else np.sign(shift)
    val = np.where(inside, 1.0 + 0j, 1j * out_im) / root
    return complex(val) if val.ndim == 0 else val


def j_bar(n: int, xi, alpha: float, convention: Optional[str] = None, band: float = BAND_GUARD):
    """``j_n + j_{-n}``: the two orientations of a link carrying momentum ``+-n``."""
    if n == 0:
        raise ValueError("j_bar is defined for n != 0")
    return j_k(n, xi, alpha, convention, band) + j_k(-n, xi, alpha, convention, band)


def epsilon_bar(alpha: float) -> float:
    """Largest margin with ``|j_k| <= 1/sqrt(2 eps)`` for every ``k != 0``.

    For ``alpha < 1/2`` the closest approach of ``|k - alpha xi|`` to the
    band edge over ``k != 0`` is at ``|k| = 1``, ``|xi| -> 1``, giving
    ``(1 - alpha)^2 - alpha^2 = 1 - 2 alpha = 2 eps``.
    """
    if not 0 < alpha < 0.5:
        raise UnsupportedRegime("epsilon_bar needs 0 < alpha < 1/2")
    return 0.5 * (1.0 - 2.0 * alpha)


def epsilon_bar_band(alpha: float) -> float:
    """Margin ``eps`` for the bound ``|j_k| <= 1/sqrt(2 alpha eps + eps^2)``, ``|k| >= 2 alpha + eps``.

    The bound is tight at the smallest integer ``|k|`` above ``2 alpha``,
    so ``eps = ceil-above(2 alpha) - 2 alpha``.
    """
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    k_min = math.floor(2.0 * alpha) + 1
    return k_min - 2.0 * alpha


@dataclass(frozen=True)
class RenormContext:
    """Everything the renormalized propagators need.

    Parameters
    ----------
    regime : Regime
    alpha : float
        ``g / omega``.
    V0 : float
        Static field in units of ``omega``.
    gamma : float
        ``h / omega``.
    coefficients : mapping
        Drive modes ``V_n`` (both signs of ``n``).
    p_max : int
        Truncation of the self-energy sum.
    convention : str
        Propagator sign convention.
    """

    regime: Regime
    alpha: float
    V0: float
    gamma: float
    coefficients: Mapping[int, complex] = field(default_factory=dict)
    p_max: int = 36
    convention: str = SIGN_CONVENTION
    band: float = BAND_GUARD

    def __post_init__(self):
        if self.p_max < 1:
            raise ValueError("p_max must be at least 1")
        if self.regime.resonant and self.V0 != 0:
            raise ValueError("the resonant regime requires V0 = 0")
        _convention(self.convention)

    @classmethod
    def from_spec(cls, spec: DriveSpec, epsilon: float = DEFAULT_EPSILON, convention: Optional[str] = None, p_max: Optional[int] = None, gamma: Optional[float] = None, band: float = BAND_GUARD) -> "RenormContext":
        regime = classify(spec, epsilon)
        if not regime.supported:
            raise UnsupportedRegime(f"alpha = {spec.alpha:.4g} with V0 = 0 is outside the moderately resonant regime (eps = {epsilon})")
        v0 = spec.v0_reduced if regime.tag is RegimeTag.NON_DEGENERATE else 0.0
        return cls(
            regime=regime,
            alpha=spec.alpha,
            V0=v0,
            gamma=spec.gamma if gamma is None else gamma,
            coefficients=dict(spec.coefficients),
            p_max=p_max if p_max is not None else default_mode_cutoff(spec.sigma),
            convention=_convention(convention),
            band=band,
        )

    def with_gamma(self, gamma: float) -> "RenormContext":
        import dataclasses

        return dataclasses.replace(self, gamma=gamma)

    def mode(self, n: int) -> complex:
        return complex(self.coefficients.get(int(n), 0j))

    def j(self, k: int, xi):
        return j_k(k, xi, self.alpha, self.convention, self.band)

    def line(self, mu: int, xi):
        """Propagator attached to a reed line of momentum ``mu``."""
        if self.regime.resonant:
            return j0_renorm_resonant(xi, self) if mu == 0 else self.j(mu, xi)
        return j_renorm_nondegenerate(mu, xi, self)

    def order_zero(self, xi):
        """Mode-zero value at ``gamma = 0``: ``1/(1 + i V0 j_0)`` (1 when ``V0 = 0``)."""
        j0 = self.j(0, xi)
        return 1.0 / (1.0 + 1j * self.V0 * j0)


def j_renorm_nondegenerate(mu: int, xi, ctx: RenormContext):
    """``j_mu / (1 + i V0 j_mu)``: the static field resummed into each line."""
    j = ctx.j(mu, xi)
    den = 1.0 + 1j * ctx.V0 * j
    if np.any(np.abs(den) < DENOMINATOR_FLOOR):
        raise DegenerateDenominator(f"1 + i V0 j_{mu} vanishes")
    return j / den


def resonant_self_energy(xi, ctx: RenormContext):
    """``S(xi) = sum_{p=1}^{p_max} |V_p|^2 j_bar_p(xi)`` (without the ``gamma^2``)."""
    x = np.asarray(xi, dtype=float)
    total = np.zeros(x.shape, dtype=complex)
    for p in range(1, ctx.p_max + 1):
        w = abs(ctx.mode(p)) ** 2
        if w == 0.0:
            continue
        total = total + w * j_bar(p, x, ctx.alpha, ctx.convention, ctx.band)
    return complex(total) if total.ndim == 0 else total


def j0_renorm_resonant(xi, ctx: RenormContext):
    """Zero-momentum propagator with all link insertions resummed.

    ``j_0 / (1 + gamma^2 S j_0)`` with ``S`` from :func:`resonant_self_energy`.
    """
    j0 = ctx.j(0, xi)
    den = 1.0 + ctx.gamma**2 * resonant_self_energy(xi, ctx) * j0
    if np.any(np.abs(den) < DENOMINATOR_FLOOR):
        raise DegenerateDenominator("resonant renormalization denominator vanishes")
    return j0 / den


def j0_renorm_recursive(xi, ctx: RenormContext):
    """Same quantity built one drive mode at a time:
    ``j^{(n)} = j^{(n-1)} / (1 + gamma^2 |V_n|^2 j_bar_n j^{(n-1)})``."""
    cur = ctx.j(0, xi)
    for p in range(1, ctx.p_max + 1):
        w = abs(ctx.mode(p)) ** 2
        if w == 0.0:
            continue
        cur = cur / (1.0 + ctx.gamma**2 * w * j_bar(p, xi, ctx.alpha, ctx.convention, ctx.band) * cur)
    return cur


def j_continuous(xi, tau, g: float, convention: Optional[str] = None, band: float = BAND_GUARD):
    """``int_0^inf J_0(g t) e^{i(g xi + tau) t} dt``.

    Related to the mode propagators by ``j_k(xi) = omega * j_continuous(xi, -k omega, g)``
    in the causal convention.
    """
    conv = _convention(convention)
    if g <= 0:
        raise ValueError("g must be positive")
    arg = (g * np.asarray(xi, dtype=float) + tau) / g
    if conv == "literal":
        if np.any(np.abs(np.abs(arg) - 1.0) < band):
            raise BandEdgeSingular("|g xi + tau| within the guard band of g")
        root = np.sqrt(np.abs(1.0 - arg * arg))
        val = np.where(np.abs(arg) < 1.0, 1.0 + 0j, -1j) / (g * root)
        return complex(val) if val.ndim == 0 else val
    val = np.asarray(halfline_bessel_fourier(arg, band)) / g
    if conv == "anticausal":
        val = np.conj(val)
    return complex(val) if val.ndim == 0 else val

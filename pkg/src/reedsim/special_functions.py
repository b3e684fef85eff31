"""Integer-order Bessel functions and Bessel-Fourier oscillatory integrals.

Everything here is built around the one-sided transform

    T(tau) = int_0^inf J_0(t) exp(i tau t) dt,

its truncations to ``[0, a]`` and ``[a, inf)``, and a few relatives
(square-root weighted integrals, the Hilbert transform of the Fourier
transform of ``J_0``).  Closed forms are paired with quadrature routes so
that each can be checked against the other.

Conventions
-----------
* ``T(tau) = 1/sqrt(1 - tau^2)`` for ``|tau| < 1`` and
  ``i sign(tau)/sqrt(tau^2 - 1)`` for ``|tau| > 1``.
* Fresnel integrals use ``C(x) = sqrt(2/pi) int_0^x cos(u^2) du`` (same for
  ``S`` with ``sin``), so ``C(inf) = S(inf) = 1/2``.
* ``J_0(t) ~ sum_m [c_m^+ e^{it} + c_m^- e^{-it}] t^{-m-1/2}`` with the
  coefficients returned by :func:`hankel_coefficients`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np
from scipy import integrate, special

from .errors import BandEdgeSingular, QuadratureNoConvergence, TooSmallA

__all__ = [
    "BAND_GUARD",
    "QuadratureSettings",
    "bessel_j",
    "sinc_cosc",
    "halfline_bessel_fourier",
    "finite_bessel_fourier",
    "finite_bessel_fourier_convolution",
    "tail_bessel_fourier",
    "tail_leading_term",
    "bessel_fourier_tail",
    "hankel_coefficients",
    "oscillatory_power_tail",
    "fresnel",
    "sqrt_weighted_bessel_integral",
    "sqrt_weighted_limit",
    "hilbert_of_bessel_fourier",
]

#: Default half-width of the excluded band around ``|tau| = 1``.
BAND_GUARD = 1e-3

# Bessel branch boundaries.  Below SERIES_MAX the power series loses at most
# ~3 digits to cancellation; above ASYMPTOTIC_MIN(k) the Hankel expansion with
# ASYMPTOTIC_PAIRS (P, Q) pairs is below 1e-13.  The gap between the two is
# covered by the trapezoid rule on the periodic integral representation.
SERIES_MAX = 12.0
ASYMPTOTIC_PAIRS = 8


def _asymptotic_min(k: int) -> float:
    return 16.0 + 2.0 * k * k


@dataclass(frozen=True)
class QuadratureSettings:
    """Tolerances for the adaptive quadrature routes.

    ``split_point`` is the argument ``a`` above which the tail integral is
    taken from the asymptotic expansion instead of ``T(tau) - finite(a)``.
    """

    abs_tol: float = 1e-11
    rel_tol: float = 1e-11
    max_subdivisions: int = 4000
    split_point: float = 10.0

    def __post_init__(self):
        if self.abs_tol <= 0 or self.rel_tol <= 0:
            raise ValueError("quadrature tolerances must be positive")
        if self.split_point <= 0:
            raise ValueError("split_point must be positive")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be at least 1")


DEFAULT_SETTINGS = QuadratureSettings()


# ---------------------------------------------------------------------------
# Bessel functions of integer order
# ---------------------------------------------------------------------------


def _bessel_series(k: int, x: np.ndarray) -> np.ndarray:
    """Power series for J_k, k >= 0.  Accurate for |x| <~ 12."""
    half = 0.5 * x
    term = half**k / math.factorial(k)
    total = term.copy()
    q = -(half * half)
    m = 0
    while True:
        m += 1
        term = term * q / (m * (m + k))
        total += term
        if m > 8 and np.all(np.abs(term) <= 1e-18 * np.maximum(1.0, np.abs(total))):
            break
        if m > 200:
            break
    return total


def _hankel_a(k: int, n_terms: int) -> np.ndarray:
    """Coefficients a_m(k) = prod_{l=1..m} (4k^2 - (2l-1)^2) / (m! 8^m)."""
    mu = 4.0 * k * k
    a = np.empty(n_terms)
    a[0] = 1.0
    for m in range(1, n_terms):
        a[m] = a[m - 1] * (mu - (2 * m - 1) ** 2) / (8.0 * m)
    return a


def _bessel_asymptotic(k: int, x: np.ndarray, n_pairs: int = ASYMPTOTIC_PAIRS) -> np.ndarray:
    """Hankel expansion J_k(x) ~ sqrt(2/(pi x)) (P cos w - Q sin w), x > 0."""
    a = _hankel_a(k, 2 * n_pairs)
    inv = 1.0 / x
    p = np.zeros_like(x)
    q = np.zeros_like(x)
    # Horner in 1/x^2 for P and Q separately
    for j in range(n_pairs - 1, -1, -1):
        sgn = -1.0 if j % 2 else 1.0
        p = p * inv * inv + sgn * a[2 * j]
        q = q * inv * inv + sgn * a[2 * j + 1]
    q = q * inv
    w = x - (0.5 * k + 0.25) * np.pi
    return np.sqrt(2.0 / (np.pi * x)) * (p * np.cos(w) - q * np.sin(w))


def _bessel_trapezoid(k: int, x: np.ndarray) -> np.ndarray:
    """J_k(x) = (1/2pi) int_0^{2pi} cos(k th - x sin th) dth by the trapezoid rule.

    The integrand is periodic and entire, so the rule converges
    exponentially once the node count exceeds |x| + k.
    """
    if x.size == 0:
        return np.zeros_like(x)
    xmax = float(np.max(np.abs(x)))
    n_nodes = 2 * int(math.ceil(0.5 * (xmax + abs(k)))) + 64
    theta = 2.0 * np.pi * np.arange(n_nodes) / n_nodes
    out = np.empty_like(x)
    chunk = max(1, 2_000_000 // n_nodes)
    for start in range(0, x.size, chunk):
        xs = x[start:start + chunk]
        out[start:start + chunk] = np.cos(k * theta[None, :] - xs[:, None] * np.sin(theta)[None, :]).mean(axis=1)
    return out


def bessel_j(k: int, x):
    """Bessel function of the first kind, integer order ``k``.

    Accepts a scalar or array ``x``.  Uses the power series for
    ``|x| <= 12``, the Hankel asymptotic expansion for
    ``|x| >= 16 + 2 k^2`` and the trapezoid rule on the integral
    representation in between.
    """
    k = int(k)
    sign = 1.0
    if k < 0:
        k = -k
        sign = -1.0 if k % 2 else 1.0
    xa = np.asarray(x, dtype=float)
    scalar = xa.ndim == 0
    xa = np.atleast_1d(xa)
    ax = np.abs(xa)
    # J_k(-x) = (-1)^k J_k(x)
    parity = np.where((xa < 0) & (k % 2 == 1), -1.0, 1.0)
    out = np.empty_like(ax)

    small = ax <= SERIES_MAX
    large = ax >= _asymptotic_min(k)
    mid = ~(small | large)
    if np.any(small):
        out[small] = _bessel_series(k, ax[small])
    if np.any(large):
        out[large] = _bessel_asymptotic(k, ax[large])
    if np.any(mid):
        out[mid] = _bessel_trapezoid(k, ax[mid])
    out = sign * parity * out
    return float(out[0]) if scalar else out


# ---------------------------------------------------------------------------
# Elementary pieces
# ---------------------------------------------------------------------------


def sinc_cosc(x):
    """Return ``(sin x / x, (1 - cos x) / x)`` with the limits ``(1, 0)`` at 0."""
    xa = np.asarray(x, dtype=float)
    small = np.abs(xa) < 1e-4
    safe = np.where(small, 1.0, xa)
    x2 = xa * xa
    sinc = np.where(small, 1.0 - x2 / 6.0 + x2 * x2 / 120.0, np.sin(safe) / safe)
    # 1 - cos x = 2 sin^2(x/2) avoids cancellation for moderate x
    cosc = np.where(small, xa / 2.0 - xa * x2 / 24.0, 2.0 * np.sin(0.5 * safe) ** 2 / safe)
    if xa.ndim == 0:
        return float(sinc), float(cosc)
    return sinc, cosc


def fresnel(x) -> Tuple:
    """Fresnel pair ``(C(x), S(x))`` with ``C(x) = sqrt(2/pi) int_0^x cos(u^2) du``.

    scipy's ``fresnel`` uses the ``cos(pi t^2 / 2)`` kernel; the two are
    related by the substitution ``u = t sqrt(pi/2)``.
    """
    xa = np.asarray(x, dtype=float)
    if np.any(xa < 0):
        raise ValueError("fresnel is defined here for x >= 0")
    s, c = special.fresnel(xa * math.sqrt(2.0 / math.pi))
    if xa.ndim == 0:
        return float(c), float(s)
    return c, s


def _check_band(tau, band: float, what: str = "tau"):
    tau = np.asarray(tau, dtype=float)
    if np.any(np.abs(np.abs(tau) - 1.0) < band):
        raise BandEdgeSingular(f"|{what}| within {band:g} of the band edge 1")


# ---------------------------------------------------------------------------
# One-sided Bessel-Fourier transform and its pieces
# ---------------------------------------------------------------------------


def halfline_bessel_fourier(tau, band: float = BAND_GUARD):
    """Closed form of ``int_0^inf J_0(t) e^{i tau t} dt``.

    Real inside the band ``|tau| < 1``, purely imaginary outside, with the
    imaginary part odd in ``tau``.
    """
    _check_band(tau, band)
    ta = np.asarray(tau, dtype=float)
    d = 1.0 - ta * ta
    root = np.sqrt(np.abs(d))
    out = np.where(d > 0, 1.0 / root + 0j, 1j * np.sign(ta) / root)
    return complex(out) if out.ndim == 0 else out


def _complex_quad(f, a, b, settings: QuadratureSettings, points=None):
    res, err, info = integrate.quad_vec(
        f,
        a,
        b,
        epsabs=settings.abs_tol,
        epsrel=settings.rel_tol,
        limit=settings.max_subdivisions,
        points=points,
        full_output=True,
    )
    # status 2 is a roundoff warning at an already-met tolerance; keep it
    if info.status == 1:
        raise QuadratureNoConvergence(
            f"quadrature on [{a}, {b}] exhausted {settings.max_subdivisions} subdivisions (err {err:.2e})"
        )
    return complex(res), float(err)


def _phase_points(a: float, b: float, freq: float):
    """Split points one half-oscillation apart for ``exp(i freq t)`` on [a, b]."""
    step = math.pi / max(freq, 1.0)
    n = int((b - a) / step)
    if n < 2:
        return None
    return list(a + step * np.arange(1, n))


def finite_bessel_fourier(a: float, tau: float, settings: QuadratureSettings = DEFAULT_SETTINGS, cross_check: bool = False) -> complex:
    """``int_0^a J_0(t) e^{i tau t} dt`` by adaptive quadrature.

    The interval is pre-split between consecutive zeros of the fastest
    phase ``e^{i(|tau|+1)t}``.  With ``cross_check=True`` the result is
    compared with :func:`finite_bessel_fourier_convolution` and a
    disagreement above ten times the tolerance raises.
    """
    if a < 0:
        raise ValueError("a must be non-negative")
    if a == 0:
        return 0j

    def f(t):
        return bessel_j(0, t) * np.exp(1j * tau * t)

    value, _ = _complex_quad(f, 0.0, a, settings, points=_phase_points(0.0, a, abs(tau) + 1.0))
    if cross_check:
        other = finite_bessel_fourier_convolution(a, tau)
        tol = 10.0 * max(settings.abs_tol, settings.rel_tol * abs(value))
        if abs(value - other) > tol:
            raise QuadratureNoConvergence(
                f"quadrature and sinc/cosc representation disagree by {abs(value - other):.3e} > {tol:.3e}"
            )
    return value


def finite_bessel_fourier_convolution(a: float, tau: float) -> complex:
    """Same integral through the sinc/cosc representation.

    ``int_0^a J_0 e^{i tau t} = (1/pi) int_{tau-1}^{tau+1} a[sinc(ax) + i cosc(ax)] / sqrt(1-(x-tau)^2) dx``.
    With ``x = tau + cos(theta)`` the integrand becomes a smooth periodic
    function of ``theta``, so the trapezoid rule converges exponentially.
    """
    if a < 0:
        raise ValueError("a must be non-negative")
    if a == 0:
        return 0j
    n_nodes = int(math.ceil(1.5 * a)) + 96
    theta = 2.0 * np.pi * (np.arange(n_nodes) + 0.5) / n_nodes
    x = tau + np.cos(theta)
    sinc, cosc = sinc_cosc(a * x)
    return complex(np.mean(a * sinc + 1j * a * cosc))


def hankel_coefficients(n_terms: int = ASYMPTOTIC_PAIRS + 1) -> Tuple[np.ndarray, np.ndarray]:
    """Coefficients ``(c^+, c^-)`` of ``J_0(t) ~ sum_m (c_m^+ e^{it} + c_m^- e^{-it}) t^{-m-1/2}``."""
    a = _hankel_a(0, n_terms)
    m = np.arange(n_terms)
    norm = 1.0 / math.sqrt(2.0 * math.pi)
    plus = norm * np.exp(-0.25j * np.pi) * (1j) ** m * a
    minus = norm * np.exp(0.25j * np.pi) * (-1j) ** m * a
    return plus, minus


def oscillatory_power_tail(beta: float, nu: float, a: float) -> complex:
    """``int_a^inf e^{i beta t} t^{-nu} dt`` for ``a > 0``, ``beta != 0``, ``nu > 0``.

    ``nu = 1/2`` goes through the Fresnel functions; other orders rotate
    the contour onto ``t = a + i u / beta`` where the integrand decays like
    ``e^{-u}``.
    """
    if a <= 0:
        raise ValueError("a must be positive")
    if beta == 0:
        raise BandEdgeSingular("zero frequency: the tail integral diverges")
    if nu == 0.5:
        s = math.copysign(1.0, beta)
        x = math.sqrt(a * abs(beta))
        c, sv = fresnel(x)
        return math.sqrt(2.0 * math.pi / abs(beta)) * ((1 + 1j * s) / 2 - c - 1j * s * sv)

    def g(u):
        return np.exp(-u) * (a + 1j * u / beta) ** (-nu)

    val, _ = _complex_quad(g, 0.0, np.inf, QuadratureSettings(abs_tol=1e-15, rel_tol=1e-13))
    return 1j / beta * np.exp(1j * beta * a) * val


def tail_bessel_fourier(a: float, tau: float, j_max: int = ASYMPTOTIC_PAIRS, settings: QuadratureSettings = DEFAULT_SETTINGS, band: float = BAND_GUARD) -> complex:
    """``int_a^inf J_0(t) e^{i tau t} dt`` from the asymptotic expansion of ``J_0``.

    The leading ``t^{-1/2}`` terms are integrated exactly through Fresnel
    functions, the corrections ``m = 1 .. j_max`` by contour rotation.
    The neglected remainder is ``O(a^{-j_max - 1/2})``.
    """
    if a < settings.split_point:
        raise TooSmallA(f"a = {a} is below the split point {settings.split_point}")
    _check_band(tau, band)
    plus, minus = hankel_coefficients(j_max + 1)
    total = 0j
    for m in range(j_max + 1):
        nu = m + 0.5
        total += plus[m] * oscillatory_power_tail(tau + 1.0, nu, a)
        total += minus[m] * oscillatory_power_tail(tau - 1.0, nu, a)
    return total


def tail_leading_term(a: float, tau: float, band: float = BAND_GUARD) -> complex:
    """Explicit ``a^{-1/2}`` leading behaviour of the tail integral.

    ``sum_s c_0^s i e^{i(tau+s)a} / ((tau+s) sqrt(a))``; the error is
    ``O(a^{-3/2} |tau +- 1|^{-2})``.
    """
    _check_band(tau, band)
    plus, minus = hankel_coefficients(1)
    out = 0j
    for c, s in ((plus[0], 1.0), (minus[0], -1.0)):
        b = tau + s
        out += c * 1j * np.exp(1j * b * a) / (b * math.sqrt(a))
    return complex(out)


def bessel_fourier_tail(a: float, tau: float, settings: QuadratureSettings = DEFAULT_SETTINGS, band: float = BAND_GUARD) -> complex:
    """Tail integral for any ``a >= 0``: asymptotic above the split point,
    ``T(tau) - finite(a, tau)`` below it."""
    if a >= settings.split_point:
        return tail_bessel_fourier(a, tau, settings=settings, band=band)
    return halfline_bessel_fourier(tau, band=band) - finite_bessel_fourier(a, tau, settings)


# ---------------------------------------------------------------------------
# Square-root weighted integral and the Hilbert-Fourier transform
# ---------------------------------------------------------------------------


def _sqrt_weighted_panels(a: float, tau: float, n_nodes: int) -> complex:
    width = 0.5 * math.pi / (abs(tau) + 1.0)
    n_panels = max(1, int(math.ceil(a / width)))
    edges = np.linspace(0.0, a, n_panels + 1)
    total = 0j
    if n_panels > 1:
        x, w = np.polynomial.legendre.leggauss(n_nodes)
        lo = edges[:-2][:, None]
        hi = edges[1:-1][:, None]
        t = 0.5 * (hi - lo) * x[None, :] + 0.5 * (hi + lo)
        vals = bessel_j(0, t.ravel()).reshape(t.shape) * np.exp(1j * tau * t) / np.sqrt(a - t)
        total += np.sum(0.5 * (hi - lo) * (vals @ w[:, None]))
    # last panel: Gauss-Jacobi with weight (1 - x)^(-1/2) absorbs (a - t)^(-1/2)
    c = edges[-2]
    xj, wj = special.roots_jacobi(n_nodes, -0.5, 0.0)
    t = c + 0.5 * (a - c) * (1.0 + xj)
    vals = bessel_j(0, t) * np.exp(1j * tau * t)
    total += math.sqrt(0.5 * (a - c)) * np.dot(wj, vals)
    return complex(total)


def sqrt_weighted_bessel_integral(a: float, tau: float, settings: QuadratureSettings = DEFAULT_SETTINGS) -> complex:
    """``int_0^a J_0(t) e^{i tau t} / sqrt(a - t) dt`` by product quadrature.

    The endpoint weight is integrated exactly on the last panel
    (Gauss-Jacobi); node counts double until two passes agree.
    """
    if a <= 0:
        raise ValueError("a must be positive")
    n = 12
    prev = _sqrt_weighted_panels(a, tau, n)
    while n < settings.max_subdivisions:
        n *= 2
        cur = _sqrt_weighted_panels(a, tau, n)
        if abs(cur - prev) <= max(settings.abs_tol, settings.rel_tol * abs(cur)):
            return cur
        prev = cur
    raise QuadratureNoConvergence("sqrt-weighted product quadrature did not settle")


def sqrt_weighted_limit(tau_sign: int) -> complex:
    """Large-``a`` limit of :func:`sqrt_weighted_bessel_integral` at ``tau = +-1``.

    The non-oscillating Hankel term survives and ``int_0^a dt / sqrt(t(a-t)) = pi``,
    so the limit is ``pi`` times the matching leading coefficient.
    """
    plus, minus = hankel_coefficients(1)
    return complex(math.pi * (minus[0] if tau_sign > 0 else plus[0]))


def hilbert_of_bessel_fourier(tau, band: float = BAND_GUARD):
    """Hilbert transform of the Fourier transform of ``J_0``.

    Equals ``sqrt(2/pi) int_0^inf J_0(t) sin(tau t) dt``: zero inside the
    band and ``sqrt(2/pi) sign(tau) / sqrt(tau^2 - 1)`` outside.
    """
    _check_band(tau, band)
    ta = np.asarray(tau, dtype=float)
    d = ta * ta - 1.0
    out = np.where(d > 0, math.sqrt(2.0 / math.pi) * np.sign(ta) / np.sqrt(np.abs(d)), 0.0)
    return float(out) if out.ndim == 0 else out

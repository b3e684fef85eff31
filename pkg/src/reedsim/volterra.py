"""Time-domain solution of the impurity Volterra equation.

    psi(t) = 1 - i int_{t0}^t K(t - t') f(t') psi(t') dt',
    K(s) = J_0(g s) e^{i g xi s},   f(t) = V0 + h V(omega t).

Product trapezoid rule on a uniform grid with the diagonal term treated
implicitly.  The history sum is a causal convolution; it is evaluated by
splitting the time range recursively and adding each finished left half to
the right half with one FFT convolution, which keeps the cost at
``O(n log^2 n)`` while reproducing the step-by-step recursion.
"""

from __future__ import annotations

import csv
import math
from collections import OrderedDict
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy import signal

from .drive import DriveSpec, evaluate_drive, validate
from .errors import ConfigError, StepTooLarge
from .special_functions import bessel_j

__all__ = [
    "TimeGrid",
    "TimeSeries",
    "default_dt",
    "kernel_values",
    "evolve",
    "evolve_window",
    "spatial_reconstruct",
    "STABILITY_LIMIT",
]

STABILITY_LIMIT = 0.5
_LEAF = 64
_KERNEL_CACHE: "OrderedDict[tuple, np.ndarray]" = OrderedDict()
_KERNEL_CACHE_SIZE = 16


def default_dt(spec: DriveSpec) -> float:
    """``0.01 / max(g, omega)``: resolves both the kernel and the drive."""
    return 0.01 / max(spec.g, spec.omega)


@dataclass(frozen=True)
class TimeGrid:
    """Uniform grid ``t0, t0 + dt, ..., t_end``."""

    t0: float
    t_end: float
    dt: float

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if not self.t_end > self.t0:
            raise ValueError("t_end must exceed t0")
        span = self.t_end - self.t0
        n = round(span / self.dt)
        if n < 1 or abs(n * self.dt - span) > 1e-9 * max(1.0, span):
            raise ValueError(f"dt = {self.dt} does not divide t_end - t0 = {span}")

    @classmethod
    def from_steps(cls, t0: float, dt: float, n_steps: int) -> "TimeGrid":
        return cls(t0, t0 + n_steps * dt, dt)

    @property
    def n_steps(self) -> int:
        return int(round((self.t_end - self.t0) / self.dt))

    @property
    def times(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(self.n_steps + 1)

    def halved(self) -> "TimeGrid":
        return TimeGrid(self.t0, self.t_end, 0.5 * self.dt)


@dataclass
class TimeSeries:
    """Impurity amplitude ``psi_{t0}(xi, t)`` sampled on ``grid``."""

    grid: TimeGrid
    xi: float
    values: np.ndarray
    error_bound: Optional[np.ndarray] = None
    site_offset: int = 0

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=complex)
        if self.values.shape != (self.grid.n_steps + 1,):
            raise ValueError("values must have n_steps + 1 entries")

    @property
    def times(self) -> np.ndarray:
        return self.grid.times

    def at(self, t: float) -> complex:
        """Value at a grid time (nearest node)."""
        k = int(round((t - self.grid.t0) / self.grid.dt))
        return complex(self.values[k])

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t", "re", "im", "abs"])
            for t, v in zip(self.times, self.values):
                w.writerow([f"{t:.17g}", f"{v.real:.17g}", f"{v.imag:.17g}", f"{abs(v):.17g}"])

    @staticmethod
    def read_csv(path) -> np.ndarray:
        """Rows ``(t, re, im, abs)`` as a float array."""
        return np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)


def kernel_values(g: float, xi: float, dt: float, n: int, order: int = 0, use_cache: bool = True) -> np.ndarray:
    """``J_order(g s) e^{i g xi s}`` at ``s = 0, dt, ..., n dt``."""
    key = (float(g), float(xi), float(dt), int(n), int(order))
    if use_cache and key in _KERNEL_CACHE:
        _KERNEL_CACHE.move_to_end(key)
        return _KERNEL_CACHE[key]
    s = dt * np.arange(n + 1)
    k = bessel_j(order, g * s) * np.exp(1j * g * xi * s)
    if use_cache:
        k.setflags(write=False)
        _KERNEL_CACHE[key] = k
        while len(_KERNEL_CACHE) > _KERNEL_CACHE_SIZE:
            _KERNEL_CACHE.popitem(last=False)
    return k


def _field(spec: DriveSpec, times: np.ndarray) -> np.ndarray:
    if spec.h == 0:
        return np.full(times.shape, float(spec.V0))
    return spec.V0 + spec.h * evaluate_drive(spec, spec.omega * times)


def _check(spec: DriveSpec, xi: float, dt: float) -> None:
    problems = validate(spec)
    if problems:
        raise ConfigError("; ".join(problems))
    if not abs(xi) < 1:
        raise ValueError("xi must lie strictly inside (-1, 1)")
    load = dt * (abs(spec.V0) + spec.h * spec.drive_sup())
    if load > STABILITY_LIMIT:
        raise StepTooLarge(f"dt (|V0| + h sup|V|) = {load:.3g} exceeds {STABILITY_LIMIT}")


class _Stepper:
    """Shared state of one trapezoid solve.

    ``before_leaf(lo, hi)`` may return an addition to the history sums of a
    leaf block; ``after_leaf(lo, hi)`` runs once the block is solved.
    """

    def __init__(self, kernel: np.ndarray, f: np.ndarray, dt: float, before_leaf=None, after_leaf=None):
        n = f.size
        self.kernel = kernel
        self.f = f
        self.dt = dt
        self.psi = np.zeros(n, dtype=complex)
        self.hist = np.zeros(n, dtype=complex)
        self.u = np.zeros(n, dtype=complex)
        self.diag = 1.0 + 0.5j * dt * kernel[0] * f
        # kernel entries beyond this index are zero (truncated history)
        nz = np.nonzero(kernel)[0]
        self.support = int(nz[-1]) + 1 if nz.size else 1
        self.before_leaf = before_leaf
        self.after_leaf = after_leaf

    def _step(self, m: int, lo: int) -> None:
        if m == 0:
            self.psi[0] = 1.0
            self.u[0] = 0.5 * self.f[0]
        else:
            s = self.hist[m]
            if m > lo:
                s = s + np.dot(self.kernel[m - lo:0:-1], self.u[lo:m])
            self.psi[m] = (1.0 - 1j * self.dt * s) / self.diag[m]
            self.u[m] = self.f[m] * self.psi[m]

    def run_direct(self) -> np.ndarray:
        for m in range(self.f.size):
            self._step(m, 0)
        return self.psi

    def run_fft(self) -> np.ndarray:
        self._rec(0, self.f.size)
        return self.psi

    def _rec(self, lo: int, hi: int) -> None:
        if hi - lo <= _LEAF:
            if self.before_leaf is not None:
                self.hist[lo:hi] += self.before_leaf(lo, hi)
            for m in range(lo, hi):
                self._step(m, lo)
            if self.after_leaf is not None:
                self.after_leaf(lo, hi)
            return
        mid = (lo + hi) // 2
        self._rec(lo, mid)
        span = min(hi - lo, self.support)
        conv = signal.fftconvolve(self.u[lo:mid], self.kernel[:span])
        width = min(hi, lo + conv.size) - mid
        if width > 0:
            self.hist[mid:mid + width] += conv[mid - lo: mid - lo + width]
        self._rec(mid, hi)


def evolve(spec: DriveSpec, xi: float, grid: TimeGrid, method: str = "fft", use_cache: bool = True) -> TimeSeries:
    """Solve for ``psi_{t0}(xi, t)`` on ``grid``.

    Parameters
    ----------
    method : {"fft", "direct"}
        ``"direct"`` forms every history sum as a dot product (``O(n^2)``);
        ``"fft"`` accumulates the same sums blockwise by FFT convolution.
        Both implement the identical scheme.
    use_cache : bool
        Reuse kernel samples across calls with the same ``(g, xi, dt, n)``.

    Raises
    ------
    StepTooLarge
        If ``dt (|V0| + h sup|V|) > 0.5``.
    """
    _check(spec, xi, grid.dt)
    n = grid.n_steps
    f = _field(spec, grid.times)
    if not np.any(f):
        return TimeSeries(grid, xi, np.ones(n + 1, dtype=complex))
    kernel = kernel_values(spec.g, xi, grid.dt, n, use_cache=use_cache)
    stepper = _Stepper(kernel, f, grid.dt)
    if method == "direct":
        psi = stepper.run_direct()
    elif method == "fft":
        psi = stepper.run_fft()
    else:
        raise ValueError(f"unknown method {method!r}")
    return TimeSeries(grid, xi, psi.copy())


def _harmonics(spec: DriveSpec) -> np.ndarray:
    reach = 3 * max(spec.n_max, 1)
    return np.arange(-reach, reach + 1)


def window_tail_bound(spec: DriveSpec, xi: float, window: float, amplitudes: np.ndarray, harmonics: np.ndarray) -> float:
    """Size of the history older than ``window`` for a periodic integrand.

    Each harmonic ``u_n e^{i n omega t}`` of the integrand leaves behind
    ``int_{window}^inf J_0(g s) e^{i(g xi - n omega) s} ds``.  Its leading
    behaviour is ``sum_s c_s e^{i b_s g W} / (b_s sqrt(g W))`` with
    ``b_s = tau_n + s``; the bound takes moduli term by term, doubles the
    result to cover the next orders, and so decays exactly like
    ``window^{-1/2}``.
    """
    c0 = 1.0 / math.sqrt(2.0 * math.pi)
    a = spec.g * window
    total = 0.0
    for a_n, n in zip(amplitudes, harmonics):
        if a_n == 0:
            continue
        tau = xi - n * spec.omega / spec.g
        gap = max(min(abs(tau + 1.0), abs(tau - 1.0)), 1e-3)
        far = max(abs(tau + 1.0), abs(tau - 1.0))
        total += abs(a_n) * c0 * (1.0 / gap + 1.0 / far) / (spec.g * math.sqrt(a))
    return 2.0 * total


def evolve_window(spec: DriveSpec, xi: float, grid: TimeGrid, window: float) -> TimeSeries:
    """Solve with history older than ``window`` replaced by a periodic model.

    The integrand ``u = f psi`` of the dropped history is projected on the
    drive harmonics over the most recent period before the cut; the dropped
    sum then reduces to running sums of ``K(s) e^{-i n omega s}``.  The
    returned series carries ``error_bound``, the size of the dropped
    history from :func:`window_tail_bound`.

    ``window`` must span at least 64 steps (one solver block).
    """
    if not window > 0:
        raise ValueError("window must be positive")
    _check(spec, xi, grid.dt)
    n = grid.n_steps
    nw = int(round(window / grid.dt))
    if nw >= n:
        out = evolve(spec, xi, grid)
        out.error_bound = np.zeros(n + 1)
        return out
    if nw < _LEAF:
        raise ValueError(f"window must cover at least {_LEAF} time steps")
    dt = grid.dt
    times = grid.times
    f = _field(spec, times)
    full_kernel = kernel_values(spec.g, xi, dt, n)
    kernel = full_kernel.copy()
    kernel[nw + 1:] = 0.0
    harm = _harmonics(spec)
    n_per = max(1, int(round(2 * math.pi / spec.omega / dt)))
    # running sums Q_n[s] = sum_{s' <= s} K_s' e^{-i n omega s' dt}
    weighted = full_kernel[None, :] * np.exp(-1j * spec.omega * np.outer(harm, dt * np.arange(n + 1)))
    Q = np.cumsum(weighted, axis=1)
    # running projections S_n[k] = sum_{k' < k} u_k' e^{-i n omega t_k'}
    S = np.zeros((harm.size, n + 2), dtype=complex)
    stepper = None

    def before_leaf(lo, hi):
        m = np.arange(lo, hi)
        cut = m - nw - 1  # newest dropped index
        out = np.zeros(hi - lo, dtype=complex)
        for i in np.nonzero((cut >= 0) & (cut < n_per))[0]:
            # short dropped segment: sum it exactly
            ks = np.arange(0, cut[i] + 1)
            out[i] = np.dot(full_kernel[m[i] - ks], stepper.u[ks])
        sel = cut >= n_per
        if np.any(sel):
            ms, cs = m[sel], cut[sel]
            coef = (S[:, cs + 1] - S[:, cs + 1 - n_per]) / n_per
            # the oldest node (s = m) carries trapezoid weight 1/2
            dropped = Q[:, ms] - Q[:, nw][:, None] - 0.5 * weighted[:, ms]
            rot = np.exp(1j * spec.omega * np.outer(harm, times[ms]))
            out[sel] = np.sum(coef * rot * dropped, axis=0)
        return out

    def after_leaf(lo, hi):
        terms = stepper.u[lo:hi][None, :] * np.exp(-1j * spec.omega * np.outer(harm, times[lo:hi]))
        S[:, lo + 1:hi + 1] = S[:, lo][:, None] + np.cumsum(terms, axis=1)

    stepper = _Stepper(kernel, f, dt, before_leaf=before_leaf, after_leaf=after_leaf)
    psi = stepper.run_fft()
    # periodic amplitudes from the final period for the reported bound
    amps = (S[:, n + 1] - S[:, n + 1 - n_per]) / n_per
    bound = window_tail_bound(spec, xi, window, amps, harm)
    err = np.where(np.arange(n + 1) > nw, bound, 0.0)
    return TimeSeries(grid, xi, psi.copy(), error_bound=err)


def spatial_reconstruct(spec: DriveSpec, q: float, site_offset: int, impurity_series: TimeSeries) -> TimeSeries:
    """Amplitude at site ``kappa + site_offset`` from the impurity history.

    ``Psi_j(t) = 1 - i e^{i q d} int J_d(g(t - t')) e^{i g xi (t - t')} f(t') psi(t') dt'``
    with ``d = site_offset`` and ``xi = cos q``; same trapezoid weights as
    :func:`evolve`, so ``d = 0`` returns the impurity series itself.
    """
    xi = impurity_series.xi
    if abs(math.cos(q) - xi) > 1e-12:
        raise ValueError(f"cos(q) = {math.cos(q)} does not match the series xi = {xi}")
    grid = impurity_series.grid
    n = grid.n_steps
    f = _field(spec, grid.times)
    if not np.any(f):
        return TimeSeries(grid, xi, np.ones(n + 1, dtype=complex), site_offset=site_offset)
    d = int(site_offset)
    kernel = kernel_values(spec.g, xi, grid.dt, n, order=d)
    u = f * impurity_series.values
    w = np.ones(n + 1)
    w[0] = 0.5
    conv = signal.fftconvolve(w * u, kernel)[: n + 1]
    # trapezoid end correction at t' = t
    conv = conv - 0.5 * kernel[0] * u
    conv[0] = 0.0
    vals = 1.0 - 1j * np.exp(1j * q * d) * grid.dt * conv
    return TimeSeries(grid, xi, vals, site_offset=d)

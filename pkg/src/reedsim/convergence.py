"""Approach of the finite-start solution to the periodic asymptotic state.

``Delta_{t0}(t) = psi_inf(t) - psi_{t0}(t)`` is sampled over one drive
period after a common observation time for a sweep of start times; the
envelope is fitted against ``t - t0`` on log-log axes.
"""

from __future__ import annotations

import csv
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from scipy import stats

from .drive import DEFAULT_EPSILON, DriveSpec, RegimeTag
from .propagators import RenormContext, j_continuous
from .reed_series import DEFAULT_ORDER, ModeVector, assemble_state, fixed_point_oracle, psi_coefficients
from .special_functions import QuadratureSettings, bessel_fourier_tail, halfline_bessel_fourier
from .volterra import TimeGrid, TimeSeries, default_dt, evolve

__all__ = [
    "ConvergenceReport",
    "fit_decay",
    "log_spaced_offsets",
    "asymptotic_state",
    "measure_delta",
    "memory_tail_q0",
    "mean_scaling",
    "static_state",
    "static_bound_state",
    "thread_count",
]


def thread_count() -> int:
    """Worker cap from ``REEDSIM_THREADS`` (default 1)."""
    try:
        return max(1, int(os.environ.get("REEDSIM_THREADS", "1")))
    except ValueError:
        return 1


@dataclass
class ConvergenceReport:
    """Envelope samples and the fitted power law.

    ``samples`` holds ``(t - t0, envelope)`` pairs in increasing ``t - t0``;
    ``bound_constant`` is the largest ``sqrt(t - t0) * envelope``.
    """

    samples: List[Tuple[float, float]]
    slope: float
    slope_ci: Tuple[float, float]
    bound_constant: float
    intercept: float = 0.0

    def __post_init__(self):
        ts = [s[0] for s in self.samples]
        if any(b <= a for a, b in zip(ts, ts[1:])):
            raise ValueError("samples must be strictly increasing in t - t0")
        if any(e < 0 for _, e in self.samples):
            raise ValueError("envelopes must be non-negative")

    @property
    def offsets(self) -> np.ndarray:
        return np.array([s[0] for s in self.samples])

    @property
    def envelopes(self) -> np.ndarray:
        return np.array([s[1] for s in self.samples])

    @property
    def scaled(self) -> np.ndarray:
        """``sqrt(t - t0) * envelope`` per sample."""
        return np.sqrt(self.offsets) * self.envelopes

    def trend_ratio(self) -> float:
        """Max of the scaled envelope over the later half of the samples
        divided by its max over the earlier half."""
        s = self.scaled
        half = len(s) // 2
        return float(s[half:].max() / s[:half].max())

    def no_upward_trend(self, tolerance: float = 0.25) -> bool:
        """Whether ``sqrt(t - t0) * envelope`` stays flat or falls.

        The later-half maximum may exceed the earlier-half maximum by at
        most ``tolerance`` (residual beats), and the slope confidence
        interval must reach ``-1/2`` or below.
        """
        return self.trend_ratio() <= 1.0 + tolerance and self.slope_ci[0] <= -0.5

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t_minus_t0", "envelope", "sqrt_scaled"])
            for (t, e), s in zip(self.samples, self.scaled):
                w.writerow([f"{t:.17g}", f"{e:.17g}", f"{s:.17g}"])

    def summary(self) -> dict:
        return {
            "slope": self.slope,
            "slope_ci": list(self.slope_ci),
            "bound_constant": self.bound_constant,
            "intercept": self.intercept,
            "n_samples": len(self.samples),
            "trend_ratio": self.trend_ratio() if len(self.samples) >= 2 else None,
            "no_upward_trend": self.no_upward_trend() if len(self.samples) >= 2 else None,
        }

    def to_json(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.summary(), fh, indent=2)


def fit_decay(offsets: Sequence[float], envelopes: Sequence[float], confidence: float = 0.95) -> ConvergenceReport:
    """Least-squares fit of ``log envelope`` against ``log(t - t0)``."""
    t = np.asarray(offsets, dtype=float)
    e = np.asarray(envelopes, dtype=float)
    if t.size < 3:
        raise ValueError("at least three samples are needed for a fit")
    res = stats.linregress(np.log(t), np.log(e))
    q = stats.t.ppf(0.5 + 0.5 * confidence, t.size - 2)
    half = q * res.stderr
    return ConvergenceReport(
        samples=[(float(a), float(b)) for a, b in zip(t, e)],
        slope=float(res.slope),
        slope_ci=(float(res.slope - half), float(res.slope + half)),
        bound_constant=float(np.max(np.sqrt(t) * e)),
        intercept=float(res.intercept),
    )


def log_spaced_offsets(lo: float = 10.0, hi: float = 1000.0, count: int = 10) -> np.ndarray:
    return np.geomspace(lo, hi, count)


def static_state(spec: DriveSpec, xi: float, convention: Optional[str] = None) -> complex:
    """``1 / (1 + i V0 j(xi, 0, g))``: the periodic state at zero drive."""
    return 1.0 / (1.0 + 1j * spec.V0 * j_continuous(xi, 0.0, spec.g, convention))


def static_bound_state(xi: float, V0: float, g: float) -> Tuple[float, complex]:
    """Frequency and amplitude of the undamped oscillation at zero drive.

    With a static field the transformed equation has, besides the branch
    cut of the band, a pole outside it at ``x = sign(V0) sqrt(g^2 + V0^2)``.
    It contributes ``R e^{i w (t - t0)}`` with ``w = g xi - x`` and
    ``R = -V0^2 / (w x)`` that never decays; the remainder decays like
    ``(t - t0)^{-1/2}``.
    """
    if V0 == 0:
        return 0.0, 0j
    x = math.copysign(math.hypot(g, V0), V0)
    w = g * xi - x
    return w, complex(-V0 * V0 / (w * x))


def asymptotic_state(spec: DriveSpec, xi: float, M: int = 32, convention: Optional[str] = None, epsilon: float = DEFAULT_EPSILON) -> Callable[[np.ndarray], np.ndarray]:
    """Periodic state ``t -> psi_inf(xi, t)`` from the dense mode solve."""
    if spec.h == 0:
        value = static_state(spec, xi, convention)
        return lambda t: np.full(np.shape(t), value, dtype=complex)
    ctx = RenormContext.from_spec(spec, epsilon, convention)
    modes = fixed_point_oracle(xi, ctx, M)
    omega = spec.omega
    return lambda t: assemble_state(modes, omega * np.asarray(t, dtype=float))


def _delta_envelope(args) -> float:
    spec, xi, t0, t_obs, dt, convention, M = args
    period = 2.0 * math.pi / spec.omega
    n = int(round((t_obs + period - t0) / dt))
    grid = TimeGrid.from_steps(t0, dt, n)
    series = evolve(spec, xi, grid)
    k0 = int(round((t_obs - t0) / dt))
    ts = series.times[k0:]
    target = asymptotic_state(spec, xi, M, convention)(ts)
    return float(np.max(np.abs(target - series.values[k0:])))


def measure_delta(
    spec: DriveSpec,
    xi: float,
    t0_list: Sequence[float],
    horizon: float,
    dt: Optional[float] = None,
    convention: Optional[str] = None,
    M: int = 32,
    solver: Optional[Callable[[DriveSpec, float, TimeGrid], TimeSeries]] = None,
    asymptotic: Optional[Callable[[np.ndarray], np.ndarray]] = None,
    workers: Optional[int] = None,
    phase_lock: bool = True,
) -> ConvergenceReport:
    """Envelope of ``|psi_inf - psi_{t0}|`` for each start time.

    Parameters
    ----------
    t0_list : sequence of float
        Start times, all below ``horizon``.
    horizon : float
        Common observation time; the envelope is the sup of ``|Delta|``
        over ``[horizon, horizon + 2 pi / omega]``.
    dt : float, optional
        Step size, default ``0.01 / max(g, omega)``.
    convention : str, optional
        Propagator convention used for ``psi_inf``.
    solver, asymptotic : callable, optional
        Replacements for :func:`evolve` and the mode-solve asymptotic
        state (used to self-test the fitting on synthetic data).
    workers : int, optional
        Parallel processes; defaults to ``REEDSIM_THREADS``.
    phase_lock : bool
        Round every offset ``horizon - t0`` to a whole number of drive
        periods (kept inside the requested range, duplicates dropped), so
        all starts see the drive at the same phase.  The decay constant
        depends on that phase; mixing phases scatters the envelopes by a
        factor of several and biases the fitted slope.
    """
    dt = default_dt(spec) if dt is None else dt
    t0s = sorted((float(t) for t in t0_list), reverse=True)
    if any(t0 >= horizon for t0 in t0s):
        raise ValueError("every t0 must be below the observation time")
    raw = np.array([horizon - t0 for t0 in t0s])
    if phase_lock:
        period = 2.0 * math.pi / spec.omega
        k = np.round(raw / period)
        k = np.clip(k, max(1.0, math.ceil(raw.min() / period - 1e-9)), max(1.0, math.floor(raw.max() / period + 1e-9)))
        raw = np.unique(k) * period
    # snap each offset to the step so the observation window starts on a node
    offsets = sorted({dt * round(o / dt) for o in raw})
    t0s = [horizon - o for o in offsets]
    workers = thread_count() if workers is None else workers
    if solver is None and asymptotic is None:
        jobs = [(spec, xi, t0, horizon, dt, convention, M) for t0 in t0s]
        if workers > 1 and len(jobs) > 1:
            with ProcessPoolExecutor(max_workers=min(workers, len(jobs))) as pool:
                env = list(pool.map(_delta_envelope, jobs))
        else:
            env = [_delta_envelope(j) for j in jobs]
    else:
        solver = evolve if solver is None else solver
        target_fn = asymptotic if asymptotic is not None else asymptotic_state(spec, xi, M, convention)
        period = 2.0 * math.pi / spec.omega
        env = []
        for t0 in t0s:
            n = int(round((horizon + period - t0) / dt))
            grid = TimeGrid.from_steps(t0, dt, n)
            series = solver(spec, xi, grid)
            k0 = int(round((horizon - t0) / dt))
            ts = series.times[k0:]
            env.append(float(np.max(np.abs(target_fn(ts) - series.values[k0:]))))
    return fit_decay(offsets, env)


def memory_tail_q0(spec: DriveSpec, xi: float, n: int, t_minus_t0: float, modes: Optional[ModeVector] = None, settings: QuadratureSettings = QuadratureSettings()) -> complex:
    """Leading memory correction carried by harmonic ``n``.

    ``(psi_inf,n - delta_{n0}) * T(g(t - t0), tau_n) / T(0, tau_n)`` where
    ``T(a, tau) = int_a^inf J_0(s) e^{i tau s} ds`` and
    ``tau_n = xi - n omega / g``: the fraction of the infinite-past
    response that a start at ``t0`` has not yet built up.
    """
    if modes is None:
        ctx = RenormContext.from_spec(spec)
        modes = fixed_point_oracle(xi, ctx, max(16, abs(n) + 4))
    i = int(np.argmin(np.abs(modes.xi - xi)))
    if abs(n) > modes.mu_cutoff:
        return 0j
    pref = complex(modes.values[n + modes.mu_cutoff, i])  # already psi_n - delta_{n0}
    tau = xi - n * spec.omega / spec.g
    full = halfline_bessel_fourier(tau)
    a = spec.g * t_minus_t0
    tail = full if a == 0 else bessel_fourier_tail(a, tau, settings)
    return pref * tail / full


def mean_scaling(spec_template: DriveSpec, h_list: Sequence[float], xi: float = 0.5, N_max: int = DEFAULT_ORDER, per_omega: bool = False, epsilon: float = DEFAULT_EPSILON) -> List[Tuple[float, float]]:
    """Normalized shift of the period-averaged state, ``|psi_0(h) - psi_0(0)| / h^2``.

    With ``per_omega`` the normalization is ``(h / omega)^2`` instead.
    """
    base_ctx = RenormContext.from_spec(spec_template.replace(h=0.0), epsilon)
    base = psi_coefficients([xi], base_ctx, N_max, mu_cutoff=0)[0][0]
    out = []
    for h in h_list:
        if h == 0:
            out.append((0.0, 0.0))
            continue
        ctx = RenormContext.from_spec(spec_template.replace(h=h), epsilon)
        mean = psi_coefficients([xi], ctx, N_max, mu_cutoff=0)[0][0]
        scale = (h / spec_template.omega) ** 2 if per_omega else h * h
        out.append((float(h), float(abs(mean - base) / scale)))
    return out

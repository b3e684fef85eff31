"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Criteria that the implementation shows to be unattainable as stated are
marked strict ``xfail``; the check itself is kept at full strength.
"""

import itertools
import math
import time

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES
from reedsim.convergence import asymptotic_state, fit_decay, log_spaced_offsets, mean_scaling, measure_delta, static_state
from reedsim.drive import DriveSpec, Regime, RegimeTag
from reedsim.propagators import (
    RenormContext,
    chebyshev_nodes,
    epsilon_bar,
    epsilon_bar_band,
    j0_renorm_resonant,
    j_k,
    j_renorm_nondegenerate,
)
from reedsim.reed_series import enumerate_reeds, fixed_point_oracle, psi_coefficients, residuals
from reedsim.special_functions import finite_bessel_fourier, halfline_bessel_fourier, tail_bessel_fourier
from reedsim.volterra import TimeGrid, evolve

WORKERS = 4
GRID33 = chebyshev_nodes(33)
GRID101 = chebyshev_nodes(101)
# the outer 101-node Chebyshev points sit 1.2e-4 from the edge in relative units
FINE_BAND = 1e-5


def verdict(number, ok, detail):
    line = f"criterion {number:>3}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def test_criterion_01_integral_consistency():
    start = time.perf_counter()
    worst = 0.0
    for tau in (0.0, 0.5, 2.0, 5.0):
        total = finite_bessel_fourier(50.0, tau) + tail_bessel_fourier(50.0, tau)
        worst = max(worst, abs(total - halfline_bessel_fourier(tau)))
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-6 and elapsed < 1.0
    assert verdict(1, ok, f"max discrepancy {worst:.2e} (<= 1e-6), {elapsed:.2f} s (< 1 s)")


def test_criterion_02_sign_lock():
    spec = DriveSpec.cosine(1.0, 4.0, 0.2)
    T, dt = 1000.0, 0.0025
    start = time.perf_counter()
    period = 2 * math.pi / spec.omega
    lines, ok = [], True
    for xi in (0.0, 0.5, -0.5):
        # calibrate the decay constant on shorter offsets with the module convention
        cal = measure_delta(spec, xi, [300.0 - s for s in log_spaced_offsets(10, 290, 8)], 300.0, dt=dt, workers=WORKERS)
        tol = 5 * cal.bound_constant / math.sqrt(T)
        series = evolve(spec, xi, TimeGrid(0.0, T, dt))
        ts = np.array([T - k * period / 5 for k in range(5)])
        vals = np.array([series.at(t) for t in ts])
        dev = {c: float(np.max(np.abs(asymptotic_state(spec, xi, 32, c)(ts) - vals))) for c in ("causal", "anticausal")}
        good = dev["causal"] <= tol and dev["anticausal"] > tol
        ok &= good
        lines.append(f"xi={xi:+.1f}: causal {dev['causal']:.1e}, opposite {dev['anticausal']:.1e}, tol {tol:.1e}")
    elapsed = time.perf_counter() - start
    ok &= elapsed < 120
    assert verdict(2, ok, "; ".join(lines) + f"; {elapsed:.0f} s")


def test_criterion_03_series_vs_solve():
    start = time.perf_counter()
    configs = {
        "resonant": DriveSpec.cosine(1.0, 4.0, 0.2),
        "non-degenerate": DriveSpec.cosine(1.0, 4.0, 0.2, V0=2.0),
    }
    worst = {}
    for name, spec in configs.items():
        ctx = RenormContext.from_spec(spec)
        assert ctx.gamma == pytest.approx(0.05)
        series = psi_coefficients(GRID33, ctx, N_max=8, mu_cutoff=4)
        oracle = fixed_point_oracle(GRID33, ctx, 32)
        worst[name] = float(np.max(np.abs(series.values - oracle.values[32 - 4:32 + 5])))
    elapsed = time.perf_counter() - start
    ok = max(worst.values()) <= 1e-4 and elapsed < 60
    assert verdict(3, ok, ", ".join(f"{k} {v:.1e}" for k, v in worst.items()) + f" (<= 1e-4), {elapsed:.1f} s")


def test_criterion_04_fixed_point_residual():
    ok, parts = True, []
    for name, spec in (("resonant", DriveSpec.cosine(1.0, 4.0, 0.2)), ("non-degenerate", DriveSpec.cosine(1.0, 4.0, 0.2, V0=2.0))):
        ctx = RenormContext.from_spec(spec)
        oracle_res = residuals(fixed_point_oracle(GRID33, ctx, 32), ctx).max()
        series = psi_coefficients(GRID33, ctx, N_max=8, mu_cutoff=8)
        series_res = residuals(series, ctx).max()
        tail = series.trunc_err.max()
        ok &= oracle_res <= 1e-8 and series_res <= tail
        parts.append(f"{name}: oracle {oracle_res:.1e} (<= 1e-8), series {series_res:.1e} (<= tail {tail:.1e})")
    assert verdict(4, ok, "; ".join(parts))


def test_criterion_05_decay_rate():
    spec = DriveSpec.cosine(1.0, 4.0, 0.1)
    T = 1000.0
    start = time.perf_counter()
    ok, parts = True, []
    for xi in (0.0, 0.5):
        rep = measure_delta(spec, xi, T - log_spaced_offsets(10, 1000, 20), T, workers=WORKERS)
        good = -0.65 <= rep.slope <= -0.35 and rep.no_upward_trend()
        ok &= good
        parts.append(f"xi={xi}: slope {rep.slope:.3f} over {len(rep.samples)} offsets, trend {rep.trend_ratio():.2f}")
    elapsed = time.perf_counter() - start
    ok &= elapsed < 600
    assert verdict(5, ok, "; ".join(parts) + f" (slope in [-0.65, -0.35], trend <= 1.25); {elapsed:.0f} s")


@pytest.mark.xfail(strict=True, reason="undamped bound-state oscillation outside the band: |psi - psi0| tends to a nonzero constant")
def test_criterion_06_static_field():
    spec = DriveSpec.cosine(1.0, 4.0, 0.0, V0=0.5)
    dt, T = 0.0025, 1000.0
    period = 2 * math.pi / spec.omega
    offsets = log_spaced_offsets(10, T, 20)
    ok, parts = True, []
    for xi in (0.0, 0.5):
        # time-translation invariance: one run from t0 = 0 covers every offset
        series = evolve(spec, xi, TimeGrid.from_steps(0.0, dt, int(round((T + period) / dt))))
        dev = np.abs(series.values - static_state(spec, xi))
        env = []
        for s in offsets:
            k0 = int(round(s / dt))
            env.append(dev[k0:k0 + int(round(period / dt)) + 1].max())
        rep = fit_decay(offsets, env)
        good = rep.no_upward_trend()
        ok &= good
        parts.append(f"xi={xi}: sqrt-scaled {rep.scaled[0]:.2f} -> {rep.scaled[-1]:.2f}, trend {rep.trend_ratio():.2f} (<= 1.25)")
    assert verdict(6, ok, "; ".join(parts))


def test_criterion_07_mean_shift():
    spec = DriveSpec.cosine(1.0, 4.0, 0.1)
    ok, parts = True, []
    # at xi = 0 the mean shift vanishes identically by symmetry, so sample off-centre nodes
    for xi in (0.5, -0.7):
        vals = [v for _, v in mean_scaling(spec, [0.1, 0.05, 0.025], xi=xi)]
        spread = max(abs(a / b - 1) for a, b in zip(vals, vals[1:]))
        ok &= spread <= 0.25 and min(vals) > 0
        parts.append(f"xi={xi}: {', '.join(f'{v:.5f}' for v in vals)} (spread {spread:.1e})")
    assert verdict(7, ok, "; ".join(parts) + " (<= 25%)")


def test_criterion_08a_resonant_bounds():
    alpha = 0.25
    eb = epsilon_bar(alpha)
    violations = 0
    for k in itertools.chain(range(-6, 0), range(1, 7)):
        violations += int(np.sum(np.abs(j_k(k, GRID101, alpha, band=FINE_BAND)) > 1 / math.sqrt(2 * eb)))
    for gamma in (0.01, 0.05):
        spec = DriveSpec.cosine(1.0, 4.0, 4.0 * gamma)
        ctx = RenormContext.from_spec(spec, band=FINE_BAND)
        bound = math.sqrt(2 * eb) / (gamma**2 * spec.l2_norm_sq())
        violations += int(np.sum(np.abs(j0_renorm_resonant(GRID101, ctx)) > bound))
    assert verdict("8a", violations == 0, f"|j_k| and resonant |j0^R| bounds: {violations} violations")


@pytest.mark.xfail(strict=True, reason="1 + i V0 j_mu has a real zero outside the band, so |j^R| is unbounded near it")
def test_criterion_08b_nondegenerate_bound():
    alpha = 0.25
    eb = epsilon_bar_band(alpha)
    violations, worst = 0, 0.0
    for v0 in (0.1, 0.5, 2.0):
        ctx = RenormContext.from_spec(DriveSpec.cosine(1.0, 4.0, 0.2, V0=4.0 * v0), band=FINE_BAND)
        for mu in range(-6, 7):
            b = 1 / math.sqrt(2 * alpha * eb + eb * eb) if abs(mu) >= 2 * alpha + eb else 1 / v0
            r = np.abs(j_renorm_nondegenerate(mu, GRID101, ctx)) / b
            violations += int(np.sum(r > 1))
            worst = max(worst, float(r.max()))
    assert verdict("8b", violations == 0, f"non-degenerate |j^R| bound: {violations} violations, worst ratio {worst:.3g}")


def test_criterion_09_solver_order():
    spec = DriveSpec.cosine(1.0, 4.0, 0.1)
    grid = TimeGrid(0.0, 50.0, 0.01)
    v = [evolve(spec, 0.3, g).at(50.0) for g in (grid, grid.halved(), grid.halved().halved())]
    ratio = abs(v[0] - v[1]) / abs(v[1] - v[2])
    assert verdict(9, 3 <= ratio <= 5, f"Richardson ratio {ratio:.4f} (in [3, 5])")


def _brute(N, mu, cutoff, resonant):
    alphabet = [n for n in range(-cutoff, cutoff + 1) if n]
    out = []
    for t in itertools.product(alphabet, repeat=N):
        mom = list(itertools.accumulate(t))
        if mom[-1] != mu:
            continue
        if resonant and any(mom[i] == 0 and mom[i + 2] == 0 for i in range(N - 2)):
            continue
        out.append(t)
    return out


def test_criterion_10a_enumeration():
    mismatches = 0
    for regime in (Regime(RegimeTag.MODERATELY_RESONANT, 0.1), Regime(RegimeTag.NON_DEGENERATE)):
        for N in range(1, 6):
            for cutoff in range(1, 4):
                for mu in range(-3, 4):
                    got = [r.modes for r in enumerate_reeds(N, mu, cutoff, regime)]
                    mismatches += int(got != _brute(N, mu, cutoff, regime.resonant))
    assert verdict("10a", mismatches == 0, f"enumeration vs brute force: {mismatches} mismatches")


@pytest.mark.xfail(strict=True, reason="a reed of order N = 2 already has one zero line; the sharp bound is (N + 1)/3")
def test_criterion_10b_zero_line_bound():
    regime = Regime(RegimeTag.MODERATELY_RESONANT, 0.1)
    bad, example = 0, None
    for N in range(1, 6):
        for cutoff in range(1, 4):
            for mu in range(-3, 4):
                for r in enumerate_reeds(N, mu, cutoff, regime):
                    if r.zero_lines > N / 3:
                        bad += 1
                        example = example or r.modes
    assert verdict("10b", bad == 0, f"zero lines <= N/3: {bad} violating reeds, e.g. {example}")


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-v", "-s"]))

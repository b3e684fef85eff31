"""Command-line front end.

Subcommands: ``asymptotic``, ``evolve``, ``converge``, ``integrals`` and
``reconstruct``.  Every run writes a ``<subcommand>.manifest.json`` next to
its outputs recording the configuration, the arguments and the wall time.

Exit codes: 0 success, 2 bad configuration or arguments, 3 unsupported
regime, 4 series divergence, 5 step too large, 6 acceptance check failed.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from pathlib import Path
from typing import List, Optional

import numpy as np

from . import __version__
from .convergence import log_spaced_offsets, measure_delta
from .drive import DriveSpec, classify, validate
from .errors import (
    BandEdgeSingular,
    ConfigError,
    IllConditioned,
    ReedsimError,
    SeriesNotConverging,
    StepTooLarge,
    TooSmallA,
    UnsupportedRegime,
)
from .propagators import RenormContext, chebyshev_nodes
from .reed_series import fixed_point_oracle, psi_coefficients, residuals
from . import special_functions as sf
from .volterra import TimeGrid, TimeSeries, default_dt, evolve, evolve_window, spatial_reconstruct

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_REGIME = 3
EXIT_SERIES = 4
EXIT_STEP = 5
EXIT_ACCEPTANCE = 6

SLOPE_BAND = (-0.65, -0.35)


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def _load_spec(args) -> DriveSpec:
    if args.config is None:
        raise ConfigError("--config is required")
    spec = DriveSpec.from_json(args.config)
    problems = validate(spec)
    if problems:
        raise ConfigError("; ".join(problems))
    return spec


def _xi_nodes(args) -> np.ndarray:
    if args.xi is not None:
        return np.array([float(v) for v in str(args.xi).split(",")])
    kind, _, count = args.xi_grid.partition(":")
    if kind != "chebyshev" or not count.isdigit() or int(count) < 1:
        raise ConfigError(f"unsupported --xi-grid {args.xi_grid!r}; use chebyshev:N")
    return chebyshev_nodes(int(count))


class _Run:
    """Collects outputs and writes the manifest."""

    def __init__(self, args, subcommand: str):
        self.args = args
        self.subcommand = subcommand
        self.out = Path(args.out)
        self.out.mkdir(parents=True, exist_ok=True)
        self.files: List[str] = []
        self.start = time.perf_counter()
        self.extra: dict = {}

    def path(self, name: str) -> Path:
        p = self.out / name
        self.files.append(str(p))
        return p

    def finish(self, spec: Optional[DriveSpec] = None, status: int = 0) -> int:
        overrides = {k: v for k, v in vars(self.args).items() if k not in ("func",)}
        manifest = {
            "tool": "reedsim",
            "version": __version__,
            "subcommand": self.subcommand,
            "config_path": self.args.config,
            "config": spec.to_config() if spec is not None else None,
            "arguments": overrides,
            "outputs": self.files,
            "wall_time_s": time.perf_counter() - self.start,
            "exit_code": status,
        }
        manifest.update(self.extra)
        (self.out / f"{self.subcommand}.manifest.json").write_text(json.dumps(manifest, indent=2, default=str))
        return status


def cmd_asymptotic(args) -> int:
    spec = _load_spec(args)
    run = _Run(args, "asymptotic")
    ctx = RenormContext.from_spec(spec, args.epsilon)
    xi = _xi_nodes(args)
    M = args.modes
    reach = max(spec.n_max, 1)
    wide = max(M, args.order * reach)
    series = psi_coefficients(xi, ctx, args.order, mu_cutoff=wide)
    res = residuals(series, ctx)
    res_max = float(res.max())
    tail = float(series.trunc_err.max())
    threshold = tail + 1e-12
    # export only |mu| <= M
    lo = wide - M
    from .reed_series import ModeVector

    out = ModeVector(M, xi, series.values[lo:lo + 2 * M + 1], ctx.gamma, ctx.regime, series.trunc_err[lo:lo + 2 * M + 1], "series")
    out.to_csv(run.path("modes.csv"))
    report = {
        "regime": ctx.regime.tag.value,
        "alpha": ctx.alpha,
        "gamma": ctx.gamma,
        "order": args.order,
        "residual": res_max,
        "tail_estimate": tail,
        "threshold": threshold,
        "pass": res_max <= threshold,
    }
    if args.oracle:
        oracle = fixed_point_oracle(xi, ctx, max(32, M))
        c = oracle.mu_cutoff
        ov = ModeVector(M, xi, oracle.values[c - M:c + M + 1], ctx.gamma, ctx.regime, None, "oracle")
        ov.to_csv(run.path("modes_oracle.csv"))
        disc = float(np.abs(ov.values - out.values).max())
        report["oracle_max_discrepancy"] = disc
        print(f"max |series - oracle| = {disc:.3e}")
    run.path("residual.json").write_text(json.dumps(report, indent=2))
    status = EXIT_OK if report["pass"] else EXIT_ACCEPTANCE
    print(f"residual {res_max:.3e} (threshold {threshold:.3e})")
    return run.finish(spec, status)


def cmd_evolve(args) -> int:
    spec = _load_spec(args)
    run = _Run(args, "evolve")
    xi = float(args.xi) if args.xi is not None else 0.0
    dt = args.dt if args.dt is not None else default_dt(spec)
    grid = TimeGrid(args.t0, args.t_end, dt)
    if args.window is not None:
        series = evolve_window(spec, xi, grid, args.window)
        run.extra["window_error_bound"] = float(series.error_bound.max())
    else:
        series = evolve(spec, xi, grid)
    series.to_csv(run.path("evolve.csv"))
    if args.self_convergence:
        finals = []
        for k in range(3):
            g = TimeGrid(args.t0, args.t_end, dt / 2**k)
            finals.append(evolve(spec, xi, g).values[-1])
        ratio = abs(finals[0] - finals[1]) / abs(finals[1] - finals[2])
        report = {"dt": [dt, dt / 2, dt / 4], "final_re": [f.real for f in finals], "final_im": [f.imag for f in finals], "richardson_ratio": ratio}
        run.path("self_convergence.json").write_text(json.dumps(report, indent=2))
        print(f"Richardson ratio {ratio:.4f}")
    return run.finish(spec, EXIT_OK)


def _synthetic(spec: DriveSpec, C: float = 0.3):
    omega = spec.omega

    def asymptotic(t):
        return 1.0 + 0.1 * np.exp(1j * omega * np.asarray(t))

    def solver(spec_, xi, grid):
        t = grid.times
        vals = asymptotic(t) - C / np.sqrt(np.maximum(t - grid.t0, grid.dt))
        return TimeSeries(grid, xi, vals)

    return solver, asymptotic


def cmd_converge(args) -> int:
    spec = _load_spec(args)
    run = _Run(args, "converge")
    xis = _xi_nodes(args) if args.xi is not None else np.array([0.0])
    horizon = args.t_end
    if args.t0 is not None:
        t0_list = [float(v) for v in str(args.t0).split(",")]
    else:
        t0_list = list(horizon - log_spaced_offsets(10.0, 1000.0, args.samples))
    status = EXIT_OK
    summaries = {}
    for xi in xis:
        kwargs = {}
        if args.synthetic:
            kwargs["solver"], kwargs["asymptotic"] = _synthetic(spec)
        report = measure_delta(spec, float(xi), t0_list, horizon, dt=args.dt, **kwargs)
        tag = f"{xi:+.6f}"
        report.to_csv(run.path(f"converge_xi{tag}.csv"))
        summary = report.summary()
        summary["xi"] = float(xi)
        ok = SLOPE_BAND[0] <= report.slope <= SLOPE_BAND[1]
        summary["slope_in_band"] = ok
        summaries[tag] = summary
        print(f"xi={xi:+.4f} slope={report.slope:.4f} CI=({report.slope_ci[0]:.3f}, {report.slope_ci[1]:.3f}) bound={report.bound_constant:.4g}")
        if not ok:
            status = EXIT_ACCEPTANCE
    run.path("converge.json").write_text(json.dumps(summaries, indent=2))
    return run.finish(spec, status)


def _cplx(z: complex) -> list:
    z = complex(z)
    return [z.real, z.imag]


def cmd_integrals(args) -> int:
    tau, a = args.tau, args.a
    which = args.which
    out: dict = {"identity": which, "tau": tau, "a": a}
    if which == "tfj0":
        out["closed"] = _cplx(sf.halfline_bessel_fourier(tau))
        big = max(a, 200.0)
        out["quadrature"] = _cplx(sf.finite_bessel_fourier(big, tau) + sf.tail_bessel_fourier(big, tau))
    elif which == "finite":
        out["quadrature"] = _cplx(sf.finite_bessel_fourier(a, tau))
        out["representation"] = _cplx(sf.finite_bessel_fourier_convolution(a, tau))
    elif which == "tail":
        out["asymptotic"] = _cplx(sf.tail_bessel_fourier(a, tau))
        out["leading"] = _cplx(sf.tail_leading_term(a, tau))
    elif which == "consistency":
        fin = sf.finite_bessel_fourier(a, tau)
        tail = sf.tail_bessel_fourier(a, tau)
        closed = sf.halfline_bessel_fourier(tau)
        out.update(finite=_cplx(fin), tail=_cplx(tail), closed=_cplx(closed), discrepancy=abs(fin + tail - closed))
    elif which == "fresnel":
        out["C"], out["S"] = sf.fresnel(args.x)
        out["x"] = args.x
    elif which == "sqrt":
        out["value"] = _cplx(sf.sqrt_weighted_bessel_integral(a, tau))
    elif which == "hfj":
        out["closed"] = sf.hilbert_of_bessel_fourier(tau)
    elif which == "bessel":
        out.update(k=args.k, x=args.x, value=sf.bessel_j(args.k, args.x))
    print(json.dumps(out))
    return EXIT_OK


def cmd_reconstruct(args) -> int:
    spec = _load_spec(args)
    run = _Run(args, "reconstruct")
    if args.q is not None:
        q = float(args.q)
        xi = math.cos(q)
    else:
        xi = float(args.xi) if args.xi is not None else 0.0
        q = math.acos(xi)
    dt = args.dt if args.dt is not None else default_dt(spec)
    grid = TimeGrid(args.t0, args.t_end, dt)
    impurity = evolve(spec, xi, grid)
    impurity.to_csv(run.path("impurity.csv"))
    site = spatial_reconstruct(spec, q, args.site_offset, impurity)
    site.to_csv(run.path(f"site{args.site_offset:+d}.csv"))
    return run.finish(spec, EXIT_OK)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON configuration file")
    common.add_argument("--out", default=".", help="output directory")
    common.add_argument("--seedless", action="store_true", help="accepted for compatibility; nothing is random")
    common.add_argument("--epsilon", type=float, default=0.1, help="resonance margin for regime classification")

    p = argparse.ArgumentParser(prog="reedsim", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"reedsim {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    a = sub.add_parser("asymptotic", parents=[common], help="periodic state from the reed series")
    a.add_argument("--xi", help="comma-separated xi values (overrides --xi-grid)")
    a.add_argument("--xi-grid", default="chebyshev:33")
    a.add_argument("--order", type=int, default=8, help="maximum reed order")
    a.add_argument("--modes", type=int, default=4, help="exported |mu| cutoff")
    a.add_argument("--oracle", action="store_true", help="also solve the truncated mode system")
    a.set_defaults(func=cmd_asymptotic)

    e = sub.add_parser("evolve", parents=[common], help="time-domain Volterra solve")
    e.add_argument("--xi", default="0.0")
    e.add_argument("--t0", type=float, default=0.0)
    e.add_argument("--t-end", type=float, default=50.0)
    e.add_argument("--dt", type=float)
    e.add_argument("--window", type=float, help="truncate history to this many time units")
    e.add_argument("--self-convergence", action="store_true", help="rerun at dt/2 and dt/4 and report the Richardson ratio")
    e.set_defaults(func=cmd_evolve)

    c = sub.add_parser("converge", parents=[common], help="decay of psi_inf - psi_t0")
    c.add_argument("--xi", help="comma-separated xi values")
    c.add_argument("--xi-grid", default="chebyshev:1")
    c.add_argument("--t0", help="comma-separated start times (default: log-spaced offsets 10..1000)")
    c.add_argument("--t-end", type=float, default=1000.0, help="observation time")
    c.add_argument("--dt", type=float)
    c.add_argument("--samples", type=int, default=20)
    c.add_argument("--synthetic", action="store_true", help="self-test the fit on an injected C/sqrt(t - t0) deviation")
    c.set_defaults(func=cmd_converge)

    i = sub.add_parser("integrals", help="Bessel-Fourier integrals as JSON")
    i.add_argument("which", choices=["tfj0", "finite", "tail", "consistency", "fresnel", "sqrt", "hfj", "bessel"])
    i.add_argument("--tau", type=float, default=0.0)
    i.add_argument("--a", type=float, default=50.0)
    i.add_argument("--x", type=float, default=1.0)
    i.add_argument("--k", type=int, default=0)
    i.set_defaults(func=cmd_integrals, config=None)

    r = sub.add_parser("reconstruct", parents=[common], help="amplitude at another site")
    r.add_argument("--xi")
    r.add_argument("--q", type=float)
    r.add_argument("--site-offset", type=int, default=1)
    r.add_argument("--t0", type=float, default=0.0)
    r.add_argument("--t-end", type=float, default=10.0)
    r.add_argument("--dt", type=float)
    r.set_defaults(func=cmd_reconstruct)
    return p


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except UnsupportedRegime as exc:
        print(f"error: unsupported regime: {exc}", file=sys.stderr)
        return EXIT_REGIME
    except (SeriesNotConverging, IllConditioned) as exc:
        print(f"error: series: {exc}", file=sys.stderr)
        return EXIT_SERIES
    except StepTooLarge as exc:
        print(f"error: step: {exc}", file=sys.stderr)
        return EXIT_STEP
    except (ConfigError, BandEdgeSingular, TooSmallA, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ReedsimError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())

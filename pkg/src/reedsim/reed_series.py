"""Renormalized reed series for the periodic asymptotic state.

A reed of order ``N`` is a sequence of nonzero drive modes
``(n_1, ..., n_N)``; line ``i`` carries momentum ``mu_i = n_1 + ... + n_i``
and the last line carries the total momentum.  Its value is
``prod_i V_{n_i} G(mu_i)`` where ``G`` is the renormalized line propagator,
and the mode coefficients are

    psi_mu = psi^(0) [delta_{mu 0} + sum_N (-i gamma)^N sum_reeds Val].

``psi^(0) = 1/(1 + i V0 j_0)`` carries the static field (1 in the resonant
regime).  In the resonant regime reeds with a link (a line sandwiched
between two zero-momentum lines) are excluded because those insertions are
already resummed in the zero-momentum propagator.

The sum over reeds is evaluated by a transfer recursion over
(momentum, last-line state) rather than by enumeration, so its cost is
linear in ``N``.  :func:`enumerate_reeds` remains available as the
brute-force reference.
"""

from __future__ import annotations

import csv
import itertools
from dataclasses import dataclass, field
from typing import Iterator, List, Optional, Sequence, Tuple

import numpy as np

from .drive import Regime, RegimeTag
from .errors import IllConditioned, SeriesNotConverging
from .propagators import RenormContext

__all__ = [
    "Reed",
    "ModeVector",
    "enumerate_reeds",
    "has_link",
    "reed_value",
    "psi_coefficient",
    "psi_coefficients",
    "fixed_point_oracle",
    "assemble_state",
    "residual",
    "residuals",
    "DEFAULT_ORDER",
]

DEFAULT_ORDER = 8
CONDITION_LIMIT = 1e12


@dataclass(frozen=True)
class Reed:
    """Ordered mode sequence with its partial-sum momenta."""

    modes: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "modes", tuple(int(n) for n in self.modes))
        if any(n == 0 for n in self.modes):
            raise ValueError("reed modes must be nonzero")

    @property
    def momenta(self) -> Tuple[int, ...]:
        return tuple(itertools.accumulate(self.modes))

    @property
    def order(self) -> int:
        return len(self.modes)

    @property
    def zero_lines(self) -> int:
        return sum(1 for m in self.momenta if m == 0)


def has_link(momenta: Sequence[int]) -> bool:
    """True if some line sits between two zero-momentum lines."""
    return any(momenta[i] == 0 and momenta[i + 2] == 0 for i in range(len(momenta) - 2))


def enumerate_reeds(N: int, mu: int, mode_cutoff: int, regime: Regime) -> List[Reed]:
    """All reeds of order ``N`` and momentum ``mu`` with ``0 < |n_i| <= mode_cutoff``.

    Odometer over mode tuples in lexicographic order, filtered by the
    momentum constraint and, in the resonant regime, by the no-link rule.
    """
    if N < 1:
        raise ValueError("N must be at least 1")
    if mode_cutoff < 1 or mode_cutoff * N < abs(mu):
        return []
    alphabet = [n for n in range(-mode_cutoff, mode_cutoff + 1) if n != 0]
    out = []
    for modes in itertools.product(alphabet, repeat=N):
        if sum(modes) != mu:
            continue
        if regime.resonant and has_link(list(itertools.accumulate(modes))):
            continue
        out.append(Reed(modes))
    return out


def reed_value(r: Reed, xi, ctx: RenormContext):
    """``prod_i V_{n_i} G(mu_i)`` without the ``(-i gamma)^N`` prefactor."""
    val = 1.0 + 0j
    for n, m in zip(r.modes, r.momenta):
        val = val * ctx.mode(n) * ctx.line(m, xi)
    return val


# states of the last line: zero momentum / nonzero after a zero line / other nonzero
_Z, _A, _B = 0, 1, 2


@dataclass
class _SeriesResult:
    orders: np.ndarray  # (N_max, 2L+1, n_xi): per-order contributions
    L: int


def _series_orders(xi: np.ndarray, ctx: RenormContext, N_max: int, mode_cutoff: int) -> _SeriesResult:
    modes = [(n, ctx.mode(n)) for n in sorted(ctx.coefficients) if n != 0 and abs(n) <= mode_cutoff and ctx.mode(n) != 0]
    n_xi = xi.size
    reach = max((abs(n) for n, _ in modes), default=0)
    L = N_max * reach
    size = 2 * L + 1
    prop = np.empty((size, n_xi), dtype=complex)
    for m in range(-L, L + 1):
        prop[m + L] = ctx.line(m, xi)
    pref = -1j * ctx.gamma
    resonant = ctx.regime.resonant
    orders = np.zeros((N_max, size, n_xi), dtype=complex)
    if not modes:
        return _SeriesResult(orders, L)

    state = np.zeros((3, size, n_xi), dtype=complex)
    for n, v in modes:
        state[_B, n + L] += pref * v * prop[n + L]
    orders[0] = state.sum(axis=0)
    for N in range(1, N_max):
        new = np.zeros_like(state)
        for n, v in modes:
            w = pref * v
            src_lo, src_hi = max(0, -n), min(size, size - n)
            dst = slice(src_lo + n, src_hi + n)
            src = slice(src_lo, src_hi)
            # every state may step to a nonzero momentum; zero lines feed A
            z, a, b = state[_Z, src], state[_A, src], state[_B, src]
            new[_A, dst] += w * z
            new[_B, dst] += w * (a + b)
        new[_A] *= prop
        new[_B] *= prop
        # arrivals at zero momentum; a link (A -> zero) is excluded when resonant
        arrive = np.zeros(n_xi, dtype=complex)
        for n, v in modes:
            k = -n + L
            if 0 <= k < size:
                src_state = state[_B, k] if resonant else state[_A, k] + state[_B, k]
                arrive += pref * v * src_state
        new[_A, L] = 0
        new[_B, L] = 0
        new[_Z, L] = arrive * prop[L]
        state = new
        orders[N] = state.sum(axis=0)
    return _SeriesResult(orders, L)


def _tail_estimate(orders: np.ndarray, mu_cutoff: int, L: int) -> Tuple[np.ndarray, float]:
    """Geometric tail bound per mode from a ratio test on per-order maxima."""
    window = orders[:, L - mu_cutoff:L + mu_cutoff + 1, :]
    amp = np.abs(window).max(axis=1)  # (N_max, n_xi)
    n_ord = amp.shape[0]
    if n_ord < 3:
        raise SeriesNotConverging("at least three orders are needed for the ratio test")
    last = amp[-1]
    tiny = 1e-300
    rho = np.zeros_like(last)
    for k in (n_ord - 1, n_ord - 2):
        prev = amp[k - 1]
        r = np.where(prev > tiny, amp[k] / np.maximum(prev, tiny), 0.0)
        rho = np.maximum(rho, r)
    prev2 = amp[-3]
    r2 = np.where(prev2 > tiny, np.sqrt(last / np.maximum(prev2, tiny)), 0.0)
    rho = np.maximum(rho, r2)
    active = amp[-1] + amp[-2] > 1e-300
    if np.any(active & (rho >= 1.0)):
        worst = float(np.max(np.where(active, rho, 0.0)))
        raise SeriesNotConverging(f"partial sums fail the ratio test (ratio {worst:.3g} >= 1)")
    # bound the remaining orders with the larger of the last two terms; the
    # factor 2 absorbs the even/odd alternation of per-order maxima
    base = np.maximum(amp[-1], rho * amp[-2])
    return 2.0 * base * rho / (1.0 - rho), float(rho.max(initial=0.0))


@dataclass
class ModeVector:
    """Fourier-in-time coefficients of the periodic state on a ``xi`` grid.

    ``values[mu + M, i]`` stores ``psi_mu(xi_i) - delta_{mu 0}`` so that the
    state is ``1 + sum_mu e^{i mu phi} values[mu]``.
    """

    mu_cutoff: int
    xi: np.ndarray
    values: np.ndarray
    gamma: float
    regime: Regime
    trunc_err: Optional[np.ndarray] = None
    source: str = "series"

    def __post_init__(self):
        self.xi = np.atleast_1d(np.asarray(self.xi, dtype=float))
        self.values = np.asarray(self.values, dtype=complex).reshape(2 * self.mu_cutoff + 1, self.xi.size)
        if self.trunc_err is None:
            self.trunc_err = np.zeros(self.values.shape)

    @property
    def mus(self) -> np.ndarray:
        return np.arange(-self.mu_cutoff, self.mu_cutoff + 1)

    def __getitem__(self, mu: int) -> np.ndarray:
        return self.values[mu + self.mu_cutoff]

    def full(self) -> np.ndarray:
        """``psi_mu`` including the unit source at ``mu = 0``."""
        out = self.values.copy()
        out[self.mu_cutoff] += 1.0
        return out

    def at(self, i: int) -> "ModeVector":
        """Slice at a single grid node."""
        return ModeVector(self.mu_cutoff, self.xi[i:i + 1], self.values[:, i:i + 1], self.gamma, self.regime, self.trunc_err[:, i:i + 1], self.source)

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["xi", "mu", "re", "im", "trunc_err"])
            for i, x in enumerate(self.xi):
                for k, mu in enumerate(self.mus):
                    v = self.values[k, i]
                    w.writerow([f"{x:.17g}", int(mu), f"{v.real:.17g}", f"{v.imag:.17g}", f"{self.trunc_err[k, i]:.17g}"])

    @classmethod
    def from_csv(cls, path, gamma: float = float("nan"), regime: Optional[Regime] = None) -> "ModeVector":
        rows = list(csv.DictReader(open(path, newline="")))
        xs = sorted({float(r["xi"]) for r in rows}, reverse=True)
        mus = sorted({int(r["mu"]) for r in rows})
        M = max(abs(m) for m in mus)
        idx = {x: i for i, x in enumerate(xs)}
        vals = np.zeros((2 * M + 1, len(xs)), dtype=complex)
        err = np.zeros(vals.shape)
        for r in rows:
            k, i = int(r["mu"]) + M, idx[float(r["xi"])]
            vals[k, i] = complex(float(r["re"]), float(r["im"]))
            err[k, i] = float(r["trunc_err"])
        return cls(M, np.array(xs), vals, gamma, regime or Regime(RegimeTag.UNSUPPORTED), err, "csv")


def psi_coefficients(xi, ctx: RenormContext, N_max: int = DEFAULT_ORDER, mode_cutoff: Optional[int] = None, mu_cutoff: int = 4) -> ModeVector:
    """Reed-series coefficients for ``|mu| <= mu_cutoff`` on the given ``xi`` nodes.

    Raises
    ------
    SeriesNotConverging
        When the per-order contributions do not shrink geometrically.
    """
    xi_arr = np.atleast_1d(np.asarray(xi, dtype=float))
    cutoff = ctx.p_max if mode_cutoff is None else mode_cutoff
    res = _series_orders(xi_arr, ctx, N_max, cutoff)
    L = res.L
    M = mu_cutoff
    total = res.orders.sum(axis=0)
    vals = np.zeros((2 * M + 1, xi_arr.size), dtype=complex)
    lo, hi = max(-M, -L), min(M, L)
    vals[lo + M:hi + M + 1] = total[lo + L:hi + L + 1]
    if ctx.gamma == 0 or L == 0:
        err = np.zeros(vals.shape)
    else:
        padded = np.zeros((N_max, 2 * max(L, M) + 1, xi_arr.size), dtype=complex)
        off = max(L, M) - L
        padded[:, off:off + 2 * L + 1] = res.orders
        tail, _ = _tail_estimate(padded, M, max(L, M))
        err = np.broadcast_to(tail, vals.shape).copy()
    psi0 = np.asarray(ctx.order_zero(xi_arr))
    # psi_mu = psi0 (delta + series); store psi_mu - delta
    vals = vals * psi0
    vals[M] += psi0 - 1.0
    err = err * np.abs(psi0)
    return ModeVector(M, xi_arr, vals, ctx.gamma, ctx.regime, err, "series")


def psi_coefficient(mu: int, xi: float, ctx: RenormContext, N_max: int = DEFAULT_ORDER, mode_cutoff: Optional[int] = None) -> Tuple[complex, float]:
    """Reed-series value of ``psi_mu - delta_{mu 0}`` at one ``xi``.

    Returns ``(value, trunc_err)``; the static factor ``1/(1 + i V0 j_0)``
    is already applied.
    """
    mv = psi_coefficients([xi], ctx, N_max, mode_cutoff, max(abs(mu), 1))
    return complex(mv[mu][0]), float(mv.trunc_err[mu + mv.mu_cutoff][0])


def _oracle_matrix(xi: float, ctx: RenormContext, M: int) -> np.ndarray:
    size = 2 * M + 1
    j = np.array([ctx.j(mu, xi) for mu in range(-M, M + 1)])
    A = np.diag(1.0 + 1j * ctx.V0 * j)
    for a, mu in enumerate(range(-M, M + 1)):
        for b, n in enumerate(range(-M, M + 1)):
            if n != mu:
                A[a, b] += 1j * ctx.gamma * j[a] * ctx.mode(mu - n)
    return A


def fixed_point_oracle(xi, ctx: RenormContext, M: int = 32) -> ModeVector:
    """Direct solve of the truncated mode equations.

    ``(1 + i V0 j_mu) psi_mu + i gamma j_mu sum_{n != mu} V_{mu-n} psi_n = delta_{mu 0}``
    for ``|mu| <= M`` at every node of ``xi``.
    """
    xi_arr = np.atleast_1d(np.asarray(xi, dtype=float))
    vals = np.zeros((2 * M + 1, xi_arr.size), dtype=complex)
    rhs = np.zeros(2 * M + 1, dtype=complex)
    rhs[M] = 1.0
    for i, x in enumerate(xi_arr):
        A = _oracle_matrix(float(x), ctx, M)
        cond = np.linalg.cond(A)
        if not np.isfinite(cond) or cond > CONDITION_LIMIT:
            raise IllConditioned(f"mode system at xi = {x} has condition number {cond:.3g}")
        vals[:, i] = np.linalg.solve(A, rhs)
    vals[M] -= 1.0
    return ModeVector(M, xi_arr, vals, ctx.gamma, ctx.regime, np.zeros(vals.shape), "oracle")


def assemble_state(coeffs: ModeVector, phi, node: int = 0):
    """``1 + sum_mu e^{i mu phi} coeffs[mu]`` at grid node ``node``.

    Horner evaluation in ``z = e^{i phi}`` starting from the top mode.
    """
    ph = np.asarray(phi, dtype=float)
    z = np.exp(1j * ph)
    c = coeffs.values[:, node]
    acc = np.zeros(ph.shape, dtype=complex)
    for v in c[::-1]:
        acc = acc * z + v
    out = 1.0 + acc * z ** (-coeffs.mu_cutoff)
    return complex(out) if out.ndim == 0 else out


def residuals(coeffs: ModeVector, ctx: RenormContext) -> np.ndarray:
    """``|LHS - RHS|`` of the mode equations, per ``(mu, xi)`` node."""
    M = coeffs.mu_cutoff
    psi = coeffs.full()
    out = np.zeros(psi.shape)
    for i, x in enumerate(coeffs.xi):
        A = _oracle_matrix(float(x), ctx, M)
        rhs = np.zeros(2 * M + 1, dtype=complex)
        rhs[M] = 1.0
        out[:, i] = np.abs(A @ psi[:, i] - rhs)
    return out


def residual(coeffs: ModeVector, xi: Optional[float] = None, ctx: Optional[RenormContext] = None) -> float:
    """Sup-norm residual of the mode fixed-point equations.

    With ``xi`` given only that node is checked; otherwise every node.
    """
    if ctx is None:
        raise ValueError("a RenormContext is required")
    if xi is not None:
        i = int(np.argmin(np.abs(coeffs.xi - xi)))
        coeffs = coeffs.at(i)
    return float(residuals(coeffs, ctx).max())

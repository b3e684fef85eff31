"""Physical configuration, drive Fourier modes and regime classification."""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Mapping, Optional

import numpy as np

from .errors import ConfigError

__all__ = [
    "V_FLOOR",
    "DEFAULT_EPSILON",
    "RegimeTag",
    "Regime",
    "DriveSpec",
    "validate",
    "classify",
    "evaluate_drive",
    "default_mode_cutoff",
]

#: |V0| at or below this counts as zero static field.
V_FLOOR = 1e-12
#: Default margin of the moderately resonant condition g/omega <= 1/2 - eps.
DEFAULT_EPSILON = 0.1


def default_mode_cutoff(sigma: float) -> int:
    """Number of modes kept so that ``e^{-sigma n}`` falls below ~1e-15."""
    return int(math.ceil(36.0 / sigma))


class RegimeTag(str, enum.Enum):
    NON_DEGENERATE = "NonDegenerate"
    MODERATELY_RESONANT = "ModeratelyResonant"
    UNSUPPORTED = "Unsupported"


@dataclass(frozen=True)
class Regime:
    """Regime tag plus the resonance margin ``epsilon`` (resonant case only)."""

    tag: RegimeTag
    epsilon: Optional[float] = None

    @property
    def resonant(self) -> bool:
        return self.tag is RegimeTag.MODERATELY_RESONANT

    @property
    def supported(self) -> bool:
        return self.tag is not RegimeTag.UNSUPPORTED


@dataclass(frozen=True)
class DriveSpec:
    """Impurity, chain and drive parameters.

    Parameters
    ----------
    g, omega : float
        Spin coupling and drive frequency, both positive.
    h : float
        Drive amplitude.
    V0 : float
        Static field at the impurity.
    coefficients : mapping int -> complex
        Fourier modes ``V_n`` of the zero-mean drive profile, for both signs
        of ``n``.  ``V_0`` must not appear.
    sigma, C0 : float
        Decay envelope ``|V_n| <= C0 exp(-sigma |n|)``.
    kappa : int
        Impurity site; only used when reconstructing other sites.
    """

    g: float
    omega: float
    h: float = 0.0
    V0: float = 0.0
    coefficients: Mapping[int, complex] = field(default_factory=dict)
    sigma: float = 1.0
    C0: float = 1.5
    kappa: int = 0

    def __post_init__(self):
        object.__setattr__(self, "coefficients", {int(n): complex(v) for n, v in dict(self.coefficients).items()})

    @classmethod
    def cosine(cls, g: float, omega: float, h: float = 0.0, V0: float = 0.0, kappa: int = 0) -> "DriveSpec":
        """``V(phi) = cos(phi)``: modes ``V_{+-1} = 1/2`` with ``sigma = 1, C0 = 1.5``."""
        return cls(g=g, omega=omega, h=h, V0=V0, coefficients={1: 0.5, -1: 0.5}, sigma=1.0, C0=1.5, kappa=kappa)

    @classmethod
    def from_positive_modes(cls, g, omega, h, V0, modes: Mapping[int, complex], sigma, C0, kappa=0) -> "DriveSpec":
        """Build from modes ``n >= 1``; the negative ones follow by conjugation."""
        coeffs: Dict[int, complex] = {}
        for n, v in modes.items():
            if n < 1:
                raise ConfigError(f"only modes n >= 1 may be listed, got {n}")
            coeffs[n] = complex(v)
            coeffs[-n] = complex(v).conjugate()
        return cls(g=g, omega=omega, h=h, V0=V0, coefficients=coeffs, sigma=sigma, C0=C0, kappa=kappa)

    @classmethod
    def from_config(cls, cfg: Mapping) -> "DriveSpec":
        """Parse the JSON configuration layout (see the README)."""
        try:
            g = float(cfg["g"])
            omega = float(cfg["omega"])
            h = float(cfg.get("h", 0.0))
            V0 = float(cfg.get("V0", 0.0))
            kappa = int(cfg.get("kappa", 0))
            drive = cfg.get("drive", {"type": "cosine"})
            kind = drive.get("type")
        except (KeyError, TypeError, ValueError, AttributeError) as exc:
            raise ConfigError(f"malformed configuration: {exc}") from exc
        if kind == "cosine":
            return cls.cosine(g, omega, h, V0, kappa)
        if kind == "coeffs":
            try:
                modes = {int(n): complex(float(re), float(im)) for n, re, im in drive["coeffs"]}
                return cls.from_positive_modes(g, omega, h, V0, modes, float(drive["sigma"]), float(drive["C0"]), kappa)
            except (KeyError, TypeError, ValueError) as exc:
                raise ConfigError(f"malformed drive coefficients: {exc}") from exc
        raise ConfigError(f"unknown drive type {kind!r}")

    @classmethod
    def from_json(cls, path) -> "DriveSpec":
        try:
            cfg = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read configuration {path}: {exc}") from exc
        return cls.from_config(cfg)

    def to_config(self) -> dict:
        modes = [[n, v.real, v.imag] for n, v in sorted(self.coefficients.items()) if n >= 1]
        return {
            "g": self.g,
            "omega": self.omega,
            "h": self.h,
            "V0": self.V0,
            "kappa": self.kappa,
            "drive": {"type": "coeffs", "sigma": self.sigma, "C0": self.C0, "coeffs": modes},
        }

    def replace(self, **changes) -> "DriveSpec":
        import dataclasses

        return dataclasses.replace(self, **changes)

    @property
    def alpha(self) -> float:
        return self.g / self.omega

    @property
    def gamma(self) -> float:
        return self.h / self.omega

    @property
    def v0_reduced(self) -> float:
        """Static field in units of the drive frequency."""
        return self.V0 / self.omega

    @property
    def n_max(self) -> int:
        return max((abs(n) for n in self.coefficients), default=0)

    def mode(self, n: int) -> complex:
        return self.coefficients.get(int(n), 0j)

    def drive_sup(self) -> float:
        """Upper bound on ``sup |V|`` from the stored modes."""
        return float(sum(abs(v) for v in self.coefficients.values()))

    def l2_norm_sq(self) -> float:
        """``sum_n |V_n|^2`` over all stored modes."""
        return float(sum(abs(v) ** 2 for v in self.coefficients.values()))


def validate(spec: DriveSpec) -> List[str]:
    """Return the list of violated invariants (empty when the spec is valid)."""
    out: List[str] = []
    if not spec.g > 0:
        out.append(f"g: must be > 0 (got {spec.g})")
    if not spec.omega > 0:
        out.append(f"omega: must be > 0 (got {spec.omega})")
    if not spec.h >= 0:
        out.append(f"h: must be >= 0 (got {spec.h})")
    if not math.isfinite(spec.V0):
        out.append("V0: must be finite")
    if not spec.sigma > 0:
        out.append(f"sigma: decay rate must be > 0 (got {spec.sigma})")
    if not spec.C0 > 0:
        out.append(f"C0: decay prefactor must be > 0 (got {spec.C0})")
    for n, v in sorted(spec.coefficients.items()):
        if n == 0:
            out.append("coefficients[0]: the zero mode is not stored; use V0")
            continue
        if spec.sigma > 0 and abs(v) > spec.C0 * math.exp(-spec.sigma * abs(n)) * (1 + 1e-12):
            out.append(f"coefficients[{n}]: |V_n| = {abs(v):.6g} exceeds C0 exp(-sigma |n|) = {spec.C0 * math.exp(-spec.sigma * abs(n)):.6g}")
        partner = spec.coefficients.get(-n)
        if partner is None or abs(partner - v.conjugate()) > 1e-14 * max(1.0, abs(v)):
            if n > 0 or partner is None:
                out.append(f"coefficients[{-n}]: realness requires V_{{-n}} = conj(V_n) for n = {n}")
    return out


def classify(spec: DriveSpec, epsilon: float = DEFAULT_EPSILON) -> Regime:
    """Regime tag: non-degenerate if ``V0 != 0``, moderately resonant if
    ``V0 = 0`` and ``g/omega <= 1/2 - epsilon``, unsupported otherwise."""
    if abs(spec.V0) > V_FLOOR:
        return Regime(RegimeTag.NON_DEGENERATE)
    if epsilon > 0 and spec.alpha <= 0.5 - epsilon:
        return Regime(RegimeTag.MODERATELY_RESONANT, float(epsilon))
    return Regime(RegimeTag.UNSUPPORTED)


def evaluate_drive(spec: DriveSpec, phi):
    """``V(phi) = sum_n V_n e^{i n phi}``; real by conjugate symmetry."""
    ph = np.asarray(phi, dtype=float)
    total = np.zeros(ph.shape, dtype=complex)
    for n, v in sorted(spec.coefficients.items()):
        total += v * np.exp(1j * n * ph)
    out = total.real
    return float(out) if out.ndim == 0 else out

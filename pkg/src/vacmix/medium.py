"""Static dispersive medium: Lorentz resonances and the Sellmeier dispersion.

Units are natural (c = hbar = eps0 = 1).  Angular frequencies and wavenumbers
are in rad/um; times are in um of light travel (1 fs = 0.299792458 um).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import PoleAtResonance

#: Absolute distance (rad/um) from a resonance below which evaluation refuses.
POLE_TOL = 1e-9

#: Light-time length of one femtosecond in micrometres.
FS_TO_UM = 0.299792458


@dataclass(frozen=True)
class Resonance:
    """One Lorentz oscillator: resonance frequency and plasma frequency."""

    omega_res: float
    g: float

    def __post_init__(self):
        if not (self.omega_res > 0):
            raise ValueError(f"omega_res must be > 0, got {self.omega_res}")
        if not (self.g >= 0):
            raise ValueError(f"g must be >= 0, got {self.g}")

    @classmethod
    def from_sellmeier(cls, lambda_um: float, B: float) -> "Resonance":
        """Convert a Sellmeier term ``B lambda^2 / (lambda^2 - lambda_i^2)``."""
        omega = 2.0 * np.pi / lambda_um
        return cls(omega, float(np.sqrt(B) * omega))


@dataclass(frozen=True)
class MediumSpec:
    """Immutable set of resonances, stored in ascending order of frequency."""

    resonances: tuple = field(default_factory=tuple)
    name: str = "custom"

    def __post_init__(self):
        res = tuple(sorted(self.resonances, key=lambda r: r.omega_res))
        if not res:
            raise ValueError("a medium needs at least one resonance")
        w = [r.omega_res for r in res]
        if any(b <= a for a, b in zip(w, w[1:])):
            raise ValueError("resonance frequencies must be distinct")
        object.__setattr__(self, "resonances", res)

    @property
    def N(self) -> int:
        return len(self.resonances)

    @property
    def omegas(self) -> np.ndarray:
        return np.array([r.omega_res for r in self.resonances])

    @property
    def gs(self) -> np.ndarray:
        return np.array([r.g for r in self.resonances])

    @classmethod
    def single(cls, Omega: float, g: float, name: str = "single") -> "MediumSpec":
        return cls((Resonance(Omega, g),), name)

    @classmethod
    def from_pairs(cls, pairs: Sequence, name: str = "custom") -> "MediumSpec":
        """Build from ``(Omega_i, g_i)`` pairs."""
        return cls(tuple(Resonance(float(o), float(g)) for o, g in pairs), name)


# Three-term Sellmeier table for fused silica: (B_i, lambda_i in um).
FUSED_SILICA_SELLMEIER = (
    (0.6961663, 0.0684043),
    (0.4079426, 0.1162414),
    (0.8974794, 9.896161),
)


def fused_silica() -> MediumSpec:
    """Default medium.  Index 0 is the infrared resonance, index 1 the first
    ultraviolet one, index 2 the deep-ultraviolet one."""
    return MediumSpec(
        tuple(Resonance.from_sellmeier(lam, B) for B, lam in FUSED_SILICA_SELLMEIER),
        "fused-silica",
    )


def _check_poles(medium: MediumSpec, omega, only=None):
    om = np.abs(np.asarray(omega, dtype=float))
    for i, r in enumerate(medium.resonances):
        if only is not None and not only[i]:
            continue
        if np.any(np.abs(om - r.omega_res) < POLE_TOL):
            raise PoleAtResonance(
                f"omega within {POLE_TOL:g} of resonance {i} (Omega={r.omega_res:.12g})"
            )


def _sellmeier_sum(medium: MediumSpec, omega):
    """sum_i g_i^2 / (omega^2 - Omega_i^2) without pole checks (vectorised)."""
    w2 = np.asarray(omega, dtype=float) ** 2
    out = np.zeros_like(w2)
    for r in medium.resonances:
        if r.g != 0.0:
            out = out + r.g**2 / (w2 - r.omega_res**2)
    return out


def n_squared(medium: MediumSpec, omega):
    """n^2(omega) = 1 - sum_i g_i^2/(omega^2 - Omega_i^2).

    May be negative inside a stop band.  Accepts scalars or arrays.
    """
    _check_poles(medium, omega, only=[r.g != 0 for r in medium.resonances])
    val = 1.0 - _sellmeier_sum(medium, omega)
    return float(val) if np.ndim(val) == 0 else val


def refractive_index(medium: MediumSpec, omega):
    """Real refractive index sqrt(n^2); raises if omega lies in a stop band."""
    n2 = n_squared(medium, omega)
    if np.any(np.asarray(n2) < 0):
        raise ValueError("n^2 < 0: frequency lies inside a stop band")
    return np.sqrt(n2)


def _D_unchecked(medium, k, omega):
    w = np.asarray(omega, dtype=float)
    return -np.asarray(k, dtype=float) ** 2 + w**2 * (1.0 - _sellmeier_sum(medium, w))


def dispersion_D(medium: MediumSpec, k, omega):
    """D(k, omega) = -k^2 + omega^2 n^2(omega); vanishes on polariton shells."""
    _check_poles(medium, omega, only=[r.g != 0 for r in medium.resonances])
    val = _D_unchecked(medium, k, omega)
    return float(val) if np.ndim(val) == 0 else val


def delta_epsilon(medium: MediumSpec, omega, eps):
    """Permittivity shift produced by fractional resonance shifts eps_i.

    delta_eps(omega) = sum_i g_i^2 Omega_i^2 eps_i / (omega^2 - Omega_i^2)^2.
    Only resonances with nonzero eps_i contribute (and are pole-checked).
    """
    eps = np.broadcast_to(np.asarray(eps, dtype=float), (medium.N,))
    _check_poles(medium, omega, only=[e != 0 and r.g != 0 for e, r in zip(eps, medium.resonances)])
    w2 = np.asarray(omega, dtype=float) ** 2
    out = np.zeros_like(w2)
    for e, r in zip(eps, medium.resonances):
        if e != 0:
            out = out + r.g**2 * r.omega_res**2 * e / (w2 - r.omega_res**2) ** 2
    return float(out) if np.ndim(out) == 0 else out


def delta_n(medium: MediumSpec, omega, eps):
    """Index shift to first order: delta_n = -delta_eps / (2 n)."""
    return -delta_epsilon(medium, omega, eps) / (2.0 * refractive_index(medium, omega))


def eps_for_delta_n(medium: MediumSpec, m: int, delta_n_target: float, lambda_um: float) -> float:
    """Modulation depth eps of resonance ``m`` (1-based) giving |delta_n| at lambda.

    The index shift is linear in eps, so this is a single division; the
    returned eps is positive (the resonance is pushed up, lowering n).
    """
    if not 1 <= m <= medium.N:
        raise ValueError(f"target resonance {m} out of range 1..{medium.N}")
    omega = 2.0 * np.pi / lambda_um
    unit = np.zeros(medium.N)
    unit[m - 1] = 1.0
    per_eps = abs(delta_n(medium, omega, unit))
    if per_eps == 0:
        raise ValueError("resonance has zero coupling; delta_n cannot be reached")
    return abs(delta_n_target) / per_eps

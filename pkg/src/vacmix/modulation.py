"""Gaussian-windowed multi-tone modulation of one resonance frequency.

The modulation is f(t) = eps * sum_a cos(nu_a t) * exp(-t^2 / (2 tau^2)), applied
homogeneously to resonance ``target_m`` (1-based).  All spectral quantities
are reported per quantization volume, so the volume never appears.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .medium import FS_TO_UM

EPS_WARN = 0.3


@dataclass(frozen=True)
class ModulationSpec:
    """Two-tone modulation (``nu2=None`` gives a single cosine) of resonance ``target_m``.

    ``tau`` is the field-envelope width in um of light time; see
    :func:`tau_from_fs` and :func:`tau_from_intensity_fwhm_fs`.
    """

    eps: float
    nu1: float
    nu2: Optional[float]
    tau: float
    target_m: int = 2

    def __post_init__(self):
        if self.tau <= 0:
            raise ValueError("tau must be > 0")
        for nu in self.tones:
            if nu <= 0:
                raise ValueError("modulation frequencies must be > 0")
        if self.target_m < 1:
            raise ValueError("target_m is 1-based")
        if abs(self.eps) > EPS_WARN:
            warnings.warn(f"eps={self.eps} is not small; perturbation theory is suspect")
        if self.tau * min(self.tones) < 10:
            warnings.warn("tau*nu < 10: large-tau approximations are unreliable")

    @property
    def tones(self) -> tuple:
        return (self.nu1,) if self.nu2 is None else (self.nu1, self.nu2)

    @property
    def signed_tones(self) -> np.ndarray:
        t = np.array(self.tones)
        return np.concatenate([t, -t])

    def eps_vector(self, N: int) -> np.ndarray:
        v = np.zeros(N)
        v[self.target_m - 1] = self.eps
        return v

    def with_eps(self, eps: float) -> "ModulationSpec":
        return ModulationSpec(eps, self.nu1, self.nu2, self.tau, self.target_m)

    def swapped(self) -> "ModulationSpec":
        if self.nu2 is None:
            return self
        return ModulationSpec(self.eps, self.nu2, self.nu1, self.tau, self.target_m)


def tau_from_fs(tau_fs: float) -> float:
    """Envelope width tau given directly in femtoseconds -> um."""
    return tau_fs * FS_TO_UM


def tau_from_intensity_fwhm_fs(fwhm_fs: float) -> float:
    """tau for an envelope whose *square* has the given FWHM (fs).

    exp(-t^2/tau^2) has FWHM 2 sqrt(ln 2) tau, so 100 fs maps to tau = 60.06 fs.
    (The *field* envelope exp(-t^2/2tau^2) with 100 fs FWHM gives tau = 42.47 fs.)
    """
    return fwhm_fs / (2.0 * np.sqrt(np.log(2.0))) * FS_TO_UM


def tau_from_field_fwhm_fs(fwhm_fs: float) -> float:
    """tau for a field envelope exp(-t^2/2tau^2) with the given FWHM (fs)."""
    return fwhm_fs / (2.0 * np.sqrt(2.0 * np.log(2.0))) * FS_TO_UM


def f_time(spec: ModulationSpec, t):
    t = np.asarray(t, dtype=float)
    s = sum(np.cos(nu * t) for nu in spec.tones)
    out = spec.eps * s * np.exp(-(t**2) / (2.0 * spec.tau**2))
    return float(out) if out.ndim == 0 else out


def f_spectrum_per_volume(spec: ModulationSpec, omega):
    """Fourier transform int dt e^{i omega t} f(t), per unit volume.

    eps tau sqrt(pi/2) sum_{a in +-nu} exp(-tau^2 (omega - a)^2 / 2).  Even in omega.
    """
    w = np.asarray(omega, dtype=float)
    amp = spec.eps * spec.tau * np.sqrt(np.pi / 2.0)
    out = np.zeros_like(w)
    for a in spec.signed_tones:
        out = out + np.exp(-0.5 * spec.tau**2 * (w - a) ** 2)
    out = amp * out
    return float(out) if out.ndim == 0 else out


def tone_pairs(spec: ModulationSpec):
    """All ordered pairs (a, b) of signed tones entering f~(w') f~(S - w')."""
    st = spec.signed_tones
    return [(a, b) for a in st for b in st]

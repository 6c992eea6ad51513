"""Graded-index (parabolic) fiber: transverse Hermite-Gaussian modes and the
mode-order dependent polariton dispersion.

With resonance frequencies growing as Omega_i^2(r) = Omega_i^2 + Delta r^2, the
transverse problem is a harmonic oscillator of strength

    alpha_k(omega) = (Delta / 2) sum_i g_i^2 omega^2 / (omega^2 - Omega_i^2)^2,

and mode (n, m) obeys

    D_nm(k, omega) = -k^2 + omega^2 n^2(omega) - (n + m + 1/2) 2 alpha_k(omega) = 0.
"""
from __future__ import annotations

from dataclasses import dataclass
import warnings
from math import factorial

import numpy as np
from numpy.polynomial.hermite import hermval
from scipy import optimize

from .branches import branch_frequencies
from .errors import DegenerateProfile
from .medium import POLE_TOL, MediumSpec, _D_unchecked, _check_poles, dispersion_D

FIXED_POINT_TOL = 1e-14
FIXED_POINT_MAXITER = 100
RESIDUAL_TOL = 1e-9
PERTURBATIVE_MAX = 0.1


class NonPerturbativeFiber(UserWarning):
    """Some fiber roots were dropped because alpha_k is not small there."""


@dataclass(frozen=True)
class FiberSpec:
    medium: MediumSpec
    delta: float

    def __post_init__(self):
        if self.delta < 0:
            raise ValueError("profile curvature delta must be >= 0")


def _alpha_sum(medium: MediumSpec, omega):
    w2 = np.asarray(omega, float) ** 2
    return sum(r.g**2 * w2 / (w2 - r.omega_res**2) ** 2 for r in medium.resonances if r.g)


def fiber_alpha(fiber: FiberSpec, omega):
    """alpha_k = (Delta/2) sum_i g_i^2 w^2 / (w^2 - Omega_i^2)^2."""
    _check_poles(fiber.medium, omega, only=[r.g != 0 for r in fiber.medium.resonances])
    return 0.5 * fiber.delta * _alpha_sum(fiber.medium, omega)


def fiber_dispersion(fiber: FiberSpec, k, n: int, m: int, omega):
    """Bulk D(k, omega) minus (n + m + 1/2) * 2 alpha_k(omega)."""
    return dispersion_D(fiber.medium, k, omega) - (n + m + 0.5) * 2.0 * fiber_alpha(fiber, omega)


def _acceptable(fiber, k, n, m, w):
    """Roots that satisfy the full relation and sit in the perturbative regime:
    the transverse shift (2n+2m+1) alpha_k must stay below PERTURBATIVE_MAX k^2."""
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        shift = (2 * (n + m) + 1) * 0.5 * fiber.delta * _alpha_sum(fiber.medium, w)
        D = _D_unchecked(fiber.medium, k, w) - shift
        gap = np.min(np.abs(w[:, None] - fiber.medium.omegas[None, :]), axis=1)
        scale = np.maximum(k**2, 1.0) + np.abs(shift)
        return (np.isfinite(D) & (np.abs(D) <= RESIDUAL_TOL * scale) & (gap > POLE_TOL)
                & (shift <= PERTURBATIVE_MAX * np.maximum(k**2, 1e-300)))


def _bracketed_root(fiber, k, n, m, w0, w_hi):
    """Full fiber root above the bulk root ``w0`` and below the next pole
    ``w_hi``; None when D_nm never turns positive there (no perturbative root)."""
    f = lambda w: float(_D_unchecked(fiber.medium, k, w) - (2 * (n + m) + 1) * 0.5 * fiber.delta
                        * _alpha_sum(fiber.medium, w))
    if f(w0) >= 0:
        return w0
    h = max(abs(w0), 1.0) * 1e-12
    w = w0
    while True:
        w_next = w0 + h
        if w_next >= w_hi * (1 - POLE_TOL):
            return None
        if f(w_next) > 0:
            return optimize.brentq(f, w, w_next, xtol=1e-15 * w_next, rtol=4 * np.finfo(float).eps)
        w, h = w_next, 2 * h


def fiber_branches(fiber: FiberSpec, k, n: int, m: int, alphas=None):
    """Fiber polariton frequencies, shape ``(len(k), N+1)`` (or the selected ``alphas``).

    alpha_k depends on omega, so each branch is solved self-consistently:
    freeze alpha at the current on-shell omega, solve the bulk-shaped
    equation (the same bracketed solver, with k^2 -> k^2 + (2n+2m+1) alpha),
    re-evaluate alpha at the new root, and repeat to convergence.  Points
    where the iteration stalls (roots hugging a resonance, where alpha_k
    diverges) fall back to a bracketed solve of the full relation above the
    bulk root.  Where no such root exists the transverse correction is not
    perturbative; those entries are NaN and a warning is issued.
    """
    k = np.atleast_1d(np.asarray(k, float))
    om = branch_frequencies(fiber.medium, k)
    cols = list(range(om.shape[1])) if alphas is None else list(alphas)
    if fiber.delta == 0:
        return om[:, cols]
    order = 2 * (n + m) + 1
    poles = np.append(fiber.medium.omegas, np.inf)
    out = np.empty((len(k), len(cols)))
    for c, a in enumerate(cols):
        w = om[:, a]
        done = np.zeros(len(k), bool)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            for _ in range(FIXED_POINT_MAXITER):
                shift = order * 0.5 * fiber.delta * _alpha_sum(fiber.medium, w)
                ok = np.isfinite(shift) & (k**2 + shift >= 0)
                w_new = w.copy()
                if np.any(ok):
                    w_new[ok] = branch_frequencies(fiber.medium, np.sqrt(k[ok] ** 2 + shift[ok]))[:, a]
                done = ok & (np.abs(w_new - w) <= FIXED_POINT_TOL * np.maximum(w_new, 1.0))
                w = w_new
                if np.all(done):
                    break
        done &= _acceptable(fiber, k, n, m, w)
        for j in np.flatnonzero(~done):
            r = _bracketed_root(fiber, k[j], n, m, om[j, a], poles[a])
            ok = r is not None and _acceptable(fiber, k[j:j + 1], n, m, np.array([r]))[0]
            w[j] = r if ok else np.nan
        if np.any(np.isnan(w)):
            warnings.warn(f"branch {a}, mode ({n},{m}): no perturbative fiber root at "
                          f"{int(np.isnan(w).sum())} k values (alpha_k diverges near a resonance)",
                          NonPerturbativeFiber)
        out[:, c] = w
    return out


def hermite_gaussian_mode(fiber: FiberSpec, n: int, m: int, x, y, omega):
    """u_nm(x, y) = (a / (2^{n+m} n! m! pi))^{1/2} e^{-a r^2 / 2} H_n(sqrt(a) x) H_m(sqrt(a) y),
    with a = alpha_k(omega) and physicists' Hermite polynomials."""
    a = fiber_alpha(fiber, omega)
    if not np.all(np.asarray(a) > 0):
        raise DegenerateProfile("alpha_k <= 0: no confined transverse modes")
    x, y = np.asarray(x, float), np.asarray(y, float)
    sa = np.sqrt(a)
    cn = np.zeros(n + 1)
    cn[n] = 1
    cm = np.zeros(m + 1)
    cm[m] = 1
    norm = np.sqrt(a / (2.0 ** (n + m) * factorial(n) * factorial(m) * np.pi))
    return norm * np.exp(-a * (x**2 + y**2) / 2) * hermval(sa * x, cn) * hermval(sa * y, cm)


def mode_overlap(fiber: FiberSpec, n1, m1, n2, m2, omega, nodes=40):
    """int u_{n1 m1} u_{n2 m2} dx dy by Gauss-Hermite quadrature."""
    a = fiber_alpha(fiber, omega)
    x, w = np.polynomial.hermite.hermgauss(nodes)
    X, Y = np.meshgrid(x / np.sqrt(a), x / np.sqrt(a), indexing="ij")
    W = np.outer(w, w) / a * np.exp(X**2 * a + Y**2 * a)
    return float(np.sum(W * hermite_gaussian_mode(fiber, n1, m1, X, Y, omega)
                        * hermite_gaussian_mode(fiber, n2, m2, X, Y, omega)))

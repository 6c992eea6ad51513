"""Perturbative oscillator propagators, the projected auxiliary propagator,
and an exact time-domain Green's function used as an oracle.

Sign convention: every resonance oscillator obeys
``[d_t^2 + Omega_i^2(t)] Delta_i(t, t') = -delta(t - t')``, so the unperturbed
kernel in frequency space is ``1 / (omega^2 - Omega_i^2)``.  With
``Omega_i^2(t) = Omega_i^2 (1 + f_i(t))`` the Born series reads

    Delta^1 = Omega^2 Delta^0 * f * Delta^0,
    Delta^2 = Omega^2 Delta^0 * f * Delta^1.

Resonance indices ``i`` in this module are 1-based (``i = 1..N``), matching
``ModulationSpec.target_m``; branch indices ``alpha`` are 0-based.  All
spectral quantities are per quantization volume.
"""
from __future__ import annotations

from typing import Callable

import numpy as np
from scipy import integrate
from scipy.interpolate import CubicSpline

from .branches import build_branch_table
from ._quadrature import Panels as _Panels
from .errors import PoleAtResonance, QuadratureNotConverged, WronskianSingular
from .medium import POLE_TOL, MediumSpec
from .modulation import ModulationSpec, f_spectrum_per_volume, tone_pairs

MIXING_MODES = ("quadrature", "analytic", "coarse")


def _res(medium: MediumSpec, i: int):
    if not 1 <= i <= medium.N:
        raise IndexError(f"resonance index {i} out of range 1..{medium.N}")
    return medium.resonances[i - 1]


def _eps_i(spec: ModulationSpec, i: int) -> float:
    return spec.eps if i == spec.target_m else 0.0


def _pole_check(Omega: float, *omegas):
    for w in omegas:
        if np.any(np.abs(np.abs(np.asarray(w)) - Omega) < POLE_TOL):
            raise PoleAtResonance(f"frequency on resonance Omega={Omega}")


def delta0(medium: MediumSpec, i: int, omega):
    """Unperturbed propagator 1/(omega^2 - Omega_i^2) (delta(omega+omega') implicit)."""
    Om = _res(medium, i).omega_res
    _pole_check(Om, omega)
    return 1.0 / (np.asarray(omega, dtype=float) ** 2 - Om**2)


def delta1_reduced(medium: MediumSpec, spec: ModulationSpec, i: int, omega, omega_p):
    """First-order kernel Omega_i^2 F_i(omega+omega') / ((omega^2-Omega_i^2)(omega'^2-Omega_i^2))."""
    Om = _res(medium, i).omega_res
    _pole_check(Om, omega, omega_p)
    if _eps_i(spec, i) == 0:
        return np.zeros(np.broadcast(np.asarray(omega), np.asarray(omega_p)).shape)[()] * 1.0
    w, wp = np.asarray(omega, float), np.asarray(omega_p, float)
    return Om**2 * f_spectrum_per_volume(spec, w + wp) / ((w**2 - Om**2) * (wp**2 - Om**2))


# ---------------------------------------------------------------------------
# inner omega'' integral shared by the second-order kernel and the mixing term

def _inner_analytic(Om, spec, omega, S, coarse=False):
    """Closed-form large-tau value of
    J = int dw''/2pi  Om^2 F(w'') F(S - w'') / ((omega - w'')^2 - Om^2).

    Each tone pair (a, b) contributes a Gaussian product centred at
    c = (a + S - b)/2 with width 1/tau; the slowly varying denominator is
    evaluated at c.  The exact Gaussian convolution gives the weight
    (sqrt(pi)/4) eps^2 tau exp(-tau^2 (S-a-b)^2 / 4).  ``coarse=True`` instead
    uses the cruder replacement dw''/2pi -> 1/tau with the denominator at
    w'' = a: weight (pi/2) eps^2 tau exp(-tau^2 (S-a-b)^2 / 2).
    """
    omega = np.asarray(omega, float)
    S = np.asarray(S, float)
    eps, tau = spec.eps, spec.tau
    out = np.zeros(np.broadcast(omega, S).shape)
    for a, b in tone_pairs(spec):
        gap = S - a - b
        if coarse:
            c = a
            weight = 0.5 * np.pi * eps**2 * tau * np.exp(-0.5 * tau**2 * gap**2)
        else:
            c = 0.5 * (a + S - b)
            weight = 0.25 * np.sqrt(np.pi) * eps**2 * tau * np.exp(-0.25 * tau**2 * gap**2)
        out = out + weight * Om**2 / ((omega - c) ** 2 - Om**2)
    return out


def _windows(spec: ModulationSpec, width=8.0):
    """Merged intervals [a - width/tau, a + width/tau] around the signed tones."""
    h = width / spec.tau
    iv = sorted((a - h, a + h) for a in spec.signed_tones)
    merged = [list(iv[0])]
    for lo, hi in iv[1:]:
        if lo <= merged[-1][1]:
            merged[-1][1] = max(merged[-1][1], hi)
        else:
            merged.append([lo, hi])
    return merged


def _inner_quadrature(Om, spec, omega, S, rtol=1e-8):
    """Adaptive quadrature of the inner integral over the tone supports."""
    if spec.eps == 0:
        return 0.0
    wins = _windows(spec)
    for lo, hi in wins:
        for pole in (omega - Om, omega + Om):
            if lo < pole < hi:
                raise PoleAtResonance(
                    f"inner-integral pole at w''={pole:.6g} lies inside the modulation band"
                )
    F = lambda x: f_spectrum_per_volume(spec, x)
    integrand = lambda x: F(x) * F(S - x) * Om**2 / ((omega - x) ** 2 - Om**2)
    # absolute floor: a tiny fraction of the on-resonance magnitude
    scale = (spec.eps * spec.tau) ** 2 * (np.pi / 2) / spec.tau
    floor = 1e-14 * scale * max(1.0, Om**2 / max(abs((omega - a) ** 2 - Om**2) for a in spec.signed_tones))
    total, err = 0.0, 0.0
    for lo, hi in wins:
        val, e = integrate.quad(integrand, lo, hi, epsabs=floor * 1e-2, epsrel=1e-12, limit=400)
        total += val
        err += e
    total /= 2.0 * np.pi
    err /= 2.0 * np.pi
    if err > max(rtol * abs(total), floor):
        raise QuadratureNotConverged(f"inner integral error {err:.3g} vs value {total:.3g}")
    return total


def inner_integral(medium, spec, i, omega, S, mode="quadrature"):
    """The omega'' integral of the second-order kernel for resonance ``i``."""
    if mode not in MIXING_MODES:
        raise ValueError(f"mode must be one of {MIXING_MODES}")
    Om = _res(medium, i).omega_res
    if _eps_i(spec, i) == 0:
        return 0.0
    if mode == "quadrature":
        if np.ndim(omega) or np.ndim(S):
            ob, Sb = np.broadcast_arrays(np.asarray(omega, float), np.asarray(S, float))
            return np.array([_inner_quadrature(Om, spec, o, s) for o, s in zip(ob.ravel(), Sb.ravel())]).reshape(ob.shape)
        return _inner_quadrature(Om, spec, float(omega), float(S))
    return _inner_analytic(Om, spec, omega, S, coarse=(mode == "coarse"))


def delta2_reduced(medium, spec, i, omega, omega_p, mode="quadrature"):
    """Second-order kernel

        Omega_i^2 / ((w^2-Om^2)(w'^2-Om^2)) * int dw''/2pi Om^2 F(w'') F(w+w'-w'') / ((w-w'')^2 - Om^2).

    The default evaluates the inner integral by adaptive quadrature.
    """
    Om = _res(medium, i).omega_res
    _pole_check(Om, omega, omega_p)
    w, wp = np.asarray(omega, float), np.asarray(omega_p, float)
    J = inner_integral(medium, spec, i, w, w + wp, mode)
    return Om**2 * J / ((w**2 - Om**2) * (wp**2 - Om**2))


def sigma_terms(medium, branches, spec, k, alpha, alpha_p, s_omega=1, s_omega_p=1, mode="analytic"):
    """First- and second-order parts of the projected auxiliary propagator.

    sigma = sqrt(C C') sum_i g_i^2 (s w)(s' w') [Delta^1_i + Delta^2_i](s w, s' w'),
    evaluated on the branch shells at wavenumber k.  ``branches`` is a sequence
    of BranchPoint at k (solved if None).
    """
    if branches is None:
        t = build_branch_table(medium, [k])
        om, C = t.omega[0], t.C[0]
    else:
        om = np.array([b.omega_alpha for b in branches])
        C = np.array([b.C for b in branches])
    w = s_omega * om[alpha]
    wp = s_omega_p * om[alpha_p]
    pref = np.sqrt(C[alpha] * C[alpha_p]) * w * wp
    first = second = 0.0
    for i, r in enumerate(medium.resonances, start=1):
        if _eps_i(spec, i) == 0 or r.g == 0:
            continue
        first += r.g**2 * delta1_reduced(medium, spec, i, w, wp)
        second += r.g**2 * delta2_reduced(medium, spec, i, w, wp, mode)
    return float(pref * first), float(pref * second)


def sigma_projected_onshell(medium, branches, spec, k, alpha, alpha_p, s_omega=1, s_omega_p=1,
                            mode="analytic"):
    a, b = sigma_terms(medium, branches, spec, k, alpha, alpha_p, s_omega, s_omega_p, mode)
    return a + b


# ---------------------------------------------------------------------------
# time-domain oracle

def _omega2_callable(Omega_of_t):
    if callable(Omega_of_t):
        return Omega_of_t
    t, v = Omega_of_t
    return CubicSpline(np.asarray(t, float), np.asarray(v, float))


def exact_green_oracle(Omega_of_t, t_i, t_f, t_prime, t_eval=None, n_eval=201,
                       rtol=1e-13, atol=1e-15):
    """Boundary-value Green's function of [d_t^2 + Omega^2(t)] Delta = -delta(t - t').

    ``Omega_of_t`` is either a callable Omega^2(t) or a ``(t_samples, values)``
    pair that is spline-interpolated.  Returns ``(t_eval, Delta(t_eval, t'))``
    with Delta(t_i) = Delta(t_f) = 0.
    """
    if not t_i < t_prime < t_f:
        raise ValueError("need t_i < t' < t_f")
    W2 = _omega2_callable(Omega_of_t)
    rhs = lambda t, y: [y[1], -W2(t) * y[0]]
    opts = dict(method="DOP853", rtol=rtol, atol=atol, dense_output=True)
    left = integrate.solve_ivp(rhs, (t_i, t_f), [0.0, 1.0], **opts)
    right = integrate.solve_ivp(rhs, (t_f, t_i), [0.0, -1.0], **opts)
    if not (left.success and right.success):
        raise RuntimeError("oracle ODE integration failed")
    uL, uR = left.sol(t_prime), right.sol(t_prime)
    W = uL[0] * uR[1] - uL[1] * uR[0]
    scale = max(np.max(np.abs(left.y[0])), 1e-300) * max(np.max(np.abs(right.y[1])), 1e-300)
    if abs(W) < 1e-10 * scale:
        raise WronskianSingular("homogeneous solutions are degenerate: interval is resonant")
    if t_eval is None:
        t_eval = np.linspace(t_i, t_f, n_eval)
    t_eval = np.asarray(t_eval, float)
    lo = np.minimum(t_eval, t_prime)
    hi = np.maximum(t_eval, t_prime)
    return t_eval, -left.sol(lo)[0] * right.sol(hi)[0] / W


def _check_nonresonant(Omega, T):
    sT = np.sin(Omega * T)
    if abs(sT) < 1e-10:
        raise WronskianSingular("sin(Omega T) vanishes: interval is resonant")
    return sT


def green_closed_form(Omega, t_i, t_f, t, t_prime):
    """Constant-Omega boundary Green's function for the -delta source."""
    T = t_f - t_i
    _check_nonresonant(Omega, T)
    lo = np.minimum(t, t_prime)
    hi = np.maximum(t, t_prime)
    return np.sin(Omega * (t_f - hi)) * np.sin(Omega * (lo - t_i)) / (Omega * np.sin(Omega * T))


def green_series(Omega, shape: Callable, t_i, t_f, t_prime, t_eval, n_nodes=24, panels=48):
    """Born-series terms (Delta^0, Delta^1, Delta^2) of the boundary Green's
    function for Omega^2(t) = Omega^2 (1 + eps * shape(t)).

    Delta^1 and Delta^2 are returned at unit eps (scale by eps and eps^2).
    Because Delta^0(t, s) factorises on either side of s = t, each order is a
    pair of cumulative integrals, evaluated with a spectral panel rule that
    has a breakpoint at the kink t = t'.
    """
    T = t_f - t_i
    sT = _check_nonresonant(Omega, T)
    t_eval = np.atleast_1d(np.asarray(t_eval, float))
    k1 = max(1, int(round(panels * (t_prime - t_i) / T)))
    breaks = np.concatenate((np.linspace(t_i, t_prime, k1 + 1),
                             np.linspace(t_prime, t_f, max(1, panels - k1) + 1)[1:]))
    grid = _Panels(breaks, n_nodes)
    s = grid.nodes
    left = lambda x: np.sin(Omega * (x - t_i))
    right = lambda x: np.sin(Omega * (t_f - x))

    def apply(source):
        """x -> Omega^2 int Delta^0(x, u) source(u) du from node samples."""
        A = grid.cumulative(left(s) * source)
        B = grid.cumulative(right(s) * source)
        return lambda x: Omega / sT * (right(x) * A(x) + left(x) * (B.total - B(x)))

    d0 = lambda x: green_closed_form(Omega, t_i, t_f, x, t_prime)
    op1 = apply(shape(s) * d0(s))
    d1_nodes = op1(s)
    op2 = apply(shape(s) * d1_nodes)
    return d0(t_eval), op1(t_eval), op2(t_eval)


def retarded_green(Omega_of_t, t_grid, rtol=1e-12, atol=1e-14):
    """Retarded kernel of [d_t^2 + Omega^2] Delta = -delta(t) sampled on t_grid
    (zero for t < 0), integrated with the oracle's ODE stepper."""
    W2 = _omega2_callable(Omega_of_t)
    t_grid = np.asarray(t_grid, float)
    out = np.zeros_like(t_grid)
    pos = t_grid >= 0
    if np.any(pos):
        tt = t_grid[pos]
        sol = integrate.solve_ivp(lambda t, y: [y[1], -W2(t) * y[0]], (0.0, max(tt.max(), 1e-12)),
                                  [0.0, -1.0], method="DOP853", rtol=rtol, atol=atol, dense_output=True)
        out[pos] = sol.sol(tt)[0]
    return out


def susceptibility_chi(medium: MediumSpec, t_grid):
    """Diagnostic response kernel chi(t) = sum_i g_i^2 d_t^2 Delta_i^ret(t).

    ``t_grid`` must be uniform and may straddle t = 0; the second finite
    difference turns the slope jump at t = 0 into a discrete delta of weight -1
    per resonance (the instantaneous part of the response).
    """
    t = np.asarray(t_grid, float)
    h = np.diff(t)
    if len(t) < 3 or not np.allclose(h, h[0], rtol=1e-9, atol=0):
        raise ValueError("t_grid must be uniform with at least 3 points")
    h = h[0]
    chi = np.zeros_like(t)
    for r in medium.resonances:
        if r.g == 0:
            continue
        d = retarded_green(lambda _t, W=r.omega_res: W**2, t)
        dd = np.zeros_like(d)
        dd[1:-1] = (d[2:] - 2 * d[1:-1] + d[:-2]) / h**2
        dd[0], dd[-1] = dd[1] if t[0] >= 0 else 0.0, dd[-2]
        chi += r.g**2 * dd
    return chi

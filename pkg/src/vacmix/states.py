"""Driven complex harmonic oscillator: kernels, Fock wavefunctionals and
generating functionals for pair amplitudes.

A polariton mode pair (+k, -k) is one complex coordinate A with Lagrangian

    L = |dA/dt|^2 / 2 - omega^2 |A|^2 / 2 + (J* A + J A*) / 2,

equivalent to two real oscillators.  Integrals over the complex plane use the
measure d^2A = dA dA* = 2 dRe(A) dIm(A), under which the ground state
Psi_00 is normalised.  Fock labels (m, n) count -k and +k quanta.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import factorial
from typing import Callable, Optional, Union

import numpy as np
from scipy.interpolate import CubicSpline

from ._quadrature import uniform_panels
from .errors import CausticSingularity, OrderTooLarge

MAX_ORDER = 64


def _check_order(*orders):
    for o in orders:
        if o < 0:
            raise ValueError("Fock orders must be nonnegative")
        if o > MAX_ORDER:
            raise OrderTooLarge(f"order {o} exceeds {MAX_ORDER}")


# ---------------------------------------------------------------------------
# complex Hermite polynomials

def hermite_bivariate(m: int, n: int, z, w):
    """H_mn(z, w) = sum_k (-1)^k k! C(m,k) C(n,k) z^(m-k) w^(n-k).

    Coefficients are generated by the running ratio -(m-k)(n-k)/(k+1), so no
    factorials are formed.  ``z`` and ``w`` are independent complex arguments.
    """
    _check_order(m, n)
    z = np.asarray(z, complex)
    w = np.asarray(w, complex)
    zp = [np.ones_like(z)]
    for _ in range(m):
        zp.append(zp[-1] * z)
    wp = [np.ones_like(w)]
    for _ in range(n):
        wp.append(wp[-1] * w)
    coef = 1
    out = np.zeros(np.broadcast(z, w).shape, complex)
    for k in range(min(m, n) + 1):
        out = out + float(coef) * zp[m - k] * wp[n - k]
        coef = -coef * (m - k) * (n - k) // (k + 1)
    return complex(out) if out.ndim == 0 else out


def hermite_complex(m: int, n: int, x):
    """H_mn(x*, x)."""
    x = np.asarray(x, complex)
    return hermite_bivariate(m, n, np.conj(x), x)


# ---------------------------------------------------------------------------
# states

def wavefunctional(m: int, n: int, A, t: float, omega: float):
    """Psi_mn(A, t) = sqrt(w/2pi) e^{-w|A|^2/2} H_mn(sqrt(w) A*, sqrt(w) A)
    e^{-i(m+n) w t} / sqrt(m! n!)."""
    _check_order(m, n)
    A = np.asarray(A, complex)
    sw = np.sqrt(omega)
    norm = np.sqrt(omega / (2 * np.pi)) / np.sqrt(float(factorial(m)) * float(factorial(n)))
    val = (norm * np.exp(-omega * np.abs(A) ** 2 / 2) * hermite_bivariate(m, n, sw * np.conj(A), sw * A)
           * np.exp(-1j * (m + n) * omega * t))
    return complex(val) if np.ndim(val) == 0 else val


def coherent_functional(a, A, omega: float):
    """phi_a(A) = sqrt(w/2pi) exp(-w |A - a|^2 / 2)."""
    return np.sqrt(omega / (2 * np.pi)) * np.exp(-omega * np.abs(np.asarray(A) - a) ** 2 / 2)


def coherent_expansion_coeff(m: int, n: int, a: complex, omega: float) -> complex:
    """psi_mn(a) with phi_a = sum_mn psi_mn(a) Psi_mn(., t=0).

    psi_mn(a) = e^{-w|a|^2/4} (w/4)^{(m+n)/2} a^m (a*)^n / sqrt(m! n!).
    Because Psi_mn carries (A*)^m A^n at leading order, the -k count m pairs
    with a (not a*).
    """
    _check_order(m, n)
    a = complex(a)
    return (np.exp(-omega * abs(a) ** 2 / 4) * (omega / 4) ** ((m + n) / 2) * a**m * np.conj(a) ** n
            / np.sqrt(float(factorial(m)) * float(factorial(n))))


# ---------------------------------------------------------------------------
# drives

@dataclass(frozen=True)
class DriveProfile:
    """Complex drive J(t) on [t_i, t_f] acting on a mode of frequency ``omega``.

    ``J`` is a vectorised callable or a ``(t_samples, values)`` pair (spline
    interpolated).  ``panels``/``nodes`` set the Gauss-Legendre rule used for
    every time integral of the drive.
    """

    J: Union[Callable, tuple]
    omega: float
    t_i: float
    t_f: float
    panels: int = 64
    nodes: int = 16

    @property
    def T(self) -> float:
        return self.t_f - self.t_i

    def __call__(self, t):
        if callable(self.J):
            return np.asarray(self.J(t), complex)
        ts, vs = self.J
        vs = np.asarray(vs, complex)
        re, im = CubicSpline(ts, vs.real), CubicSpline(ts, vs.imag)
        t = np.asarray(t, float)
        inside = (t >= self.t_i) & (t <= self.t_f)
        return np.where(inside, re(t) + 1j * im(t), 0.0)

    def grid(self):
        return uniform_panels(self.t_i, self.t_f, self.panels, self.nodes)

    @classmethod
    def zero(cls, omega, t_i, t_f):
        return cls(lambda t: np.zeros_like(np.asarray(t, float), dtype=complex), omega, t_i, t_f)


def _caustic(omega, T):
    s = np.sin(omega * T)
    if abs(s) < 1e-12:
        raise CausticSingularity(f"omega*T = {omega * T:.12g} is a multiple of pi")
    return s


def _source_integrals(drive: DriveProfile):
    """P, Pbar, Q, Qbar and the ordered double integral R used by the action."""
    w, ti, tf = drive.omega, drive.t_i, drive.t_f
    g = drive.grid()
    t = g.nodes
    J = drive(t)
    Jc = np.conj(J)
    sl, sr = np.sin(w * (t - ti)), np.sin(w * (tf - t))
    W = g.weights
    P, Pb = np.sum(W * sl * J), np.sum(W * sl * Jc)
    Q, Qb = np.sum(W * sr * J), np.sum(W * sr * Jc)
    # R = int dt int_{t'<t} sin w(tf - t) sin w(t' - ti) [J*(t) J(t') + J(t) J*(t')]
    cJ = g.cumulative(sl * J)(t)
    cJc = g.cumulative(sl * Jc)(t)
    R = np.sum(W * sr * (Jc * cJ + J * cJc))
    return P, Pb, Q, Qb, R


def classical_action(drive: DriveProfile, A_i, A_f, T: Optional[float] = None) -> complex:
    """Action of the classical path from A_i at t_i to A_f at t_f.

    S = w/(2s) [(|A_f|^2 + |A_i|^2) c - (A_f* A_i + c.c.)]
        + (1/2s) int [sin w(t - t_i) (A_f J* + A_f* J) + sin w(t_f - t) (A_i J* + A_i* J)]
        - (1/(2 w s)) int dt int_{t'<t} sin w(t_f - t) sin w(t' - t_i) [J*(t) J(t') + J(t) J*(t')]

    with s = sin wT, c = cos wT.  ``T`` defaults to the drive window.
    """
    w = drive.omega
    T = drive.T if T is None else T
    s = _caustic(w, T)
    c = np.cos(w * T)
    A_i, A_f = complex(A_i), complex(A_f)
    bound = w / (2 * s) * ((abs(A_f) ** 2 + abs(A_i) ** 2) * c - 2 * (np.conj(A_f) * A_i).real)
    P, Pb, Q, Qb, R = _source_integrals(drive)
    lin = (A_f * Pb + np.conj(A_f) * P + A_i * Qb + np.conj(A_i) * Q) / (2 * s)
    return complex(bound + lin - R / (2 * w * s))


def transition_kernel(drive: DriveProfile, A_i, A_f, T: Optional[float] = None) -> complex:
    """<A_f, t_f | A_i, t_i>_J = w / (4 pi i sin wT) exp(i S_cl)."""
    w = drive.omega
    T = drive.T if T is None else T
    s = _caustic(w, T)
    return complex(w / (4j * np.pi * s) * np.exp(1j * classical_action(drive, A_i, A_f, T)))


def free_kernel(omega: float, T: float, A_i, A_f):
    """Undriven kernel, vectorised over A_i and A_f."""
    s = _caustic(omega, T)
    c = np.cos(omega * T)
    A_i, A_f = np.asarray(A_i, complex), np.asarray(A_f, complex)
    S = omega / (2 * s) * ((np.abs(A_f) ** 2 + np.abs(A_i) ** 2) * c - 2 * (np.conj(A_f) * A_i).real)
    return omega / (4j * np.pi * s) * np.exp(1j * S)


def beta_pm(drive: DriveProfile):
    """(beta_+, beta_-) with beta_+- = (4w)^{-1/2} int e^{+-i w (t - t_i)} J(t) dt.

    The starred companions are beta_+^* := (4w)^{-1/2} int e^{+i w (t-t_i)} J*
    = conj(beta_-) and beta_-^* = conj(beta_+); see :func:`beta_all`.
    """
    w = drive.omega
    g = drive.grid()
    t, W = g.nodes, g.weights
    J = drive(t)
    ph = np.exp(1j * w * (t - drive.t_i))
    norm = 1 / np.sqrt(4 * w)
    return complex(norm * np.sum(W * ph * J)), complex(norm * np.sum(W * np.conj(ph) * J))


def beta_all(drive: DriveProfile):
    """(beta_+, beta_-, beta_+^*, beta_-^*) in the drive-integral sense."""
    bp, bm = beta_pm(drive)
    return bp, bm, np.conj(bm), np.conj(bp)


def vacuum_persistence(drive: DriveProfile) -> complex:
    """G^J_00 = exp[-(1/4w) int dt int dt' J(t) e^{-i w |t - t'|} J*(t')] e^{-i w T}.

    Its modulus equals exp[-(1/4w) int int J cos w(t-t') J*]; the sine part
    only contributes a phase.  The time-ordered double integral is evaluated
    through two cumulative (separable) integrals.
    """
    w = drive.omega
    g = drive.grid()
    t, W = g.nodes, g.weights
    J = drive(t)
    Jc = np.conj(J)
    tau = t - drive.t_i
    fwd = g.cumulative(Jc * np.exp(1j * w * tau))  # int_{t' < t}
    bwd = g.cumulative(Jc * np.exp(-1j * w * tau))
    inner = np.exp(-1j * w * tau) * fwd(t) + np.exp(1j * w * tau) * (bwd.total - bwd(t))
    I = np.sum(W * J * inner)
    return complex(np.exp(-I / (4 * w)) * np.exp(-1j * w * drive.T))


def generating_F_J(b, a, drive: DriveProfile) -> complex:
    """Closed form of int d^2A_f d^2A_i phi_b*(A_f) <A_f|A_i>_J phi_a(A_i).

    F = G^J_00 e^{-w(|b|^2+|a|^2)/4} e^{g w (b a* + b* a)/4}
        e^{i g sqrt(w/4) (b beta_+^* + b* beta_+)} e^{i sqrt(w/4) (a beta_-^* + a* beta_-)},

    with g = e^{-i w T}; G^J_00 already carries the factor g, so J = 0
    reduces to g e^{...} exactly.
    """
    w = drive.omega
    gam = np.exp(-1j * w * drive.T)
    bp, bm, bps, bms = beta_all(drive)
    a, b = complex(a), complex(b)
    expo = (-w * (abs(b) ** 2 + abs(a) ** 2) / 4 + gam * w * (b * np.conj(a) + np.conj(b) * a) / 4
            + 1j * gam * np.sqrt(w / 4) * (b * bps + np.conj(b) * bp)
            + 1j * np.sqrt(w / 4) * (a * bms + np.conj(a) * bm))
    return complex(vacuum_persistence(drive) * np.exp(expo))


def transition_G_J(m: int, n: int, p: int, q: int, drive: DriveProfile, G00: Optional[complex] = None,
                   betas=None) -> complex:
    """Fock matrix element G^J_{mn <- pq} = <Psi_mn| K_J |Psi_pq> (time-independent
    states, so the free evolution phase e^{-i(m+n) w T} is explicit):

    G = G00 (-1)^{n+p} e^{-i(m+n) w T} / sqrt(m! n! p! q!)
        H_mp(i beta_+, -i beta_-^*) H_qn(i beta_-, -i beta_+^*).

    Equivalently, the generating functional expands as
    F(b, a)_J = sum psi*_mn(b) psi_pq(a) G_{mn <- pq}.
    """
    _check_order(m, n, p, q)
    w = drive.omega
    if G00 is None:
        G00 = vacuum_persistence(drive)
    bp, bm, bps, bms = beta_all(drive) if betas is None else betas
    norm = np.sqrt(float(factorial(m)) * factorial(n) * factorial(p) * factorial(q))
    h1 = hermite_bivariate(m, p, 1j * bp, -1j * bms)
    h2 = hermite_bivariate(q, n, 1j * bm, -1j * bps)
    return complex(G00 * (-1) ** (n + p) * np.exp(-1j * (m + n) * w * drive.T) / norm * h1 * h2)


def pair_probability_sum(drive: DriveProfile, cutoff: int = MAX_ORDER) -> float:
    """sum_{m,n <= cutoff} |G^J_{mn <- 00}|^2 (should be 1)."""
    G00 = vacuum_persistence(drive)
    betas = beta_all(drive)
    return float(sum(abs(transition_G_J(m, n, 0, 0, drive, G00, betas)) ** 2
                     for m in range(cutoff + 1) for n in range(cutoff + 1)))


# ---------------------------------------------------------------------------
# quadrature cross-checks

def _gh_plane(nodes: int, omega: float, centre: complex = 0.0):
    """Gauss-Hermite product rule on the complex plane for weight e^{-w|A-c|^2}.

    Returns points A and weights including the measure d^2A = 2 dx dy, so that
    sum(W * g(A)) ~ int d^2A e^{-w|A-c|^2} g(A).
    """
    x, wt = np.polynomial.hermite.hermgauss(nodes)
    sc = 1 / np.sqrt(omega)
    U, V = np.meshgrid(x, x, indexing="ij")
    A = centre + sc * (U + 1j * V)
    W = 2 * sc**2 * np.outer(wt, wt)
    return A.ravel(), W.ravel()


def generating_F_J_bruteforce(b, a, drive: DriveProfile, nodes: int = 40) -> complex:
    """Direct 4D quadrature of int d^2A_f d^2A_i phi_b*(A_f) K_J(A_f, A_i) phi_a(A_i)."""
    w = drive.omega
    s = _caustic(w, drive.T)
    c = np.cos(w * drive.T)
    P, Pb, Q, Qb, R = _source_integrals(drive)
    # phi_a = sqrt(w/2pi) e^{-w|A-a|^2/2}: use a rule with weight e^{-w|A-a|^2/2}
    Ai, Wi = _gh_plane(nodes, w / 2, a)
    Af, Wf = _gh_plane(nodes, w / 2, b)
    Af = Af[:, None]
    S = (w / (2 * s) * ((np.abs(Af) ** 2 + np.abs(Ai) ** 2) * c - 2 * (np.conj(Af) * Ai).real)
         + (Af * Pb + np.conj(Af) * P + Ai * Qb + np.conj(Ai) * Q) / (2 * s) - R / (2 * w * s))
    K = w / (4j * np.pi * s) * np.exp(1j * S)
    return complex((w / (2 * np.pi)) * (Wf @ (K @ Wi)))


def fock_overlap(m, n, p, q, omega, nodes=48):
    """<Psi_mn | Psi_pq> by Gauss-Hermite quadrature."""
    A, W = _gh_plane(nodes, omega)
    g = np.exp(omega * np.abs(A) ** 2)
    return complex(np.sum(W * g * np.conj(wavefunctional(m, n, A, 0, omega)) * wavefunctional(p, q, A, 0, omega)))


def self_test(verbose: bool = False):
    """Quadrature cross-checks of the oscillator machinery.

    Returns a list of ``(name, passed, detail)`` tuples.
    """
    out = []
    # 1. Hermite recurrences (Gaussian-integer arguments: exact in floating point)
    x = 2 + 3j
    bad = 0
    for m in range(10):
        for n in range(11):
            lhs = hermite_complex(m + 1, n, x)
            rhs = np.conj(x) * hermite_complex(m, n, x) - (n * hermite_complex(m, n - 1, x) if n else 0)
            lhs2 = hermite_complex(n, m + 1, x)
            rhs2 = x * hermite_complex(n, m, x) - (n * hermite_complex(n - 1, m, x) if n else 0)
            bad += (lhs != rhs) + (lhs2 != rhs2)
    out.append(("hermite recurrences m,n<=10", bad == 0, f"{bad} mismatches"))
    # 2. orthonormality
    w = 1.3
    labels = [(m, n) for m in range(4) for n in range(4)]
    err = max(abs(fock_overlap(*l1, *l2, w) - (l1 == l2)) for l1 in labels for l2 in labels)
    out.append(("Fock orthonormality m,n<=3", err < 1e-7, f"max error {err:.2e}"))
    # 3. generating functional vs brute force
    drv = DriveProfile(lambda t: 0.3 * np.exp(-(np.asarray(t) - 0.8) ** 2 / 0.08)
                       * np.exp(-0.7j * np.asarray(t)) * (1 + 0.5j), 1.0, 0.0, np.pi / 2)
    b, a = 0.3 + 0.2j, -0.1 + 0.4j
    Fc, Fb = generating_F_J(b, a, drv), generating_F_J_bruteforce(b, a, drv)
    e = abs(Fc - Fb) / abs(Fb)
    out.append(("F_J closed form vs 4D quadrature", e < 1e-4, f"rel error {e:.2e}"))
    # 4. probability conservation
    weak = DriveProfile(lambda t: 0.2 * np.exp(-(np.asarray(t) - 3.0) ** 2 / 2.0) * np.exp(-1j * np.asarray(t)),
                        1.0, 0.0, 6.0)
    tot = pair_probability_sum(weak, 20)
    out.append(("sum |G_mn<-00|^2 = 1", abs(tot - 1) < 1e-6, f"deviation {abs(tot - 1):.2e}"))
    return out

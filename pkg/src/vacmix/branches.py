"""Polariton branches: roots of D(k, omega) = 0 and Hopfield weights.

Between consecutive coupled resonances D is strictly increasing in omega (it
runs from -inf just above one pole to +inf just below the next), so each
interval holds exactly one root and plain bisection on the known sign
orientation finds it without ever evaluating at a pole.  The solver is
vectorised over k, which keeps dense sweeps cheap.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import List

import numpy as np

from .errors import BranchSolveError, DegenerateBranches, PoleAtResonance
from .medium import MediumSpec, _D_unchecked

DEGENERACY_TOL = 1e-8
_BISECT_ITERS = 80


@dataclass(frozen=True)
class BranchPoint:
    k: float
    alpha: int
    omega_alpha: float
    C: float


@dataclass(frozen=True)
class BranchTable:
    """Branch frequencies and Hopfield weights on a k grid.

    ``omega[j, alpha]`` and ``C[j, alpha]`` refer to ``k_grid[j]``.
    """

    k_grid: np.ndarray
    omega: np.ndarray
    C: np.ndarray

    @property
    def points(self) -> List[BranchPoint]:
        return [
            BranchPoint(float(k), a, float(self.omega[j, a]), float(self.C[j, a]))
            for j, k in enumerate(self.k_grid)
            for a in range(self.omega.shape[1])
        ]


def _coupled(medium: MediumSpec):
    mask = medium.gs > 0
    return mask, medium.omegas[mask]


def branch_frequencies(medium: MediumSpec, k) -> np.ndarray:
    """All N+1 branch frequencies for each k; shape ``(len(k), N+1)``.

    Roots are sorted ascending.  Resonances with g = 0 are decoupled and
    contribute a flat branch pinned at their Omega_i.
    """
    k = np.atleast_1d(np.asarray(k, dtype=float))
    if np.any(k < 0) or not np.all(np.isfinite(k)):
        raise ValueError("k must be finite and >= 0")
    mask, poles = _coupled(medium)
    edges = np.concatenate(([0.0], poles))
    roots = []
    for j, lo_edge in enumerate(edges):
        lo = np.full_like(k, lo_edge)
        if j < len(poles):
            hi = np.full_like(k, poles[j])
        else:
            # Upper branch: start near the transparent-limit asymptote and
            # grow until D changes sign.
            g2 = float(np.sum(medium.gs**2))
            hi = np.maximum(2.0 * lo_edge, 1.0) + np.sqrt(k**2 + g2)
            for _ in range(200):
                bad = _D_unchecked(medium, k, hi) <= 0
                if not np.any(bad):
                    break
                hi = np.where(bad, 2.0 * hi, hi)
            else:
                raise BranchSolveError("could not bracket the upper branch")
        for _ in range(_BISECT_ITERS):
            mid = 0.5 * (lo + hi)
            with np.errstate(divide="ignore", invalid="ignore"):
                neg = _D_unchecked(medium, k, mid) < 0
            lo = np.where(neg, mid, lo)
            hi = np.where(neg, hi, mid)
        root = 0.5 * (lo + hi)
        if j == 0:
            root = np.where(k == 0, 0.0, root)
        resid_ok = np.isfinite(root)
        if not np.all(resid_ok):
            raise BranchSolveError("non-finite root encountered")
        roots.append(root)
    out = np.stack(roots, axis=1)
    if not np.all(mask):
        pinned = np.broadcast_to(medium.omegas[~mask], (len(k), int(np.sum(~mask))))
        out = np.sort(np.concatenate([out, pinned], axis=1), axis=1)
    return out


def _hopfield_from_roots(medium: MediumSpec, roots: np.ndarray, check=True) -> np.ndarray:
    """Product formula C_a = prod_i (w_a^2 - W_i^2) / prod_{c != a} (w_a^2 - w_c^2).

    Decoupled resonances cancel identically against their pinned roots, so
    both products run over coupled quantities only; pinned roots get C = 0.
    """
    mask, poles = _coupled(medium)
    roots = np.atleast_2d(roots)
    w2 = roots**2
    P2 = poles**2
    # identify which columns are coupled roots (not pinned at a g=0 pole)
    pinned_vals = medium.omegas[~mask]
    C = np.zeros_like(roots)
    is_pinned = np.zeros(roots.shape, dtype=bool)
    for v in pinned_vals:
        is_pinned |= roots == v
    for row in range(roots.shape[0]):
        live = np.flatnonzero(~is_pinned[row])
        x = w2[row, live]
        if check and len(x) > 1:
            r = roots[row, live]
            gaps = np.diff(r)
            if np.any(gaps <= DEGENERACY_TOL * r[1:]):
                raise DegenerateBranches(f"branches coincide at row {row}: {r}")
        num = np.prod(x[:, None] - P2[None, :], axis=1)
        diff = x[:, None] - x[None, :]
        np.fill_diagonal(diff, 1.0)
        C[row, live] = num / np.prod(diff, axis=1)
    return C


def build_branch_table(medium: MediumSpec, k_grid) -> BranchTable:
    k = np.atleast_1d(np.asarray(k_grid, dtype=float))
    om = branch_frequencies(medium, k)
    return BranchTable(k, om, _hopfield_from_roots(medium, om))


def solve_branches(medium: MediumSpec, k: float) -> List[BranchPoint]:
    """All N+1 polariton roots at wavenumber k, ascending, with Hopfield weights."""
    t = build_branch_table(medium, [k])
    return [BranchPoint(float(k), a, float(t.omega[0, a]), float(t.C[0, a]))
            for a in range(t.omega.shape[1])]


def single_resonance_closed_form(k, Omega, g):
    """Analytic (omega_minus, omega_plus) for one resonance.

    Uses omega_-^2 omega_+^2 = k^2 Omega^2 to avoid cancellation in the lower
    root; algebraically identical to the textbook +- square-root form.
    """
    k, Omega, g = (np.asarray(v, dtype=float) for v in (k, Omega, g))
    s = k**2 + Omega**2 + g**2
    disc = np.sqrt(np.maximum(s**2 - 4 * k**2 * Omega**2, 0.0))
    wp2 = 0.5 * (s + disc)
    wm2 = np.where(wp2 > 0, k**2 * Omega**2 / np.where(wp2 > 0, wp2, 1.0), 0.0)
    wm, wp = np.sqrt(wm2), np.sqrt(wp2)
    if wm.ndim == 0:
        return float(wm), float(wp)
    return wm, wp


def hopfield_C(medium: MediumSpec, point: BranchPoint, branches=None) -> float:
    """Hopfield weight of ``point``; the other roots at point.k are solved if
    ``branches`` (a sequence of BranchPoint at the same k) is not supplied."""
    if branches is None:
        roots = branch_frequencies(medium, [point.k])
    else:
        roots = np.array([[b.omega_alpha for b in branches]])
    return float(_hopfield_from_roots(medium, roots)[0, point.alpha])


def hopfield_C_derivative(medium: MediumSpec, k: float, omega: float) -> float:
    """Independent form C = 1 / (dD/d omega^2) on shell, for cross-checks."""
    w2 = omega**2
    s = 1.0 - sum(r.g**2 / (w2 - r.omega_res**2) for r in medium.resonances if r.g)
    s += sum(r.g**2 * w2 / (w2 - r.omega_res**2) ** 2 for r in medium.resonances if r.g)
    return 1.0 / s


def projection_P(medium: MediumSpec, k: float, alpha: int, omega: float):
    """P_ka(omega) = sqrt((omega^2 - omega_a^2) / D(k, omega)).

    Evaluated through the factorisation D = prod_c (w^2 - w_c^2) / prod_i
    (w^2 - W_i^2), which removes the 0/0 at the shell: on shell P^2 = C.
    Returns a complex number when the ratio is negative off shell.
    """
    mask, poles = _coupled(medium)
    if np.any(np.abs(abs(omega) - poles) < 1e-9):
        raise PoleAtResonance(f"omega={omega} sits on a resonance")
    roots = branch_frequencies(medium, [k])[0]
    pinned = np.isin(roots, medium.omegas[~mask])
    if pinned[alpha]:
        return 0.0
    live = [c for c in range(len(roots)) if c != alpha and not pinned[c]]
    w2 = omega**2
    num = np.prod(w2 - poles**2)
    den = np.prod([w2 - roots[c] ** 2 for c in live]) if live else 1.0
    ratio = num / den
    return float(np.sqrt(ratio)) if ratio >= 0 else complex(np.sqrt(complex(ratio)))

"""Pair-creation amplitudes, the mixing integral, spectra and rate estimates.

Two processes are modelled for a homogeneous modulation (pairs at +-k):

* intrabranch ``("intra", a)``: both quanta on branch ``a``;
* interbranch ``("inter", a, b)``: one quantum on each of two branches.

Amplitudes are built from the projected auxiliary propagator sigma,

    G_intra = i sigma^{aa}(w_a, w_a) / (8 w_a),
    G_inter = i sigma^{ab}(w_a, w_b) / (8 sqrt(w_a w_b)),

split into a first-order (single tone, "dynamical Casimir") part and a
second-order (frequency-mixing) part.  Only the modulated resonance
``spec.target_m`` contributes.  Everything is per quantization volume.
"""
from __future__ import annotations

import logging
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import optimize, signal

from .branches import BranchPoint, branch_frequencies, _hopfield_from_roots
from .errors import InvalidProcess
from .medium import MediumSpec, n_squared
from .modulation import ModulationSpec, f_spectrum_per_volume
from .propagators import MIXING_MODES, inner_integral

log = logging.getLogger(__name__)

#: Peaks below this fraction of the spectrum maximum are not reported.
REPORT_FLOOR = 1e-12


class GridTooCoarse(UserWarning):
    """The k grid under-resolves the Gaussian peak width; it was refined."""


# ---------------------------------------------------------------------------
# process bookkeeping

def parse_process(p) -> tuple:
    """Normalise a process spec: ``("intra", a)``, ``("inter", a, b)`` or the
    string forms ``"intra:1"`` / ``"inter:1-0"``."""
    if isinstance(p, str):
        kind, _, rest = p.partition(":")
        if kind == "intra":
            p = ("intra", int(rest))
        elif kind == "inter":
            a, b = rest.split("-")
            p = ("inter", int(a), int(b))
        else:
            raise InvalidProcess(f"unknown process {p!r}")
    p = tuple(p)
    if p[0] == "intra" and len(p) == 2:
        return ("intra", int(p[1]))
    if p[0] == "inter" and len(p) == 3:
        if int(p[1]) == int(p[2]):
            raise InvalidProcess("interbranch process needs two distinct branches")
        return ("inter", int(p[1]), int(p[2]))
    raise InvalidProcess(f"malformed process {p!r}")


def process_name(p) -> str:
    p = parse_process(p)
    return f"intra:{p[1]}" if p[0] == "intra" else f"inter:{p[1]}-{p[2]}"


def _branches_of(p) -> Tuple[int, int]:
    return (p[1], p[1]) if p[0] == "intra" else (p[1], p[2])


def resonance_conditions(spec: ModulationSpec, process) -> List[Tuple[str, float]]:
    """Labelled targets for the condition variable x of a process.

    x = 2 w_a (intra) or w_a + w_b (inter).  Conditions whose targets lie
    within 0.5/tau of each other are merged into one entry with a joined label.
    """
    p = parse_process(process)
    nus = {"nu1": spec.nu1} if spec.nu2 is None else {"nu1": spec.nu1, "nu2": spec.nu2}
    raw = []
    for n, v in nus.items():
        raw.append((n, v))
        raw.append((f"2{n}", 2 * v))
    if spec.nu2 is not None:
        raw.append(("nu1+nu2", spec.nu1 + spec.nu2))
        raw.append(("|nu1-nu2|", abs(spec.nu1 - spec.nu2)))
    if p[0] == "intra":
        def lab(s):
            return {"nu1": "w=nu1/2", "nu2": "w=nu2/2", "2nu1": "w=nu1", "2nu2": "w=nu2",
                    "nu1+nu2": "w=(nu1+nu2)/2", "|nu1-nu2|": "w=|nu1-nu2|/2"}[s]
    else:
        def lab(s):
            return f"w+w'={s}"
    raw.sort(key=lambda t: t[1])
    merged: List[Tuple[str, float]] = []
    for name, v in raw:
        if merged and abs(v - merged[-1][1]) <= 0.5 / spec.tau:
            merged[-1] = (merged[-1][0] + "|" + lab(name), merged[-1][1])
        else:
            merged.append((lab(name), v))
    return merged


def _labels_at(conds, x, tol):
    return tuple(l for l, v in conds if abs(x - v) <= tol)


# ---------------------------------------------------------------------------
# vectorised amplitude core

def _target(medium: MediumSpec, spec: ModulationSpec):
    if not 1 <= spec.target_m <= medium.N:
        raise ValueError(f"target_m={spec.target_m} out of range 1..{medium.N}")
    r = medium.resonances[spec.target_m - 1]
    return r.omega_res, r.g


def _mixing_core(medium, spec, w, wp, mode):
    Om, _ = _target(medium, spec)
    J = inner_integral(medium, spec, spec.target_m, w, w + wp, mode)
    return np.sqrt(w * wp) * J


def _amplitude_core(medium, spec, w, wp, C, Cp, mode="analytic", subleading=False):
    """First- and second-order amplitude parts for pairs (w, wp) (arrays)."""
    Om, g = _target(medium, spec)
    w, wp, C, Cp = (np.asarray(v, float) for v in (w, wp, C, Cp))
    den = (w**2 - Om**2) * (wp**2 - Om**2)
    pref = 1j * np.sqrt(C * Cp) * g**2 * Om**2 / (8.0 * den)
    first = pref * np.sqrt(w * wp) * f_spectrum_per_volume(spec, w + wp)
    second = pref * _mixing_core(medium, spec, w, wp, mode)
    if subleading:
        # -(sigma(-w, w') sigma(w, w)) / (128 sqrt(w^3 w')) with first-order sigmas
        F = lambda x: f_spectrum_per_volume(spec, x)
        third = (np.sqrt(C * Cp) * C * g**4 * Om**4 * np.sqrt(w**3 * wp) * F(wp - w) * F(2 * w)
                 / (128.0 * (w**2 - Om**2) ** 3 * (wp**2 - Om**2)))
        second = second + third
    return first, second


@dataclass(frozen=True)
class PairAmplitude:
    k: float
    process: tuple
    value: complex
    order_split: Tuple[complex, complex]
    labels: Tuple[str, ...] = ()

    @property
    def prob(self) -> float:
        return abs(self.value) ** 2


def _branch_data(medium, branches, k):
    if branches is None:
        om = branch_frequencies(medium, [k])
        return om[0], _hopfield_from_roots(medium, om)[0]
    return (np.array([b.omega_alpha for b in branches]), np.array([b.C for b in branches]))


def _pair(medium, branches, spec, k, p, mode, subleading):
    om, C = _branch_data(medium, branches, k)
    a, b = _branches_of(p)
    if max(a, b) >= len(om) or min(a, b) < 0:
        raise InvalidProcess(f"branch index out of range for {p}")
    first, second = _amplitude_core(medium, spec, om[a], om[b], C[a], C[b], mode,
                                    subleading and p[0] == "inter")
    first, second = complex(first), complex(second)
    val = first + second
    if abs(val) ** 2 > 1:
        warnings.warn(f"|G|^2 = {abs(val)**2:.3g} > 1 at k={k}: outside perturbative regime")
    x = om[a] + om[b]
    labels = _labels_at(resonance_conditions(spec, p), x, 3.0 / spec.tau)
    return PairAmplitude(float(k), p, val, (first, second), labels)


def mixing_integral(medium, branches, spec, k, alpha, alpha_p, mode="analytic") -> float:
    """sqrt(w_a w_b) int dw'/2pi Om_m^2 F(w') F(w_a + w_b - w') / ((w_a - w')^2 - Om_m^2).

    ``mode`` is "quadrature" (adaptive), "analytic" (exact Gaussian convolution
    with a frozen denominator) or "coarse" (the cruder dw'/2pi -> 1/tau rule).
    """
    om, _ = _branch_data(medium, branches, k)
    return float(_mixing_core(medium, spec, om[alpha], om[alpha_p], mode))


def g_intra(medium, branches, spec, k, alpha, mode="analytic") -> PairAmplitude:
    """Amplitude for a back-to-back pair on branch ``alpha``."""
    return _pair(medium, branches, spec, k, ("intra", alpha), mode, False)


def g_inter(medium, branches, spec, k, alpha, alpha_p, mode="analytic",
            include_subleading=False) -> PairAmplitude:
    """Amplitude for a pair split across branches ``alpha`` and ``alpha_p``."""
    if alpha == alpha_p:
        raise InvalidProcess("alpha' == alpha: use g_intra")
    return _pair(medium, branches, spec, k, ("inter", alpha, alpha_p), mode, include_subleading)


# ---------------------------------------------------------------------------
# spectra

@dataclass(frozen=True)
class SpectrumRow:
    k: float
    lambda_vac: float
    probs: Dict[str, float]
    first: Dict[str, float]
    second: Dict[str, float]
    total: float


@dataclass
class Peak:
    process: str
    position_k: float
    position_lambda: float
    condition: str
    prob_max: float
    fwhm: float
    x: float
    target: float

    def as_dict(self, digits=6):
        r = lambda v: float(f"{v:.{digits}g}") if np.isfinite(v) else None
        return {"process": self.process, "position_k": r(self.position_k),
                "position_lambda": r(self.position_lambda), "condition": self.condition,
                "prob_max": r(self.prob_max), "fwhm": r(self.fwhm)}


@dataclass
class Spectrum:
    """Probabilities on a k grid.  ``amps[name]`` holds complex (first, second)
    parts per process; the coherent total sums all processes."""

    medium: MediumSpec
    spec: ModulationSpec
    processes: List[tuple]
    k: np.ndarray
    omega: np.ndarray  # branch frequencies, shape (K, N+1)
    amps: Dict[str, Tuple[np.ndarray, np.ndarray]]
    mode: str = "analytic"
    subleading: bool = False
    ref_branch: int = 1
    refined: bool = False

    @property
    def lambda_vac(self) -> np.ndarray:
        with np.errstate(divide="ignore"):
            return 2 * np.pi / self.omega[:, self.ref_branch]

    def prob(self, name: str, part: str = "all") -> np.ndarray:
        f, s = self.amps[name]
        return np.abs({"all": f + s, "1": f, "2": s}[part]) ** 2

    @property
    def total(self) -> np.ndarray:
        tot = sum(f + s for f, s in self.amps.values())
        return np.abs(tot) ** 2

    def rows(self) -> List[SpectrumRow]:
        lam, tot = self.lambda_vac, self.total
        names = list(self.amps)
        P = {n: self.prob(n) for n in names}
        P1 = {n: self.prob(n, "1") for n in names}
        P2 = {n: self.prob(n, "2") for n in names}
        return [SpectrumRow(float(self.k[j]), float(lam[j]), {n: float(P[n][j]) for n in names},
                            {n: float(P1[n][j]) for n in names}, {n: float(P2[n][j]) for n in names},
                            float(tot[j])) for j in range(len(self.k))]


def _eval_chunk(medium, spec, k, processes, mode, subleading):
    om = branch_frequencies(medium, k)
    C = _hopfield_from_roots(medium, om, check=False)
    out = {}
    for p in processes:
        a, b = _branches_of(p)
        out[process_name(p)] = _amplitude_core(medium, spec, om[:, a], om[:, b], C[:, a], C[:, b],
                                               mode, subleading and p[0] == "inter")
    return om, out


def _condition_x(om, p):
    a, b = _branches_of(p)
    return om[..., a] + om[..., b]


def spectrum(medium: MediumSpec, spec: ModulationSpec, k_grid, processes=(("intra", 1), ("inter", 1, 0)),
             mode: str = "analytic", include_subleading: bool = False, threads: int = 1,
             chunk: int = 256, refine: bool = True) -> Spectrum:
    """Pair-emission probabilities on ``k_grid`` for each process and in total.

    The grid is split into chunks evaluated on a thread pool; results are
    reassembled in grid order, so output does not depend on ``threads``.
    If the grid spacing exceeds a quarter of the Gaussian peak width 1/tau in
    any condition variable, it is uniformly refined and GridTooCoarse is warned.
    """
    if mode not in MIXING_MODES:
        raise ValueError(f"mode must be one of {MIXING_MODES}")
    procs = [parse_process(p) for p in processes]
    k = np.asarray(k_grid, float)
    if k.ndim != 1 or len(k) < 2 or np.any(np.diff(k) <= 0):
        raise ValueError("k_grid must be strictly ascending with >= 2 points")
    refined = False
    if refine:
        om = branch_frequencies(medium, k)
        worst = max(np.max(np.abs(np.diff(_condition_x(om, p)))) for p in procs)
        factor = int(np.ceil(worst * 4 * spec.tau))
        if factor > 1:
            warnings.warn(f"k grid too coarse by factor {factor}; refining", GridTooCoarse)
            fine = np.linspace(0, len(k) - 1, (len(k) - 1) * factor + 1)
            k = np.interp(fine, np.arange(len(k)), k)
            refined = True
    chunks = [k[i:i + chunk] for i in range(0, len(k), chunk)]

    def work(idx_chunk):
        idx, kc = idx_chunk
        res = _eval_chunk(medium, spec, kc, procs, mode, include_subleading)
        log.info("chunk %d/%d done (k %.4g..%.4g)", idx + 1, len(chunks), kc[0], kc[-1])
        return res

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            results = list(ex.map(work, enumerate(chunks)))
    else:
        results = [work(c) for c in enumerate(chunks)]
    om = np.concatenate([r[0] for r in results])
    amps = {}
    for p in procs:
        n = process_name(p)
        amps[n] = (np.concatenate([r[1][n][0] for r in results]),
                   np.concatenate([r[1][n][1] for r in results]))
    ref = max(_branches_of(procs[0]))
    return Spectrum(medium, spec, procs, k, om, amps, mode, include_subleading, ref, refined)


def k_grid_for_wavelengths(medium: MediumSpec, lambda_min: float, lambda_max: float, points: int) -> np.ndarray:
    """k grid covering a vacuum-wavelength window on the branch with n^2 > 0.

    The grid is uniform in omega; on any branch k = omega n(omega).
    """
    w = np.linspace(2 * np.pi / lambda_max, 2 * np.pi / lambda_min, points)
    n2 = n_squared(medium, w)
    if np.any(n2 <= 0):
        raise ValueError("wavelength window crosses a stop band")
    return w * np.sqrt(n2)


def _continuous(sp: Spectrum, p, kk):
    kk = np.atleast_1d(kk)
    om, amps = _eval_chunk(sp.medium, sp.spec, kk, [p], sp.mode, sp.subleading)
    f, s = amps[process_name(p)]
    return om, np.abs(f + s) ** 2


def find_spectrum_peaks(sp: Spectrum, floor: float = REPORT_FLOOR) -> List[Peak]:
    """Local maxima of each process curve, refined off-grid and labelled.

    A peak is labelled with the nearest resonance condition within 3/tau of
    its condition variable; anything else is reported as "unlabelled".  Peaks
    below ``floor`` times the global maximum are dropped.
    """
    gmax = max((np.max(sp.prob(process_name(p))) for p in sp.processes), default=0.0)
    if not gmax > 0:
        return []
    peaks = []
    tau = sp.spec.tau
    for p in sp.processes:
        name = process_name(p)
        P = sp.prob(name)
        conds = resonance_conditions(sp.spec, p)
        idx, _ = signal.find_peaks(P)
        for j in idx:
            if P[j] < floor * gmax:
                continue
            lo, hi = sp.k[j - 1], sp.k[j + 1]
            res = optimize.minimize_scalar(lambda q: -_continuous(sp, p, q)[1][0], bounds=(lo, hi),
                                           method="bounded", options={"xatol": 1e-12 * hi})
            kp = float(res.x)
            om_p, Pp = _continuous(sp, p, kp)
            pmax = max(float(Pp[0]), float(P[j]))
            if P[j] > Pp[0]:
                kp, om_p = float(sp.k[j]), sp.omega[j:j + 1]
            x = float(_condition_x(om_p[0], p))
            half = 0.5 * pmax
            f = lambda q: _continuous(sp, p, q)[1][0] - half

            def edge(step):
                jj = j
                while 0 <= jj + step < len(sp.k) and P[jj + step] >= half:
                    jj += step
                if not 0 <= jj + step < len(sp.k):
                    return None
                a, b = sorted((sp.k[jj + step], kp if jj == j else sp.k[jj]))
                try:
                    return optimize.brentq(f, a, b, xtol=1e-14 * b)
                except ValueError:
                    return None

            kl, kr = edge(-1), edge(+1)
            if kl is None or kr is None:
                fwhm = float("nan")
            else:
                oml, _ = _continuous(sp, p, kl)
                omr, _ = _continuous(sp, p, kr)
                fwhm = float(_condition_x(omr[0], p) - _condition_x(oml[0], p))
            best = min(conds, key=lambda c: abs(c[1] - x)) if conds else ("unlabelled", np.nan)
            if abs(best[1] - x) > 3.0 / tau:
                best = ("unlabelled", float("nan"))
            peaks.append(Peak(name, kp, float(2 * np.pi / om_p[0][sp.ref_branch]), best[0], pmax,
                              fwhm, x, float(best[1])))
    peaks.sort(key=lambda q: q.position_k)
    return peaks


def emission_rate_per_angle(spectrum_or_prob, A_spot: float, lambda_mix: float, tau: float) -> float:
    """Pairs per pulse per unit angle, A_spot (2pi/tau) (2pi/lambda_mix) |G|^2.

    ``spectrum_or_prob`` is either |G|^2 at lambda_mix or a Spectrum, whose
    coherent total is interpolated at lambda_mix.
    """
    if isinstance(spectrum_or_prob, Spectrum):
        lam, tot = spectrum_or_prob.lambda_vac, spectrum_or_prob.total
        order = np.argsort(lam)
        prob = float(np.interp(lambda_mix, lam[order], tot[order]))
    else:
        prob = float(spectrum_or_prob)
    return A_spot * (2 * np.pi / tau) * (2 * np.pi / lambda_mix) * prob

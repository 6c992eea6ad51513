"""Guided modes of a weakly graded fiber.

A parabolic index profile of depth Delta confines light to Hermite-Gauss
modes (n, m).  The transverse confinement adds an energy (n + m + 1/2) 2
alpha_k to the dispersion relation, so higher modes sit at higher frequency.
The shift vanishes linearly as Delta -> 0.  Close to the infrared resonance
the width parameter alpha_k diverges and no perturbative guided root
exists; such points come back as NaN.

    python demos/06_fiber.py
"""
import warnings

import numpy as np

from vacmix import FiberSpec, branch_frequencies, fiber_branches, fused_silica


def main():
    fs = fused_silica()
    k = np.array([5.0, 10.0, 15.0, 20.0])
    bulk = branch_frequencies(fs, k)[:, 1]
    fib = FiberSpec(fs, 1e-3)
    print("photon-like branch, Delta = 1e-3: omega_nm(k) - omega_bulk(k)")
    print("   k   " + "".join(f"  ({n},{m})     " for n, m in [(0, 0), (1, 0), (1, 1), (2, 2)]))
    for j, kk in enumerate(k):
        row = [fiber_branches(fib, [kk], n, m, alphas=[1])[0, 0] - bulk[j] for n, m in [(0, 0), (1, 0), (1, 1), (2, 2)]]
        print(f"{kk:5.1f} " + "".join(f"{v:12.4e} " for v in row))

    print("\nshift of the (1,1) mode at k = 10 as Delta -> 0:")
    for d in (1e-3, 1e-4, 1e-5):
        w = fiber_branches(FiberSpec(fs, d), [10.0], 1, 1, alphas=[1])[0, 0]
        print(f"  Delta = {d:.0e}: {w - bulk[1]:.4e}")

    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        low = fiber_branches(fib, k, 0, 0, alphas=[0])[:, 0]
    print("\nlowest (infrared) branch:", low)
    for w in caught:
        print("  warning:", w.message)


if __name__ == "__main__":
    main()

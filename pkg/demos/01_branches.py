"""Polariton branches of fused silica.

Light inside a dispersive medium is not a free photon: it hybridises with the
material resonances into polariton branches omega_alpha(k).  This script
solves the dispersion relation on a k grid, prints the branch frequencies and
their Hopfield weights C (how photon-like each branch is), and shows that
the photon-like branch covers the optical window.

    python demos/01_branches.py [--plot]
"""
import argparse

import numpy as np

from vacmix import build_branch_table, fused_silica, single_resonance_closed_form
from vacmix.medium import MediumSpec


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--plot", action="store_true", help="save demos/out/branches.png")
    args = ap.parse_args()

    fs = fused_silica()
    print("Resonances (rad/um):", np.round(fs.omegas, 4))
    print("Coupling strengths g (rad/um):", np.round(fs.gs, 4))

    k = np.array([0.5, 2.0, 5.0, 10.0, 15.0, 20.0])
    table = build_branch_table(fs, k)
    print("\n   k    " + "".join(f"  omega_{a}    C_{a}   " for a in range(fs.N + 1)))
    for j, kk in enumerate(k):
        cells = "".join(f"{table.omega[j, a]:10.4f} {table.C[j, a]:7.4f} " for a in range(fs.N + 1))
        print(f"{kk:6.2f} {cells}")
    print("\nEach k has N+1 = 4 roots, interlaced with the resonances.  Branch 1")
    print("(between the infrared and the first ultraviolet resonance) carries")
    print("visible and near-infrared light, omega ~ k / n.  Its photon weight is")
    print("only about one half, because the strong ultraviolet oscillators carry")
    print("the other half of the excitation.")

    # a one-resonance check against the analytic pair of roots
    one = MediumSpec.single(1.0, 1.0)
    print("\nSingle resonance Omega = g = k = 1: numeric",
          np.round(build_branch_table(one, [1.0]).omega[0], 10),
          "closed form", np.round(single_resonance_closed_form(1.0, 1.0, 1.0), 10))

    if args.plot:
        import os
        import matplotlib
        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
        kk = np.linspace(0.01, 25, 600)
        t = build_branch_table(fs, kk)
        fig, ax = plt.subplots(1, 2, figsize=(10, 4))
        for a in range(fs.N + 1):
            ax[0].plot(kk, t.omega[:, a])
            ax[1].plot(kk, t.C[:, a], label=f"branch {a}")
        ax[0].set(xlabel="k (1/um)", ylabel="omega (rad/um)", ylim=(0, 100))
        ax[1].set(xlabel="k (1/um)", ylabel="Hopfield weight C")
        ax[1].legend()
        os.makedirs(os.path.join(os.path.dirname(__file__), "out"), exist_ok=True)
        path = os.path.join(os.path.dirname(__file__), "out", "branches.png")
        fig.savefig(path, dpi=120, bbox_inches="tight")
        print("saved", path)


if __name__ == "__main__":
    main()

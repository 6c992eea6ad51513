"""A single driven oscillator mode and its pair amplitudes.

A driven mode starts in the vacuum.  The script computes the probability that
it stays there (vacuum persistence) and the amplitudes for ending in each
two-mode Fock state.  Their squares sum to one.  It also runs the built-in
quadrature self-test of the Hermite and wavefunctional machinery.

    python demos/05_states.py
"""
import numpy as np

from vacmix.states import DriveProfile, beta_pm, pair_probability_sum, self_test, transition_G_J, vacuum_persistence


def main():
    drive = DriveProfile(lambda t: 0.4 * np.exp(-(np.asarray(t) - 3.0) ** 2 / 2.0) * np.exp(-1j * np.asarray(t)),
                         1.0, 0.0, 6.0)
    bp, bm = beta_pm(drive)
    G00 = vacuum_persistence(drive)
    print(f"beta+ = {bp:.4f}, beta- = {bm:.4f}")
    print(f"|G00|^2 = {abs(G00) ** 2:.6f}  (= exp(-|beta+|^2 - |beta-|^2) = "
          f"{np.exp(-abs(bp) ** 2 - abs(bm) ** 2):.6f})")
    print("\n |G_mn<-00|^2:")
    for m in range(4):
        print("  " + " ".join(f"{abs(transition_G_J(m, n, 0, 0, drive, G00)) ** 2:10.3e}" for n in range(4)))
    print(f"\nsum over m, n <= 20: {pair_probability_sum(drive, 20):.12f}")
    print("\nself-test:")
    for name, ok, detail in self_test():
        print(f"  {'PASS' if ok else 'FAIL'}  {name}: {detail}")


if __name__ == "__main__":
    main()

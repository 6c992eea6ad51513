"""Perturbative Green's function of a modulated oscillator.

The boundary-value Green's function of an oscillator is
[d_t^2 + Omega^2 (1 + eps f(t))].  It is expanded to second order in eps and
compared with a direct high-accuracy ODE solution.  The remainder must shrink
like eps^3, which checks the whole perturbative machinery behind the
emission amplitudes.

    python demos/04_green_oracle.py
"""
import numpy as np

from vacmix import exact_green_oracle, green_series


def main():
    Om, ti, tf, tp, nu, tau = 1.0, -6.0, 6.0, 0.7, 2.0, 3.0
    shape = lambda t: np.cos(nu * t) * np.exp(-np.asarray(t) ** 2 / (2 * tau**2))
    t = np.linspace(ti, tf, 61)
    d0, d1, d2 = green_series(Om, shape, ti, tf, tp, t)
    print(f"{'eps':>8} {'|exact - order0|':>17} {'... - order1':>13} {'... - order2':>13}")
    eps = [1e-4, 3e-4, 1e-3, 3e-3, 1e-2]
    res2 = []
    for e in eps:
        _, ex = exact_green_oracle(lambda s: Om**2 * (1 + e * shape(s)), ti, tf, tp, t_eval=t)
        r = [np.max(np.abs(ex - d0)), np.max(np.abs(ex - d0 - e * d1)),
             np.max(np.abs(ex - d0 - e * d1 - e**2 * d2))]
        res2.append(r[2])
        print(f"{e:8.0e} {r[0]:17.3e} {r[1]:13.3e} {r[2]:13.3e}")
    slope = np.polyfit(np.log(eps), np.log(res2), 1)[0]
    print(f"\nfitted slope of the second-order remainder: {slope:.3f} (expected 3)")


if __name__ == "__main__":
    main()

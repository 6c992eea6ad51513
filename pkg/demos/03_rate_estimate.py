"""How many frequency-mixing pairs does a real experiment see?

The pairs per pulse per unit emission angle are estimated as
A_spot * (2 pi / tau) * (2 pi / lambda_mix) * |G|^2, where |G|^2 is the height
of the frequency-mixing peak.  Multiplying by the repetition rate gives pairs
per second.  The script then shows how the rate scales with the index
modulation.

    python demos/03_rate_estimate.py
"""
import os
import warnings

from vacmix.cli import compute_spectrum, estimate_rate
from vacmix.config import from_dict, load_config

HERE = os.path.dirname(__file__)


def main():
    cfg = load_config(os.path.join(HERE, "configs", "fig3.yaml"))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        r = estimate_rate(cfg, spectrum_and_peaks=compute_spectrum(cfg))
    print(f"spot {r['A_spot_um']:g} um, repetition {r['repetition_rate_hz']:.0e} Hz")
    print(f"mixing peak at {r['lambda_mix_um']:.4f} um with |G|^2 = {r['prob_at_peak']:.3e}")
    print(f"pairs per pulse per radian: {r['dP_dtheta_per_pulse']:.3e}")
    print(f"pairs per second:           {r['pairs_per_second']:.3g}")

    print("\nThe mixing peak is second order in the modulation, so the rate goes as dn^4:")
    for dn in (5e-4, 1e-3, 2e-3):
        c = from_dict({"modulation": {"delta_n_at_lambda": {"delta_n": dn, "lambda_um": 0.65}},
                       "sweep": {"lambda_min_um": 0.6, "lambda_max_um": 0.67, "points": 400}})
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            print(f"  dn = {dn:.0e}: {estimate_rate(c)['pairs_per_second']:.3g} pairs/s")


if __name__ == "__main__":
    main()

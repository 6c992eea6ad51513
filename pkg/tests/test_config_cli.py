import csv
import io
import json
import math
import os

import numpy as np
import pytest
import yaml

from vacmix.cli import EXIT_CONFIG, EXIT_NUMERIC, EXIT_OK, estimate_rate, main, run_spectrum
from vacmix.config import RunConfig, dump_config, from_dict, load_config
from vacmix.errors import ConfigError
from vacmix.medium import FS_TO_UM, delta_n, fused_silica


def cfg_from(text):
    return load_config(io.StringIO(text))


# ---------------------------------------------------------------- config

def test_empty_file_gives_default_run(tmp_path):
    p = tmp_path / "empty.yaml"
    p.write_text("")
    cfg = load_config(str(p))
    fs = fused_silica()
    assert cfg.medium == fs
    m = cfg.modulation
    assert m.target_m == 2
    assert m.nu1 == fs.omegas[1] / 5 and m.nu2 == fs.omegas[1] / 6
    assert m.tau == pytest.approx(42 * FS_TO_UM)
    assert abs(delta_n(fs, 2 * np.pi / 0.65, [0, m.eps, 0])) == pytest.approx(1e-3, rel=1e-10)
    assert (cfg.sweep.kind, cfg.sweep.lo, cfg.sweep.hi, cfg.sweep.points) == ("lambda", 0.4, 2.0, 4000)
    assert cfg.processes == (("intra", 1), ("inter", 1, 0))
    assert cfg.flags.mixing_mode == "analytic" and not cfg.flags.include_subleading
    assert cfg.outputs.csv == "spectrum.csv" and cfg.outputs.peaks == "peaks.json"
    assert (cfg.rate.A_spot, cfg.rate.repetition_rate) == (250.0, 1e6)


def test_negative_tau():
    with pytest.raises(ConfigError) as e:
        cfg_from("modulation: {tau_fs: -5}")
    assert str(e.value) == "modulation.tau_fs must be > 0"


def test_unknown_key_suggestion():
    with pytest.raises(ConfigError, match="did you mean 'modulation'"):
        cfg_from("modulaton: {}")
    with pytest.raises(ConfigError, match=r"sweep.lamda_min_um .*lambda_min_um"):
        cfg_from("sweep: {lamda_min_um: 0.5}")


@pytest.mark.parametrize("text, where", [
    ("sweep: {lambda_min_um: 0.5, k_min: 3}", "sweep"),
    ("sweep: {lambda_min_um: 2.5}", "sweep"),
    ("processes: {intra: [5]}", "processes.intra[0]"),
    ("processes: {inter: [[1, 1]]}", "processes.inter[0]"),
    ("flags: {mixing_mode: fancy}", "flags.mixing_mode"),
    ("flags: {threads: 0}", "flags.threads"),
    ("schema: 2", "schema"),
    ("modulation: {eps: 0.01, delta_n_at_lambda: {delta_n: 1.0e-3, lambda_um: 0.65}}", "modulation"),
    ("modulation: {target_m: 4}", "modulation.target_m"),
    ("medium: {resonances: [{omega: 1.0, B: 0.5}]}", "medium.resonances[0]"),
    ("medium: {name: glass}", "medium.resonances"),
    ("oracle: {t_prime: 9}", "oracle"),
])
def test_validation_paths(text, where):
    with pytest.raises(ConfigError) as e:
        cfg_from(text)
    assert e.value.path == where


def test_malformed_yaml():
    with pytest.raises(ConfigError, match="malformed"):
        cfg_from("medium: [unclosed")


def test_custom_medium_and_single_tone():
    cfg = cfg_from("""
medium:
  name: two-line
  resonances:
    - {lambda_um: 0.1, B: 1.0}
    - {omega: 2.0, g: 0.5}
modulation: {target_m: 2, eps: 0.01, nu1: 30.0, single_tone: true, tau_um: 5.0}
processes: {intra: [2], inter: []}
""")
    assert cfg.medium.N == 2 and cfg.medium.omegas[0] == 2.0
    assert cfg.medium.resonances[1].g == pytest.approx(2 * np.pi / 0.1)
    assert cfg.modulation.nu2 is None and cfg.modulation.tau == 5.0
    assert cfg.processes == (("intra", 2),)


def test_round_trip(tmp_path):
    cfg = cfg_from("modulation: {tau_fs: 37.3, delta_n_at_lambda: {delta_n: 2.0e-3, lambda_um: 0.7}}\n"
                   "sweep: {k_min: 4.0, k_max: 20.0, points: 900}\nflags: {mixing_mode: coarse}")
    text = dump_config(cfg)
    again = load_config(io.StringIO(text))
    assert again == cfg
    assert dump_config(again) == text
    default = from_dict({})
    assert load_config(io.StringIO(dump_config(default))) == default


def test_stdin(monkeypatch):
    monkeypatch.setattr("sys.stdin", io.StringIO("flags: {threads: 3}"))
    assert load_config("-").flags.threads == 3


# ---------------------------------------------------------------- runs

SMALL = """
sweep: {lambda_min_um: 0.55, lambda_max_um: 0.78, points: 600}
"""


def test_run_spectrum_outputs(tmp_path):
    cfg = from_dict({})
    status, paths = run_spectrum(cfg, str(tmp_path))
    assert status == EXIT_OK
    report = json.loads(open(paths["peaks"]).read())
    peaks = report["peaks"]
    assert len(peaks) == 7 and all(p["condition"] != "unlabelled" for p in peaks)
    assert set(peaks[0]) >= {"position_k", "position_lambda", "condition", "prob_max", "fwhm"}
    assert all(0.4 <= p["position_lambda"] <= 2.0 for p in peaks)
    with open(paths["csv"]) as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["k_um_inv", "lambda_vac_um", "process", "order", "prob", "total_prob", "labels"]
    assert {r[3] for r in rows[1:]} == {"1", "2", "all"}
    # 17 significant digits round-trip the float exactly
    k0 = float(rows[1][0])
    assert repr(k0) == repr(float(f"{k0:.17g}"))


def test_zero_eps_run(tmp_path):
    cfg = cfg_from("modulation: {eps: 0.0}\n" + SMALL)
    _, paths = run_spectrum(cfg, str(tmp_path))
    assert json.loads(open(paths["peaks"]).read())["peaks"] == []
    with open(paths["csv"]) as fh:
        rows = list(csv.DictReader(fh))
    assert all(float(r["prob"]) == 0 and float(r["total_prob"]) == 0 for r in rows)


def test_deterministic_and_thread_independent(tmp_path):
    cfg = cfg_from(SMALL)
    _, a = run_spectrum(cfg, str(tmp_path / "a"))
    _, b = run_spectrum(cfg, str(tmp_path / "b"))
    cfg4 = cfg_from(SMALL + "flags: {threads: 4}")
    _, c = run_spectrum(cfg4, str(tmp_path / "c"))
    data = [open(p["csv"], "rb").read() for p in (a, b, c)]
    assert data[0] == data[1] == data[2]


def test_quadrature_vs_analytic_peaks(tmp_path):
    rep = {}
    for mode in ("analytic", "quadrature"):
        cfg = cfg_from(SMALL + f"flags: {{mixing_mode: {mode}, threads: 4}}")
        _, paths = run_spectrum(cfg, str(tmp_path / mode))
        rep[mode] = json.loads(open(paths["peaks"]).read())["peaks"]
    assert [p["condition"] for p in rep["analytic"]] == [p["condition"] for p in rep["quadrature"]]
    for a, q in zip(rep["analytic"], rep["quadrature"]):
        assert a["position_lambda"] == pytest.approx(q["position_lambda"], rel=1e-5)
        assert a["prob_max"] == pytest.approx(q["prob_max"], rel=0.1)


def test_rate_linearity():
    cfg = from_dict({})
    from vacmix.cli import compute_spectrum
    sp = compute_spectrum(cfg)
    r1 = estimate_rate(cfg, 250, 1e6, sp)
    r2 = estimate_rate(cfg, 500, 1e6, sp)
    r0 = estimate_rate(cfg, 250, 0.0, sp)
    assert r0["pairs_per_second"] == 0
    assert r2["pairs_per_second"] == pytest.approx(2 * r1["pairs_per_second"])
    assert r1["lambda_mix_um"] == pytest.approx(0.634, abs=2e-3)


def test_rate_without_mixing_peak():
    cfg = cfg_from("modulation: {single_tone: true}\n" + SMALL)
    assert estimate_rate(cfg)["pairs_per_second"] == 0


# ---------------------------------------------------------------- CLI

def write(tmp_path, text, name="c.yaml"):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def test_cli_subcommands(tmp_path, capsys):
    out = str(tmp_path)
    small = write(tmp_path, SMALL + "branches: {k_min: 0.5, k_max: 20, points: 20}\n"
                  "fiber: {k_min: 5, k_max: 20, points: 5, modes: [[0, 0], [1, 2]]}\n"
                  "oracle: {points: 31}\n")
    assert main(["branches", "--config", small, "--out", out]) == EXIT_OK
    rows = list(csv.reader(open(tmp_path / "branches.csv")))
    assert rows[0] == ["k", "alpha", "omega", "C"] and len(rows) == 1 + 20 * 4
    assert main(["fiber", "--config", small, "--out", out]) == EXIT_OK
    rows = list(csv.reader(open(tmp_path / "fiber.csv")))
    assert rows[0][:4] == ["k", "alpha", "n", "m"] and {r[3] for r in rows[1:]} == {"0", "2"}
    assert main(["oracle", "--config", small, "--out", out]) == EXIT_OK
    rows = list(csv.DictReader(open(tmp_path / "oracle.csv")))
    assert len(rows) == 31 and max(abs(float(r["residual"])) for r in rows) < 1e-6  # O(eps^3) truncation
    assert main(["spectrum", "--config", small, "--out", out, "--threads", "2",
                 "--mixing-mode", "coarse", "--include-subleading"]) == EXIT_OK
    rep = json.loads(open(tmp_path / "peaks.json").read())
    assert rep["mixing_mode"] == "coarse" and rep["include_subleading"] is True
    assert main(["rate", "--config", small, "--out", out, "--a-spot", "100", "--rep-rate", "2e6"]) == EXIT_OK
    rate = json.loads(open(tmp_path / "rate.json").read())
    assert rate["A_spot_um"] == 100 and rate["repetition_rate_hz"] == 2e6
    assert main(["states", "self-test"]) == EXIT_OK
    assert capsys.readouterr().out.count("PASS") == 4


def test_cli_exit_codes(tmp_path, capsys):
    bad = write(tmp_path, "modulation: {tau_fs: -1}", "bad.yaml")
    assert main(["spectrum", "--config", bad, "--out", str(tmp_path)]) == EXIT_CONFIG
    assert "modulation.tau_fs must be > 0" in capsys.readouterr().err
    assert main(["branches", "--config", str(tmp_path / "missing.yaml")]) == EXIT_CONFIG
    resonant = write(tmp_path, f"oracle: {{omega: 1.0, t_i: 0.0, t_f: {math.pi!r}, t_prime: 1.0}}", "r.yaml")
    assert main(["oracle", "--config", resonant, "--out", str(tmp_path)]) == EXIT_NUMERIC
    assert "WronskianSingular" in capsys.readouterr().err
    assert main(["rate", "--a-spot", "-1", "--out", str(tmp_path)]) == EXIT_CONFIG
    with pytest.raises(SystemExit):
        main(["nonsense"])


def test_module_entry_point(tmp_path):
    import subprocess
    import sys
    r = subprocess.run([sys.executable, "-m", "vacmix", "states", "self-test"], capture_output=True, text=True)
    assert r.returncode == 0 and "FAIL" not in r.stdout


def test_unsigned_exponent_and_non_numbers():
    assert cfg_from("rate: {repetition_rate: 2.0e6}").rate.repetition_rate == 2e6
    with pytest.raises(ConfigError, match="rate.repetition_rate must be a number"):
        cfg_from("rate: {repetition_rate: fast}")
    with pytest.raises(ConfigError, match="flags.threads must be a number"):
        cfg_from("flags: {threads: true}")


def test_demo_config_is_the_default_run():
    here = os.path.dirname(__file__)
    demo = load_config(os.path.join(here, "..", "demos", "configs", "fig3.yaml"))
    base = from_dict({})
    assert demo.medium == base.medium and demo.modulation == base.modulation
    assert demo.sweep == base.sweep and demo.processes == base.processes and demo.rate == base.rate


def test_readme_full_config_is_the_default_run():
    import re
    readme = open(os.path.join(os.path.dirname(__file__), "..", "README.md")).read()
    block = re.search(r"```yaml\n(.*?)```", readme, re.S).group(1)
    assert cfg_from(block) == from_dict({})

"""Shared fixtures and the acceptance-criteria summary printed after the run."""
import warnings

import numpy as np
import pytest

from vacmix.amplitudes import find_spectrum_peaks, k_grid_for_wavelengths, spectrum
from vacmix.medium import eps_for_delta_n, fused_silica
from vacmix.modulation import ModulationSpec, tau_from_fs

#: criterion number -> (passed, one-line detail), filled by tests/test_acceptance.py
ACCEPTANCE_RESULTS = {}


def record_acceptance(number: int, title: str, passed: bool, detail: str):
    ACCEPTANCE_RESULTS[number] = (title, bool(passed), detail)


@pytest.fixture(scope="session")
def silica():
    return fused_silica()


@pytest.fixture(scope="session")
def fig3_spec(silica):
    Om2 = silica.omegas[1]
    eps = eps_for_delta_n(silica, 2, 1e-3, 0.65)
    return ModulationSpec(eps, Om2 / 5, Om2 / 6, tau_from_fs(42.0), 2)


@pytest.fixture(scope="session")
def fig3_k(silica):
    return k_grid_for_wavelengths(silica, 0.4, 2.0, 4000)


@pytest.fixture(scope="session")
def fig3_spectrum(silica, fig3_spec, fig3_k):
    """Default spectrum (analytic mixing integral) and its peaks."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        sp = spectrum(silica, fig3_spec, fig3_k, threads=4)
    return sp, find_spectrum_peaks(sp)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE_RESULTS):
        title, ok, detail = ACCEPTANCE_RESULTS[n]
        terminalreporter.write_line(f"AC{n:<2} {'PASS' if ok else 'FAIL'}  {title}: {detail}")

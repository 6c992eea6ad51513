import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from vacmix.branches import (BranchPoint, branch_frequencies, build_branch_table, hopfield_C,
                             hopfield_C_derivative, projection_P, single_resonance_closed_form, solve_branches)
from vacmix.errors import DegenerateBranches, PoleAtResonance
from vacmix.medium import MediumSpec, Resonance, dispersion_D, fused_silica

GOLDEN = (1 + np.sqrt(5)) / 2


def random_medium(rng, n):
    om = np.sort(rng.uniform(0.2, 60, n))
    while np.any(np.diff(om) < 1e-3):
        om = np.sort(rng.uniform(0.2, 60, n))
    return MediumSpec(tuple(Resonance(o, rng.uniform(0.05, 1.5) * o) for o in om))


def test_decoupled_limit():
    m = MediumSpec((Resonance(1.0, 0.0), Resonance(2.0, 0.0)))
    pts = solve_branches(m, 5.0)
    assert [p.omega_alpha for p in pts] == [1.0, 2.0, 5.0]
    assert [p.C for p in pts] == [0.0, 0.0, 1.0]


def test_single_resonance_golden():
    m = MediumSpec.single(1.0, 1.0)
    lo, hi = solve_branches(m, 1.0)
    assert lo.omega_alpha == pytest.approx(GOLDEN - 1, rel=1e-12)
    assert hi.omega_alpha == pytest.approx(GOLDEN, rel=1e-12)
    assert single_resonance_closed_form(1.0, 1.0, 1.0) == pytest.approx((GOLDEN - 1, GOLDEN), rel=1e-12)


def test_closed_form_limits():
    assert single_resonance_closed_form(0.0, 2.0, 1.5) == pytest.approx((0.0, np.sqrt(4 + 2.25)))
    assert single_resonance_closed_form(3.0, 1.0, 0.0) == pytest.approx((1.0, 3.0))


def test_k_zero_lowest_root():
    om = branch_frequencies(fused_silica(), [0.0])[0]
    assert om[0] == 0.0
    assert np.all(np.diff(om) > 0)


def test_optical_window_photon_branch():
    fs = fused_silica()
    k = np.linspace(4.4, 29.0, 50)  # optical window in k (n ~ 1.45)
    w = branch_frequencies(fs, k)[:, 1]
    assert np.all((w >= 3) & (w <= 20))


@pytest.mark.parametrize("n", [1, 2, 3])
def test_root_count_and_interlacing(n):
    rng = np.random.default_rng(n)
    m = random_medium(rng, n)
    k = np.geomspace(1e-2, 1e2, 40)
    om = branch_frequencies(m, k)
    assert om.shape == (40, n + 1)
    for a in range(n):
        assert np.all(om[:, a] < m.omegas[a]) and np.all(om[:, a + 1] > m.omegas[a])
    # roots solve D = 0 relative to the size of its terms
    for a in range(n + 1):
        D = dispersion_D(m, k, om[:, a])
        assert np.all(np.abs(D) <= 1e-8 * (k**2 + 1))
    # monotone nondecreasing in k
    assert np.all(np.diff(om, axis=0) >= -1e-12)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_root_count_against_polynomial(n):
    """D * prod(w^2 - Om^2) is a polynomial of degree N+1 in w^2."""
    rng = np.random.default_rng(10 + n)
    m = random_medium(rng, n)
    k = 3.3
    P = np.poly1d([1.0])
    for r in m.resonances:
        P = P * np.poly1d([1.0, -r.omega_res**2])
    poly = (np.poly1d([1.0, 0.0]) - k**2) * P
    for j, r in enumerate(m.resonances):
        others = np.poly1d([1.0])
        for jj, rr in enumerate(m.resonances):
            if jj != j:
                others = others * np.poly1d([1.0, -rr.omega_res**2])
        poly = poly - np.poly1d([r.g**2, 0.0]) * others
    x = np.sort(np.roots(poly.coeffs).real)
    assert len(x) == n + 1
    np.testing.assert_allclose(branch_frequencies(m, [k])[0], np.sqrt(x), rtol=1e-9)


def test_hopfield_single_resonance_value():
    m = MediumSpec.single(1.0, 1.0)
    pts = solve_branches(m, 1.0)
    assert pts[1].C == pytest.approx(0.7236067977, rel=1e-9)
    assert pts[0].C + pts[1].C == pytest.approx(1.0, abs=1e-14)
    assert hopfield_C(m, pts[1]) == pytest.approx(pts[1].C)
    assert hopfield_C(m, pts[1], pts) == pytest.approx(pts[1].C)


def test_hopfield_photon_limit():
    m = MediumSpec.single(1.0, 1e-4)
    assert solve_branches(m, 5.0)[1].C == pytest.approx(1.0, abs=1e-8)


def test_hopfield_product_matches_derivative_form():
    fs = fused_silica()
    for k in [0.5, 3.0, 8.0, 20.0, 80.0]:
        for p in solve_branches(fs, k):
            if p.omega_alpha > 0:
                assert p.C == pytest.approx(hopfield_C_derivative(fs, k, p.omega_alpha), rel=1e-7)


@settings(max_examples=60, deadline=None)
@given(st.floats(0.01, 100), st.floats(0.1, 10), st.floats(0.01, 10))
def test_hopfield_sum_rule(k, Om, g):
    m = MediumSpec.single(Om, g)
    C = build_branch_table(m, [k]).C[0]
    assert C.sum() == pytest.approx(1.0, abs=1e-10)
    assert np.all((C >= 0) & (C <= 1))


def test_hopfield_sum_rule_many_resonances():
    fs = fused_silica()
    C = build_branch_table(fs, np.geomspace(0.1, 200, 30)).C
    np.testing.assert_allclose(C.sum(axis=1), 1.0, atol=1e-9)


def test_degenerate_branches():
    from vacmix.branches import _hopfield_from_roots
    m = MediumSpec.single(1.0, 1.0)
    with pytest.raises(DegenerateBranches):
        _hopfield_from_roots(m, np.array([[0.9, 0.9]]))


def test_projection_onshell_and_free():
    m = MediumSpec.single(1.0, 1.0)
    pts = solve_branches(m, 1.0)
    w = pts[1].omega_alpha
    assert projection_P(m, 1.0, 1, w) == pytest.approx(np.sqrt(pts[1].C), rel=1e-12)
    free = MediumSpec((Resonance(1.0, 0.0),))
    for w in [0.3, 2.0, 7.0]:
        assert projection_P(free, 2.0, 1, w) == pytest.approx(1.0)


def test_projection_off_shell_matches_direct_formula():
    m = MediumSpec.single(1.0, 1.0)
    wp = GOLDEN
    direct = np.sqrt(complex((0.25 - wp**2) / dispersion_D(m, 1.0, 0.5)))
    assert complex(projection_P(m, 1.0, 1, 0.5)) == pytest.approx(direct, rel=1e-12)
    # small-offset limit approaches the on-shell value
    d = 1e-6
    ratio = ((wp + d) ** 2 - wp**2) / dispersion_D(m, 1.0, wp + d)
    assert projection_P(m, 1.0, 1, wp + d) == pytest.approx(np.sqrt(ratio), rel=1e-6)


def test_projection_pole():
    with pytest.raises(PoleAtResonance):
        projection_P(MediumSpec.single(1.0, 1.0), 1.0, 1, 1.0)


def test_branch_table_points():
    t = build_branch_table(fused_silica(), [1.0, 2.0])
    pts = t.points
    assert len(pts) == 8 and isinstance(pts[0], BranchPoint)
    assert pts[5].k == 2.0 and pts[5].alpha == 1


def test_negative_k_rejected():
    with pytest.raises(ValueError):
        branch_frequencies(fused_silica(), [-1.0])

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from hilljunction.hill import monodromy
from hilljunction.potential import constant, fourier, kronig_penney
from hilljunction.spectrum import DomainError, band_edges, neumann_spectrum
from hilljunction.weyl import (PoleError, bloch_psi, decaying_vector, flips_b, m_from_monodromy,
                               matching_defect, weyl_m, weyl_pair, zeta)


@given(st.floats(-5, 5), st.floats(0.01, 40))
def test_constant_below_spectrum(c, depth):
    lam = c - depth
    mp = weyl_m(constant(c), lam, 0.3, 1).value
    mm = weyl_m(constant(c), lam, 0.3, -1).value
    rp, rm = oracles.constant_weyl(c, lam)
    assert mp == pytest.approx(rp, rel=1e-10) and mm == pytest.approx(rm, rel=1e-10)


def test_sheet_two_swaps_roles():
    m1 = weyl_m(constant(0.0), -1.0, 0.0, 1, sheet=1).value
    m2 = weyl_m(constant(0.0), -1.0, 0.0, 1, sheet=2).value
    assert m1 == pytest.approx(-1.0) and m2 == pytest.approx(1.0)


def test_flip_table():
    assert [flips_b(s, "left") for s in (1, 2, 3, 4)] == [False, True, True, False]
    assert [flips_b(s, "right") for s in (1, 2, 3, 4)] == [False, True, False, True]


@pytest.mark.parametrize("lam,n,t", [(-2.0, 0, 0.2), (14.0, 1, 0.4), (44.6, 2, 0.15), (93.5, 3, 0.7)])
@pytest.mark.parametrize("side", [1, -1])
def test_against_shooting(kp, lam, n, t, side):
    m = weyl_m(kp, lam, t, side, gap_index=n).value
    assert m == pytest.approx(oracles.shooting_m(kp, lam, t, side), rel=1e-8, abs=1e-8)


def test_gap_membership_enforced(kp):
    with pytest.raises(DomainError):
        weyl_m(kp, 13.0 - 8.0, 0.0, 1, gap_index=1)


def test_riccati_in_t(mathieu):
    lam, h = 9.8, 1e-5
    for t in (0.1, 0.6):
        for side in (1, -1):
            f = lambda s: weyl_m(mathieu, lam, s, side, gap_index=1).value
            lhs = (f(t + h) - f(t - h)) / (2 * h)
            assert lhs == pytest.approx(float(mathieu(t)) - lam - f(t) ** 2, rel=1e-6, abs=1e-6)


@settings(max_examples=30)
@given(st.floats(-30, 1.0), st.floats(0, 1))
def test_product_identity(lam, t):
    p = fourier([(1, 2.0, 0.0)])
    m = monodromy(p, lam, t)
    if abs(m.phi1) < 1e-6 or m.delta < 1.0:
        return
    mp, mm = weyl_pair(m, math.sqrt(m.discriminant))
    assert mp * mm == pytest.approx(-m.theta1_x / m.phi1, rel=1e-8, abs=1e-10)


def test_signs_below_nu0(kp, kp_band):
    for t in (0.0, 0.3, 0.9):
        nu0 = neumann_spectrum(kp, t, 1, kp_band)[0]
        for lam in (nu0 - 0.01, nu0 - 3.0, nu0 - 30.0):
            assert weyl_m(kp, lam, t, 1).value < 0 < weyl_m(kp, lam, t, -1).value


def test_bloch_solution_decays(kp):
    lam = 14.0
    m = monodromy(kp, lam)
    rho = abs(m.delta) - math.sqrt(m.discriminant)
    assert abs(bloch_psi(kp, 3.0, lam, 1, gap_index=1) / bloch_psi(kp, 0.0, lam, 1, gap_index=1)) == \
        pytest.approx(rho ** 3, rel=1e-7)


def test_zeta_pole(kp, kp_band):
    from hilljunction.spectrum import dirichlet_spectrum
    mu = dirichlet_spectrum(kp, 0.3, 1, kp_band)[0]
    with pytest.raises(PoleError):
        zeta(kp, mu, 0.3)


def test_decaying_vector_at_pole(kp, kp_band):
    # at a Dirichlet point the Weyl quotient is infinite but the decaying direction is finite
    from hilljunction.spectrum import dirichlet_spectrum
    mu = dirichlet_spectrum(kp, 0.3, 1, kp_band)[0]
    m = monodromy(kp, mu, 0.3)
    b = -math.sqrt(m.discriminant)
    u = decaying_vector(m, b, 1)
    assert math.hypot(*u) == pytest.approx(1.0)
    assert matching_defect(m, b, m, b) == pytest.approx(0.0, abs=1e-12) or \
        matching_defect(m, b, m, b) > 0.0
    val, den, pole = m_from_monodromy(m, b, 1)
    assert math.isfinite(val)


def test_zeta_mean_and_sum_rule(kp_band):
    p = fourier([(1, 2.0, 0.0)])
    band = band_edges(p, 2)
    import numpy as np
    x, w = np.polynomial.legendre.leggauss(64)
    t = 0.5 * (x + 1)
    below = band.alpha0_plus - 1.0
    assert abs(0.5 * sum(wi * zeta(p, below, ti) for wi, ti in zip(w, t))) < 1e-10
    top = band.alpha0_plus
    s2 = 0.5 * sum(wi * zeta(p, top, ti) ** 2 for wi, ti in zip(w, t))
    assert s2 == pytest.approx(p.mean() - top, abs=1e-9)

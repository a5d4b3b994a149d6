import cmath
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from gausspack import geometry as g
from gausspack.errors import InvalidPointError, InvalidStateError, SingularChartError

from helpers import SHEARED, SQRT2, coefficient_triples, qp_points

H3_B = g.H3Point(0.35355339059327373, 1.0606601717798214, 0.35355339059327373, -0.35355339059327384)
H2_B = g.H2Point(1.5, 1.0, -0.5)


def test_qp_constraint_enforced():
    with pytest.raises(InvalidPointError):
        g.QPPoint(1.0, 1.0)
    with pytest.raises(InvalidPointError):
        g.QPPoint(0.0, 1j)
    assert g.QPPoint(2.0, 1.0, check=False).constraint_residual == pytest.approx(2.0)


def test_renormalize_restores_constraint():
    qp = g.QPPoint(1.0 * 1.001, 1j * 1.001, check=False)
    assert qp.renormalized().constraint_residual < 1e-15
    with pytest.raises(InvalidPointError):
        g.QPPoint(1.0, -1j, check=False).renormalized()


def test_nu_examples():
    assert g.nu_map(g.VACUUM).as_array() == pytest.approx([0, 1, 0, 0])
    assert g.nu_map(SHEARED).as_array() == pytest.approx([0.35355, 1.06066, 0.35355, -0.35355], abs=1e-5)


def test_chi_examples():
    h2 = g.chi_map(g.nu_map(g.VACUUM))
    assert (h2.y1, h2.y2, h2.y3) == pytest.approx((1, 0, 0))
    h2 = g.chi_map(H3_B)
    assert (h2.y1, h2.y2, h2.y3) == pytest.approx((1.5, 1, -0.5))


def test_disk_examples():
    assert g.disk_projection(g.H2Point(1, 0, 0)).zeta == 0
    assert g.disk_projection(H2_B).zeta == pytest.approx(0.4 - 0.2j)
    for tau in (0.1, 1.0, 3.0):
        z = g.disk_projection(g.H2Point(math.cosh(tau), math.sinh(tau), 0)).zeta
        assert z == pytest.approx(math.tanh(tau / 2))


def test_mobius_examples():
    assert g.mobius_to_siegel(g.DiskPoint(0)).c == pytest.approx(1j)
    assert g.mobius_to_siegel(g.DiskPoint(0.4 - 0.2j)).c == pytest.approx(0.5 + 0.5j)
    near = g.mobius_to_siegel(g.DiskPoint(0.999999 * cmath.exp(0.7j))).c
    assert 0 < near.imag < 1e-5
    with pytest.raises(InvalidPointError):
        g.DiskPoint(1.0)


def test_pi_examples():
    assert g.pi_map(g.VACUUM).c == pytest.approx(1j)
    assert g.pi_tilde_map(g.VACUUM) == pytest.approx(-1j)
    assert g.pi_map(SHEARED).c == pytest.approx(0.5 + 0.5j)
    assert g.SiegelPoint(0.5 + 0.5j).ctilde == pytest.approx(1 - 1j)


def test_covariance_examples():
    cov = g.covariance_from_qp(g.VACUUM)
    assert (cov.sq, cov.sp, cov.sqp) == pytest.approx((0.5, 0.5, 0))
    cov = g.covariance_from_qp(SHEARED)
    assert (cov.sq, cov.sp, cov.sqp) == pytest.approx((1, 0.5, 0.5))
    assert cov.rs_residual() == pytest.approx(0, abs=1e-15)


def test_h2_from_covariance():
    h2 = g.h2_from_covariance(g.CovarianceTriple(0.5, 0.5, 0))
    assert (h2.y1, h2.y2, h2.y3) == pytest.approx((1, 0, 0))
    h2 = g.h2_from_covariance(g.CovarianceTriple(1, 0.5, 0.5))
    assert (h2.y1, h2.y2, h2.y3) == pytest.approx((1.5, 1, -0.5))
    back = g.covariance_from_h2(h2)
    assert (back.sq, back.sp, back.sqp) == pytest.approx((1, 0.5, 0.5))
    with pytest.raises(InvalidStateError):
        g.h2_from_covariance(g.CovarianceTriple(1, 1, 0))


def test_uncorrelated_family_has_y2_zero():
    for sq in (0.1, 0.5, 3.0):
        h2 = g.h2_from_covariance(g.CovarianceTriple(sq, 0.25 / sq, 0.0))
        assert h2.y2 == 0


def test_siegel_from_covariance():
    assert g.siegel_from_covariance(g.CovarianceTriple(0.5, 0.5, 0)).c == pytest.approx(1j)
    c = g.siegel_from_covariance(g.CovarianceTriple(1, 0.5, 0.5))
    assert c.c == pytest.approx(g.pi_map(SHEARED).c)
    h2 = g.siegel_to_h2(c)
    assert (h2.y1, h2.y2, h2.y3) == pytest.approx((1.5, 1, -0.5))
    with pytest.raises(InvalidStateError):
        g.siegel_from_covariance(g.CovarianceTriple(0.0, 1.0, 0.0))


def test_siegel_from_covariance_with_hbar():
    cov = g.covariance_from_qp(SHEARED, hbar=0.3)
    assert g.siegel_from_covariance(cov, hbar=0.3).c == pytest.approx(g.pi_map(SHEARED).c)
    back = g.covariance_from_siegel(g.pi_map(SHEARED), hbar=0.3)
    assert (back.sq, back.sp, back.sqp) == pytest.approx((cov.sq, cov.sp, cov.sqp))


def test_squeeze_examples():
    sc = g.squeeze_coordinates(g.H2Point(1, 0, 0))
    assert (sc.tau, sc.phi) == (0.0, 0.0)
    sc = g.squeeze_coordinates(H2_B)
    assert sc.tau == pytest.approx(math.acosh(1.5))
    assert sc.phi == pytest.approx(5.81954, abs=1e-5)


@pytest.mark.parametrize("tau", [0.1, 1.0, 5.0])
@pytest.mark.parametrize("phi", [0.0, math.pi / 3, 3 * math.pi / 2])
def test_squeeze_round_trip(tau, phi):
    h2 = g.h2_from_squeeze(g.SqueezeCoords(tau, phi))
    sc = g.squeeze_coordinates(h2)
    assert sc.tau == pytest.approx(tau, abs=1e-12)
    assert sc.phi == pytest.approx(phi, abs=1e-12)
    again = g.h2_from_squeeze(sc)
    assert np.allclose(again.as_array(), h2.as_array(), rtol=0, atol=1e-12 * h2.y1)


def test_alpha_examples():
    assert g.alpha_from_moments(g.FirstMoments(0, 0), g.VACUUM) == 0
    assert g.alpha_from_moments(g.FirstMoments(1, 0), g.VACUUM) == pytest.approx(-1 / SQRT2)


@given(st.floats(0.2, 5), st.floats(-3, 3), st.floats(-3, 3), st.floats(0.1, 3))
def test_quadrature_frame_alpha(omega, q, p, hbar):
    got = g.alpha_from_moments(g.FirstMoments(q, p), g.quadrature_frame(omega), hbar)
    want = (math.sqrt(omega) * q + 1j * p / math.sqrt(omega)) / math.sqrt(2 * hbar)
    assert got == pytest.approx(want, abs=1e-12)


@given(qp_points(), st.floats(-5, 5), st.floats(-5, 5))
def test_alpha_round_trip(qp, q, p):
    m = g.moments_from_alpha(g.alpha_from_moments(g.FirstMoments(q, p), qp), qp)
    assert (m.mq, m.mp) == pytest.approx((q, p), abs=1e-9)


def test_symplectic_area():
    assert g.symplectic_area(1, 1) == 0
    assert g.symplectic_area(1 + 0j, 0 - 1j) == 1
    a, b = 0.3 + 0.7j, -1.1 + 0.4j
    swapped = (b.real - 1j * a.imag, a.real - 1j * b.imag)
    # swapping (x, y) with (x', y') flips the sign
    assert g.symplectic_area(complex(b.real, -b.imag), complex(a.real, -a.imag)) == pytest.approx(
        -g.symplectic_area(a, b)
    )
    assert swapped  # keeps the reading of the convention explicit


def test_energy_examples():
    k = (1.0, 1.0, 0.0)
    assert g.chart_energy(SHEARED, k) == pytest.approx(3)
    assert g.chart_energy(H2_B, k) == pytest.approx(3)
    assert g.chart_energy(g.SiegelPoint(0.5 + 0.5j), k) == pytest.approx(3)
    assert g.chart_energy(g.H2Point(1, 0, 0), k) == pytest.approx(2)
    assert g.chart_energy(g.DiskPoint(0), k) == pytest.approx(2)


def test_energy_alpha_matches_classical():
    fr = g.quadrature_frame(2.0)
    m = g.FirstMoments(0.4, -1.3)
    a = g.AlphaPoint(g.alpha_from_moments(m, fr), fr)
    k = (4.2, 0.7, 0.3)
    assert g.chart_energy(a, k) == pytest.approx(g.chart_energy(m, k))


def test_energy_unknown_point():
    with pytest.raises(TypeError):
        g.chart_energy(object(), (1, 1, 0))


def test_poisson_examples():
    assert g.poisson_bracket("siegel", (1, 0), (0, 1), g.SiegelPoint(1j)) == pytest.approx(-1)
    assert g.poisson_bracket("siegel", (0.3, 0.2), (0.3, 0.2), g.SiegelPoint(2 + 1j)) == 0
    assert g.poisson_bracket("disk", (1, 0), (0, 1), g.DiskPoint(0)) == pytest.approx(-0.25)
    with pytest.raises(SingularChartError):
        g.poisson_bracket("h2", (1, 0), (0, 1), 0)


def _num_grad(f, z, h=1e-6):
    return ((f(z + h) - f(z - h)) / (2 * h), (f(z + 1j * h) - f(z - 1j * h)) / (2 * h))


@given(st.floats(-2, 2), st.floats(0.2, 3), coefficient_triples)
def test_bracket_generates_riccati_flow(cr, ci, k):
    c = complex(cr, ci)
    h1, h2, v = k
    energy = lambda z: g.chart_energy(g.SiegelPoint(z), k)  # noqa: E731
    cdot = -h2 * c * c - 2 * v * c - h1
    gh = _num_grad(energy, c)
    assert g.poisson_bracket("siegel", gh, (1, 0), c) == pytest.approx(cdot.real, abs=1e-5 * (1 + abs(cdot)))
    assert g.poisson_bracket("siegel", gh, (0, 1), c) == pytest.approx(cdot.imag, abs=1e-5 * (1 + abs(cdot)))


@given(st.floats(-0.8, 0.8), st.floats(-0.5, 0.5), coefficient_triples)
def test_disk_bracket_generates_disk_flow(x, y, k):
    z = complex(x, y)
    h1, h2, v = k
    energy = lambda w: g.chart_energy(g.DiskPoint(w), k)  # noqa: E731
    zdot = 0.5 * (h1 - h2 - 2j * v) * z * z - 1j * (h1 + h2) * z + 0.5 * (h2 - h1 - 2j * v)
    gh = _num_grad(energy, z)
    tol = 1e-5 * (1 + abs(zdot)) / (1 - abs(z) ** 2)
    assert g.poisson_bracket("disk", gh, (1, 0), z) == pytest.approx(zdot.real, abs=tol)
    assert g.poisson_bracket("disk", gh, (0, 1), z) == pytest.approx(zdot.imag, abs=tol)


# -- properties -------------------------------------------------------------


@given(qp_points())
def test_nu_round_trip(qp):
    back = g.nu_inverse(g.nu_map(qp))
    assert abs(back.q - qp.q) < 1e-14 * max(1, abs(qp.q)) * 4
    assert abs(back.p - qp.p) < 1e-14 * max(1, abs(qp.p)) * 4


@given(qp_points())
def test_commuting_diagram(qp):
    lhs = g.mobius_to_siegel(g.disk_projection(g.chi_map(g.nu_map(qp)))).c
    assert abs(lhs - g.pi_map(qp).c) < 1e-12 * max(1, abs(lhs))


@given(qp_points())
def test_siegel_im_is_inverse_q_squared(qp):
    c = g.pi_map(qp).c
    assert c.imag > 0
    assert c.imag == pytest.approx(1 / abs(qp.q) ** 2, rel=1e-12)


@given(qp_points())
def test_covariance_satisfies_rs(qp):
    cov = g.covariance_from_qp(qp)
    assert abs(cov.rs_residual()) < 1e-12 * max(1, cov.sq * cov.sp)


@given(qp_points(), st.floats(-math.pi, math.pi), coefficient_triples)
def test_u1_invariance(qp, phi, k):
    rot = qp.rotated(phi)
    assert g.pi_map(rot).c == pytest.approx(g.pi_map(qp).c, rel=1e-12, abs=1e-12)
    c1, c2 = g.covariance_from_qp(qp), g.covariance_from_qp(rot)
    assert (c2.sq, c2.sp, c2.sqp) == pytest.approx((c1.sq, c1.sp, c1.sqp), rel=1e-12, abs=1e-12)
    assert g.chart_energy(rot, k) == pytest.approx(g.chart_energy(qp, k), rel=1e-12, abs=1e-10)


@given(qp_points())
def test_chi_is_even(qp):
    h3 = g.nu_map(qp)
    a, b = g.chi_map(h3), g.chi_map(-h3)
    assert a.as_array() == pytest.approx(b.as_array())


@given(qp_points())
def test_covariance_inverse_section(qp):
    cov = g.covariance_from_qp(qp)
    rep = g.qp_from_covariance(cov)
    assert rep.q.imag == 0 and rep.q.real > 0
    assert g.pi_map(rep).c == pytest.approx(g.pi_map(qp).c, rel=1e-9)


@given(qp_points(), coefficient_triples)
def test_energy_consistent_across_charts(qp, k):
    h2 = g.chi_map(g.nu_map(qp))
    ref = g.chart_energy(qp, k)
    tol = 1e-10 * max(1, abs(ref), h2.y1 * sum(abs(x) for x in k))
    for pt in (g.nu_map(qp), h2, g.squeeze_coordinates(h2), g.pi_map(qp), g.disk_projection(h2)):
        assert abs(g.chart_energy(pt, k) - ref) < tol


@given(qp_points(), st.floats(0.1, 3))
def test_h2_covariance_round_trip(qp, hbar):
    cov = g.covariance_from_qp(qp, hbar)
    h2 = g.h2_from_covariance(cov, hbar)
    assert h2.as_array() == pytest.approx(g.chi_map(g.nu_map(qp)).as_array(), rel=1e-10)

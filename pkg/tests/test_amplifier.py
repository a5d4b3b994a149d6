import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gausspack import amplifier as amp
from gausspack import dynamics as dyn
from gausspack import geometry as g
from gausspack.errors import NotApplicableError, OracleMismatchError
from gausspack.hamiltonian import AmplifierCoefficients, AmplifierParams

RATIO_2 = AmplifierParams.from_xi(6.0, 4 * math.sqrt(2))
RATIO_9 = AmplifierParams.from_xi(5.0, 3.0)
SLOW = AmplifierParams.from_xi(0.75, 0.5)


def test_alpha_dot_initial_example():
    assert amp.alpha_dot_initial(RATIO_2, 1 + 1j) == pytest.approx(3.17157 - 8.82843j, abs=1e-5)


def test_unpumped_rotation():
    p = AmplifierParams.from_xi(2.0, 0.0)
    assert amp.alpha_analytic(p, 1.0, math.pi / 2) == pytest.approx(-1.0)
    ts = np.linspace(0, 3, 7)
    assert amp.alpha_analytic(p, 0.3j, ts) == pytest.approx(0.3j * np.exp(-2j * ts))


def test_solution_starts_at_alpha0():
    for p in (RATIO_2, AmplifierParams.from_xi(2.0, 2.0), AmplifierParams.from_xi(2.0, 3.0)):
        assert amp.alpha_analytic(p, 0.4 - 1j, 0.0) == pytest.approx(0.4 - 1j)


@settings(deadline=None)
@given(
    st.floats(0.3, 4.0),
    st.floats(0.0, 2.0),
    st.floats(-math.pi, math.pi),
    st.complex_numbers(max_magnitude=3, allow_nan=False, allow_infinity=False),
    st.floats(0.0, 5.0),
)
def test_analytic_solution_obeys_ode(omega, ratio, arg, a0, t):
    """Covers all three regimes since |xi| / omega ranges over [0, 2]."""
    p = AmplifierParams.from_xi(omega, ratio * omega * cmath.exp(1j * arg))
    fr = g.quadrature_frame(omega)
    f = dyn.vector_field("alpha", AmplifierCoefficients(p), fr)
    h = 1e-5
    da = (amp.alpha_analytic(p, a0, t + h) - amp.alpha_analytic(p, a0, t - h)) / (2 * h)
    want = f(t, np.array([amp.alpha_analytic(p, a0, t)]))[0]
    assert abs(da - want) < 1e-5 * max(1.0, abs(want))


def test_elliptic_polar_factors_reconstruct():
    sol = amp.solve(RATIO_9, 1 + 1j)
    assert sol.r1 * cmath.exp(1j * sol.phi1) + sol.r2 * cmath.exp(1j * sol.phi2) == pytest.approx(1 + 1j)


def test_classification_examples():
    c = amp.classify_curve(RATIO_2, 1 + 1j)
    assert (c.mu, c.nu) == pytest.approx((-2.0, -4.0))
    assert c.kind == "epitrochoid"
    assert c.ratio == pytest.approx(2)
    assert c.period == pytest.approx(math.pi)
    c9 = amp.classify_curve(RATIO_9, 1 + 1j)
    assert c9.ratio == pytest.approx(9)
    assert c9.period == pytest.approx(4 * math.pi)
    assert c9.to_dict()["kind"] in ("epicycloid", "epitrochoid")


def test_classify_degenerate_circle():
    c = amp.classify_curve(AmplifierParams.from_xi(2.0, 0.0), 1 + 1j)
    assert c.kind == "epicycloid" and c.degenerate
    assert c.period == pytest.approx(math.pi)


def test_classify_needs_elliptic():
    with pytest.raises(NotApplicableError):
        amp.classify_curve(AmplifierParams.from_xi(2.0, 3.0), 1.0)
    with pytest.raises(NotApplicableError):
        amp.QPOracle(AmplifierParams.from_xi(2.0, 2.0))


def test_rational_approximation():
    assert amp.rational_approximation(2.5) == pytest.approx(2.5)
    assert amp.rational_approximation(1 / 3).denominator == 3
    assert amp.rational_approximation(math.sqrt(2)) is None
    assert amp.rational_approximation(math.inf) is None


@given(st.integers(1, 40), st.integers(1, 40), st.floats(0.5, 5.0))
def test_rational_ratios_close(n, d, omega):
    r = (n + d) / d  # any rational ratio above 1
    big = omega * (r - 1) / (r + 1)
    p = AmplifierParams.from_xi(omega, math.sqrt(omega**2 - big**2))
    c = amp.classify_curve(p, 1 + 1j)
    assert c.closed
    assert c.ratio == pytest.approx(r)
    assert abs(amp.alpha_analytic(p, 1 + 1j, c.period) - (1 + 1j)) < 1e-7


def test_closed_form_validates():
    assert amp.validate_closed_form(SLOW) < 1e-9
    assert amp.validate_closed_form(RATIO_9, t_max=2.0) < 1e-9


def test_closed_form_identity_at_zero():
    assert np.allclose(amp.closed_form_matrix(SLOW, 0.0), (1, 0, 0, 1))


def test_strict_oracle_raises_on_bad_form():
    def bad(params, t):
        a, b, c, d = amp.closed_form_matrix(params, t)
        return a, b, -c, d

    with pytest.raises(OracleMismatchError) as info:
        amp.QPOracle(SLOW, t_max=2.0, strict=True, form=bad)
    assert info.value.residual > 1e-3
    assert info.value.analytic.shape == info.value.numeric.shape


def test_numeric_oracle_refuses_extrapolation():
    def bad(params, t):
        a, b, c, d = amp.closed_form_matrix(params, t)
        return a, -b, c, d

    oracle = amp.QPOracle(SLOW, t_max=1.0, form=bad)
    with pytest.raises(ValueError):
        oracle(1.0, 1j, 2.0)


def test_qp_analytic_unpumped():
    p = AmplifierParams(1.0, 0.0, 0.0)
    qp = amp.qp_analytic(p, 1.0, 1j, 2.3)
    assert abs(qp.q) == pytest.approx(1.0)
    assert qp.q == pytest.approx(cmath.exp(2.3j))


@pytest.mark.parametrize("t", [0.5, 3.0, 10.0])
def test_qp_analytic_keeps_constraint(t):
    qp = amp.qp_analytic(SLOW, 1.0, 1j, t)
    assert qp.constraint_residual < 1e-9

import math

import numpy as np
from scipy.integrate import simpson
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gausspack import geometry as g
from gausspack.dynamics import IntegratorConfig
from gausspack.errors import CoverageError, InvalidPointError, ParameterError
from gausspack.hamiltonian import AmplifierCoefficients, AmplifierParams, HarmonicOscillator
from gausspack.wavepacket import (
    GaussianState,
    Grid1D,
    momentum_from_position,
    norm_and_moments,
    propagate_packet,
    psi_momentum,
    psi_position,
    psi_riccati,
    rs_check,
    schrodinger_residual,
)

from helpers import SHEARED, qp_points

ORIGIN = g.FirstMoments(0.0, 0.0)
VAC = GaussianState(ORIGIN, g.VACUUM)
STATE_B = GaussianState(ORIGIN, SHEARED)


def test_psi_examples():
    assert psi_position(VAC, 0.0) == pytest.approx(0.7511255444649425)
    assert psi_position(VAC, 1.0) == pytest.approx(0.45558067201133257)
    assert psi_position(STATE_B, 0.0) == pytest.approx(0.6316187777460648)
    assert psi_position(STATE_B, 1.0) == pytest.approx(0.4766130573353624 + 0.12169929373904335j)


def test_vacuum_is_self_dual():
    p = np.linspace(-3, 3, 13)
    assert psi_momentum(VAC, p) == pytest.approx(psi_position(VAC, p))


def test_norm_examples():
    assert norm_and_moments(VAC) == pytest.approx((1.0, 0.0, 0.5), abs=1e-10)
    assert norm_and_moments(STATE_B) == pytest.approx((1.0, 0.0, 1.0), abs=1e-10)
    shifted = GaussianState(g.FirstMoments(2.5, -1.0), SHEARED)
    assert norm_and_moments(shifted) == pytest.approx((1.0, 2.5, 1.0), abs=1e-10)


def test_sigma_q_and_rs():
    assert STATE_B.sigma_q == pytest.approx(1.0)
    assert abs(rs_check(STATE_B)) < 1e-15
    hb = GaussianState(ORIGIN, SHEARED, hbar=0.2)
    assert hb.sigma_q == pytest.approx(math.sqrt(0.2))
    assert abs(rs_check(hb)) < 1e-15


def test_state_validation():
    with pytest.raises(InvalidPointError):
        GaussianState(ORIGIN, g.QPPoint(1.0, 1.0, check=False))
    with pytest.raises(ParameterError):
        GaussianState(ORIGIN, g.VACUUM, hbar=0.0)
    with pytest.raises(ParameterError):
        GaussianState(ORIGIN, SHEARED, sqrt_q=1.0)
    flipped = GaussianState(ORIGIN, g.VACUUM, sqrt_q=-1.0)
    assert psi_position(flipped, 0.3) == pytest.approx(-psi_position(VAC, 0.3))


@settings(deadline=None, max_examples=30)
@given(qp_points(), st.floats(-3, 3), st.floats(-3, 3), st.floats(0.2, 2.0))
def test_fft_matches_closed_momentum(qp, mq, mp, hbar):
    state = GaussianState(g.FirstMoments(mq, mp), qp, hbar)
    grid = Grid1D.for_state(state, half_width=12, n=4096)
    p, num = momentum_from_position(state, grid)
    exact = psi_momentum(state, p)
    assert np.max(np.abs(num - exact)) < 1e-6 * max(1.0, np.max(np.abs(exact)))


@settings(deadline=None, max_examples=30)
@given(qp_points(), st.floats(-3, 3), st.floats(-3, 3))
def test_momentum_packet_is_normalized(qp, mq, mp):
    state = GaussianState(g.FirstMoments(mq, mp), qp)
    sp = g.covariance_from_qp(qp).sp
    p = np.linspace(mp - 10 * math.sqrt(sp), mp + 10 * math.sqrt(sp), 4001)
    rho = np.abs(psi_momentum(state, p)) ** 2
    assert simpson(rho, x=p) == pytest.approx(1.0, abs=1e-8)
    assert simpson(p * rho, x=p) == pytest.approx(mp, abs=1e-7 * max(1, abs(mp)))


@given(qp_points(), st.floats(-3, 3), st.floats(-3, 3))
def test_variance_matches_q_modulus(qp, mq, mp):
    state = GaussianState(g.FirstMoments(mq, mp), qp)
    norm, mean, var = norm_and_moments(state)
    assert norm == pytest.approx(1, abs=1e-9)
    assert mean == pytest.approx(mq, abs=1e-9 * max(1, abs(mq)))
    assert var == pytest.approx(abs(qp.q) ** 2 / 2, rel=1e-9)


def test_coverage_error():
    with pytest.raises(CoverageError):
        norm_and_moments(STATE_B, Grid1D(0.0, half_width=3.0, scale=1.0))
    with pytest.raises(CoverageError):
        norm_and_moments(STATE_B, Grid1D(2.0, half_width=4.0, scale=1.0))


def test_bad_grid():
    with pytest.raises(ParameterError):
        Grid1D(0.0, n=4)
    with pytest.raises(ParameterError):
        Grid1D(0.0, half_width=-1.0)


def test_riccati_form_matches_along_oscillator():
    packet = propagate_packet(HarmonicOscillator(1.0), g.FirstMoments(1.0, 0.0), SHEARED,
                              IntegratorConfig(step=1e-3, t1=2 * math.pi))
    q = np.linspace(-4, 4, 101)
    for k in (0, len(packet) // 3, len(packet) - 1):
        st_ = packet.state(k)
        assert np.max(np.abs(psi_position(st_, q) - psi_riccati(st_, q))) < 1e-8


def test_sqrt_branch_is_continuous():
    # Q winds once around the origin over one period of the oscillator
    packet = propagate_packet(HarmonicOscillator(1.0), ORIGIN, g.VACUUM,
                              IntegratorConfig(step=1e-3, t1=2 * math.pi))
    assert packet.sqrt_q[-1] == pytest.approx(-1.0, abs=1e-9)
    steps = np.abs(np.diff(packet.sqrt_q))
    assert np.max(steps) < 1e-2


def test_coherent_state_moves_classically():
    packet = propagate_packet(HarmonicOscillator(1.0), g.FirstMoments(1.0, 0.0), g.VACUUM,
                              IntegratorConfig(step=1e-3, t1=1.0))
    st_ = packet.state(len(packet) - 1)
    _, mean, var = norm_and_moments(st_)
    assert mean == pytest.approx(math.cos(1.0), abs=1e-9)
    assert var == pytest.approx(0.5, abs=1e-9)


def test_schrodinger_residual_with_hbar():
    model = AmplifierCoefficients(AmplifierParams.from_xi(0.75, 0.5))
    packet = propagate_packet(model, g.FirstMoments(0.5, 0.2), SHEARED, IntegratorConfig(step=1e-4, t1=0.5),
                              hbar=0.3)
    assert schrodinger_residual(model, packet, 0.25) < 1e-3


def test_schrodinger_residual_needs_interior_sample():
    packet = propagate_packet(HarmonicOscillator(1.0), ORIGIN, g.VACUUM, IntegratorConfig(step=1e-2, t1=0.1))
    with pytest.raises(ParameterError):
        schrodinger_residual(HarmonicOscillator(1.0), packet, 0.0)

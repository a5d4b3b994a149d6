"""Gaussian wave packets built from first moments and a point of M.

Position representation::

    psi(q) = (pi hbar)^{-1/4} Q^{-1/2}
             exp{ i/(2 hbar) C (q - <q>)^2 + i/hbar <p> (q - <q>) + i/(2 hbar) <q><p> }

with ``C = P / Q``. The Riccati form replaces ``Q^{-1/2}`` by
``Q(t0)^{-1/2} exp(-1/2 int_{t0}^t (H2 C + V) dt')``; both agree exactly
along a trajectory because ``dQ/dt = (V + H2 C) Q``.

Momentum wave functions use the convention
``psi~(p) = (2 pi hbar)^{-1/2} int e^{-i p q / hbar} psi(q) dq``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import cumulative_simpson, simpson

from .dynamics import IntegratorConfig, Trajectory, coefficient_table, integrate
from .errors import CoverageError, GridMismatchError, ParameterError
from .geometry import CovarianceTriple, FirstMoments, QPPoint, covariance_from_qp

__all__ = [
    "GaussianState",
    "Grid1D",
    "PacketTrajectory",
    "psi_position",
    "psi_riccati",
    "psi_momentum",
    "momentum_from_position",
    "norm_and_moments",
    "propagate_packet",
    "schrodinger_residual",
    "rs_check",
]

#: the grid must contain <q> +- COVERAGE_SIGMAS standard deviations
COVERAGE_SIGMAS = 4.0
#: largest |psi| at the grid edge, relative to its peak, before the residual is refused
EDGE_TOL = 1e-6


@dataclass(frozen=True)
class GaussianState:
    """Gaussian packet data at one instant.

    ``sqrt_q`` is the branch of ``sqrt(Q)`` used in the prefactor (principal
    root by default). ``phase`` and ``sqrt_q0`` feed the Riccati form.
    """

    moments: FirstMoments
    qp: QPPoint
    hbar: float = 1.0
    phase: complex = 0.0
    sqrt_q: complex | None = None
    sqrt_q0: complex | None = None

    def __post_init__(self):
        if not self.hbar > 0:
            raise ParameterError(f"hbar must be > 0, got {self.hbar}")
        self.qp.validate()
        object.__setattr__(self, "phase", complex(self.phase))
        if self.sqrt_q is None:
            object.__setattr__(self, "sqrt_q", cmath.sqrt(self.qp.q))
        elif abs(self.sqrt_q**2 - self.qp.q) > 1e-9 * abs(self.qp.q):
            raise ParameterError("sqrt_q is not a square root of Q")
        if self.sqrt_q0 is None:
            object.__setattr__(self, "sqrt_q0", self.sqrt_q)

    @property
    def c(self) -> complex:
        return self.qp.p / self.qp.q

    @property
    def covariance(self) -> CovarianceTriple:
        return covariance_from_qp(self.qp, self.hbar)

    @property
    def sigma_q(self) -> float:
        """Position standard deviation."""
        return math.sqrt(self.covariance.sq)


def _exponent(c, mq, mp, hbar, x):
    s = x - mq
    return 1j / (2 * hbar) * c * s * s + 1j / hbar * mp * s + 1j / (2 * hbar) * mq * mp


def psi_position(state: GaussianState, q):
    """Position wave function at scalar or array ``q``."""
    hb = state.hbar
    m = state.moments
    val = np.exp(_exponent(state.c, m.mq, m.mp, hb, np.asarray(q, dtype=float)))
    return (math.pi * hb) ** -0.25 / state.sqrt_q * val


def psi_riccati(state: GaussianState, q):
    """Same packet written through ``C`` and the accumulated phase integral."""
    hb = state.hbar
    m = state.moments
    val = np.exp(_exponent(state.c, m.mq, m.mp, hb, np.asarray(q, dtype=float)) + state.phase)
    return (math.pi * hb) ** -0.25 / state.sqrt_q0 * val


def psi_momentum(state: GaussianState, p):
    """Momentum wave function; the exact Fourier transform of :func:`psi_position`."""
    hb = state.hbar
    m = state.moments
    q, pp = state.qp.q, state.qp.p
    s = np.asarray(p, dtype=float) - m.mp
    expo = -1j / (2 * hb) * (q / pp) * s * s - 1j / hb * m.mq * s - 1j / (2 * hb) * m.mq * m.mp
    # sqrt(Q) sqrt(-iC) squares to -iP, keeping the branch tied to sqrt(Q)
    pref = 1.0 / (state.sqrt_q * cmath.sqrt(-1j * state.c))
    return (math.pi * hb) ** -0.25 * pref * np.exp(expo)


@dataclass(frozen=True)
class Grid1D:
    """Uniform grid of ``n`` points on ``center +- half_width * scale``.

    ``half_width`` is measured in units of ``scale`` (a standard deviation).
    """

    center: float
    half_width: float = 8.0
    n: int = 2048
    scale: float = 1.0

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 16:
            raise ParameterError(f"grid needs n >= 16 points, got {self.n}")
        if not (self.half_width > 0 and self.scale > 0):
            raise ParameterError("half_width and scale must be > 0")

    @classmethod
    def for_state(cls, state: GaussianState, half_width: float = 8.0, n: int = 2048) -> "Grid1D":
        return cls(state.moments.mq, half_width, n, state.sigma_q)

    @property
    def lo(self) -> float:
        return self.center - self.half_width * self.scale

    @property
    def hi(self) -> float:
        return self.center + self.half_width * self.scale

    @property
    def points(self) -> np.ndarray:
        return np.linspace(self.lo, self.hi, self.n)

    @property
    def spacing(self) -> float:
        return (self.hi - self.lo) / (self.n - 1)


def _check_coverage(state, grid):
    sig = state.sigma_q
    mq = state.moments.mq
    need_lo, need_hi = mq - COVERAGE_SIGMAS * sig, mq + COVERAGE_SIGMAS * sig
    if grid.lo > need_lo or grid.hi < need_hi:
        raise CoverageError(
            f"grid [{grid.lo:.6g}, {grid.hi:.6g}] does not cover <q> +- {COVERAGE_SIGMAS:g} sigma "
            f"= [{need_lo:.6g}, {need_hi:.6g}]"
        )


def norm_and_moments(state: GaussianState, grid: Grid1D | None = None):
    """Simpson quadrature of the norm, mean position and position variance."""
    grid = grid or Grid1D.for_state(state)
    _check_coverage(state, grid)
    q = grid.points
    rho = np.abs(psi_position(state, q)) ** 2
    norm = simpson(rho, x=q)
    mean = simpson(q * rho, x=q) / norm
    var = simpson((q - mean) ** 2 * rho, x=q) / norm
    return float(norm), float(mean), float(var)


def momentum_from_position(state: GaussianState, grid: Grid1D | None = None):
    """Discrete Fourier transform of the sampled position packet.

    Returns momenta in increasing order and the approximated ``psi~(p)``.
    """
    grid = grid or Grid1D.for_state(state)
    q = grid.points
    dq = grid.spacing
    n = grid.n
    hb = state.hbar
    p = 2 * np.pi * hb * np.fft.fftfreq(n, d=dq)
    vals = np.fft.fft(psi_position(state, q)) * dq / np.sqrt(2 * np.pi * hb)
    vals *= np.exp(-1j * p * q[0] / hb)
    order = np.argsort(p)
    return p[order], vals[order]


def rs_check(state: GaussianState) -> float:
    """Robertson-Schroedinger residual ``sq sp - sqp^2 - hbar^2 / 4``."""
    q, p, hb = state.qp.q, state.qp.p, state.hbar
    sq = hb / 2 * abs(q) ** 2
    sp = hb / 2 * abs(p) ** 2
    sqp = hb / 2 * (p * q.conjugate()).real
    return sq * sp - sqp * sqp - hb * hb / 4


# -- trajectories -----------------------------------------------------------


@dataclass(frozen=True, eq=False)
class PacketTrajectory:
    """Paired first-moment and (Q, P) trajectories with packet phase data."""

    moments: Trajectory
    qp: Trajectory
    sqrt_q: np.ndarray
    phase: np.ndarray
    model: object = None
    hbar: float = 1.0

    def __post_init__(self):
        if not np.array_equal(self.moments.times, self.qp.times):
            raise GridMismatchError("moment and (Q, P) trajectories use different grids")

    @property
    def times(self) -> np.ndarray:
        return self.qp.times

    def __len__(self):
        return len(self.qp)

    def state(self, k: int) -> GaussianState:
        mv = self.moments.values[k]
        qv = self.qp.values[k]
        return GaussianState(
            FirstMoments(mv[0].real, mv[1].real),
            QPPoint(qv[0], qv[1], check=False),
            self.hbar,
            phase=self.phase[k],
            sqrt_q=self.sqrt_q[k],
            sqrt_q0=self.sqrt_q[0],
        )

    def index_of(self, t: float) -> int:
        return int(np.argmin(np.abs(self.times - t)))


def _continuous_sqrt(q):
    arg = np.unwrap(np.angle(q))
    return np.sqrt(np.abs(q)) * np.exp(0.5j * arg)


def _cumulative(y, x):
    if len(x) >= 3:
        return cumulative_simpson(y, x=x, initial=0.0)
    return np.concatenate([[0.0], np.cumsum(np.diff(x) * 0.5 * (y[1:] + y[:-1]))])


def propagate_packet(coeffs, moments0: FirstMoments, qp0: QPPoint,
                     config: IntegratorConfig | None = None, hbar: float = 1.0) -> PacketTrajectory:
    """Evolve a Gaussian packet: Ehrenfest flow for the moments and the M flow for (Q, P).

    ``sqrt(Q)`` is tracked continuously along the samples and the Riccati
    phase is accumulated with cumulative Simpson weights on the same grid.
    """
    cfg = config or IntegratorConfig()
    m = integrate("moments", coeffs, moments0, cfg, hbar=hbar)
    qp = integrate("m", coeffs, qp0, cfg, hbar=hbar)
    q = qp.values[:, 0]
    c = qp.values[:, 1] / q
    h = coefficient_table(coeffs, qp.times)
    integrand = -0.5 * (h[:, 1] * c + h[:, 2])
    phase = _cumulative(integrand.real, qp.times) + 1j * _cumulative(integrand.imag, qp.times)
    return PacketTrajectory(m, qp, _continuous_sqrt(q), phase, coeffs, hbar)


def _d1(f, dx):
    out = np.full_like(f, np.nan)
    out[2:-2] = (f[:-4] - 8 * f[1:-3] + 8 * f[3:-1] - f[4:]) / (12 * dx)
    return out


def _d2(f, dx):
    out = np.full_like(f, np.nan)
    out[2:-2] = (-f[:-4] + 16 * f[1:-3] - 30 * f[2:-2] + 16 * f[3:-1] - f[4:]) / (12 * dx * dx)
    return out


def schrodinger_residual(coeffs, packet: PacketTrajectory, t: float,
                         grid: Grid1D | None = None, n: int = 4096) -> float:
    """Relative L2 residual of the Schroedinger equation at the sample nearest ``t``.

    The time derivative is a centered difference between neighbouring
    samples; space derivatives use fourth-order stencils on the interior.
    """
    k = packet.index_of(t)
    if k == 0 or k == len(packet) - 1:
        raise ParameterError("centered differencing needs a sample on both sides of t")
    ts = packet.times
    dt_b, dt_f = ts[k] - ts[k - 1], ts[k + 1] - ts[k]
    if abs(dt_b - dt_f) > 1e-9 * max(dt_b, dt_f):
        raise ParameterError("samples around t are not evenly spaced")
    st = packet.state(k)
    grid = grid or Grid1D.for_state(st, n=n)
    _check_coverage(st, grid)
    q = grid.points
    dx = grid.spacing
    hb = packet.hbar
    psi = psi_position(st, q)
    peak = np.max(np.abs(psi))
    if max(abs(psi[0]), abs(psi[-1])) > EDGE_TOL * peak:
        raise CoverageError("packet reaches the grid boundary; widen the grid")
    dpsi_dt = (psi_position(packet.state(k + 1), q) - psi_position(packet.state(k - 1), q)) / (2 * dt_f)
    h1, h2, v = coeffs(float(ts[k]))
    hpsi = (
        0.5 * h1 * q * q * psi
        - 0.5 * h2 * hb * hb * _d2(psi, dx)
        - 0.5j * v * hb * (2 * q * _d1(psi, dx) + psi)
    )
    r = (1j * hb * dpsi_dt - hpsi)[2:-2]
    ref = hpsi[2:-2]
    return float(np.sqrt(simpson(np.abs(r) ** 2, x=q[2:-2]) / simpson(np.abs(ref) ** 2, x=q[2:-2])))

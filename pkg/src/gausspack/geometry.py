"""State-space charts for generalized coherent states and the maps between them.

Second moments of a Gaussian packet can be carried by any of five charts::

    M  --nu-->  H3
    |           | chi
    pi          H2
    |           | v (stereographic)
    HP <--u--   D

``M`` is the constraint manifold of complex pairs (Q, P) with
``conj(Q) P - Q conj(P) = 2i``; ``H3`` and ``H2`` are hyperboloids; ``D`` is
the Poincare disk and ``HP`` the Siegel upper half plane. First moments live
separately in the complex plane through the coordinate ``alpha``.

All point types are immutable and validated on construction (pass
``check=False`` to skip). Maps validate their input.

Underscored helpers (``_nu``, ``_chi`` ...) are the same maps acting
elementwise on numpy arrays; trajectory conversion uses them.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import InitVar, dataclass
from functools import singledispatch

import numpy as np

from .errors import InvalidPointError, InvalidStateError, SingularChartError

__all__ = [
    "DEFAULT_TOL",
    "QPPoint",
    "H3Point",
    "H2Point",
    "SqueezeCoords",
    "DiskPoint",
    "SiegelPoint",
    "CovarianceTriple",
    "FirstMoments",
    "AlphaPoint",
    "VACUUM",
    "quadrature_frame",
    "nu_map",
    "nu_inverse",
    "chi_map",
    "disk_projection",
    "disk_to_h2",
    "mobius_to_siegel",
    "siegel_to_disk",
    "pi_map",
    "pi_tilde_map",
    "covariance_from_qp",
    "qp_from_covariance",
    "h2_from_covariance",
    "covariance_from_h2",
    "siegel_from_covariance",
    "covariance_from_siegel",
    "siegel_to_h2",
    "h2_to_siegel",
    "squeeze_coordinates",
    "h2_from_squeeze",
    "alpha_from_moments",
    "moments_from_alpha",
    "symplectic_area",
    "chart_energy",
    "poisson_bracket",
]

#: validation tolerance for chart constraints
DEFAULT_TOL = 1e-9


def _fail(msg):
    raise InvalidPointError(msg)


@dataclass(frozen=True)
class QPPoint:
    """Point (Q, P) of the constraint manifold ``conj(Q) P - Q conj(P) = 2i``."""

    q: complex
    p: complex
    check: InitVar[bool] = True

    def __post_init__(self, check):
        object.__setattr__(self, "q", complex(self.q))
        object.__setattr__(self, "p", complex(self.p))
        if check:
            self.validate()

    @property
    def constraint_residual(self) -> float:
        q, p = self.q, self.p
        return abs(q.conjugate() * p - q * p.conjugate() - 2j)

    def validate(self, tol: float = DEFAULT_TOL) -> "QPPoint":
        if not (cmath.isfinite(self.q) and cmath.isfinite(self.p)):
            _fail(f"non-finite (Q, P) = ({self.q}, {self.p})")
        r = self.constraint_residual
        if r > tol:
            _fail(f"(Q, P) = ({self.q}, {self.p}) violates the 2i constraint by {r:.3e}")
        return self

    def renormalized(self) -> "QPPoint":
        """Rescale by a real factor so the constraint holds exactly."""
        s = (self.q.conjugate() * self.p).imag
        if not s > 0:
            _fail(f"cannot renormalize (Q, P) with Im(conj(Q) P) = {s}")
        f = 1.0 / math.sqrt(s)
        return QPPoint(self.q * f, self.p * f, check=False)

    def rotated(self, phi: float) -> "QPPoint":
        """Global U(1) phase action ``(Q, P) -> e^{i phi} (Q, P)``."""
        u = cmath.exp(1j * phi)
        return QPPoint(u * self.q, u * self.p, check=False)


@dataclass(frozen=True)
class H3Point:
    x0: float
    x1: float
    x2: float
    x3: float
    check: InitVar[bool] = True

    def __post_init__(self, check):
        for name in ("x0", "x1", "x2", "x3"):
            object.__setattr__(self, name, float(getattr(self, name)))
        if check:
            self.validate()

    @property
    def constraint_residual(self) -> float:
        return abs(self.x0**2 + self.x1**2 - self.x2**2 - self.x3**2 - 1.0)

    def validate(self, tol: float = DEFAULT_TOL) -> "H3Point":
        if self.constraint_residual > tol * max(1.0, self.as_array() @ self.as_array()):
            _fail(f"{self} is off H3 by {self.constraint_residual:.3e}")
        return self

    def as_array(self) -> np.ndarray:
        return np.array([self.x0, self.x1, self.x2, self.x3])

    def __neg__(self):
        return H3Point(-self.x0, -self.x1, -self.x2, -self.x3, check=False)


@dataclass(frozen=True)
class H2Point:
    """Point on the upper sheet of ``y1^2 - y2^2 - y3^2 = 1``."""

    y1: float
    y2: float
    y3: float
    check: InitVar[bool] = True

    def __post_init__(self, check):
        for name in ("y1", "y2", "y3"):
            object.__setattr__(self, name, float(getattr(self, name)))
        if check:
            self.validate()

    @property
    def constraint_residual(self) -> float:
        return abs(self.y1**2 - self.y2**2 - self.y3**2 - 1.0)

    def validate(self, tol: float = DEFAULT_TOL) -> "H2Point":
        if self.y1 < 1.0 - tol:
            _fail(f"{self} is not on the upper sheet")
        if self.constraint_residual > tol * max(1.0, self.y1**2):
            _fail(f"{self} is off H2 by {self.constraint_residual:.3e}")
        return self

    def as_array(self) -> np.ndarray:
        return np.array([self.y1, self.y2, self.y3])


@dataclass(frozen=True)
class SqueezeCoords:
    """Hyperbolic (squeezing) coordinates on H2; ``phi`` lives in [0, 2 pi)."""

    tau: float
    phi: float

    def __post_init__(self):
        object.__setattr__(self, "tau", float(self.tau))
        object.__setattr__(self, "phi", float(self.phi))
        if not self.tau >= 0:
            _fail(f"tau must be >= 0, got {self.tau}")


@dataclass(frozen=True)
class DiskPoint:
    zeta: complex
    check: InitVar[bool] = True

    def __post_init__(self, check):
        object.__setattr__(self, "zeta", complex(self.zeta))
        if check and not abs(self.zeta) < 1.0:
            _fail(f"zeta = {self.zeta} is outside the open unit disk")


@dataclass(frozen=True)
class SiegelPoint:
    """Riccati variable ``C = P / Q`` with ``Im C > 0``."""

    c: complex
    check: InitVar[bool] = True

    def __post_init__(self, check):
        object.__setattr__(self, "c", complex(self.c))
        if check and not self.c.imag > 0:
            _fail(f"C = {self.c} is not in the upper half plane")

    @property
    def ctilde(self) -> complex:
        """Momentum-representation variable ``Q / P = 1 / C``."""
        return 1.0 / self.c


@dataclass(frozen=True)
class CovarianceTriple:
    """Variances ``sq``, ``sp`` and the symmetrized covariance ``sqp``."""

    sq: float
    sp: float
    sqp: float

    def rs_residual(self, hbar: float = 1.0) -> float:
        return self.sq * self.sp - self.sqp**2 - hbar * hbar / 4.0

    def validate(self, hbar: float = 1.0, tol: float = DEFAULT_TOL) -> "CovarianceTriple":
        if not (self.sq > 0 and self.sp > 0):
            raise InvalidStateError(f"variances must be positive: {self}")
        scale = max(hbar * hbar / 4.0, self.sq * self.sp)
        if abs(self.rs_residual(hbar)) > tol * scale:
            raise InvalidStateError(
                f"{self} violates the Robertson-Schroedinger equality by "
                f"{self.rs_residual(hbar):.3e}"
            )
        return self


@dataclass(frozen=True)
class FirstMoments:
    mq: float
    mp: float

    def __post_init__(self):
        object.__setattr__(self, "mq", float(self.mq))
        object.__setattr__(self, "mp", float(self.mp))

    def alpha(self, qp: QPPoint, hbar: float = 1.0) -> complex:
        return alpha_from_moments(self, qp, hbar)


VACUUM = QPPoint(1.0, 1j)


@dataclass(frozen=True)
class AlphaPoint:
    """Complex first-moment coordinate measured in the bosonic frame ``frame``."""

    alpha: complex
    frame: QPPoint = VACUUM

    def __post_init__(self):
        object.__setattr__(self, "alpha", complex(self.alpha))

    def moments(self, hbar: float = 1.0) -> FirstMoments:
        return moments_from_alpha(self.alpha, self.frame, hbar)


def quadrature_frame(omega: float) -> QPPoint:
    """Frame in which ``alpha = (sqrt(omega) <q> + i <p> / sqrt(omega)) / sqrt(2 hbar)``."""
    s = math.sqrt(omega)
    return QPPoint(-1.0 / s, -1j * s)


# -- array kernels ----------------------------------------------------------


def _nu(q, p):
    qr, qi, pr, pi_ = np.real(q), np.imag(q), np.real(p), np.imag(p)
    return (pr - qi) / 2, (qr + pi_) / 2, (pr + qi) / 2, (pi_ - qr) / 2


def _nu_inv(x0, x1, x2, x3):
    return (x1 - x3) + 1j * (x2 - x0), (x2 + x0) + 1j * (x1 + x3)


def _chi(x0, x1, x2, x3):
    y1 = x0 * x0 + x1 * x1 + x2 * x2 + x3 * x3
    y2 = 2 * (x1 * x2 - x0 * x3)
    y3 = 2 * (x1 * x3 + x0 * x2)
    return y1, y2, y3


def _disk(y1, y2, y3):
    return (y2 + 1j * y3) / (1 + y1)


def _disk_inv(zeta):
    r2 = np.abs(zeta) ** 2
    d = 1 - r2
    return (1 + r2) / d, 2 * np.real(zeta) / d, 2 * np.imag(zeta) / d


def _u(zeta):
    return (zeta + 1j) / (1j * zeta + 1)


def _u_inv(c):
    return (c - 1j) / (1 - 1j * c)


def _pi(q, p):
    return p / q


def _qp_to_y(q, p):
    # equals _chi(*_nu(q, p)) but with fewer roundings
    aq, ap = np.abs(q) ** 2, np.abs(p) ** 2
    return (aq + ap) / 2, np.real(np.conj(q) * p), (ap - aq) / 2


def _siegel_to_y(c):
    ci = np.imag(c)
    m = np.abs(c) ** 2
    return (1 + m) / (2 * ci), np.real(c) / ci, (m - 1) / (2 * ci)


def _y_to_squeeze(y1, y2, y3):
    tau = np.arcsinh(np.hypot(y2, y3))
    phi = np.mod(np.arctan2(y3, y2), 2 * np.pi)
    phi = np.where(phi >= 2 * np.pi, 0.0, phi)
    return tau, phi


def _squeeze_to_y(tau, phi):
    s = np.sinh(tau)
    return np.cosh(tau), s * np.cos(phi), s * np.sin(phi)


# -- point maps -------------------------------------------------------------


def nu_map(qp: QPPoint, tol: float = DEFAULT_TOL) -> H3Point:
    """Linear identification of M with the three-dimensional hyperboloid H3."""
    qp.validate(tol)
    return H3Point(*_nu(qp.q, qp.p), check=False)


def nu_inverse(h3: H3Point, tol: float = DEFAULT_TOL) -> QPPoint:
    h3.validate(tol)
    return QPPoint(*_nu_inv(h3.x0, h3.x1, h3.x2, h3.x3), check=False)


def chi_map(h3: H3Point, tol: float = DEFAULT_TOL) -> H2Point:
    """Two-to-one covering H3 -> H2 (conjugation of e1 by the SL(2, R) element)."""
    h3.validate(tol)
    return H2Point(*_chi(h3.x0, h3.x1, h3.x2, h3.x3), check=False)


def disk_projection(h2: H2Point, tol: float = DEFAULT_TOL) -> DiskPoint:
    """Stereographic projection of H2 from (-1, 0, 0) onto the plane y1 = 0."""
    h2.validate(tol)
    return DiskPoint(_disk(h2.y1, h2.y2, h2.y3))


def disk_to_h2(d: DiskPoint) -> H2Point:
    return H2Point(*_disk_inv(d.zeta), check=False)


def mobius_to_siegel(d: DiskPoint) -> SiegelPoint:
    return SiegelPoint(_u(d.zeta))


def siegel_to_disk(s: SiegelPoint) -> DiskPoint:
    return DiskPoint(_u_inv(s.c))


def pi_map(qp: QPPoint, tol: float = DEFAULT_TOL) -> SiegelPoint:
    """Quotient by the global phase: ``(Q, P) -> P / Q``."""
    qp.validate(tol)
    return SiegelPoint(_pi(qp.q, qp.p))


def pi_tilde_map(qp: QPPoint, tol: float = DEFAULT_TOL) -> complex:
    """``(Q, P) -> Q / P``; lies in the lower half plane."""
    qp.validate(tol)
    return qp.q / qp.p


def covariance_from_qp(qp: QPPoint, hbar: float = 1.0, tol: float = DEFAULT_TOL) -> CovarianceTriple:
    qp.validate(tol)
    q, p = qp.q, qp.p
    return CovarianceTriple(
        hbar / 2 * abs(q) ** 2,
        hbar / 2 * abs(p) ** 2,
        hbar / 4 * (p * q.conjugate() + q * p.conjugate()).real,
    )


def qp_from_covariance(cov: CovarianceTriple, hbar: float = 1.0, tol: float = DEFAULT_TOL) -> QPPoint:
    """Representative of the U(1) fibre over ``cov`` with real positive Q."""
    cov.validate(hbar, tol)
    q = math.sqrt(2 * cov.sq / hbar)
    p = (2 * cov.sqp / hbar + 1j) / q
    return QPPoint(q, p, check=False).renormalized()


def h2_from_covariance(cov: CovarianceTriple, hbar: float = 1.0, tol: float = DEFAULT_TOL) -> H2Point:
    cov.validate(hbar, tol)
    return H2Point(
        (cov.sq + cov.sp) / hbar, 2 * cov.sqp / hbar, (cov.sp - cov.sq) / hbar, check=False
    )


def covariance_from_h2(h2: H2Point, hbar: float = 1.0, tol: float = DEFAULT_TOL) -> CovarianceTriple:
    h2.validate(tol)
    return CovarianceTriple(
        hbar * (h2.y1 - h2.y3) / 2, hbar * (h2.y1 + h2.y3) / 2, hbar * h2.y2 / 2
    )


def siegel_from_covariance(cov: CovarianceTriple, hbar: float = 1.0, tol: float = DEFAULT_TOL) -> SiegelPoint:
    # sq is a variance, so Im C = hbar / (2 sq) = 1 / |Q|^2
    if not cov.sq > 0:
        raise InvalidStateError(f"position variance must be positive, got {cov.sq}")
    cov.validate(hbar, tol)
    return SiegelPoint(cov.sqp / cov.sq + 1j * hbar / (2 * cov.sq))


def covariance_from_siegel(s: SiegelPoint, hbar: float = 1.0) -> CovarianceTriple:
    sq = hbar / (2 * s.c.imag)
    sqp = s.c.real * sq
    return CovarianceTriple(sq, (hbar * hbar / 4 + sqp * sqp) / sq, sqp)


def siegel_to_h2(s: SiegelPoint) -> H2Point:
    return H2Point(*_siegel_to_y(s.c), check=False)


def h2_to_siegel(h2: H2Point, tol: float = DEFAULT_TOL) -> SiegelPoint:
    return mobius_to_siegel(disk_projection(h2, tol))


def squeeze_coordinates(h2: H2Point, tol: float = DEFAULT_TOL) -> SqueezeCoords:
    """Squeezing parameters (tau, phi); at the vertex phi is fixed to 0.

    ``tau`` is computed as ``asinh(hypot(y2, y3))``, which equals
    ``acosh(y1)`` on the hyperboloid but stays well conditioned near the
    vertex.
    """
    h2.validate(tol)
    tau, phi = _y_to_squeeze(h2.y1, h2.y2, h2.y3)
    return SqueezeCoords(float(tau), float(phi))


def h2_from_squeeze(sc: SqueezeCoords) -> H2Point:
    return H2Point(*_squeeze_to_y(sc.tau, sc.phi), check=False)


def alpha_from_moments(m: FirstMoments, qp: QPPoint, hbar: float = 1.0) -> complex:
    return 1j / math.sqrt(2 * hbar) * (qp.p * m.mq - qp.q * m.mp)


def moments_from_alpha(alpha: complex, qp: QPPoint, hbar: float = 1.0) -> FirstMoments:
    # alpha * sqrt(2 hbar) / i = P mq - Q mp is a real 2x2 system with det = 1
    z = complex(alpha) * math.sqrt(2 * hbar) / 1j
    q, p = qp.q, qp.p
    a = np.array([[p.real, -q.real], [p.imag, -q.imag]])
    mq, mp = np.linalg.solve(a, [z.real, z.imag])
    return FirstMoments(mq, mp)


def symplectic_area(a: complex, b: complex) -> float:
    """Standard area form ``x y' - x' y``.

    ``a = x + i y`` while ``b`` is read with the conjugate convention
    ``b = x' - i y'``, so ``y' = -Im b``.
    """
    a, b = complex(a), complex(b)
    x, y = a.real, a.imag
    xp, yp = b.real, -b.imag
    return x * yp - xp * y


# -- chart Hamiltonians -----------------------------------------------------


@singledispatch
def chart_energy(point, coeffs_t, hbar: float = 1.0) -> float:
    """Value of the chart's Hamiltonian function at ``point``.

    ``coeffs_t`` is the coefficient triple ``(h1, h2, v)`` at the current time.
    The M, H3, H2, disk and Siegel values coincide for points related by the
    chart maps.
    """
    raise TypeError(f"no chart energy for {type(point).__name__}")


@chart_energy.register
def _(point: QPPoint, coeffs_t, hbar=1.0):
    h1, h2, v = coeffs_t
    q, p = point.q, point.p
    return float(
        h1 * abs(q) ** 2 + v * (q * p.conjugate() + q.conjugate() * p).real + h2 * abs(p) ** 2
    )


@chart_energy.register
def _(point: H3Point, coeffs_t, hbar=1.0):
    return chart_energy(QPPoint(*_nu_inv(point.x0, point.x1, point.x2, point.x3), check=False), coeffs_t)


@chart_energy.register
def _(point: H2Point, coeffs_t, hbar=1.0):
    h1, h2, v = coeffs_t
    return float((h2 + h1) * point.y1 + 2 * v * point.y2 + (h2 - h1) * point.y3)


@chart_energy.register
def _(point: SqueezeCoords, coeffs_t, hbar=1.0):
    return chart_energy(h2_from_squeeze(point), coeffs_t)


@chart_energy.register
def _(point: SiegelPoint, coeffs_t, hbar=1.0):
    h1, h2, v = coeffs_t
    c = point.c
    form = h1 + v * (c + c.conjugate()) + h2 * abs(c) ** 2
    return float((2j / (c - c.conjugate()) * form).real)


@chart_energy.register
def _(point: DiskPoint, coeffs_t, hbar=1.0):
    h1, h2, v = coeffs_t
    z = point.zeta
    a, b = 1j * z + 1, z + 1j
    form = h1 * abs(a) ** 2 + v * (a.conjugate() * b + b.conjugate() * a) + h2 * abs(b) ** 2
    return float((form / (1 - abs(z) ** 2)).real)


@chart_energy.register
def _(point: AlphaPoint, coeffs_t, hbar=1.0):
    from .hamiltonian import gw_transform

    g, w = gw_transform(coeffs_t, point.frame)
    a = point.alpha
    val = hbar / 4 * (g.conjugate() * a * a + 2 * w * abs(a) ** 2 + g * a.conjugate() ** 2)
    return float(val.real)


@chart_energy.register
def _(point: FirstMoments, coeffs_t, hbar=1.0):
    h1, h2, v = coeffs_t
    q, p = point.mq, point.mp
    return 0.5 * (h1 * q * q + 2 * v * q * p + h2 * p * p)


# -- Poisson brackets -------------------------------------------------------


def poisson_bracket(chart: str, grad_a, grad_b, point) -> float:
    """Poisson bracket of two real functions given their gradients at ``point``.

    Gradients are ``(d/d re, d/d im)`` pairs in the chart's complex coordinate.
    On the Siegel half plane::

        {A, B} = C_I^2 (dA/dC_I dB/dC_R - dA/dC_R dB/dC_I)

    and on the disk the same expression with prefactor ``(1 - |zeta|^2)^2 / 4``.
    With this sign ``dF/dt = {H, F}`` along the Riccati flow in both charts.
    """
    ar, ai = grad_a
    br, bi = grad_b
    core = ai * br - ar * bi
    if chart == "siegel":
        z = point.c if isinstance(point, SiegelPoint) else complex(point)
        return z.imag**2 * core
    if chart == "disk":
        z = point.zeta if isinstance(point, DiskPoint) else complex(point)
        return (1 - abs(z) ** 2) ** 2 / 4 * core
    raise SingularChartError(f"no Poisson bracket implemented for chart {chart!r}")

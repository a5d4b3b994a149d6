"""Closed-form solutions for the degenerate parametric amplifier.

The first moments enter through ``alpha`` measured in the quadrature frame
(see :func:`gausspack.geometry.quadrature_frame`), for which::

    d alpha / dt = -(i/2) (xi e^{-i omega t} conj(alpha) + 2 omega alpha)

The second moments enter through the fundamental matrix of the (Q, P)
system. Its trigonometric closed form is checked against the equations of
motion before use (see :class:`QPOracle`).
"""

from __future__ import annotations

import cmath
import logging
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.integrate import solve_ivp

from .errors import NotApplicableError, OracleMismatchError
from .geometry import QPPoint
from .hamiltonian import AmplifierParams, amplifier_coefficients

__all__ = [
    "MAX_DENOMINATOR",
    "RATIONAL_TOL",
    "alpha_dot_initial",
    "AmplifierSolution",
    "solve",
    "alpha_analytic",
    "CurveClass",
    "classify_curve",
    "closed_form_matrix",
    "validate_closed_form",
    "QPOracle",
    "qp_analytic",
]

log = logging.getLogger(__name__)

MAX_DENOMINATOR = 64
RATIONAL_TOL = 1e-9
#: largest accepted residual of the closed (Q, P) form
ORACLE_TOL = 1e-6
#: relative size below which a polar factor counts as zero
DEGENERATE_TOL = 1e-12


def alpha_dot_initial(params: AmplifierParams, alpha0: complex) -> complex:
    a = complex(alpha0)
    return -0.5j * (params.xi * a.conjugate() + 2 * params.omega * a)


@dataclass(frozen=True)
class AmplifierSolution:
    """Analytic first-moment solution in one regime.

    ``big_omega`` holds Omega (elliptic), Omega~ (hyperbolic) or 0
    (parabolic). The polar factors are only defined in the elliptic regime.
    """

    regime: str
    omega: float
    xi: complex
    big_omega: float
    alpha0: complex
    alphadot0: complex
    r1: float | None = None
    phi1: float | None = None
    r2: float | None = None
    phi2: float | None = None

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        w, a0 = self.omega, self.alpha0
        # beta = alpha e^{i w t / 2} obeys beta'' = -(Omega^2 / 4) beta
        db0 = self.alphadot0 + 0.5j * w * a0
        if self.regime == "elliptic":
            om = self.big_omega
            beta = (2 * db0 / om) * np.sin(om * t / 2) + a0 * np.cos(om * t / 2)
        elif self.regime == "hyperbolic":
            om = self.big_omega
            beta = (2 * db0 / om) * np.sinh(om * t / 2) + a0 * np.cosh(om * t / 2)
        else:
            beta = db0 * t + a0
        out = beta * np.exp(-0.5j * w * t)
        return complex(out) if out.ndim == 0 else out


def solve(params: AmplifierParams, alpha0: complex) -> AmplifierSolution:
    a0 = complex(alpha0)
    ad0 = alpha_dot_initial(params, a0)
    regime, w = params.regime, params.omega
    if regime == "elliptic":
        om = params.big_omega
        z1 = 0.5 * (1 + w / om) * a0 - 1j * ad0 / om
        z2 = 0.5 * (1 - w / om) * a0 + 1j * ad0 / om
        return AmplifierSolution(
            regime, w, params.xi, om, a0, ad0,
            abs(z1), cmath.phase(z1), abs(z2), cmath.phase(z2),
        )
    om = params.big_omega_tilde if regime == "hyperbolic" else 0.0
    return AmplifierSolution(regime, w, params.xi, om, a0, ad0)


def alpha_analytic(params: AmplifierParams, alpha0: complex, t):
    """Exact ``alpha(t)`` for scalar or array ``t``."""
    return solve(params, alpha0)(t)


# -- curve classification ---------------------------------------------------


@dataclass(frozen=True)
class CurveClass:
    kind: str
    mu: float
    nu: float
    ratio: float
    period: float | None
    regime: str = "elliptic"
    a: float | None = None
    b: float | None = None
    d: float | None = None
    degenerate: bool = False

    @property
    def closed(self) -> bool:
        return self.kind != "open"

    def to_dict(self) -> dict:
        return {
            "regime": self.regime,
            "mu": self.mu,
            "nu": self.nu,
            "ratio": self.ratio if math.isfinite(self.ratio) else None,
            "kind": self.kind,
            "period": self.period,
        }


def rational_approximation(x: float, max_den: int = MAX_DENOMINATOR, tol: float = RATIONAL_TOL):
    """Best fraction with denominator <= ``max_den`` if it matches ``x`` within ``tol``."""
    if not math.isfinite(x):
        return None
    f = Fraction(x).limit_denominator(max_den)
    return f if abs(float(f) - x) <= tol else None


def classify_curve(params: AmplifierParams, alpha0: complex) -> CurveClass:
    """Epicycloid / epitrochoid / open classification of ``alpha(t)``.

    With the two rotating terms of the elliptic solution of radii ``r1``
    (frequency ``mu``) and ``r2`` (frequency ``nu``) the curve is an
    epicycloid when ``r2`` equals the rolling radius ``b = r1 mu / nu``.
    A vanishing radius leaves a single circle, reported as a degenerate
    epicycloid.
    """
    if params.regime != "elliptic":
        raise NotApplicableError(f"curve classification needs the elliptic regime, got {params.regime}")
    sol = solve(params, alpha0)
    w, om = params.omega, sol.big_omega
    mu, nu = 0.5 * (om - w), -0.5 * (om + w)
    ratio = nu / mu if mu != 0 else math.inf
    r1, r2 = sol.r1, sol.r2
    scale = max(r1, r2, 1e-300)
    if r1 <= DEGENERATE_TOL * scale or r2 <= DEGENERATE_TOL * scale:
        if r1 == 0 and r2 == 0:
            return CurveClass("epicycloid", mu, nu, ratio, 0.0, a=0.0, b=0.0, d=0.0, degenerate=True)
        active = nu if r1 <= DEGENERATE_TOL * scale else mu
        return CurveClass(
            "epicycloid", mu, nu, ratio, 2 * math.pi / abs(active),
            a=r1, b=0.0, d=r2, degenerate=True,
        )
    b = r1 / abs(ratio)
    a = r1 - b
    frac = rational_approximation(ratio)
    if frac is None:
        return CurveClass("open", mu, nu, ratio, None, a=a, b=b, d=r2)
    period = 2 * math.pi * frac.denominator / abs(mu)
    kind = "epicycloid" if abs(r2 - b) <= 1e-9 * max(1.0, r1) else "epitrochoid"
    return CurveClass(kind, mu, nu, ratio, period, a=a, b=b, d=r2)


# -- (Q, P) oracle ----------------------------------------------------------


def closed_form_matrix(params: AmplifierParams, t):
    """Entries ``(a, b, c, d)`` with ``Q = a Q0 + b P0`` and ``P = c Q0 + d P0``."""
    w, om = params.omega, params.big_omega
    k = abs(params.xi) / om  # 4 kappa rho / Omega
    th = params.theta if params.kappa >= 0 else params.theta + math.pi
    t = np.asarray(t, dtype=float)
    lo, hi = 0.5 * (om - w) * t, 0.5 * (om + w) * t
    m, p = 1 - w / om, 1 + w / om
    a = 0.5 * (m * np.cos(lo) + p * np.cos(hi) + k * (np.cos(-hi + th) - np.cos(lo + th)))
    b = 0.5 / w * (p * np.sin(hi) - m * np.sin(lo) + k * (np.sin(-hi + th) - np.sin(lo + th)))
    c = 0.5 * w * (m * np.sin(lo) - p * np.sin(hi) + k * (np.sin(-hi + th) - np.sin(lo + th)))
    d = 0.5 * (m * np.cos(lo) + p * np.cos(hi) + k * (np.cos(lo + th) - np.cos(-hi + th)))
    return a, b, c, d


def _system_matrix(params, t):
    h1, h2, v = amplifier_coefficients(params, t)
    return np.array([[v, h2], [-h1, -v]])


def validate_closed_form(params: AmplifierParams, t_max: float = 4 * math.pi, n: int = 257,
                         form=None) -> float:
    """Residual of the closed form substituted into the (Q, P) equations.

    Returns the largest of ``|S(0) - 1|`` and ``|dS/dt - A(t) S|`` over ``n``
    points of ``[0, t_max]``, with ``dS/dt`` from a five-point stencil. Both
    are scaled by the size of the terms involved.
    """
    form = form or closed_form_matrix
    ts = np.linspace(0.0, t_max, n)
    h = 1e-3

    def mat(t):
        a, b, c, d = form(params, t)
        return np.array([[a, b], [c, d]], dtype=float)

    res = float(np.max(np.abs(mat(0.0) - np.eye(2))))
    for t in ts:
        s = mat(t)
        ds = (-mat(t + 2 * h) + 8 * mat(t + h) - 8 * mat(t - h) + mat(t - 2 * h)) / (12 * h)
        a = _system_matrix(params, t)
        scale = max(1.0, np.max(np.abs(a)) * np.max(np.abs(s)))
        res = max(res, float(np.max(np.abs(ds - a @ s))) / scale)
    return res


def _numeric_fundamental(params, t_max, rtol=1e-10, atol=1e-12):
    def f(t, y):
        return (_system_matrix(params, t) @ y.reshape(2, 2)).ravel()

    sol = solve_ivp(f, (0.0, t_max), np.eye(2).ravel(), method="DOP853",
                    rtol=rtol, atol=atol, dense_output=True)
    return sol.sol


class QPOracle:
    """Reference ``(Q(t), P(t))`` for the elliptic amplifier.

    The closed form is validated on ``[0, t_max]`` when the oracle is built.
    If the residual exceeds ``tol`` the discrepancy is logged and an adaptive
    numerical solution (rtol 1e-10) is used instead, or
    :class:`OracleMismatchError` is raised when ``strict`` is set.
    """

    def __init__(self, params: AmplifierParams, t_max: float = 4 * math.pi,
                 tol: float = ORACLE_TOL, strict: bool = False, form=None):
        if params.regime != "elliptic":
            raise NotApplicableError(f"closed (Q, P) forms need the elliptic regime, got {params.regime}")
        self.params = params
        self.t_max = float(t_max)
        self._form = form or closed_form_matrix
        self.residual = validate_closed_form(params, self.t_max, form=self._form)
        self._numeric = None
        if self.residual <= tol:
            self.mode = "analytic"
            return
        numeric = _numeric_fundamental(params, self.t_max)
        ts = np.linspace(0.0, self.t_max, 257)
        a, b, c, d = self._form(params, ts)
        analytic = np.stack([a, b, c, d])
        num = numeric(ts)
        if strict:
            raise OracleMismatchError(
                f"closed (Q, P) form fails substitution with residual {self.residual:.3e}",
                analytic=analytic, numeric=num, residual=self.residual,
            )
        log.warning(
            "closed (Q, P) form rejected (residual %.3e, max deviation from numeric %.3e); "
            "using adaptive numerical oracle",
            self.residual, float(np.max(np.abs(analytic - num))),
        )
        self.mode = "numeric"
        self._numeric = numeric

    def matrix(self, t):
        if self._numeric is None:
            return self._form(self.params, t)
        t = np.asarray(t, dtype=float)
        if np.any(t < 0) or np.any(t > self.t_max):
            raise ValueError(f"numeric oracle only covers [0, {self.t_max}]")
        return tuple(self._numeric(t))

    def __call__(self, q0: complex, p0: complex, t):
        a, b, c, d = self.matrix(t)
        return a * q0 + b * p0, c * q0 + d * p0

    def point(self, qp: QPPoint, t: float) -> QPPoint:
        q, p = self(qp.q, qp.p, float(t))
        return QPPoint(complex(q), complex(p), check=False)


def qp_analytic(params: AmplifierParams, q0: complex, p0: complex, t: float, **oracle_kw) -> QPPoint:
    """Evaluate ``(Q(t), P(t))`` from ``(q0, p0)`` through a validated oracle."""
    QPPoint(q0, p0).validate()
    oracle_kw.setdefault("t_max", max(float(t), 4 * math.pi))
    return QPOracle(params, **oracle_kw).point(QPPoint(q0, p0), t)

"""Time-dependent quadratic Hamiltonians.

A one-dimensional quadratic Hamiltonian is fixed by three real functions of
time, written here ``h1``, ``h2`` and ``v``::

    H = 1/2 * (h1 q^2 + 2 v q p + h2 p^2)

Every model in this module is an immutable callable ``model(t) -> (h1, h2, v)``.
Models are registered by ``kind`` so they can be rebuilt from plain config
dictionaries (``{"kind": ..., "params": {...}}``).

The degenerate parametric amplifier enters through its single-mode effective
Hamiltonian; the constant energy offset of that reduction is dropped, which
only changes the global phase of the state.
"""

from __future__ import annotations

import cmath
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Any, Callable, Mapping

import numpy as np

from .errors import ModelEvaluationError, ParameterError

__all__ = [
    "AmplifierParams",
    "QuadraticCoefficients",
    "ConstantCoefficients",
    "HarmonicOscillator",
    "AmplifierCoefficients",
    "TabulatedCoefficients",
    "free_particle",
    "evaluate",
    "amplifier_coefficients",
    "gw_transform",
    "model_from_config",
    "register_model",
]

#: relative tolerance used to decide the parabolic amplifier regime
REGIME_TOL = 1e-12


@dataclass(frozen=True)
class AmplifierParams:
    """Degenerate parametric amplifier in the parametric approximation.

    ``omega`` is the signal frequency, ``kappa`` the crystal coupling and
    ``beta`` the (complex) classical pump amplitude. The effective squeezing
    strength is ``xi = 4 * kappa * beta``.
    """

    omega: float
    kappa: float
    beta: complex

    def __post_init__(self):
        object.__setattr__(self, "omega", float(self.omega))
        object.__setattr__(self, "kappa", float(self.kappa))
        object.__setattr__(self, "beta", complex(self.beta))
        if not math.isfinite(self.omega) or self.omega <= 0:
            raise ParameterError(f"omega must be finite and > 0, got {self.omega}")
        if not (math.isfinite(self.kappa) and cmath.isfinite(self.beta)):
            raise ParameterError("kappa and beta must be finite")

    @classmethod
    def from_xi(cls, omega: float, xi: complex, kappa: float = 1.0) -> "AmplifierParams":
        """Build parameters from the squeezing strength ``xi`` directly."""
        if kappa == 0:
            if xi != 0:
                raise ParameterError("kappa = 0 forces xi = 0")
            return cls(omega, 0.0, 0.0)
        return cls(omega, kappa, complex(xi) / (4.0 * kappa))

    @property
    def xi(self) -> complex:
        return 4.0 * self.kappa * self.beta

    @property
    def rho(self) -> float:
        """Modulus of the pump amplitude."""
        return abs(self.beta)

    @property
    def theta(self) -> float:
        """Phase of the pump amplitude."""
        return cmath.phase(self.beta)

    @property
    def regime(self) -> str:
        a, w = abs(self.xi), self.omega
        if abs(a - w) <= REGIME_TOL * max(1.0, w):
            return "parabolic"
        return "elliptic" if a < w else "hyperbolic"

    @property
    def big_omega(self) -> float:
        """sqrt(omega^2 - |xi|^2); only real in the elliptic regime."""
        d = self.omega**2 - abs(self.xi) ** 2
        if self.regime != "elliptic":
            raise ParameterError(f"Omega is not real in the {self.regime} regime")
        return math.sqrt(d)

    @property
    def big_omega_tilde(self) -> float:
        """sqrt(|xi|^2 - omega^2); only real in the hyperbolic regime."""
        d = abs(self.xi) ** 2 - self.omega**2
        if self.regime != "hyperbolic":
            raise ParameterError(f"Omega~ is not real in the {self.regime} regime")
        return math.sqrt(d)


class QuadraticCoefficients(ABC):
    """Base class for coefficient models ``t -> (h1, h2, v)``."""

    kind: str = ""
    autonomous: bool = False

    @abstractmethod
    def __call__(self, t: float) -> tuple[float, float, float]:
        ...

    @abstractmethod
    def params(self) -> dict[str, Any]:
        ...

    def to_config(self) -> dict[str, Any]:
        return {"kind": self.kind, "params": self.params()}


@dataclass(frozen=True)
class ConstantCoefficients(QuadraticCoefficients):
    h1: float
    h2: float
    v: float = 0.0

    kind = "constant"
    autonomous = True

    def __call__(self, t):
        return (self.h1, self.h2, self.v)

    def params(self):
        return {"h1": self.h1, "h2": self.h2, "v": self.v}


@dataclass(frozen=True)
class HarmonicOscillator(QuadraticCoefficients):
    """Oscillator ``H = (p^2 + omega^2 q^2) / 2``."""

    omega: float = 1.0

    kind = "harmonic"
    autonomous = True

    def __post_init__(self):
        if not self.omega > 0:
            raise ParameterError(f"omega must be > 0, got {self.omega}")

    def __call__(self, t):
        return (self.omega**2, 1.0, 0.0)

    def params(self):
        return {"omega": self.omega}


def free_particle() -> ConstantCoefficients:
    return ConstantCoefficients(0.0, 1.0, 0.0)


def amplifier_coefficients(params: AmplifierParams, t: float) -> tuple[float, float, float]:
    """Coefficients of the (Q, P) system driven by a classical pump at ``2 omega``."""
    w, k = params.omega, params.kappa
    br, bi = params.beta.real, params.beta.imag
    c, s = math.cos(w * t), math.sin(w * t)
    in_phase = br * c + bi * s
    quadrature = bi * c - br * s
    h1 = w * w + 2.0 * k * w * in_phase
    h2 = 1.0 - 2.0 * (k / w) * in_phase
    v = 2.0 * k * quadrature
    return (h1, h2, v)


@dataclass(frozen=True)
class AmplifierCoefficients(QuadraticCoefficients):
    amp: AmplifierParams

    kind = "amplifier"

    @property
    def autonomous(self):
        return self.amp.kappa == 0 or self.amp.beta == 0

    def __call__(self, t):
        return amplifier_coefficients(self.amp, t)

    def params(self):
        return {
            "omega": self.amp.omega,
            "kappa": self.amp.kappa,
            "beta": [self.amp.beta.real, self.amp.beta.imag],
        }


@dataclass(frozen=True, eq=False)
class TabulatedCoefficients(QuadraticCoefficients):
    """Piecewise-linear interpolation of sampled coefficients.

    Evaluation outside ``[times[0], times[-1]]`` is an error rather than an
    extrapolation.
    """

    times: tuple[float, ...]
    h1s: tuple[float, ...]
    h2s: tuple[float, ...]
    vs: tuple[float, ...]
    _arrays: tuple = field(init=False, repr=False)

    kind = "tabulated"

    def __post_init__(self):
        arrays = []
        for name in ("times", "h1s", "h2s", "vs"):
            a = np.array(getattr(self, name), dtype=float)
            a.setflags(write=False)
            object.__setattr__(self, name, tuple(a.tolist()))
            arrays.append(a)
        t = arrays[0]
        if t.ndim != 1 or len(t) < 2:
            raise ParameterError("tabulated model needs at least two samples")
        if any(len(a) != len(t) for a in arrays[1:]):
            raise ParameterError("tabulated columns must have equal length")
        if np.any(np.diff(t) <= 0):
            raise ParameterError("tabulated times must be strictly increasing")
        if not all(np.all(np.isfinite(a)) for a in arrays):
            raise ParameterError("tabulated values must be finite")
        object.__setattr__(self, "_arrays", tuple(arrays))

    @property
    def autonomous(self):
        _, h1, h2, v = self._arrays
        return bool(np.ptp(h1) == 0 and np.ptp(h2) == 0 and np.ptp(v) == 0)

    def __call__(self, t):
        ts, h1, h2, v = self._arrays
        if not ts[0] <= t <= ts[-1]:
            raise ModelEvaluationError(
                f"t = {t} outside tabulated range [{ts[0]}, {ts[-1]}]"
            )
        return (
            float(np.interp(t, ts, h1)),
            float(np.interp(t, ts, h2)),
            float(np.interp(t, ts, v)),
        )

    def params(self):
        return {
            "times": list(self.times),
            "h1": list(self.h1s),
            "h2": list(self.h2s),
            "v": list(self.vs),
        }


def evaluate(coeffs: Callable[[float], tuple], t: float) -> tuple[float, float, float]:
    """Evaluate a coefficient model at ``t``, rejecting non-finite output."""
    if not math.isfinite(t):
        raise ModelEvaluationError(f"non-finite time {t}")
    h1, h2, v = coeffs(t)
    if not (math.isfinite(h1) and math.isfinite(h2) and math.isfinite(v)):
        raise ModelEvaluationError(f"non-finite coefficients ({h1}, {h2}, {v}) at t = {t}")
    return (float(h1), float(h2), float(v))


def gw_transform(coeffs_t: tuple[float, float, float], qp) -> tuple[complex, float]:
    """Coefficients (G, W) of the Hamiltonian in the bosonic basis built on ``qp``."""
    h1, h2, v = coeffs_t
    q, p = qp.q, qp.p
    g = h1 * q * q + 2.0 * v * q * p + h2 * p * p
    w = h1 * abs(q) ** 2 + v * (q * p.conjugate() + p * q.conjugate()) + h2 * abs(p) ** 2
    return complex(g), float(w.real)


# -- registry ---------------------------------------------------------------

_REGISTRY: dict[str, Callable[[Mapping[str, Any]], QuadraticCoefficients]] = {}


def register_model(kind: str):
    def deco(factory):
        _REGISTRY[kind] = factory
        return factory

    return deco


def _complex_param(value, name) -> complex:
    if isinstance(value, (list, tuple)):
        if len(value) != 2:
            raise ParameterError(f"{name} must be [re, im]")
        return complex(float(value[0]), float(value[1]))
    if isinstance(value, str):
        return complex(value.replace(" ", ""))
    return complex(value)


@register_model("constant")
def _constant(p):
    return ConstantCoefficients(float(p["h1"]), float(p["h2"]), float(p.get("v", 0.0)))


@register_model("harmonic")
def _harmonic(p):
    return HarmonicOscillator(float(p.get("omega", 1.0)))


@register_model("free")
def _free(p):
    return free_particle()


@register_model("amplifier")
def _amplifier(p):
    omega = float(p["omega"])
    if "xi" in p:
        kappa = float(p.get("kappa", 1.0))
        amp = AmplifierParams.from_xi(omega, _complex_param(p["xi"], "xi"), kappa)
    else:
        amp = AmplifierParams(omega, float(p["kappa"]), _complex_param(p["beta"], "beta"))
    return AmplifierCoefficients(amp)


@register_model("tabulated")
def _tabulated(p):
    return TabulatedCoefficients(p["times"], p["h1"], p["h2"], p["v"])


def model_from_config(cfg: Mapping[str, Any]) -> QuadraticCoefficients:
    """Rebuild a coefficient model from ``{"kind": ..., "params": {...}}``."""
    try:
        kind = cfg["kind"]
    except (KeyError, TypeError):
        raise ParameterError("model config needs a 'kind'") from None
    if kind not in _REGISTRY:
        raise ParameterError(f"unknown model kind {kind!r}; known: {sorted(_REGISTRY)}")
    try:
        return _REGISTRY[kind](cfg.get("params", {}) or {})
    except KeyError as exc:
        raise ParameterError(f"{kind} model missing parameter {exc.args[0]!r}") from None
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ParameterError):
            raise
        raise ParameterError(f"bad {kind} parameters: {exc}") from None

"""Equations of motion in every chart, integrators and flow invariants."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Any, Callable

import numpy as np
from scipy.integrate import solve_ivp

from . import charts as ch
from . import geometry as g
from .errors import (
    GridMismatchError,
    IntegrationError,
    InvalidPointError,
    ModelEvaluationError,
    ParameterError,
    RiccatiBlowUpError,
    SingularChartError,
)
from .hamiltonian import evaluate, gw_transform

__all__ = [
    "TAU_MIN",
    "BLOWUP_THRESHOLD",
    "vector_field",
    "rhs",
    "IntegratorConfig",
    "Trajectory",
    "integrate",
    "convert_trajectory",
    "WeiNormanCoeffs",
    "wei_norman",
    "invariant_alpha",
]

#: the H2 chart refuses points closer than this to the vertex
TAU_MIN = 1e-6
#: |C1| above this counts as a finite-time blow-up of the Wei-Norman Riccati
BLOWUP_THRESHOLD = 1e8


# -- vector fields ----------------------------------------------------------


def _f_m(y, h1, h2, v):
    q, p = y
    return np.array([v * q + h2 * p, -h1 * q - v * p])


def _f_h3(y, h1, h2, v):
    x0, x1, x2, x3 = y
    s, d = (h2 + h1) / 2, (h2 - h1) / 2
    return np.array([
        -s * x1 - d * x3 - v * x2,
        s * x0 + d * x2 - v * x3,
        s * x3 + d * x1 - v * x0,
        -s * x2 - d * x0 - v * x1,
    ])


def _f_h2(y, h1, h2, v):
    tau, phi = y.real
    if tau < TAU_MIN:
        raise SingularChartError(
            f"H2 chart is singular at tau = {tau:.3e} < {TAU_MIN}; integrate in the disk chart instead"
        )
    sp, cp = math.sin(phi), math.cos(phi)
    dtau = -2 * v * sp - (h1 - h2) * cp
    dphi = -(2 * v * cp - (h1 - h2) * sp) / math.tanh(tau) - (h1 + h2)
    return np.array([dtau, dphi], dtype=complex)


def _f_disk(y, h1, h2, v):
    z = y[0]
    return np.array([0.5 * (h1 - h2 - 2j * v) * z * z - 1j * (h1 + h2) * z + 0.5 * (h2 - h1 - 2j * v)])


def _f_siegel(y, h1, h2, v):
    c = y[0]
    return np.array([-h2 * c * c - 2 * v * c - h1])


def vector_field(chart: str, coeffs, frame: g.QPPoint | None = None) -> Callable:
    """Return ``f(t, y)`` for the chart's flow; no domain validation of ``y``."""
    ch.get_chart(chart)
    if chart in ("m", "moments"):
        kernel = _f_m
    elif chart == "h3":
        kernel = _f_h3
    elif chart == "h2":
        kernel = _f_h2
    elif chart == "disk":
        kernel = _f_disk
    elif chart == "siegel":
        kernel = _f_siegel
    else:
        fr = frame or g.VACUUM

        def f(t, y):
            gg, w = gw_transform(evaluate(coeffs, t), fr)
            a = y[0]
            return np.array([-0.5j * (gg * a.conjugate() + w * a)])

        return f

    def f(t, y):
        return kernel(y, *evaluate(coeffs, t))

    return f


def _check_point(chart, point):
    if isinstance(point, g.QPPoint):
        point.validate()
    elif isinstance(point, g.H3Point):
        point.validate()
    elif isinstance(point, g.H2Point):
        point.validate()
    elif isinstance(point, g.DiskPoint) and not abs(point.zeta) < 1:
        raise InvalidPointError(f"{point} is outside the disk")
    elif isinstance(point, g.SiegelPoint) and not point.c.imag > 0:
        raise InvalidPointError(f"{point} is outside the half plane")


def rhs(chart: str, coeffs, point, t: float, frame: g.QPPoint | None = None):
    """Tangent vector of the chart's flow at ``point`` and time ``t``.

    The result is expressed in the chart's packed coordinates, e.g. ``(dtau,
    dphi)`` for H2 and ``(dQ, dP)`` for M.
    """
    _check_point(chart, point)
    if isinstance(point, g.AlphaPoint):
        frame = point.frame
    y = ch.coerce_point(chart, point)
    out = vector_field(chart, coeffs, frame)(t, y)
    return out.real if chart in ("h3", "h2", "moments") else out


# -- integration ------------------------------------------------------------

_METHODS = {"rk4": "rk4", "rk4-fixed": "rk4", "rk45": "rk45", "rk45-adaptive": "rk45"}


@dataclass(frozen=True)
class IntegratorConfig:
    """Integration settings.

    ``step`` is the fixed RK4 step; for the adaptive method it is the output
    sampling interval. ``stride`` keeps every stride-th RK4 step.
    """

    method: str = "rk4"
    step: float = 1e-3
    t0: float = 0.0
    t1: float = 10.0
    rtol: float = 1e-10
    atol: float = 1e-12
    max_step: float = math.inf
    renormalize: bool = False
    stride: int = 1

    def __post_init__(self):
        if self.method not in _METHODS:
            raise ParameterError(f"unknown method {self.method!r}; use one of {sorted(_METHODS)}")
        object.__setattr__(self, "method", _METHODS[self.method])
        if not (math.isfinite(self.t0) and math.isfinite(self.t1) and self.t1 > self.t0):
            raise ParameterError(f"need finite t1 > t0, got [{self.t0}, {self.t1}]")
        if not self.step > 0:
            raise ParameterError(f"step must be > 0, got {self.step}")
        if not (self.rtol > 0 and self.atol > 0 and self.max_step > 0):
            raise ParameterError("rtol, atol and max_step must be > 0")
        if int(self.stride) != self.stride or self.stride < 1:
            raise ParameterError(f"stride must be a positive integer, got {self.stride}")

    @property
    def n_steps(self) -> int:
        return max(1, int(math.ceil((self.t1 - self.t0) / self.step - 1e-9)))

    def grid(self) -> np.ndarray:
        return np.linspace(self.t0, self.t1, self.n_steps + 1)


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Sampled solution in one chart with per-sample diagnostics."""

    chart: str
    times: np.ndarray
    values: np.ndarray
    model: Any = None
    hbar: float = 1.0
    frame: g.QPPoint | None = None
    diagnostics: dict[str, np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        v = np.asarray(self.values, dtype=complex)
        if v.ndim == 1:
            v = v[:, None]
        if t.ndim != 1 or len(t) != len(v):
            raise ValueError("times and values must have equal length")
        if len(t) > 1 and np.any(np.diff(t) <= 0):
            raise ValueError("times must be strictly increasing")
        if v.shape[1] != ch.get_chart(self.chart).dim:
            raise ValueError(f"chart {self.chart!r} expects {ch.get_chart(self.chart).dim} components")
        t.setflags(write=False)
        v.setflags(write=False)
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "values", v)
        if not self.diagnostics:
            object.__setattr__(self, "diagnostics", compute_diagnostics(self))

    def __len__(self):
        return len(self.times)

    def point(self, k: int):
        return ch.get_chart(self.chart).unpack(self.values[k], self.frame)

    def points(self) -> list:
        return [self.point(k) for k in range(len(self))]

    def table(self) -> np.ndarray:
        """Real-valued columns ``t, <chart columns>, constraint_drift, energy, rs_residual``."""
        chart = ch.get_chart(self.chart)
        d = self.diagnostics
        return np.column_stack([
            self.times, chart.to_table(self.values),
            d["constraint_drift"], d["energy"], d["rs_residual"],
        ])

    @property
    def columns(self) -> tuple[str, ...]:
        return ("t",) + ch.get_chart(self.chart).columns + ("constraint_drift", "energy", "rs_residual")

    def max_drift(self, key: str) -> float:
        a = self.diagnostics[key]
        if np.all(np.isnan(a)):
            return float("nan")
        return float(np.nanmax(np.abs(a)))

    def energy_drift(self) -> float:
        e = self.diagnostics["energy"]
        return float(np.max(np.abs(e - e[0])))


def coefficient_table(model, times) -> np.ndarray:
    """Coefficients ``(h1, h2, v)`` sampled on ``times`` as an ``(n, 3)`` array."""
    if model is None:
        return np.full((len(times), 3), np.nan)
    return np.array([evaluate(model, float(t)) for t in times])


def compute_diagnostics(traj: Trajectory) -> dict[str, np.ndarray]:
    chart = ch.get_chart(traj.chart)
    h = coefficient_table(traj.model, traj.times)
    return {
        "constraint_drift": chart.drift(traj.values),
        "energy": chart.energy(traj.values, h, traj.hbar, traj.frame or g.VACUUM),
        "rs_residual": chart.rs_residual(traj.values, traj.hbar),
    }


def _renorm_m(y):
    s = (y[0].conjugate() * y[1]).imag
    if not s > 0:
        raise IntegrationError(f"cannot renormalize (Q, P) with Im(conj(Q) P) = {s}", None, y)
    return y / math.sqrt(s)


def _domain_ok(chart, y):
    if not np.all(np.isfinite(y)):
        return False
    if chart == "siegel":
        return y[0].imag > 0
    if chart == "disk":
        return abs(y[0]) < 1
    return True


def _rk4(f, y0, grid, chart, renormalize, stride):
    ys = [y0]
    ts = [grid[0]]
    y = y0
    for k in range(len(grid) - 1):
        t, h = grid[k], grid[k + 1] - grid[k]
        try:
            k1 = f(t, y)
            k2 = f(t + h / 2, y + h / 2 * k1)
            k3 = f(t + h / 2, y + h / 2 * k2)
            k4 = f(t + h, y + h * k3)
        except SingularChartError as exc:
            raise SingularChartError(f"{exc} (last good t = {t})") from None
        except (ModelEvaluationError, FloatingPointError, OverflowError) as exc:
            raise IntegrationError(str(exc), t, y) from None
        y_new = y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        if renormalize:
            y_new = _renorm_m(y_new)
        if not _domain_ok(chart, y_new):
            raise IntegrationError(
                f"{chart} state left its domain or became non-finite after t = {t}", t, y
            )
        y = y_new
        if (k + 1) % stride == 0 or k == len(grid) - 2:
            ys.append(y)
            ts.append(grid[k + 1])
    return np.array(ts), np.array(ys)


def _rk45(f, y0, cfg, chart):
    grid = cfg.grid()
    sol = solve_ivp(
        f, (cfg.t0, cfg.t1), y0, method="RK45", t_eval=grid,
        rtol=cfg.rtol, atol=cfg.atol, max_step=cfg.max_step,
    )
    if sol.status != 0:
        t_last = float(sol.t[-1]) if len(sol.t) else cfg.t0
        y_last = sol.y[:, -1] if sol.y.size else y0
        raise IntegrationError(f"adaptive integration failed: {sol.message}", t_last, y_last)
    ys = sol.y.T.copy()
    for k, y in enumerate(ys):
        if not _domain_ok(chart, y):
            raise IntegrationError(
                f"{chart} state left its domain near t = {sol.t[k]}",
                float(sol.t[max(k - 1, 0)]), ys[max(k - 1, 0)],
            )
    if cfg.renormalize:
        # adaptive steps are internal to solve_ivp, so only samples are rescaled
        ys = np.array([_renorm_m(y) for y in ys])
    return sol.t, ys


def integrate(chart: str, coeffs, initial, config: IntegratorConfig | None = None,
              hbar: float = 1.0, frame: g.QPPoint | None = None) -> Trajectory:
    """Integrate the chart flow from ``initial`` over ``[config.t0, config.t1]``.

    ``initial`` is a chart point (``H2Point`` or ``SqueezeCoords`` for the H2
    chart). Renormalization only applies to the M chart.
    """
    cfg = config or IntegratorConfig()
    _check_point(chart, initial)
    if isinstance(initial, g.AlphaPoint):
        frame = initial.frame
    y0 = ch.coerce_point(chart, initial)
    if chart == "h2" and y0[0].real < TAU_MIN:
        raise SingularChartError(
            f"initial tau = {y0[0].real:.3e} is within {TAU_MIN} of the H2 vertex; use the disk chart"
        )
    renorm = cfg.renormalize and chart == "m"
    if renorm:
        y0 = _renorm_m(y0)
    f = vector_field(chart, coeffs, frame)
    if cfg.method == "rk4":
        with np.errstate(over="raise", invalid="raise"):
            ts, ys = _rk4(f, y0, cfg.grid(), chart, renorm, int(cfg.stride))
    else:
        ts, ys = _rk45(f, y0, replace(cfg, renormalize=renorm), chart)
    return Trajectory(chart, ts, ys, model=coeffs, hbar=hbar, frame=frame)


def convert_trajectory(traj: Trajectory, target: str) -> Trajectory:
    """Map a trajectory pointwise into another chart and recompute diagnostics."""
    if target == traj.chart:
        return traj
    vals = ch.convert_values(traj.values, traj.chart, target, traj.frame, traj.hbar)
    if target == "h2" and len(vals):
        # keep phi continuous so the state stays a smooth curve
        vals = vals.copy()
        vals[:, 1] = np.unwrap(vals[:, 1].real)
    return Trajectory(target, traj.times, vals, model=traj.model, hbar=traj.hbar, frame=traj.frame)


# -- Wei-Norman factorization -----------------------------------------------


@dataclass(frozen=True, eq=False)
class WeiNormanCoeffs:
    times: np.ndarray
    c1: np.ndarray
    c2: np.ndarray
    c3: np.ndarray


def _wn_rhs(coeffs):
    def f(t, y):
        h1, h2, v = evaluate(coeffs, t)
        c1, c2, _ = y
        return np.array([-h2 * c1 * c1 - 2 * v * c1 - h1, -h2 * c1 - v, -np.exp(2 * c2) * h2])

    return f


def wei_norman(coeffs, grid, rtol: float = 1e-12, atol: float = 1e-12) -> WeiNormanCoeffs:
    """Integrate the Wei-Norman system from zero initial data on ``grid``.

    A finite-time singularity of ``C1`` is located by root finding on
    ``|C1| = BLOWUP_THRESHOLD`` and reported as ``RiccatiBlowUpError``.
    """
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or len(grid) < 2 or grid[0] != 0 or np.any(np.diff(grid) <= 0):
        raise ParameterError("Wei-Norman grid must be increasing and start at 0")

    def blowup(t, y):
        return abs(y[0]) - BLOWUP_THRESHOLD

    blowup.terminal = True
    sol = solve_ivp(
        _wn_rhs(coeffs), (0.0, grid[-1]), np.zeros(3, dtype=complex), method="DOP853",
        t_eval=grid, events=blowup, rtol=rtol, atol=atol,
    )
    if sol.t_events[0].size:
        ts = float(sol.t_events[0][0])
        raise RiccatiBlowUpError(
            f"C1 blows up at t = {ts:.12g}", t_singular=ts, t_last=ts, y_last=sol.y_events[0][0]
        )
    if sol.status != 0:
        t_last = float(sol.t[-1]) if len(sol.t) else 0.0
        raise IntegrationError(f"Wei-Norman integration failed: {sol.message}", t_last, None)
    return WeiNormanCoeffs(sol.t, sol.y[0], sol.y[1], sol.y[2])


# -- invariant --------------------------------------------------------------


def invariant_alpha(moments: Trajectory, qp: Trajectory, hbar: float | None = None) -> np.ndarray:
    """Invariant ``alpha_Inv(t)`` from paired first-moment and (Q, P) trajectories."""
    if moments.chart != "moments" or qp.chart != "m":
        raise ParameterError("invariant_alpha needs a 'moments' and an 'm' trajectory")
    if len(moments) != len(qp) or not np.array_equal(moments.times, qp.times):
        raise GridMismatchError("trajectories are sampled on different time grids")
    hb = qp.hbar if hbar is None else hbar
    mq, mp = moments.values[:, 0].real, moments.values[:, 1].real
    q, p = qp.values[:, 0], qp.values[:, 1]
    return 1j / np.sqrt(2 * hb) * (p * mq - q * mp)

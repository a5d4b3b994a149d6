"""Array-level description of every chart: state vectors, table columns,
constraint drift, energies and conversions.

A chart state is a 1-D complex vector (real charts keep a zero imaginary
part). Trajectories store an ``(n, dim)`` array of such vectors; the functions
here act on whole trajectories at once.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import geometry as g
from .errors import InvalidPointError, UnsupportedConversionError

__all__ = ["Chart", "CHARTS", "get_chart", "conversion_path", "convert_values", "coerce_point"]


@dataclass(frozen=True)
class Chart:
    tag: str
    dim: int
    columns: tuple[str, ...]
    point_type: type
    pack: Callable
    unpack: Callable
    to_table: Callable
    from_table: Callable
    drift: Callable
    energy: Callable
    rs_residual: Callable
    second_moments: bool = True


def _c(a):
    return np.asarray(a, dtype=complex)


def _re(a):
    return np.real(a)


# -- per-chart kernels ------------------------------------------------------
# energy kernels take values (n, dim), coefficient columns h (n, 3), hbar, frame


def _m_drift(v):
    q, p = v[:, 0], v[:, 1]
    return np.abs(np.conj(q) * p - q * np.conj(p) - 2j)


def _m_energy(v, h, hbar, frame):
    q, p = v[:, 0], v[:, 1]
    return (
        h[:, 0] * np.abs(q) ** 2
        + 2 * h[:, 2] * np.real(np.conj(q) * p)
        + h[:, 1] * np.abs(p) ** 2
    )


def _m_rs(v, hbar):
    q, p = v[:, 0], v[:, 1]
    sq = hbar / 2 * np.abs(q) ** 2
    sp = hbar / 2 * np.abs(p) ** 2
    sqp = hbar / 2 * np.real(p * np.conj(q))
    return sq * sp - sqp**2 - hbar * hbar / 4


def _y_energy(y1, y2, y3, h):
    h1, h2, v = h[:, 0], h[:, 1], h[:, 2]
    return (h2 + h1) * y1 + 2 * v * y2 + (h2 - h1) * y3


def _y_rs(y1, y2, y3, hbar):
    return hbar * hbar / 4 * (y1 * y1 - y2 * y2 - y3 * y3 - 1)


def _h3_y(v):
    return g._chi(*(_re(v[:, k]) for k in range(4)))


def _h3_drift(v):
    x = _re(v)
    return np.abs(x[:, 0] ** 2 + x[:, 1] ** 2 - x[:, 2] ** 2 - x[:, 3] ** 2 - 1)


def _h2_y(v):
    return g._squeeze_to_y(_re(v[:, 0]), _re(v[:, 1]))


def _h2_drift(v):
    y1, y2, y3 = _h2_y(v)
    return np.abs(y1 * y1 - y2 * y2 - y3 * y3 - 1)


def _h2_pack(pt):
    if isinstance(pt, g.H2Point):
        pt = g.squeeze_coordinates(pt)
    return _c([pt.tau, pt.phi])


def _h2_table(v):
    tau, phi = _re(v[:, 0]), _re(v[:, 1])
    y1, y2, y3 = g._squeeze_to_y(tau, phi)
    return np.column_stack([y1, y2, y3, tau, np.mod(phi, 2 * np.pi)])


def _h2_from_table(a):
    return _c(a[:, 3:5])


def _outside(x):
    return np.maximum(x, 0.0)


def _disk_y(v):
    return g._disk_inv(v[:, 0])


def _siegel_y(v):
    return g._siegel_to_y(v[:, 0])


def _frame_gw(h, frame):
    q, p = frame.q, frame.p
    gg = h[:, 0] * q * q + 2 * h[:, 2] * q * p + h[:, 1] * p * p
    w = h[:, 0] * abs(q) ** 2 + 2 * h[:, 2] * (q.conjugate() * p).real + h[:, 1] * abs(p) ** 2
    return gg, w


def _alpha_energy(v, h, hbar, frame):
    a = v[:, 0]
    gg, w = _frame_gw(h, frame)
    return hbar / 4 * np.real(np.conj(gg) * a * a + 2 * w * np.abs(a) ** 2 + gg * np.conj(a) ** 2)


def _moments_energy(v, h, hbar, frame):
    q, p = _re(v[:, 0]), _re(v[:, 1])
    return 0.5 * (h[:, 0] * q * q + 2 * h[:, 2] * q * p + h[:, 1] * p * p)


def _zeros(v, *_):
    return np.zeros(len(v))


def _nans(v, *_):
    return np.full(len(v), np.nan)


def _complex_table(v):
    return np.column_stack([x for k in range(v.shape[1]) for x in (v[:, k].real, v[:, k].imag)])


def _complex_from_table(a):
    return a[:, 0::2] + 1j * a[:, 1::2]


def _real_table(v):
    return np.real(v).copy()


CHARTS: dict[str, Chart] = {}


def _register(chart):
    CHARTS[chart.tag] = chart


_register(Chart(
    "m", 2, ("q_re", "q_im", "p_re", "p_im"), g.QPPoint,
    pack=lambda pt: _c([pt.q, pt.p]),
    unpack=lambda y, frame=None: g.QPPoint(y[0], y[1], check=False),
    to_table=_complex_table, from_table=_complex_from_table,
    drift=_m_drift, energy=_m_energy, rs_residual=_m_rs,
))
_register(Chart(
    "h3", 4, ("x0", "x1", "x2", "x3"), g.H3Point,
    pack=lambda pt: _c(pt.as_array()),
    unpack=lambda y, frame=None: g.H3Point(*np.real(y), check=False),
    to_table=_real_table, from_table=_c,
    drift=_h3_drift,
    energy=lambda v, h, hbar, frame: _y_energy(*_h3_y(v), h),
    rs_residual=lambda v, hbar: _y_rs(*_h3_y(v), hbar),
))
_register(Chart(
    "h2", 2, ("y1", "y2", "y3", "tau", "phi"), g.H2Point,
    pack=_h2_pack,
    unpack=lambda y, frame=None: g.h2_from_squeeze(g.SqueezeCoords(y[0].real, y[1].real % (2 * np.pi))),
    to_table=_h2_table, from_table=_h2_from_table,
    drift=_h2_drift,
    energy=lambda v, h, hbar, frame: _y_energy(*_h2_y(v), h),
    rs_residual=lambda v, hbar: _y_rs(*_h2_y(v), hbar),
))
_register(Chart(
    "disk", 1, ("zeta_re", "zeta_im"), g.DiskPoint,
    pack=lambda pt: _c([pt.zeta]),
    unpack=lambda y, frame=None: g.DiskPoint(y[0], check=False),
    to_table=_complex_table, from_table=_complex_from_table,
    drift=lambda v: _outside(np.abs(v[:, 0]) - 1 + 0.0),
    energy=lambda v, h, hbar, frame: _y_energy(*_disk_y(v), h),
    rs_residual=lambda v, hbar: _y_rs(*_disk_y(v), hbar),
))
_register(Chart(
    "siegel", 1, ("c_re", "c_im"), g.SiegelPoint,
    pack=lambda pt: _c([pt.c]),
    unpack=lambda y, frame=None: g.SiegelPoint(y[0], check=False),
    to_table=_complex_table, from_table=_complex_from_table,
    drift=lambda v: _outside(-v[:, 0].imag),
    energy=lambda v, h, hbar, frame: _y_energy(*_siegel_y(v), h),
    rs_residual=lambda v, hbar: _y_rs(*_siegel_y(v), hbar),
))
_register(Chart(
    "moments", 2, ("mq", "mp"), g.FirstMoments,
    pack=lambda pt: _c([pt.mq, pt.mp]),
    unpack=lambda y, frame=None: g.FirstMoments(y[0].real, y[1].real),
    to_table=_real_table, from_table=_c,
    drift=_zeros, energy=_moments_energy, rs_residual=_nans, second_moments=False,
))
_register(Chart(
    "alpha", 1, ("alpha_re", "alpha_im"), g.AlphaPoint,
    pack=lambda pt: _c([pt.alpha]),
    unpack=lambda y, frame=None: g.AlphaPoint(y[0], frame or g.VACUUM),
    to_table=_complex_table, from_table=_complex_from_table,
    drift=_zeros, energy=_alpha_energy, rs_residual=_nans, second_moments=False,
))


def get_chart(tag: str) -> Chart:
    try:
        return CHARTS[tag]
    except KeyError:
        raise InvalidPointError(f"unknown chart {tag!r}; known: {sorted(CHARTS)}") from None


def coerce_point(tag: str, point):
    """Accept either a chart point or its packed vector."""
    chart = get_chart(tag)
    if isinstance(point, chart.point_type) or (tag == "h2" and isinstance(point, g.SqueezeCoords)):
        return chart.pack(point)
    raise InvalidPointError(f"expected {chart.point_type.__name__} for chart {tag!r}, got {type(point).__name__}")


# -- conversions ------------------------------------------------------------


def _alpha_from_mom(v, frame, hbar):
    return (1j / np.sqrt(2 * hbar) * (frame.p * v[:, 0].real - frame.q * v[:, 1].real))[:, None]


def _mom_from_alpha(v, frame, hbar):
    z = v[:, 0] * np.sqrt(2 * hbar) / 1j
    q, p = frame.q, frame.p
    a = np.array([[p.real, -q.real], [p.imag, -q.imag]])
    sol = np.linalg.solve(a, np.vstack([z.real, z.imag]))
    return _c(sol.T)


def _y_to_state(y1, y2, y3):
    tau, phi = g._y_to_squeeze(y1, y2, y3)
    return _c(np.column_stack([tau, phi]))


_EDGES: dict[tuple[str, str], Callable] = {
    ("m", "h3"): lambda v, f, hb: _c(np.column_stack(g._nu(v[:, 0], v[:, 1]))),
    ("m", "siegel"): lambda v, f, hb: (v[:, 1] / v[:, 0])[:, None],
    ("h3", "h2"): lambda v, f, hb: _y_to_state(*_h3_y(v)),
    ("h2", "disk"): lambda v, f, hb: g._disk(*_h2_y(v))[:, None],
    ("disk", "siegel"): lambda v, f, hb: g._u(v[:, 0])[:, None],
    ("siegel", "disk"): lambda v, f, hb: g._u_inv(v[:, 0])[:, None],
    ("disk", "h2"): lambda v, f, hb: _y_to_state(*_disk_y(v)),
    ("moments", "alpha"): _alpha_from_mom,
    ("alpha", "moments"): _mom_from_alpha,
}


def conversion_path(source: str, target: str) -> list[str]:
    """Shortest chain of charts from ``source`` to ``target`` along the map diagram."""
    get_chart(source), get_chart(target)
    prev = {source: None}
    queue = deque([source])
    while queue:
        node = queue.popleft()
        if node == target:
            break
        for a, b in _EDGES:
            if a == node and b not in prev:
                prev[b] = node
                queue.append(b)
    if target not in prev:
        raise UnsupportedConversionError(f"no map from chart {source!r} to {target!r}")
    path = [target]
    while prev[path[-1]] is not None:
        path.append(prev[path[-1]])
    return path[::-1]


def convert_values(values, source: str, target: str, frame=None, hbar: float = 1.0):
    path = conversion_path(source, target)
    v = _c(values)
    for a, b in zip(path, path[1:]):
        v = _EDGES[(a, b)](v, frame or g.VACUUM, hbar)
    return v

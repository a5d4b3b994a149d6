"""Run configuration: TOML (or JSON) files with sections ``hamiltonian``,
``initial``, ``integrator`` and ``outputs``, plus optional ``[[sweep]]``
tables that override parts of the base configuration.

Example::

    hbar = 1.0

    [hamiltonian]
    kind = "amplifier"
    params = { omega = 0.75, xi = 0.5 }

    [initial]
    chart = "m"
    q = 1.0
    p = [0.0, 1.0]
    moments = { mq = 1.0, mp = 0.0 }

    [integrator]
    method = "rk4"
    step = 1e-3
    t1 = 10.0

    [outputs]
    charts = ["m", "h2", "disk", "siegel", "alpha"]
    formats = ["csv"]
    plot = true
"""

from __future__ import annotations

import copy
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from . import charts as ch
from . import geometry as g
from .dynamics import IntegratorConfig
from .errors import ConfigError, GausspackError, UnsupportedConversionError
from .hamiltonian import AmplifierCoefficients, HarmonicOscillator, model_from_config

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

__all__ = ["RunConfig", "load_config", "parse_config", "parse_complex"]

_SECOND = ("m", "h3", "h2", "disk", "siegel")
_FIRST = ("moments", "alpha")
_FORMATS = ("csv", "json")


def parse_complex(value, name: str = "value") -> complex:
    """Complex number from a scalar, ``[re, im]`` pair or string like ``"1+2j"``."""
    try:
        if isinstance(value, (list, tuple)):
            if len(value) != 2:
                raise ValueError
            return complex(float(value[0]), float(value[1]))
        if isinstance(value, str):
            return complex(value.replace(" ", "").replace("i", "j"))
        if isinstance(value, bool):
            raise ValueError
        return complex(value)
    except (TypeError, ValueError):
        raise ConfigError(f"expected a complex number, got {value!r}", field=name) from None


def _real(value, name):
    try:
        if isinstance(value, bool):
            raise ValueError
        x = float(value)
    except (TypeError, ValueError):
        raise ConfigError(f"expected a real number, got {value!r}", field=name) from None
    if not math.isfinite(x):
        raise ConfigError(f"must be finite, got {value!r}", field=name)
    return x


@dataclass(frozen=True)
class RunConfig:
    name: str
    model: Any
    chart: str
    point: Any
    moments: g.FirstMoments | None
    integrator: IntegratorConfig
    charts: tuple[str, ...]
    formats: tuple[str, ...]
    plot: bool
    hbar: float = 1.0
    frame: g.QPPoint | None = None
    raw: dict = field(default_factory=dict, repr=False, compare=False)


def _section(cfg, name, required=True):
    sec = cfg.get(name)
    if sec is None:
        if required:
            raise ConfigError(f"missing [{name}] section", field=name)
        return {}
    if not isinstance(sec, dict):
        raise ConfigError("must be a table", field=name)
    return sec


def _parse_frame(sec, model, hbar):
    fr = sec.get("frame")
    if fr is None:
        if isinstance(model, AmplifierCoefficients):
            return g.quadrature_frame(model.amp.omega)
        if isinstance(model, HarmonicOscillator):
            return g.quadrature_frame(model.omega)
        return g.VACUUM
    if isinstance(fr, dict) and "omega" in fr:
        return g.quadrature_frame(_real(fr["omega"], "initial.frame.omega"))
    if isinstance(fr, dict) and {"q", "p"} <= set(fr):
        try:
            return g.QPPoint(parse_complex(fr["q"], "initial.frame.q"), parse_complex(fr["p"], "initial.frame.p"))
        except GausspackError as exc:
            raise ConfigError(str(exc), field="initial.frame") from None
    raise ConfigError("frame must be {omega = ...} or {q = ..., p = ...}", field="initial.frame")


def _parse_moments(sec):
    mom = sec.get("moments")
    if mom is None:
        if "mq" in sec or "mp" in sec:
            mom = {"mq": sec.get("mq", 0.0), "mp": sec.get("mp", 0.0)}
        else:
            return None
    if not isinstance(mom, dict):
        raise ConfigError("must be a table {mq, mp}", field="initial.moments")
    return g.FirstMoments(_real(mom.get("mq", 0.0), "initial.moments.mq"),
                          _real(mom.get("mp", 0.0), "initial.moments.mp"))


_POINT_KEYS = {
    "m": ("q", "p"),
    "h3": ("x",),
    "h2": ("y",),
    "disk": ("zeta",),
    "siegel": ("c",),
    "alpha": ("alpha",),
}


def _parse_point(sec, chart, hbar, frame, moments):
    has_cov = "covariance" in sec
    keys = _POINT_KEYS.get(chart, ())
    has_point = any(k in sec for k in keys) or (chart == "h2" and "tau" in sec)
    if chart == "moments":
        if moments is None:
            raise ConfigError("chart 'moments' needs mq/mp", field="initial")
        return moments
    if has_cov and has_point:
        raise ConfigError("give either a chart point or a covariance triple, not both", field="initial")
    try:
        if has_cov:
            cov = sec["covariance"]
            if not isinstance(cov, dict):
                raise ConfigError("must be a table {sq, sp, sqp}", field="initial.covariance")
            triple = g.CovarianceTriple(*(_real(cov.get(k), f"initial.covariance.{k}") for k in ("sq", "sp", "sqp")))
            if chart == "siegel":
                return g.siegel_from_covariance(triple, hbar)
            qp = g.qp_from_covariance(triple, hbar)
            return _from_m(qp, chart)
        if not has_point:
            raise ConfigError(f"chart {chart!r} needs {' and '.join(keys)} (or a covariance triple)", field="initial")
        if chart == "m":
            return g.QPPoint(parse_complex(sec["q"], "initial.q"), parse_complex(sec["p"], "initial.p"))
        if chart == "h3":
            return g.H3Point(*(_real(x, "initial.x") for x in sec["x"]))
        if chart == "h2":
            if "tau" in sec:
                return g.SqueezeCoords(_real(sec["tau"], "initial.tau"), _real(sec.get("phi", 0.0), "initial.phi"))
            return g.H2Point(*(_real(x, "initial.y") for x in sec["y"]))
        if chart == "disk":
            return g.DiskPoint(parse_complex(sec["zeta"], "initial.zeta"))
        if chart == "siegel":
            return g.SiegelPoint(parse_complex(sec["c"], "initial.c"))
        if chart == "alpha":
            return g.AlphaPoint(parse_complex(sec["alpha"], "initial.alpha"), frame)
    except ConfigError:
        raise
    except (GausspackError, TypeError, ValueError) as exc:
        raise ConfigError(str(exc), field="initial") from None
    raise ConfigError(f"unknown chart {chart!r}", field="initial.chart")


def _from_m(qp, chart):
    if chart == "m":
        return qp
    h3 = g.nu_map(qp)
    if chart == "h3":
        return h3
    h2 = g.chi_map(h3)
    if chart == "h2":
        return h2
    if chart == "disk":
        return g.disk_projection(h2)
    raise ConfigError(f"covariance input cannot seed chart {chart!r}", field="initial.chart")


def _parse_integrator(sec):
    known = {"method", "step", "t0", "t1", "rtol", "atol", "max_step", "renormalize", "stride"}
    unknown = set(sec) - known
    if unknown:
        raise ConfigError(f"unknown keys {sorted(unknown)}", field="integrator")
    kw = {}
    for k in ("step", "t0", "t1", "rtol", "atol", "max_step"):
        if k in sec:
            kw[k] = _real(sec[k], f"integrator.{k}")
    if "method" in sec:
        kw["method"] = str(sec["method"])
    if "renormalize" in sec:
        kw["renormalize"] = bool(sec["renormalize"])
    if "stride" in sec:
        kw["stride"] = sec["stride"]
    try:
        return IntegratorConfig(**kw)
    except GausspackError as exc:
        raise ConfigError(str(exc), field="integrator") from None


def _parse_outputs(sec, chart, moments):
    charts = sec.get("charts", [chart])
    if isinstance(charts, str):
        charts = [charts]
    formats = sec.get("formats", ["csv"])
    if isinstance(formats, str):
        formats = [formats]
    for f in formats:
        if f not in _FORMATS:
            raise ConfigError(f"unknown format {f!r}; use csv or json", field="outputs.formats")
    for c in charts:
        if c not in ch.CHARTS:
            raise ConfigError(f"unknown chart {c!r}", field="outputs.charts")
        if c in _FIRST:
            if chart not in _FIRST and moments is None:
                raise ConfigError(f"chart {c!r} needs first moments in [initial]", field="outputs.charts")
            continue
        if chart in _FIRST:
            raise ConfigError(f"chart {c!r} is not reachable from first moments", field="outputs.charts")
        try:
            ch.conversion_path(chart, c)
        except UnsupportedConversionError as exc:
            raise ConfigError(str(exc), field="outputs.charts") from None
    return tuple(dict.fromkeys(charts)), tuple(dict.fromkeys(formats)), bool(sec.get("plot", False))


def parse_config(cfg: dict, name: str = "run", hbar: float | None = None) -> RunConfig:
    """Validate a configuration mapping into a :class:`RunConfig`."""
    if not isinstance(cfg, dict):
        raise ConfigError("configuration must be a table", field="<root>")
    hb = _real(cfg.get("hbar", 1.0), "hbar") if hbar is None else _real(hbar, "hbar")
    if hb <= 0:
        raise ConfigError("must be > 0", field="hbar")
    try:
        model = model_from_config(_section(cfg, "hamiltonian"))
    except ConfigError:
        raise
    except GausspackError as exc:
        raise ConfigError(str(exc), field="hamiltonian") from None
    init = _section(cfg, "initial")
    chart = init.get("chart", "m")
    if chart not in ch.CHARTS:
        raise ConfigError(f"unknown chart {chart!r}", field="initial.chart")
    frame = _parse_frame(init, model, hb)
    moments = _parse_moments(init)
    point = _parse_point(init, chart, hb, frame, moments)
    integ = _parse_integrator(_section(cfg, "integrator", required=False))
    charts, formats, plot = _parse_outputs(_section(cfg, "outputs", required=False), chart, moments)
    return RunConfig(str(cfg.get("name", name)), model, chart, point, moments, integ,
                     charts, formats, plot, hb, frame, cfg)


def _merge(base, over):
    out = copy.deepcopy(base)
    for k, v in over.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = _merge(out[k], v)
        else:
            out[k] = copy.deepcopy(v)
    return out


def read_config_file(path) -> dict:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}", field="--config") from None
    try:
        if path.suffix == ".json":
            return json.loads(text)
        return tomllib.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}", field="--config") from None
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}", field="--config") from None


def load_config(path, hbar: float | None = None) -> list[RunConfig]:
    """Read a config file into one RunConfig per sweep entry (or a single one)."""
    cfg = read_config_file(path)
    stem = Path(path).stem
    sweep = cfg.pop("sweep", None) if isinstance(cfg, dict) else None
    if not sweep:
        return [parse_config(cfg, stem, hbar)]
    if not isinstance(sweep, list) or not all(isinstance(s, dict) for s in sweep):
        raise ConfigError("must be an array of tables", field="sweep")
    runs = []
    for k, over in enumerate(sweep):
        merged = _merge(cfg, over)
        run_name = str(over.get("name", f"{stem}-{k:03d}"))
        try:
            runs.append(parse_config(merged, run_name, hbar))
        except ConfigError as exc:
            raise ConfigError(str(exc), field=f"sweep[{k}]") from None
    names = [r.name for r in runs]
    if len(set(names)) != len(names):
        raise ConfigError("sweep entries need distinct names", field="sweep")
    return runs

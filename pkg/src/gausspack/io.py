"""Reading and writing trajectories, chart points, packets and curve reports.

CSV files start with two comment lines: a schema tag and a JSON metadata
record (chart, hbar, model, frame). Numbers are written with 17 significant
digits so a write/read cycle is lossless.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from . import charts as ch
from . import geometry as g
from .dynamics import Trajectory
from .errors import ConfigError, InvalidPointError
from .hamiltonian import QuadraticCoefficients, model_from_config

__all__ = [
    "SCHEMA",
    "SCHEMA_VERSION",
    "write_trajectory",
    "read_trajectory",
    "write_trajectory_csv",
    "write_trajectory_json",
    "point_to_record",
    "point_from_record",
    "write_packet_csv",
    "write_packet_json",
    "write_json",
    "check_trajectory",
]

SCHEMA = "gausspack-trajectory"
SCHEMA_VERSION = 1
FLOAT_FMT = "%.17g"
#: read-back tolerance on equality constraints, relative to the point's size;
#: loose enough to admit integrator drift, tight enough to catch corrupt rows
READ_TOL = 1e-6


def _finite_or_none(x):
    x = float(x)
    return x if math.isfinite(x) else None


def _clean(obj):
    """Replace non-finite floats with ``None`` so the output is strict JSON."""
    if isinstance(obj, float):
        return _finite_or_none(obj)
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, np.generic):
        return _clean(obj.item())
    return obj


def write_json(path, obj) -> Path:
    path = Path(path)
    path.write_text(json.dumps(_clean(obj), indent=2, sort_keys=True, allow_nan=False) + "\n")
    return path


def _frame_record(frame):
    if frame is None:
        return None
    return [frame.q.real, frame.q.imag, frame.p.real, frame.p.imag]


def _frame_from_record(rec):
    if rec is None:
        return None
    return g.QPPoint(complex(rec[0], rec[1]), complex(rec[2], rec[3]))


def _model_record(model):
    if isinstance(model, QuadraticCoefficients):
        return model.to_config()
    return None


def _meta(traj: Trajectory) -> dict:
    return {
        "chart": traj.chart,
        "hbar": traj.hbar,
        "model": _model_record(traj.model),
        "frame": _frame_record(traj.frame),
    }


def write_trajectory_csv(traj: Trajectory, path) -> Path:
    path = Path(path)
    header = "\n".join([
        f"{SCHEMA} v{SCHEMA_VERSION}",
        "meta " + json.dumps(_clean(_meta(traj)), sort_keys=True),
        ",".join(traj.columns),
    ])
    np.savetxt(path, traj.table(), fmt=FLOAT_FMT, delimiter=",", header=header, comments="# ")
    return path


def write_trajectory_json(traj: Trajectory, path) -> Path:
    rec = {"format": SCHEMA, "version": SCHEMA_VERSION, **_meta(traj),
           "columns": list(traj.columns), "data": traj.table()}
    return write_json(path, rec)


def write_trajectory(traj: Trajectory, path, fmt: str | None = None) -> Path:
    path = Path(path)
    fmt = fmt or path.suffix.lstrip(".")
    if fmt == "csv":
        return write_trajectory_csv(traj, path)
    if fmt == "json":
        return write_trajectory_json(traj, path)
    raise ConfigError(f"unknown trajectory format {fmt!r}; use csv or json", field="format")


def _parse_csv(path):
    lines = Path(path).read_text().splitlines()
    if len(lines) < 3 or not lines[0].startswith(f"# {SCHEMA} v"):
        raise InvalidPointError(f"{path} is not a {SCHEMA} CSV file")
    version = int(lines[0].rsplit("v", 1)[1])
    if version != SCHEMA_VERSION:
        raise InvalidPointError(f"{path}: unsupported schema version {version}")
    if not lines[1].startswith("# meta "):
        raise InvalidPointError(f"{path}: missing metadata line")
    meta = json.loads(lines[1][len("# meta "):])
    columns = lines[2].lstrip("# ").split(",")
    data = np.loadtxt(path, delimiter=",", comments="#", ndmin=2)
    return meta, columns, data


def _parse_json(path):
    rec = json.loads(Path(path).read_text())
    if rec.get("format") != SCHEMA or rec.get("version") != SCHEMA_VERSION:
        raise InvalidPointError(f"{path} is not a {SCHEMA} v{SCHEMA_VERSION} JSON file")
    data = np.array([[np.nan if x is None else x for x in row] for row in rec["data"]], dtype=float)
    return rec, rec["columns"], data.reshape(-1, len(rec["columns"]))


def read_trajectory(path, check: bool = True) -> Trajectory:
    """Load a trajectory file; diagnostics are recomputed from the samples.

    With ``check`` every sample must satisfy its chart constraint.
    """
    path = Path(path)
    meta, columns, data = _parse_json(path) if path.suffix == ".json" else _parse_csv(path)
    chart = ch.get_chart(meta["chart"])
    expected = ["t", *chart.columns, "constraint_drift", "energy", "rs_residual"]
    if list(columns) != expected:
        raise InvalidPointError(f"{path}: columns {columns} do not match chart {chart.tag!r}")
    model = model_from_config(meta["model"]) if meta.get("model") else None
    values = chart.from_table(data[:, 1:1 + len(chart.columns)])
    traj = Trajectory(chart.tag, data[:, 0], values, model=model,
                      hbar=float(meta.get("hbar", 1.0)), frame=_frame_from_record(meta.get("frame")))
    if check:
        check_trajectory(traj)
    return traj


def check_trajectory(traj: Trajectory, tol: float = READ_TOL) -> float:
    """Raise if any sample violates its chart constraint; return the worst drift."""
    chart = traj.chart
    v = traj.values
    drift = traj.diagnostics["constraint_drift"]
    if chart in ("siegel", "disk"):
        bad = v[:, 0].imag <= 0 if chart == "siegel" else np.abs(v[:, 0]) >= 1
        if np.any(bad):
            k = int(np.argmax(bad))
            raise InvalidPointError(f"sample {k} (t = {traj.times[k]}) leaves the {chart} domain")
        return 0.0
    if chart == "m":
        scale = np.maximum(1.0, np.abs(v[:, 0]) * np.abs(v[:, 1]))
    elif chart == "h3":
        scale = np.maximum(1.0, np.sum(np.abs(v) ** 2, axis=1))
    elif chart == "h2":
        scale = np.maximum(1.0, np.cosh(v[:, 0].real) ** 2)
    else:
        scale = np.ones(len(v))
    rel = drift / scale
    if np.any(rel > tol):
        k = int(np.argmax(rel))
        raise InvalidPointError(
            f"sample {k} (t = {traj.times[k]}) violates the {chart} constraint by {drift[k]:.3e}"
        )
    return float(np.max(drift)) if len(drift) else 0.0


# -- chart points -----------------------------------------------------------


def point_to_record(point) -> dict:
    """Flat JSON record with a chart tag, e.g. ``{"chart": "siegel", "re": .5, "im": .5}``."""
    if isinstance(point, g.SiegelPoint):
        return {"chart": "siegel", "re": point.c.real, "im": point.c.imag}
    if isinstance(point, g.DiskPoint):
        return {"chart": "disk", "re": point.zeta.real, "im": point.zeta.imag}
    if isinstance(point, g.QPPoint):
        return {"chart": "m", "q_re": point.q.real, "q_im": point.q.imag,
                "p_re": point.p.real, "p_im": point.p.imag}
    if isinstance(point, g.H3Point):
        return {"chart": "h3", "x0": point.x0, "x1": point.x1, "x2": point.x2, "x3": point.x3}
    if isinstance(point, g.H2Point):
        return {"chart": "h2", "y1": point.y1, "y2": point.y2, "y3": point.y3}
    if isinstance(point, g.FirstMoments):
        return {"chart": "moments", "mq": point.mq, "mp": point.mp}
    if isinstance(point, g.AlphaPoint):
        return {"chart": "alpha", "re": point.alpha.real, "im": point.alpha.imag,
                "frame": _frame_record(point.frame)}
    raise TypeError(f"cannot serialize {type(point).__name__}")


def point_from_record(rec: dict):
    tag = rec.get("chart")
    try:
        if tag == "siegel":
            return g.SiegelPoint(complex(rec["re"], rec["im"]))
        if tag == "disk":
            return g.DiskPoint(complex(rec["re"], rec["im"]))
        if tag == "m":
            return g.QPPoint(complex(rec["q_re"], rec["q_im"]), complex(rec["p_re"], rec["p_im"]))
        if tag == "h3":
            return g.H3Point(rec["x0"], rec["x1"], rec["x2"], rec["x3"])
        if tag == "h2":
            return g.H2Point(rec["y1"], rec["y2"], rec["y3"])
        if tag == "moments":
            return g.FirstMoments(rec["mq"], rec["mp"])
        if tag == "alpha":
            frame = _frame_from_record(rec.get("frame")) or g.VACUUM
            return g.AlphaPoint(complex(rec["re"], rec["im"]), frame)
    except KeyError as exc:
        raise InvalidPointError(f"{tag} record missing field {exc.args[0]!r}") from None
    raise InvalidPointError(f"unknown chart tag {tag!r}")


# -- packets ----------------------------------------------------------------


def write_packet_csv(path, q, psi) -> Path:
    path = Path(path)
    psi = np.asarray(psi, dtype=complex)
    table = np.column_stack([q, psi.real, psi.imag, np.abs(psi) ** 2])
    np.savetxt(path, table, fmt=FLOAT_FMT, delimiter=",", header="q,re_psi,im_psi,abs2", comments="")
    return path


def write_packet_json(path, q, psi) -> Path:
    psi = np.asarray(psi, dtype=complex)
    return write_json(path, {"q": np.asarray(q), "re_psi": psi.real, "im_psi": psi.imag,
                             "abs2": np.abs(psi) ** 2})

"""Command-line front end.

Subcommands::

    gausspack run --config run.toml [--out-dir out] [--chart TAG ...] [--format csv|json] [--plot] [--hbar H]
    gausspack convert TRAJ --chart TAG [--out-dir DIR] [--format csv|json] [--plot]
    gausspack plot TRAJ [--style alpha|disk|siegel|h2] [--out-dir DIR]
    gausspack check TRAJ
    gausspack amplifier classify --omega W --xi XI [--kappa K] [--alpha0 A] [--out-dir DIR]

Exit codes: 0 success, 2 configuration or usage error, 3 numerical failure.
``GAUSSPACK_THREADS`` caps the number of sweep entries run concurrently.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from . import geometry as g
from .amplifier import classify_curve
from .config import RunConfig, load_config, parse_complex
from .dynamics import Trajectory, convert_trajectory, integrate, invariant_alpha
from .errors import (
    ConfigError,
    CoverageError,
    GausspackError,
    IntegrationError,
    InvalidPointError,
    ModelEvaluationError,
    NotApplicableError,
    ParameterError,
    SingularChartError,
    UnsupportedConversionError,
)
from .hamiltonian import AmplifierParams
from .io import check_trajectory, read_trajectory, write_json, write_trajectory
from .plotting import default_style, plot_trajectory

__all__ = ["main", "run", "RunReport"]

log = logging.getLogger("gausspack")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3
_NUMERIC = (IntegrationError, SingularChartError, ModelEvaluationError, CoverageError)
_SECOND = ("m", "h3", "h2", "disk", "siegel")


@dataclass
class RunReport:
    name: str
    outputs: list[str] = field(default_factory=list)
    max_constraint_drift: float = 0.0
    max_rs_residual: float | None = None
    energy_drift: float | None = None
    alpha_invariant_drift: float | None = None
    wall_time: float = 0.0

    def to_dict(self) -> dict:
        # wall time stays out of the file so reruns give identical bytes
        return {
            "name": self.name,
            "outputs": self.outputs,
            "max_constraint_drift": self.max_constraint_drift,
            "max_rs_residual": self.max_rs_residual,
            "energy_drift": self.energy_drift,
            "alpha_invariant_drift": self.alpha_invariant_drift,
        }


def _emit(traj: Trajectory, stem: str, out_dir: Path, formats, plot: bool, report: RunReport):
    for fmt in formats:
        path = write_trajectory(traj, out_dir / f"{stem}.{fmt}", fmt)
        report.outputs.append(path.name)
    style = default_style(traj.chart)
    if plot and style:
        path = plot_trajectory(traj, out_dir / f"{stem}.svg", style)
        report.outputs.append(path.name)


def run(rc: RunConfig, out_dir: Path, formats=None, charts=None, plot=None) -> RunReport:
    """Integrate one configuration and write every requested chart."""
    t_start = time.perf_counter()
    out_dir.mkdir(parents=True, exist_ok=True)
    formats = tuple(formats or rc.formats)
    charts = tuple(charts or rc.charts)
    plot = rc.plot if plot is None else plot
    report = RunReport(rc.name)

    second = first = None
    if rc.chart in _SECOND:
        second = integrate(rc.chart, rc.model, rc.point, rc.integrator, hbar=rc.hbar)
    else:
        first = integrate(rc.chart, rc.model, rc.point, rc.integrator, hbar=rc.hbar, frame=rc.frame)
    if first is None and rc.moments is not None and any(c in ("moments", "alpha") for c in charts):
        first = integrate("moments", rc.model, rc.moments, rc.integrator, hbar=rc.hbar, frame=rc.frame)

    drifts, rs = [], []
    for chart in charts:
        src = second if chart in _SECOND else first
        traj = convert_trajectory(src, chart)
        check_trajectory(traj)
        if chart in _SECOND:
            drifts.append(traj.max_drift("constraint_drift"))
            rs.append(traj.max_drift("rs_residual"))
        _emit(traj, f"{rc.name}_{chart}", out_dir, formats, plot, report)

    source = second if second is not None else first
    report.max_constraint_drift = max(drifts, default=0.0)
    report.max_rs_residual = max(rs) if rs else None
    if getattr(rc.model, "autonomous", False):
        report.energy_drift = source.energy_drift()
    if second is not None and rc.chart == "m" and rc.moments is not None:
        mom = first if first is not None and first.chart == "moments" else integrate(
            "moments", rc.model, rc.moments, rc.integrator, hbar=rc.hbar)
        inv = invariant_alpha(mom, second)
        report.alpha_invariant_drift = float(np.max(np.abs(inv - inv[0])))
    report.wall_time = time.perf_counter() - t_start
    return report


def _threads(n_jobs: int) -> int:
    raw = os.environ.get("GAUSSPACK_THREADS")
    if raw is None:
        cap = os.cpu_count() or 1
    else:
        try:
            cap = int(raw)
        except ValueError:
            raise ConfigError(f"expected a positive integer, got {raw!r}", field="GAUSSPACK_THREADS") from None
        if cap < 1:
            raise ConfigError(f"expected a positive integer, got {raw!r}", field="GAUSSPACK_THREADS")
    return max(1, min(cap, n_jobs))


def _cmd_run(args) -> int:
    runs = load_config(args.config, hbar=args.hbar)
    out_dir = Path(args.out_dir)
    formats = [args.format] if args.format else None
    plot = True if args.plot else None
    with ThreadPoolExecutor(max_workers=_threads(len(runs))) as pool:
        futures = [pool.submit(run, rc, out_dir, formats, args.chart, plot) for rc in runs]
        reports = [f.result() for f in futures]
    write_json(out_dir / "report.json", {"runs": [r.to_dict() for r in reports]})
    for r in reports:
        print(f"{r.name}: {len(r.outputs)} files, max drift {r.max_constraint_drift:.3e}, "
              f"{r.wall_time:.2f} s")
    return EXIT_OK


def _out_path(src: Path, out_dir, suffix: str) -> Path:
    base = Path(out_dir) if out_dir else src.parent
    base.mkdir(parents=True, exist_ok=True)
    return base / f"{src.stem}{suffix}"


def _cmd_convert(args) -> int:
    src = Path(args.trajectory)
    traj = read_trajectory(src)
    out = convert_trajectory(traj, args.chart)
    check_trajectory(out)
    fmt = args.format or (src.suffix.lstrip(".") or "csv")
    path = write_trajectory(out, _out_path(src, args.out_dir, f"-{args.chart}.{fmt}"), fmt)
    print(path)
    if args.plot and default_style(out.chart):
        print(plot_trajectory(out, path.with_suffix(".svg")))
    return EXIT_OK


def _cmd_plot(args) -> int:
    src = Path(args.trajectory)
    traj = read_trajectory(src)
    style = args.style or default_style(traj.chart)
    if style is None:
        raise ConfigError(f"chart {traj.chart!r} has no default style; pass --style", field="--style")
    print(plot_trajectory(traj, _out_path(src, args.out_dir, ".svg"), style))
    return EXIT_OK


def _cmd_check(args) -> int:
    try:
        traj = read_trajectory(Path(args.trajectory), check=False)
    except InvalidPointError as exc:
        raise ConfigError(str(exc), field="trajectory") from None
    summary = {
        "chart": traj.chart,
        "samples": len(traj),
        "max_constraint_drift": traj.max_drift("constraint_drift"),
        "max_rs_residual": traj.max_drift("rs_residual"),
        "energy_drift": traj.energy_drift() if getattr(traj.model, "autonomous", False) else None,
    }
    try:
        check_trajectory(traj)
        summary["ok"] = True
    except InvalidPointError as exc:
        summary["ok"] = False
        summary["error"] = str(exc)
    print(json.dumps({k: (None if isinstance(v, float) and not np.isfinite(v) else v)
                      for k, v in summary.items()}, indent=2, sort_keys=True))
    return EXIT_OK if summary["ok"] else EXIT_NUMERIC


def _cmd_classify(args) -> int:
    if args.config:
        rc = load_config(args.config)[0]
        amp = getattr(rc.model, "amp", None)
        if amp is None:
            raise ConfigError("classification needs an amplifier model", field="hamiltonian.kind")
        if not isinstance(rc.point, g.AlphaPoint):
            raise ConfigError("classification needs an alpha initial point", field="initial.chart")
        alpha0 = rc.point.alpha
    else:
        if args.omega is None or args.xi is None:
            raise ConfigError("pass --omega and --xi, or --config", field="amplifier classify")
        try:
            amp = AmplifierParams.from_xi(args.omega, parse_complex(args.xi, "--xi"), args.kappa)
        except ParameterError as exc:
            raise ConfigError(str(exc), field="--omega/--xi") from None
        alpha0 = parse_complex(args.alpha0, "--alpha0")
    try:
        curve = classify_curve(amp, alpha0)
    except NotApplicableError as exc:
        raise ConfigError(str(exc), field="regime") from None
    rec = curve.to_dict()
    print(json.dumps(rec, sort_keys=True))
    if args.out_dir:
        Path(args.out_dir).mkdir(parents=True, exist_ok=True)
        write_json(Path(args.out_dir) / "curve.json", rec)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="gausspack", description="Gaussian packet dynamics on the coherent-state charts.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="store_true", help="log warnings and progress")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="integrate a configuration and write trajectories")
    r.add_argument("--config", required=True)
    r.add_argument("--out-dir", default="out")
    r.add_argument("--chart", action="append", help="chart to emit (repeatable); overrides outputs.charts")
    r.add_argument("--format", choices=("csv", "json"))
    r.add_argument("--plot", action="store_true", help="also render SVG plots")
    r.add_argument("--hbar", type=float)
    r.set_defaults(func=_cmd_run)

    c = sub.add_parser("convert", help="map a trajectory file into another chart")
    c.add_argument("trajectory")
    c.add_argument("--chart", required=True)
    c.add_argument("--out-dir")
    c.add_argument("--format", choices=("csv", "json"))
    c.add_argument("--plot", action="store_true")
    c.set_defaults(func=_cmd_convert)

    pl = sub.add_parser("plot", help="render a trajectory file to SVG")
    pl.add_argument("trajectory")
    pl.add_argument("--style")
    pl.add_argument("--out-dir")
    pl.set_defaults(func=_cmd_plot)

    ck = sub.add_parser("check", help="recompute diagnostics of a trajectory file")
    ck.add_argument("trajectory")
    ck.set_defaults(func=_cmd_check)

    a = sub.add_parser("amplifier", help="parametric amplifier tools")
    asub = a.add_subparsers(dest="amp_command", required=True)
    cl = asub.add_parser("classify", help="classify the first-moment curve")
    cl.add_argument("--config")
    cl.add_argument("--omega", type=float)
    cl.add_argument("--xi")
    cl.add_argument("--kappa", type=float, default=1.0)
    cl.add_argument("--alpha0", default="1+1j")
    cl.add_argument("--out-dir")
    cl.set_defaults(func=_cmd_classify)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except _NUMERIC as exc:
        t_last = getattr(exc, "t_last", None)
        where = f" (last good t = {t_last})" if t_last is not None else ""
        print(f"gausspack: numerical failure: {exc}{where}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ConfigError, ParameterError, InvalidPointError, UnsupportedConversionError) as exc:
        print(f"gausspack: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except GausspackError as exc:
        print(f"gausspack: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"gausspack: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())

"""Command-line front end: declarative configs in, data files and plots out.

Subcommands
    simulate   run one ensemble, write distribution.csv and report.txt
    sweep-tau  rerun the ensemble for each time step in tau_list and
               compare fringe metrics across the sweep
    trace      record individual trajectories, write CSV polylines and
               an SVG picture of the bundle
    analyze    locate significant extrema in an emitted distribution.csv

Every data file is a pure function of (config, seed); reruns are
byte-identical regardless of worker count.  Exit codes: 0 success,
2 configuration or input error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import ExtremaReport, find_extrema, oscillation_index, total_variation
from .config import (
    CONFIG_KEYS,
    ExperimentConfig,
    build_emission,
    build_field,
    build_geometry,
    build_histogram_spec,
    build_step,
    config_echo,
    parse_config,
    with_overrides,
)
from .ensemble import Histogram, HistogramSpec, emission_angles, run_ensemble
from .errors import ConfigurationError, SlitSimError
from .scattering import run_discrete_trajectory
from .svg import render_trajectories

_DIST_HEADER = "bin_center,count,frequency"


def _frequencies_or_zeros(h: Histogram) -> np.ndarray:
    if h.n_detected > 0:
        return h.counts / float(h.n_detected)
    return np.zeros_like(h.counts, dtype=float)


def _write_text(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="\n") as fh:
        fh.write(text)


def _distribution_csv(h: Histogram) -> str:
    freqs = _frequencies_or_zeros(h)
    lines = [_DIST_HEADER]
    for center, count, freq in zip(h.spec.bin_centers(), h.counts, freqs):
        lines.append(f"{center:.17g},{int(count)},{freq:.17g}")
    return "\n".join(lines) + "\n"


def _tally_lines(h: Histogram) -> list[str]:
    return [
        f"n_emitted = {h.n_emitted}",
        f"n_detected = {h.n_detected}",
        f"n_blocked = {h.n_blocked}",
        f"n_escaped = {h.n_escaped}",
        f"n_steplimit = {h.n_steplimit}",
        f"underflow = {h.underflow}",
        f"overflow = {h.overflow}",
    ]


def _report_text(cfg: ExperimentConfig, body: list[str], wall: float) -> str:
    lines = [f"slitsim {__version__} run report", ""]
    lines += body
    lines += ["", f"seed = {cfg.seed}", f"wall_time_s = {wall:.3f}", "",
              "parameters:"]
    lines += ["  " + ln for ln in config_echo(cfg).splitlines()]
    return "\n".join(lines) + "\n"


def cmd_simulate(cfg: ExperimentConfig) -> Path:
    """Run one ensemble; returns the output directory."""
    out = Path(cfg.output_dir)
    t0 = time.perf_counter()
    hist = run_ensemble(build_emission(cfg), build_geometry(cfg),
                        build_field(cfg), build_step(cfg),
                        build_histogram_spec(cfg), workers=cfg.workers)
    wall = time.perf_counter() - t0
    _write_text(out / "distribution.csv", _distribution_csv(hist))
    _write_text(out / "report.txt", _report_text(cfg, _tally_lines(hist), wall))
    return out


def cmd_sweep_tau(cfg: ExperimentConfig) -> Path:
    """Run the ensemble once per tau in tau_list and compare the profiles."""
    taus = cfg.tau_list
    if not taus:
        raise ConfigurationError("tau_list must be non-empty")
    if any(b > a for a, b in zip(taus, taus[1:])):
        raise ConfigurationError("tau_list must be descending")
    out = Path(cfg.output_dir)
    t0 = time.perf_counter()
    results: list[tuple[float, Histogram, np.ndarray]] = []
    for tau in taus:
        hist = run_ensemble(build_emission(cfg), build_geometry(cfg),
                            build_field(cfg), build_step(cfg, tau=tau),
                            build_histogram_spec(cfg), workers=cfg.workers)
        _write_text(out / f"distribution_tau{tau:g}.csv", _distribution_csv(hist))
        results.append((tau, hist, _frequencies_or_zeros(hist)))

    spec = build_histogram_spec(cfg)
    sweep_lines = ["tau,n_maxima,oscillation_index"]
    body = []
    for tau, hist, freqs in results:
        report = find_extrema(freqs, spec, hist.n_detected,
                              window=cfg.window, k_sigma=cfg.k_sigma)
        osc = oscillation_index(freqs, window=cfg.window)
        sweep_lines.append(f"{tau!r},{len(report.maxima)},{osc:.17g}")
        body.append(f"tau={tau:g}: detected={hist.n_detected} "
                    f"maxima={len(report.maxima)} oscillation_index={osc:.6g}")
    _write_text(out / "sweep_report.csv", "\n".join(sweep_lines) + "\n")

    tv_lines = ["tau_a,tau_b,total_variation"]
    for i, (ta, _, fa) in enumerate(results):
        for tb, _, fb in results[i + 1:]:
            tv = total_variation(fa, fb)
            tv_lines.append(f"{ta!r},{tb!r},{tv:.17g}")
            body.append(f"tv(tau={ta:g}, tau={tb:g}) = {tv:.6g}")
    _write_text(out / "tv_report.csv", "\n".join(tv_lines) + "\n")

    wall = time.perf_counter() - t0
    _write_text(out / "report.txt", _report_text(cfg, body, wall))
    return out


def cmd_trace(cfg: ExperimentConfig, n_trajectories: int, record: bool = True) -> Path:
    """Record a swept-angle bundle of trajectories as CSV and SVG."""
    if n_trajectories < 1:
        raise ConfigurationError("trace needs at least one trajectory")
    if not record:
        raise ConfigurationError("trace requires recording")
    out = Path(cfg.output_dir)
    t0 = time.perf_counter()
    emission = build_emission(cfg, n=n_trajectories, mode="sweep")
    geom = build_geometry(cfg)
    fld = build_field(cfg)
    step = build_step(cfg)
    angles = emission_angles(emission, 0, n_trajectories)
    records = [run_discrete_trajectory(a, cfg.v0, geom, fld, step, record=True)
               for a in angles]

    lines = ["traj_id,t,x,y"]
    for tid, rec in enumerate(records):
        for s in rec.path:
            lines.append(f"{tid},{s.t:.17g},{s.pos[0]:.17g},{s.pos[1]:.17g}")
    _write_text(out / "trajectories.csv", "\n".join(lines) + "\n")
    _write_text(out / "trajectories.svg", render_trajectories(records, geom))

    wall = time.perf_counter() - t0
    outcomes = [type(rec.outcome).__name__ for rec in records]
    body = [f"trajectories = {n_trajectories}"]
    for name in ("Blocked", "Detected", "Escaped", "StepLimit"):
        body.append(f"{name.lower()} = {outcomes.count(name)}")
    _write_text(out / "report.txt", _report_text(cfg, body, wall))
    return out


def _read_distribution(path: Path) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    text = Path(path).read_text()
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0].strip() != _DIST_HEADER:
        raise ConfigurationError(f"{path}: expected header {_DIST_HEADER!r}")
    if len(lines) < 3:
        raise ConfigurationError(f"{path}: not enough data rows")
    centers, counts, freqs = [], [], []
    for lineno, ln in enumerate(lines[1:], start=2):
        parts = ln.split(",")
        if len(parts) != 3:
            raise ConfigurationError(f"{path}:{lineno}: expected 3 columns")
        try:
            centers.append(float(parts[0]))
            counts.append(int(parts[1]))
            freqs.append(float(parts[2]))
        except ValueError as exc:
            raise ConfigurationError(f"{path}:{lineno}: {exc}")
    return np.array(centers), np.array(counts, dtype=np.int64), np.array(freqs)


def analyze_distribution(path: Path, window: int, k_sigma: float) -> tuple[ExtremaReport, int]:
    """Extrema report for an emitted distribution.csv."""
    centers, counts, freqs = _read_distribution(path)
    widths = np.diff(centers)
    width = float(widths[0])
    if width <= 0 or not np.allclose(widths, width, rtol=1e-9, atol=0):
        raise ConfigurationError(f"{path}: bin centers are not evenly spaced")
    total_count = int(counts.sum())
    total_freq = float(freqs.sum())
    if total_freq > 0:
        n_detected = int(round(total_count / total_freq))
    elif total_count == 0:
        n_detected = 0
    else:
        raise ConfigurationError(f"{path}: nonzero counts but zero frequencies")
    y_min = float(centers[0]) - 0.5 * width
    # n - 0.5 widths keeps ceil() at exactly n bins despite rounding.
    spec = HistogramSpec(bin_width=width, y_min=y_min,
                         y_max=y_min + width * (len(centers) - 0.5))
    values = counts / n_detected if n_detected > 0 else np.zeros(len(counts))
    report = find_extrema(values, spec, n_detected, window=window, k_sigma=k_sigma)
    return report, n_detected


def cmd_analyze(csv_path: Path, window: int, k_sigma: float,
                out_dir: Path | None = None) -> ExtremaReport:
    """Print the extrema table and write extrema.csv next to the input."""
    report, n_detected = analyze_distribution(csv_path, window, k_sigma)
    out = out_dir if out_dir is not None else Path(csv_path).parent
    lines = ["kind,bin_center,height,prominence"]
    print(f"{csv_path}: n_detected={n_detected} window={report.smoothing_window} "
          f"k_sigma={k_sigma:g}")
    print(f"{'kind':8} {'bin_center':>12} {'height':>12} {'prominence':>12}")
    for kind, entries in (("maximum", report.maxima), ("minimum", report.minima)):
        for center, height, prom in entries:
            print(f"{kind:8} {center:12.4f} {height:12.6g} {prom:12.6g}")
            lines.append(f"{kind},{center:.17g},{height:.17g},{prom:.17g}")
    _write_text(out / "extrema.csv", "\n".join(lines) + "\n")
    return report


def _load_config(args: argparse.Namespace) -> ExperimentConfig:
    cfg = parse_config(args.config) if args.config else ExperimentConfig()
    return with_overrides(
        cfg,
        seed=getattr(args, "seed", None),
        workers=getattr(args, "workers", None),
        output_dir=getattr(args, "out", None),
        n=getattr(args, "n", None),
        tau=getattr(args, "tau", None),
    )


def _add_run_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", metavar="PATH", help="config file (key = value lines)")
    p.add_argument("--seed", type=int, help="override: base RNG seed")
    p.add_argument("--workers", type=int, help="override: worker processes")
    p.add_argument("--out", metavar="DIR", help="override: output directory")
    p.add_argument("--n", type=int, help="override: trajectory count")
    p.add_argument("--tau", type=float, help="override: time step")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="slitsim",
        description=__doc__,
        epilog="config keys: " + ", ".join(CONFIG_KEYS),
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run one ensemble")
    _add_run_flags(p)

    p = sub.add_parser("sweep-tau", help="rerun across tau_list and compare")
    _add_run_flags(p)

    p = sub.add_parser("trace", help="record and draw trajectories")
    _add_run_flags(p)
    p.add_argument("--no-record", action="store_true",
                   help="disable path recording (always an error; trace needs paths)")

    p = sub.add_parser("analyze", help="find extrema in a distribution.csv")
    p.add_argument("csv", metavar="CSV", help="distribution file to analyze")
    p.add_argument("--window", type=int, default=5, help="smoothing window (odd)")
    p.add_argument("--k-sigma", type=float, default=5.0,
                   help="prominence threshold in Poisson sigmas")
    p.add_argument("--out", metavar="DIR", help="where to write extrema.csv")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "simulate":
            cmd_simulate(_load_config(args))
        elif args.command == "sweep-tau":
            cmd_sweep_tau(_load_config(args))
        elif args.command == "trace":
            cfg = _load_config(args)
            cmd_trace(cfg, n_trajectories=args.n if args.n else 250,
                      record=not args.no_record)
        elif args.command == "analyze":
            cmd_analyze(Path(args.csv), args.window, args.k_sigma,
                        Path(args.out) if args.out else None)
    except (SlitSimError, ValueError) as exc:
        print(f"slitsim: error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"slitsim: i/o error: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())

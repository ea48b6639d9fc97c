"""Command line entry point: ``chirpdnls <command> [--config FILE] [--key value ...]``.

Exit status: 0 on success, 2 for configuration errors, 3 for numerical failures.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from dataclasses import fields
from pathlib import Path

from .config import ConfigError, ExperimentConfig, load_config
from .experiments import (
    read_sweep_csv,
    run_boundaries,
    run_rays,
    run_single,
    run_sweep,
    run_threshold,
    write_separatrix_csv,
    write_sweep_csv,
)
from .integrate import StiffnessError
from .modes import shifted_indices, write_histogram_csv, write_mode_history_csv
from .regimes import BracketError, write_boundary_csv
from .rays import write_ensemble_csv
from .sites import write_trajectory_csv


EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3
COMMANDS = {
    "single": "integrate one parameter point",
    "sweep": "efficiency over a (p1, p2, p3) grid",
    "threshold": "bisect p1 for an efficiency level",
    "boundaries": "regime boundary lines of the (p1, p2) map",
    "rays": "capture statistics of a ray ensemble",
}


def _json_default(obj):
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    return str(obj)


def _finite(x):
    x = float(x)
    return x if math.isfinite(x) else None


def _dump_json(data, path: Path) -> Path:
    path.write_text(json.dumps(data, indent=2, sort_keys=True, default=_json_default) + "\n")
    return path


def _cmd_single(cfg: ExperimentConfig, out: Path) -> None:
    res = run_single(cfg)
    summary = res.summary()
    if cfg.format == "csv":
        write_mode_history_csv(res.trajectory, out / "mode_history.csv")
        write_histogram_csv(res.final, res.ladder, out / "histogram.csv")
        if res.site_trajectory is not None:
            write_trajectory_csv(res.site_trajectory, out / "trajectory.csv")
    else:
        labels = res.ladder.labels
        n = res.ladder.n_sites or labels.size
        summary["history"] = {
            "tau": res.trajectory.tau.tolist(),
            "labels": labels.tolist(),
            "populations": res.trajectory.populations().tolist(),
        }
        summary["histogram"] = {
            "mode_index_shifted": shifted_indices(labels, n).tolist(),
            "population": res.final.populations().tolist(),
        }
    _dump_json(summary, out / "summary.json")
    print(f"efficiency={res.efficiency:.6f} regime={res.regime} tau_final={res.tau_final:.6g} "
          f"norm_drift={res.norm_drift:.2e}")


def _cmd_sweep(cfg: ExperimentConfig, out: Path) -> None:
    if not cfg.axes():
        raise ConfigError("sweep needs at least one of sweep_p1, sweep_p2, sweep_p3")
    csv_path = out / "sweep.csv"
    previous = read_sweep_csv(csv_path) if cfg.resume and csv_path.exists() else None
    rows = run_sweep(cfg, previous)
    # the CSV doubles as the resume checkpoint, so it is written for either format
    write_sweep_csv(rows, csv_path)
    if cfg.format == "json":
        _dump_json([{k: (_finite(v) if isinstance(v, float) else v)
                     for k, v in r.as_dict().items()} for r in rows], out / "sweep.json")
    failed = sum(1 for r in rows if r.error)
    print(f"{len(rows)} points, {failed} failed")


def _cmd_threshold(cfg: ExperimentConfig, out: Path) -> None:
    res = run_threshold(cfg)
    data = {"p1_threshold": res.p1_threshold, "target": cfg.threshold_target,
            "evaluations": [{"p1": x, "efficiency": f} for x, f in res.evaluations],
            "seed": cfg.seed}
    _dump_json(data, out / "threshold.json")
    print(f"p1_threshold={res.p1_threshold:.6f}")


def _cmd_boundaries(cfg: ExperimentConfig, out: Path) -> None:
    curves = run_boundaries(cfg)
    if cfg.format == "csv":
        for kind, pts in curves.items():
            write_boundary_csv(kind, pts, out / f"boundary_{kind}.csv")
        write_separatrix_csv(curves["separatrix"], out / "separatrix_boundary.csv")
    else:
        _dump_json({k: [{"p1": a, "p2_boundary": _finite(b)} for a, b in v]
                    for k, v in curves.items()}, out / "boundaries.json")
    print(", ".join(f"{k}: {len(v)} points" for k, v in curves.items()))


def _cmd_rays(cfg: ExperimentConfig, out: Path) -> None:
    res = run_rays(cfg)
    if cfg.format == "csv":
        write_ensemble_csv(res, out / "rays.csv")
    summary = {"capture_fraction": res.fraction, "ray_count": int(res.captured.size),
               "tau_final": float(res.trajectory.tau[-1]), "seed": cfg.seed,
               "params": {"p1": cfg.p1, "p2": cfg.p2, "p3": cfg.p3, "n_sites": cfg.n_sites}}
    if cfg.format == "json":
        summary["captured"] = res.captured.astype(int).tolist()
    _dump_json(summary, out / "rays_summary.json")
    frac = "n/a" if res.fraction is None else f"{res.fraction:.4f}"
    print(f"capture_fraction={frac}")


HANDLERS = {
    "single": _cmd_single,
    "sweep": _cmd_sweep,
    "threshold": _cmd_threshold,
    "boundaries": _cmd_boundaries,
    "rays": _cmd_rays,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="YAML file of config keys")
    common.add_argument("-v", "--verbose", action="store_true")
    keys = common.add_argument_group("config keys (override the file)")
    for f in fields(ExperimentConfig):
        if str(f.type).startswith("bool"):
            keys.add_argument(f"--{f.name}", nargs="?", const="true", default=None,
                              metavar="BOOL")
        else:
            keys.add_argument(f"--{f.name}", default=None, metavar=f.name.upper())
    parser = argparse.ArgumentParser(prog="chirpdnls",
                                     description="Chirped-drive lattice experiments.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, text in COMMANDS.items():
        sub.add_parser(name, parents=[common], help=text, description=text)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    names = {f.name for f in fields(ExperimentConfig)}
    overrides = {k: v for k, v in vars(args).items() if k in names and v is not None}
    try:
        cfg = load_config(args.config, overrides)
        out = Path(cfg.out)
        out.mkdir(parents=True, exist_ok=True)
        HANDLERS[args.command](cfg, out)
    except (ConfigError, BracketError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (StiffnessError, FloatingPointError, ArithmeticError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

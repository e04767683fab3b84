"""``interp-lab <experiment> --config FILE [--seed N] [--out DIR] [--strict]``."""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
import time
import traceback
from pathlib import Path

import numpy as np

from .config import EXPERIMENTS, ExperimentConfig, load_config
from .experiments import ExperimentResult, _plain, run_experiment


def _cell(v) -> str:
    """Fixed formatting: 17 significant digits for floats, ``re+imj`` for complex."""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return "nan" if math.isnan(v) else format(float(v), ".17g")
    if isinstance(v, (complex, np.complexfloating)):
        return f"{format(v.real, '.17g')}{format(v.imag, '+.17g')}j"
    if v is None:
        return ""
    return str(v)


def write_csv(path: Path, result: ExperimentResult, digest: str) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([*result.columns, "config_hash"])
        for row in result.rows:
            w.writerow([*(_cell(row.get(c)) for c in result.columns), digest])


def _json_default(v):
    if isinstance(v, np.ndarray):
        return _plain(v.tolist())
    if isinstance(v, (np.generic, complex)):
        return _plain(v.item() if isinstance(v, np.generic) else v)
    return str(v)


def _dump(path: Path, data) -> None:
    path.write_text(json.dumps(_plain(data), indent=2, sort_keys=True, default=_json_default) + "\n")


def run(cfg: ExperimentConfig, out_dir: Path, strict: bool = False) -> int:
    """Run one experiment and write ``results.csv``, ``report.json`` and ``config-echo.json``."""
    out_dir.mkdir(parents=True, exist_ok=True)
    digest = cfg.digest()
    _dump(out_dir / "config-echo.json", {**cfg.model_dump(), "config_hash": digest})
    t0 = time.perf_counter()
    result = run_experiment(cfg)
    write_csv(out_dir / "results.csv", result, digest)
    report = {
        "experiment": cfg.experiment,
        "config_hash": digest,
        "seed": cfg.seed,
        "passed": result.passed,
        "checks": result.checks,
        "summary": result.summary,
        "rows": len(result.rows),
        "wall_time": time.perf_counter() - t0,
    }
    _dump(out_dir / "report.json", report)
    for name, c in result.checks.items():
        print(f"{'PASS' if c['passed'] else 'FAIL'} {cfg.experiment}.{name} value={c['value']} "
              f"threshold={c['threshold']}")
    return 1 if strict and not result.passed else 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="interp-lab", description="Complex interpolation experiments.")
    ap.add_argument("experiment", choices=EXPERIMENTS)
    ap.add_argument("--config", required=True, type=Path, help="JSON experiment configuration")
    ap.add_argument("--seed", type=int, default=None, help="override the configured seed")
    ap.add_argument("--out", type=Path, default=None, help="output directory")
    ap.add_argument("--strict", action="store_true", help="exit nonzero on any failed invariant")
    return ap


def _error(kind: str, err: BaseException, out: Path | None) -> dict:
    payload = {"error": kind, "message": str(err), "type": type(err).__name__}
    if out is not None:
        try:
            out.mkdir(parents=True, exist_ok=True)
            _dump(out / "error.json", {**payload, "traceback": traceback.format_exc()})
        except OSError:
            pass
    print(json.dumps(payload), file=sys.stderr)
    return payload


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config, seed=args.seed,
                          output_dir=str(args.out) if args.out is not None else None)
    except Exception as err:  # schema, JSON and file errors alike
        _error("config", err, args.out)
        return 2
    if cfg.experiment != args.experiment:
        _error("config", ValueError(f"config is for {cfg.experiment!r}, not {args.experiment!r}"), args.out)
        return 2
    out = Path(cfg.output_dir or f"runs/{cfg.experiment}-{cfg.digest()}")
    try:
        return run(cfg, out, args.strict)
    except Exception as err:
        _error("runtime", err, out)
        return 3


if __name__ == "__main__":
    sys.exit(main())

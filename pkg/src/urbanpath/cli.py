"""Command line interface.

    urbanpath validate [--config PATH]
    urbanpath run      [--config PATH] [--scenario SPEC] [--seed N] [--out DIR]
    urbanpath matrix   [--config PATH] [--seed N] [--out DIR] [--jobs N]
    urbanpath premium  PATHWAYS.csv [PATHWAYS.csv ...] --out DIR

Exit codes: 0 success, 2 invalid config or data, 3 runtime failure.
"""

from __future__ import annotations

import argparse
import csv
import logging
import sys
import time
from dataclasses import replace
from pathlib import Path
from typing import Sequence

from . import __version__
from .config import ConfigError, RunConfig, load_config, load_inputs, parse_scenario
from .domain import ScenarioSpec
from .io import PATHWAY_HEADER, PREMIUM_HEADER, DataError, write_rows
from .outputs import PREMIUM_FILE, premium_rows, write_outputs
from .pathways import PathwayPoint
from .runner import RunError, matrix_size, run_matrix

EXIT_OK, EXIT_INVALID, EXIT_RUNTIME = 0, 2, 3

log = logging.getLogger("urbanpath")


def _config(args) -> RunConfig:
    cfg = load_config(args.config) if args.config else RunConfig()
    if getattr(args, "seed", None) is not None:
        cfg = replace(cfg, seed=args.seed)
    if getattr(args, "scenario", None):
        cfg = replace(cfg, scenario={**cfg.scenario, **parse_scenario(args.scenario)})
    return cfg


def cmd_validate(args) -> int:
    cfg = _config(args)
    inputs = load_inputs(cfg)
    hoods = sorted({p.neighborhood for p in inputs.parcels})
    print(f"config ok (digest {cfg.digest()[:12]})")
    print(f"{len(inputs.parcels)} parcels in {len(hoods)} neighborhood(s): {', '.join(hoods)}")
    print(f"{len(inputs.catalog)} archetypes, {len(inputs.rules)} assignment rules")
    print(f"matrix: {matrix_size(cfg.matrix)} runs")
    return EXIT_OK


def _execute(cfg: RunConfig, axes, out: str, jobs: int) -> int:
    inputs = load_inputs(cfg)
    t0 = time.perf_counter()
    result = run_matrix(inputs, axes, cfg.seed, jobs=jobs)
    files = write_outputs(result.results, out, cfg.digest(), cfg.seed, result.failures)
    elapsed = time.perf_counter() - t0
    log.info("%d run(s) written to %s in %.1f s", len(result.results), out, elapsed)
    for key, msg in result.failures.items():
        log.error("run %s failed: %s", "|".join(key), msg)
    if result.failures:
        return EXIT_RUNTIME
    print(f"{len(files) - 1} run(s) -> {out} ({elapsed:.1f} s)")
    return EXIT_OK


def cmd_run(args) -> int:
    cfg = _config(args)
    spec: ScenarioSpec = cfg.spec()
    axes = {"climate": [spec.climate.value], "grid": [spec.grid.value],
            "development": [spec.development.value], "adoption": [spec.adoption.value]}
    return _execute(cfg, axes, args.out or cfg.resolve(cfg.output_dir), jobs=1)


def cmd_matrix(args) -> int:
    cfg = _config(args)
    return _execute(cfg, cfg.matrix, args.out or cfg.resolve(cfg.output_dir), args.jobs)


def read_pathways(paths: Sequence[str | Path]) -> dict[tuple, list[PathwayPoint]]:
    """Pathway CSV rows grouped by (climate, grid, development, adoption)."""
    runs: dict[tuple, list[PathwayPoint]] = {}
    for path in paths:
        with Path(path).open(newline="") as fh:
            reader = csv.DictReader(fh)
            if tuple(reader.fieldnames or ()) != PATHWAY_HEADER:
                raise DataError(f"{path}: not a pathways CSV (header mismatch)")
            for row_no, row in enumerate(reader, start=2):
                try:
                    key = (row["climate"], row["grid"], row["development"], row["adoption"])
                    spec = ScenarioSpec.make(*key)
                    runs.setdefault(key, []).append(PathwayPoint(
                        spec, row["neighborhood"], int(row["decade"]),
                        float(row["total_kwh"]), float(row["total_tco2e"]),
                        int(row["units"]), float(row["floor_area_m2"])))
                except ValueError as exc:
                    raise DataError(f"{path}: row {row_no}: {exc}") from None
    return runs


def cmd_premium(args) -> int:
    rows = premium_rows(read_pathways(args.pathways))
    if not rows:
        log.error("no (climate, grid, adoption) setting has both low- and high-density runs")
        return EXIT_INVALID
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_rows(out / PREMIUM_FILE, PREMIUM_HEADER, rows)
    print(f"{len(rows)} premium row(s) -> {out / PREMIUM_FILE}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="urbanpath", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=f"urbanpath {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, seed=True):
        p.add_argument("--config", help="YAML run configuration")
        if seed:
            p.add_argument("--seed", type=int, help="override the configured seed")

    p = sub.add_parser("validate", help="check config and input data")
    common(p, seed=False)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("run", help="run a single scenario")
    common(p)
    p.add_argument("--scenario", help="e.g. climate=A1B,grid=moderate,dev=low,adopt=neutral")
    p.add_argument("--out", help="output directory")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("matrix", help="run every combination of the configured axes")
    common(p)
    p.add_argument("--out", help="output directory")
    p.add_argument("--jobs", type=int, default=1, help="parallel worker processes")
    p.set_defaults(func=cmd_matrix)

    p = sub.add_parser("premium", help="Premium for Sprawl from pathway CSVs")
    p.add_argument("pathways", nargs="+", help="pathways.csv file(s)")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_premium)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s", stream=sys.stderr)
    if getattr(args, "jobs", 1) < 1:
        log.error("--jobs must be at least 1")
        return EXIT_INVALID
    try:
        return args.func(args)
    except (ConfigError, DataError) as exc:
        log.error("%s", exc)
        return EXIT_INVALID
    except (RunError, OSError) as exc:
        log.error("%s", exc)
        return EXIT_RUNTIME


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())

"""Result files: pathways, per-parcel, premium and adoption CSVs plus a manifest.

Everything written here is a pure function of the results and the config,
so identical runs give byte-identical files.  Wall-clock time is reported
by the CLI on stderr instead of being stored.
"""

from __future__ import annotations

from pathlib import Path
from typing import Iterable, Mapping

import numpy as np

from . import __version__
from .adoption.policy import TECHS
from .domain import DECADES
from .io import (
    ADOPTION_HEADER,
    PARCEL_OUT_HEADER,
    PATHWAY_HEADER,
    PREMIUM_HEADER,
    fmt,
    write_json,
    write_rows,
)
from .pathways import ALL_NEIGHBORHOODS, PathwayPoint, premium_table

PATHWAYS_FILE = "pathways.csv"
PREMIUM_FILE = "premium.csv"
ADOPTION_FILE = "adoption.csv"
MANIFEST_FILE = "manifest.json"
PARCEL_DIR = "parcels"


def run_label(key: tuple[str, str, str, str]) -> str:
    return "_".join(key)


def _hood_order(name: str) -> tuple[int, str]:
    return (name == ALL_NEIGHBORHOODS, name)


def pathway_rows(key, points: Iterable[PathwayPoint]):
    clim, grid, dev, adopt = key
    for p in sorted(points, key=lambda p: (_hood_order(p.neighborhood), p.decade)):
        yield (p.neighborhood, clim, grid, dev, adopt, p.decade, p.total_demand,
               p.total_emissions, p.units, p.floor_area, p.per_unit, p.per_m2)


def _fmt_column(values: np.ndarray) -> list[str]:
    return [fmt(float(v)) for v in values]


def write_parcel_csv(path: Path, result) -> Path:
    """One row per parcel and decade, in input parcel order."""
    clim, grid, dev, adopt = result.key
    lines = [",".join(PARCEL_OUT_HEADER)]
    for di, decade in enumerate(DECADES):
        kwh = _fmt_column(result.parcel_kwh[di])
        co2 = _fmt_column(result.parcel_tco2e[di])
        area = _fmt_column(result.parcel_area[di])
        units = result.parcel_units[di].tolist()
        arch = result.parcel_archetype[di]
        prefix = f",{clim},{grid},{dev},{adopt},{decade},"
        for i, pid in enumerate(result.parcel_ids):
            lines.append(f"{pid},{result.parcel_hood[i]}{prefix}{arch[i]},{units[i]},"
                         f"{area[i]},{kwh[i]},{co2[i]}")
    try:
        path.write_text("\n".join(lines) + "\n")
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror}") from exc
    return path


def adoption_rows(key, counts: Mapping[int, Mapping]):
    clim, grid, dev, adopt = key
    for decade in sorted(counts):
        for tech in TECHS:
            chosen, mandated = counts[decade][tech]
            yield (clim, grid, dev, adopt, decade, tech.value, chosen, mandated,
                   chosen + mandated)


def premium_rows(points: Mapping[tuple, Iterable[PathwayPoint]]) -> list[tuple]:
    """Premium CSV rows from run points keyed by (climate, grid, development, adoption)."""
    series = premium_table({k: list(v) for k, v in points.items()})
    rows = []
    for s in sorted(series, key=lambda s: (s.climate, s.grid, s.adoption,
                                           _hood_order(s.neighborhood))):
        for decade, value in zip(s.decades, s.premium):
            rows.append((s.neighborhood, s.climate, s.grid, s.adoption, decade, value))
    return rows


def write_outputs(results: Mapping, out_dir: str | Path, config_digest: str, seed: int,
                  failures: Mapping | None = None) -> dict[str, list[str]]:
    """Write every result file under ``out_dir``; returns the manifest's file map."""
    out = Path(out_dir)
    try:
        (out / PARCEL_DIR).mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create {out / PARCEL_DIR}: {exc.strerror}") from exc
    keys = sorted(results)
    write_rows(out / PATHWAYS_FILE, PATHWAY_HEADER,
               (row for k in keys for row in pathway_rows(k, results[k].points)))
    write_rows(out / ADOPTION_FILE, ADOPTION_HEADER,
               (row for k in keys for row in adoption_rows(k, results[k].adoption_counts)))
    shared = [PATHWAYS_FILE, ADOPTION_FILE]
    prem = premium_rows({k: r.points for k, r in results.items()})
    if prem:
        write_rows(out / PREMIUM_FILE, PREMIUM_HEADER, prem)
        shared.append(PREMIUM_FILE)
    runs = {}
    for k in keys:
        rel = f"{PARCEL_DIR}/{run_label(k)}.csv"
        write_parcel_csv(out / rel, results[k])
        runs[run_label(k)] = [rel]
    manifest = {
        "software": "urbanpath",
        "version": __version__,
        "config_digest": config_digest,
        "seed": seed,
        "shared_files": shared,
        "runs": runs,
        "failures": {run_label(k): msg for k, msg in sorted((failures or {}).items())},
    }
    write_json(out / MANIFEST_FILE, manifest)
    return {"shared": shared, **runs}

"""Grid carbon intensity pathways (gCO2eq/kWh, annual average)."""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from .domain import GridPathwayId

BASELINE_G_PER_KWH = 430.0
RAPID_FLOOR_G_PER_KWH = 48.0
RAPID_SLOPE_G_PER_KWH_YR = 10.0  # -100 per decade

FIRST_YEAR = 2020
LAST_YEAR = 2100

GRID_CSV_HEADER = ("pathway_id", "year", "g_per_kwh")


def _check_year(year: float) -> None:
    if not FIRST_YEAR <= year <= LAST_YEAR:
        raise ValueError(f"year {year} outside {FIRST_YEAR}-{LAST_YEAR}")


def _rapid(year: float) -> float:
    return max(RAPID_FLOOR_G_PER_KWH,
               BASELINE_G_PER_KWH - RAPID_SLOPE_G_PER_KWH_YR * (year - FIRST_YEAR))


def carbon_intensity(pathway: GridPathwayId | str, year: float) -> float:
    """Grid carbon intensity for a built-in pathway.

    ``none`` holds the 2020 level, ``rapid`` falls linearly by 100 g/kWh per
    decade down to a floor of 48, and ``moderate`` is the arithmetic mean of
    the two at the same year.
    """
    _check_year(year)
    pathway = GridPathwayId(pathway)
    if pathway is GridPathwayId.NONE:
        return BASELINE_G_PER_KWH
    if pathway is GridPathwayId.RAPID:
        return _rapid(year)
    return (BASELINE_G_PER_KWH + _rapid(year)) / 2.0


class CustomPathway:
    """User-supplied intensity curve, linearly interpolated between given years."""

    def __init__(self, pathway_id: str, years, values):
        order = np.argsort(years)
        self.id = pathway_id
        self.years = np.asarray(years, dtype=float)[order]
        self.values = np.asarray(values, dtype=float)[order]
        if np.any(self.values < 0):
            raise ValueError(f"pathway {pathway_id}: negative intensity")
        if len(np.unique(self.years)) != len(self.years):
            raise ValueError(f"pathway {pathway_id}: duplicate years")

    def __call__(self, year: float) -> float:
        if not self.years[0] <= year <= self.years[-1]:
            raise ValueError(f"pathway {self.id}: year {year} outside "
                             f"{self.years[0]:.0f}-{self.years[-1]:.0f}")
        return float(np.interp(year, self.years, self.values))


def load_pathways(path: str | Path) -> dict[str, CustomPathway]:
    """Read ``pathway_id,year,g_per_kwh`` rows into interpolating curves."""
    rows: dict[str, list[tuple[float, float]]] = {}
    with Path(path).open(newline="") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != GRID_CSV_HEADER:
            raise ValueError(f"{path}: expected header {','.join(GRID_CSV_HEADER)}")
        for row_no, row in enumerate(reader, start=2):
            try:
                rows.setdefault(row["pathway_id"], []).append(
                    (float(row["year"]), float(row["g_per_kwh"])))
            except ValueError as exc:
                raise ValueError(f"{path}:{row_no}: {exc}") from None
    return {pid: CustomPathway(pid, [y for y, _ in pts], [v for _, v in pts])
            for pid, pts in rows.items()}


def intensity_lookup(pathway: str, custom: dict[str, CustomPathway] | None = None):
    """Return a ``year -> g/kWh`` callable, preferring custom curves by id."""
    if custom and pathway in custom:
        return custom[pathway]
    pid = GridPathwayId(pathway)
    return lambda year: carbon_intensity(pid, year)

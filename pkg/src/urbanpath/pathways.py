"""Emission accounting and pathway metrics."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .domain import DECADES, ScenarioSpec

ALL_NEIGHBORHOODS = "ALL"


def emissions(demand_kwh, intensity_g_per_kwh):
    """Annual emissions in tCO2eq from kWh and gCO2eq/kWh."""
    d = np.asarray(demand_kwh, dtype=float)
    g = np.asarray(intensity_g_per_kwh, dtype=float)
    if np.any(d < 0) or np.any(g < 0):
        raise ValueError("demand and intensity must be non-negative")
    out = d * g * 1e-6
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class PathwayPoint:
    scenario: ScenarioSpec | None
    neighborhood: str
    decade: int
    total_demand: float
    total_emissions: float
    units: int
    floor_area: float

    @property
    def per_unit(self) -> float:
        return self.total_emissions / self.units if self.units > 0 else float("nan")

    @property
    def per_m2(self) -> float:
        return self.total_emissions / self.floor_area if self.floor_area > 0 else float("nan")

    @property
    def per_capita(self) -> float:
        from .domain import occupants
        return self.total_emissions / occupants(self.units) if self.units > 0 else float("nan")


def aggregate(neighborhood: Sequence[str], decade: int, kwh, tco2e, units, floor_area,
              scenario: ScenarioSpec | None = None) -> list[PathwayPoint]:
    """Sum parcel (or unit) rows into one point per neighborhood plus the total.

    The all-neighborhood point is the sum of the per-neighborhood points, so
    the partition identity holds exactly in floating point.
    """
    hoods = np.asarray(neighborhood)
    kwh, tco2e = np.asarray(kwh, dtype=float), np.asarray(tco2e, dtype=float)
    units, floor_area = np.asarray(units), np.asarray(floor_area, dtype=float)
    points = []
    for hood in sorted(set(hoods.tolist())):
        m = hoods == hood
        points.append(PathwayPoint(scenario, hood, decade, float(kwh[m].sum()),
                                   float(tco2e[m].sum()), int(units[m].sum()),
                                   float(floor_area[m].sum())))
    total = PathwayPoint(scenario, ALL_NEIGHBORHOODS, decade,
                         sum(p.total_demand for p in points),
                         sum(p.total_emissions for p in points),
                         sum(p.units for p in points),
                         sum(p.floor_area for p in points))
    return points + [total]


def series(points: Iterable[PathwayPoint], neighborhood: str = ALL_NEIGHBORHOODS,
           metric: str = "total_emissions") -> np.ndarray:
    """Decade-ordered values of ``metric`` for one neighborhood."""
    chosen = sorted((p for p in points if p.neighborhood == neighborhood),
                    key=lambda p: p.decade)
    return np.array([getattr(p, metric) for p in chosen], dtype=float)


@dataclass(frozen=True)
class PremiumSeries:
    neighborhood: str
    climate: str
    grid: str
    adoption: str
    decades: tuple[int, ...]
    premium: tuple[float, ...]

    def at(self, decade: int) -> float:
        return self.premium[self.decades.index(decade)]


def premium_values(total_low, units_low, total_high, units_high) -> np.ndarray:
    """Low-density emissions scaled to the high-density unit count, minus high-density."""
    units_low = np.asarray(units_low, dtype=float)
    if np.any(units_low <= 0):
        raise ValueError("low-density series has zero units")
    if np.any(np.asarray(units_high) <= 0):
        raise ValueError("high-density series has zero units")
    return (np.asarray(total_low, dtype=float) * (np.asarray(units_high) / units_low)
            - np.asarray(total_high, dtype=float))


def premium_for_sprawl(low: Sequence[PathwayPoint], high: Sequence[PathwayPoint]) -> PremiumSeries:
    """Premium for Sprawl between matched low- and high-density series."""
    low = sorted(low, key=lambda p: p.decade)
    high = sorted(high, key=lambda p: p.decade)
    if [p.decade for p in low] != [p.decade for p in high]:
        raise ValueError("series cover different decades")
    if {p.neighborhood for p in low} != {p.neighborhood for p in high} or \
            len({p.neighborhood for p in low}) != 1:
        raise ValueError("series must cover the same single neighborhood")
    ls, hs = low[0].scenario, high[0].scenario
    if ls is not None and hs is not None:
        if (ls.climate, ls.grid, ls.adoption) != (hs.climate, hs.grid, hs.adoption):
            raise ValueError("series differ in climate, grid or adoption setting")
    values = premium_values([p.total_emissions for p in low], [p.units for p in low],
                            [p.total_emissions for p in high], [p.units for p in high])
    return PremiumSeries(
        low[0].neighborhood,
        ls.climate.value if ls else "", ls.grid.value if ls else "",
        ls.adoption.value if ls else "",
        tuple(p.decade for p in low), tuple(float(v) for v in values))


def baseline_delta(values, reference) -> np.ndarray:
    """Ratio of a pathway to its reference pathway, decade by decade."""
    values = np.asarray(values, dtype=float)
    reference = np.asarray(reference, dtype=float)
    if values.shape != reference.shape:
        raise ValueError("pathways are not aligned")
    if np.any(reference == 0):
        raise ValueError("reference pathway has a zero value")
    return values / reference


@dataclass(frozen=True)
class Rebound:
    min_index: int
    min_decade: int | None
    rebound: bool
    magnitude: float


def rebound_detector(values, decades: Sequence[int] | None = None,
                     tolerance: float = 0.01) -> Rebound:
    """Locate the minimum and flag a rise of more than ``tolerance`` by the end."""
    v = np.asarray(values, dtype=float)
    i = int(np.argmin(v))
    magnitude = float(v[-1] / v[i] - 1.0) if v[i] != 0 else (np.inf if v[-1] > 0 else 0.0)
    decades = list(decades) if decades is not None else (
        list(DECADES) if len(v) == len(DECADES) else None)
    return Rebound(i, decades[i] if decades else None, magnitude > tolerance, magnitude)


def premium_table(points: Mapping[tuple, Sequence[PathwayPoint]]) -> list[PremiumSeries]:
    """Every premium series computable from runs keyed by ScenarioSpec label parts.

    ``points`` maps ``(climate, grid, development, adoption)`` to a run's points.
    """
    out = []
    for (clim, grid, dev, adopt), pts in sorted(points.items()):
        if dev != "low_density" or (clim, grid, "high_density", adopt) not in points:
            continue
        high = points[clim, grid, "high_density", adopt]
        for hood in sorted({p.neighborhood for p in pts}):
            out.append(premium_for_sprawl([p for p in pts if p.neighborhood == hood],
                                          [p for p in high if p.neighborhood == hood]))
    return out

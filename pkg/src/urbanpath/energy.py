"""Per-unit operational energy demand.

Demand comes from a table keyed by (archetype, decade, climate).  The default
table is synthesized as ``intensity * unit floor area * climate multiplier``;
a table produced by an external building simulation can be loaded instead
from the same CSV schema.  Technology effects (HVAC efficiency, thermostat,
PV netting, battery) are applied on top of the table value.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

import numpy as np

from .domain import DECADES, Archetype, Catalog, Climate

CLIMATES: tuple[Climate, ...] = (Climate.TMY, Climate.B1, Climate.A1B, Climate.A2)

DEMAND_CSV_HEADER = ("archetype_id", "decade", "climate", "kwh_per_unit_yr")
CLIMATE_CSV_HEADER = ("climate", "decade", "multiplier")

HVAC_BASE_YEAR = 2020
HVAC_IMPROVEMENT_PER_YEAR = 0.02
HVAC_IMPROVEMENT_YEARS = 20
HVAC_LIFETIME_YEARS = 20

# (year, multiplier) anchors; linear in between
CLIMATE_ANCHORS: dict[Climate, tuple[tuple[int, float], ...]] = {
    Climate.TMY: ((2020, 1.0), (2100, 1.0)),
    Climate.B1: ((2020, 1.0), (2050, 1.10), (2080, 1.15), (2100, 1.15)),
    Climate.A1B: ((2020, 1.0), (2050, 1.10), (2100, 1.22)),
    Climate.A2: ((2020, 1.0), (2050, 1.10), (2100, 1.25)),
}


@dataclass(frozen=True)
class EnergyParams:
    days_constant: float = 356.0
    s_avg: float = 5.0
    thermostat_multiplier: float = 0.95
    usable_fraction: float = 0.40
    power_density: float = 0.2  # kW per m2 of usable roof
    self_sufficiency: float = 0.40  # battery floor on annual demand met on site


class ClimateMultiplierCurve:
    """Demand multiplier relative to typical-year weather, by climate and decade."""

    def __init__(self, table: dict[tuple[Climate, int], float]):
        self._table = dict(table)
        for clim in CLIMATES:
            for dec in DECADES:
                if (clim, dec) not in self._table:
                    raise ValueError(f"climate curve missing ({clim.value}, {dec})")

    @classmethod
    def default(cls) -> "ClimateMultiplierCurve":
        table = {}
        for clim, anchors in CLIMATE_ANCHORS.items():
            xs, ys = zip(*anchors)
            for dec in DECADES:
                table[clim, dec] = float(np.interp(dec, xs, ys))
        return cls(table)

    @classmethod
    def from_csv(cls, path: str | Path) -> "ClimateMultiplierCurve":
        table = {}
        with Path(path).open(newline="") as fh:
            reader = csv.DictReader(fh)
            if tuple(reader.fieldnames or ()) != CLIMATE_CSV_HEADER:
                raise ValueError(f"{path}: expected header {','.join(CLIMATE_CSV_HEADER)}")
            for row_no, row in enumerate(reader, start=2):
                try:
                    table[Climate(row["climate"]), int(row["decade"])] = float(row["multiplier"])
                except ValueError as exc:
                    raise ValueError(f"{path}:{row_no}: {exc}") from None
        return cls(table)

    def __call__(self, climate: Climate | str, decade: int) -> float:
        try:
            return self._table[Climate(climate), decade]
        except KeyError:
            raise ValueError(f"no climate multiplier for ({climate}, {decade})") from None


_DEFAULT_CURVE = ClimateMultiplierCurve.default()


def climate_multiplier(climate: Climate | str, decade: int,
                       curve: ClimateMultiplierCurve | None = None) -> float:
    return (curve or _DEFAULT_CURVE)(climate, decade)


class DemandTable:
    """Dense (archetype x decade x climate) array of kWh per unit per year."""

    def __init__(self, archetype_ids: Iterable[str], values: np.ndarray):
        self.archetype_ids = tuple(archetype_ids)
        self.values = np.asarray(values, dtype=float)
        expected = (len(self.archetype_ids), len(DECADES), len(CLIMATES))
        if self.values.shape != expected:
            raise ValueError(f"demand table shape {self.values.shape} != {expected}")
        self._row = {a: i for i, a in enumerate(self.archetype_ids)}

    @classmethod
    def synthetic(cls, catalog: Iterable[Archetype],
                  curve: ClimateMultiplierCurve | None = None) -> "DemandTable":
        curve = curve or _DEFAULT_CURVE
        catalog = list(catalog)
        mult = np.array([[curve(c, d) for c in CLIMATES] for d in DECADES])
        base = np.array([a.base_intensity * a.unit_floor_area for a in catalog])
        return cls([a.id for a in catalog], base[:, None, None] * mult[None, :, :])

    @classmethod
    def from_csv(cls, path: str | Path) -> "DemandTable":
        cells: dict[tuple[str, int, Climate], float] = {}
        ids: list[str] = []
        with Path(path).open(newline="") as fh:
            reader = csv.DictReader(fh)
            if tuple(reader.fieldnames or ()) != DEMAND_CSV_HEADER:
                raise ValueError(f"{path}: expected header {','.join(DEMAND_CSV_HEADER)}")
            for row_no, row in enumerate(reader, start=2):
                try:
                    key = (row["archetype_id"], int(row["decade"]), Climate(row["climate"]))
                    cells[key] = float(row["kwh_per_unit_yr"])
                except ValueError as exc:
                    raise ValueError(f"{path}:{row_no}: {exc}") from None
                if key[0] not in ids:
                    ids.append(key[0])
        values = np.full((len(ids), len(DECADES), len(CLIMATES)), np.nan)
        for (aid, dec, clim), v in cells.items():
            if dec not in DECADES:
                raise ValueError(f"{path}: decade {dec} not on the timeline")
            values[ids.index(aid), DECADES.index(dec), CLIMATES.index(clim)] = v
        if np.isnan(values).any():
            i, j, k = np.argwhere(np.isnan(values))[0]
            raise ValueError(f"{path}: missing cell ({ids[i]}, {DECADES[j]}, {CLIMATES[k].value})")
        return cls(ids, values)

    def to_csv(self, path: str | Path) -> None:
        with Path(path).open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(DEMAND_CSV_HEADER)
            for i, aid in enumerate(self.archetype_ids):
                for j, dec in enumerate(DECADES):
                    for k, clim in enumerate(CLIMATES):
                        w.writerow([aid, dec, clim.value, repr(float(self.values[i, j, k]))])

    def validate(self, catalog: Catalog | Iterable[Archetype] = ()) -> list[str]:
        problems = [f"{a.id}: no demand rows" for a in catalog if a.id not in self._row]
        if np.any(self.values <= 0):
            i, j, k = np.argwhere(self.values <= 0)[0]
            problems.append(f"non-positive demand at ({self.archetype_ids[i]}, "
                            f"{DECADES[j]}, {CLIMATES[k].value})")
        late = self.values[:, DECADES.index(2050):, :]
        if np.any(np.diff(late, axis=2) < 0):
            i, j, _ = np.argwhere(np.diff(late, axis=2) < 0)[0]
            problems.append(f"{self.archetype_ids[i]}: climate ordering TMY<=B1<=A1B<=A2 "
                            f"broken at {DECADES[DECADES.index(2050) + j]}")
        return problems

    def row(self, archetype_id: str) -> int:
        return self._row[archetype_id]

    def lookup(self, archetype_id: str, decade: int, climate: Climate | str) -> float:
        try:
            return float(self.values[self._row[archetype_id], DECADES.index(decade),
                                     CLIMATES.index(Climate(climate))])
        except (KeyError, ValueError):
            raise KeyError(f"no demand cell for ({archetype_id}, {decade}, {climate})") from None


def base_demand(archetype: Archetype | str, decade: int, climate: Climate | str,
                table: DemandTable) -> float:
    aid = archetype if isinstance(archetype, str) else archetype.id
    return table.lookup(aid, decade, climate)


def hvac_vintage_multiplier(vintage_year):
    """Efficiency of HVAC equipment installed in ``vintage_year`` relative to 2020.

    2% better per year for 20 years, then flat at the theoretical limit.
    Accepts scalars or arrays.
    """
    years = np.asarray(vintage_year)
    if np.any(years < HVAC_BASE_YEAR):
        raise ValueError(f"HVAC vintage before {HVAC_BASE_YEAR}")
    elapsed = np.minimum(years - HVAC_BASE_YEAR, HVAC_IMPROVEMENT_YEARS)
    out = (1.0 - HVAC_IMPROVEMENT_PER_YEAR) ** elapsed
    return float(out) if out.ndim == 0 else out


def high_efficiency_multiplier(adoption_year):
    """Best available HVAC efficiency at the time of adoption."""
    return hvac_vintage_multiplier(adoption_year)


def hvac_install_year(first_install, decade):
    """Year of the equipment in service at ``decade`` on a 20-year replacement cycle.

    Replacement happens at decade resolution once the equipment is at least
    20 years old, using the decade as the new install year.
    """
    first = np.asarray(first_install)
    age = np.asarray(decade) - first
    out = first + HVAC_LIFETIME_YEARS * np.floor_divide(np.maximum(age, 0), HVAC_LIFETIME_YEARS)
    return int(out) if out.ndim == 0 else out


def pv_annual_generation(p_kw, s_avg: float = 5.0, days_constant: float = 356.0):
    """Annual PV yield by the sun-hours method: ``days * S_avg * P`` in kWh."""
    p = np.asarray(p_kw, dtype=float)
    if np.any(p < 0):
        raise ValueError("PV size must be non-negative")
    if s_avg <= 0:
        raise ValueError("sun hours must be positive")
    out = days_constant * s_avg * p
    return float(out) if out.ndim == 0 else out


def roof_capacity(footprint, usable_fraction: float = 0.40, power_density: float = 0.2):
    if np.any(np.asarray(footprint) <= 0):
        raise ValueError("footprint must be positive")
    out = np.asarray(footprint, dtype=float) * usable_fraction * power_density
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class TechSet:
    """Technologies installed in one residence unit.

    ``hvac_gain`` is the demand multiplier of high-efficiency HVAC relative
    to the unit's regular equipment (1.0 when the regular equipment is
    already at the efficiency limit).
    """

    high_eff_hvac: bool = False
    smart_thermostat: bool = False
    pv_kw: float = 0.0
    storage: bool = False
    hvac_gain: float = 1.0

    def __post_init__(self):
        if self.storage and self.pv_kw <= 0:
            raise ValueError("storage requires solar PV")
        if self.pv_kw < 0:
            raise ValueError("PV size must be non-negative")
        if not 0 < self.hvac_gain <= 1:
            raise ValueError("hvac_gain must be in (0, 1]")
        if self.hvac_gain < 1 and not self.high_eff_hvac:
            raise ValueError("hvac_gain < 1 requires high_eff_hvac")

    @property
    def solar_pv(self) -> bool:
        return self.pv_kw > 0

    @property
    def empty(self) -> bool:
        return not (self.high_eff_hvac or self.smart_thermostat or self.solar_pv or self.storage)


def net_demand_array(gross, hvac_gain, thermostat, pv_gen, storage,
                     thermostat_multiplier: float = 0.95,
                     self_sufficiency: float = 0.40) -> np.ndarray:
    """Vectorized :func:`net_grid_demand` over aligned per-unit arrays."""
    d = np.asarray(gross, dtype=float) * np.asarray(hvac_gain, dtype=float)
    d = np.where(np.asarray(thermostat, dtype=bool), d * thermostat_multiplier, d)
    net = np.maximum(0.0, d - np.asarray(pv_gen, dtype=float))
    net = np.where(np.asarray(storage, dtype=bool),
                   np.minimum(net, (1.0 - self_sufficiency) * d), net)
    return np.maximum(net, 0.0)


def net_grid_demand(gross: float, techs: TechSet, pv_gen: float,
                    params: EnergyParams = EnergyParams()) -> float:
    """Grid demand after technology effects.

    Order: HVAC gain, thermostat, then annual PV netting.  With a battery the
    result is additionally capped at ``(1 - self_sufficiency)`` of the
    post-efficiency demand.
    """
    if gross < 0 or pv_gen < 0:
        raise ValueError("demand and PV generation must be non-negative")
    gain = techs.hvac_gain if techs.high_eff_hvac else 1.0
    return float(net_demand_array(gross, gain, techs.smart_thermostat, pv_gen, techs.storage,
                                  params.thermostat_multiplier, params.self_sufficiency))

"""Scenario execution: redevelopment -> adoption -> energy -> grid -> pathways.

The building stock and adoption trajectory depend only on (development,
adoption, seed): the ABM sizes and values technologies on typical-year
demand, so climate and grid never feed back into it.  A trajectory is
therefore simulated once and evaluated under every climate and grid
pathway requested.
"""

from __future__ import annotations

import itertools
import math
import traceback
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .adoption.agents import UnitSite
from .adoption.model import AdoptionModel
from .adoption.policy import TECH_CODE, TECHS, PolicyContext, Tech
from .config import ModelInputs
from .domain import (
    DECADES,
    AdoptionPolicy,
    Climate,
    Development,
    GridPathwayId,
    ScenarioSpec,
)
from .energy import (
    CLIMATES,
    hvac_install_year,
    hvac_vintage_multiplier,
    net_demand_array,
    pv_annual_generation,
    roof_capacity,
)
from .grid import intensity_lookup
from .pathways import PathwayPoint, aggregate
from .redevelopment import NeighborhoodState, apply_decade


class RunError(RuntimeError):
    """A module failed inside a scenario run."""


@dataclass(frozen=True)
class Snapshot:
    """Built stock and installed technologies at one decade, one row per space.

    A space is a residence unit, or one whole non-residential building.
    """

    decade: int
    parcel: np.ndarray  # parcel index per row
    arch_row: np.ndarray  # demand-table row
    is_unit: np.ndarray  # bool
    area: np.ndarray
    vintage: np.ndarray  # construction decade, -1 for pre-2020 stock
    hvac_year: np.ndarray  # high-efficiency HVAC install year, -1 if none
    thermostat: np.ndarray
    pv_kw: np.ndarray
    storage: np.ndarray
    parcel_archetype: tuple[str, ...]


@dataclass(frozen=True)
class Trajectory:
    development: Development
    adoption: AdoptionPolicy
    seed: int
    parcel_ids: tuple[str, ...]
    parcel_hood: tuple[str, ...]
    snapshots: tuple[Snapshot, ...]
    adoption_counts: Mapping[int, Mapping[Tech, tuple[int, int]]]


@dataclass
class ScenarioResult:
    spec: ScenarioSpec
    points: list[PathwayPoint]
    parcel_ids: tuple[str, ...]
    parcel_hood: tuple[str, ...]
    parcel_archetype: list[tuple[str, ...]]  # per decade
    parcel_units: np.ndarray  # (decades, parcels)
    parcel_area: np.ndarray
    parcel_kwh: np.ndarray
    parcel_tco2e: np.ndarray
    adoption_counts: Mapping[int, Mapping[Tech, tuple[int, int]]]

    @property
    def key(self) -> tuple[str, str, str, str]:
        s = self.spec
        return (s.climate.value, s.grid.value, s.development.value, s.adoption.value)


@dataclass
class MatrixResult:
    results: dict[tuple[str, str, str, str], ScenarioResult] = field(default_factory=dict)
    failures: dict[tuple[str, str, str, str], str] = field(default_factory=dict)


def _floor_tenth(x: np.ndarray) -> np.ndarray:
    return np.floor(np.asarray(x) * 10.0 + 1e-9) / 10.0


def _regular_multiplier(vintage: np.ndarray, decade: int) -> np.ndarray:
    """Regular HVAC efficiency; only stock built from 2020 on follows the cycle."""
    out = np.ones(len(vintage))
    new = vintage >= DECADES[0]
    if new.any():
        out[new] = hvac_vintage_multiplier(hvac_install_year(vintage[new], decade))
    return out


class _Stock:
    """Static lookups shared by every decade of a trajectory."""

    def __init__(self, inputs: ModelInputs):
        self.inputs = inputs
        self.catalog = inputs.catalog
        self.parcel_index = {p.id: i for i, p in enumerate(inputs.parcels)}
        self.row = {a.id: inputs.demand.row(a.id) for a in inputs.catalog}

    def sites(self, state: NeighborhoodState, units) -> dict[str, UnitSite]:
        """Location, roof and typical-year design demand for each unit."""
        e = self.inputs.energy
        parcels = {p.id: p for p in state.parcels}
        tmy = CLIMATES.index(Climate.TMY)
        cache: dict[tuple[str, int], tuple[float, float, float]] = {}
        out = {}
        for u in units:
            key = (u.archetype_id, u.vintage if u.vintage >= DECADES[0] else -1)
            if key not in cache:
                arch = self.catalog[u.archetype_id]
                roof = float(roof_capacity(arch.footprint, e.usable_fraction,
                                           e.power_density)) / max(arch.units_per_building, 1)
                regular = _regular_multiplier(np.array([key[1]]), max(key[1], DECADES[0]))[0]
                design = float(self.inputs.demand.values[self.row[arch.id], 0, tmy] * regular)
                size = float(_floor_tenth(min(roof, design / (e.days_constant * e.s_avg))))
                cache[key] = (roof, design, size)
            p = parcels[u.parcel_id]
            out[u.id] = UnitSite(p.x, p.y, *cache[key])
        return out

    def snapshot(self, state: NeighborhoodState, model: AdoptionModel | None) -> Snapshot:
        parcel, arch_row, is_unit, area, vintage, unit_ids = [], [], [], [], [], []
        archetypes = []
        for p in state.parcels:
            arch = self.catalog[p.current_archetype]
            archetypes.append(arch.id)
            pi = self.parcel_index[p.id]
            if arch.is_residential:
                for u in state.units[p.id]:
                    parcel.append(pi)
                    arch_row.append(self.row[arch.id])
                    is_unit.append(True)
                    area.append(arch.unit_floor_area)
                    vintage.append(u.vintage if u.vintage >= DECADES[0] else -1)
                    unit_ids.append(u.id)
            else:
                vin = p.redeveloped_in if p.redeveloped_in is not None else -1
                for _ in range(p.buildings):
                    parcel.append(pi)
                    arch_row.append(self.row[arch.id])
                    is_unit.append(False)
                    area.append(arch.unit_floor_area)
                    vintage.append(vin)
                    unit_ids.append(None)
        n = len(parcel)
        hvac_year = np.full(n, -1, dtype=np.int64)
        thermostat = np.zeros(n, dtype=bool)
        pv_kw = np.zeros(n)
        storage = np.zeros(n, dtype=bool)
        if model is not None:
            pop = model.population
            where = pop.index()
            rows = np.array([i for i, u in enumerate(unit_ids) if u is not None], dtype=np.int64)
            agents = np.array([where[unit_ids[i]] for i in rows], dtype=np.int64)
            inst = pop.installed[agents]
            hv = inst[:, TECH_CODE[Tech.HVAC]]
            hvac_year[rows[hv]] = pop.install_year[agents[hv], TECH_CODE[Tech.HVAC]]
            thermostat[rows] = inst[:, TECH_CODE[Tech.THERMOSTAT]]
            solar = inst[:, TECH_CODE[Tech.SOLAR]]
            pv_kw[rows[solar]] = pop.pv_size[agents[solar]]
            storage[rows] = inst[:, TECH_CODE[Tech.STORAGE]]
        return Snapshot(state.decade, np.array(parcel, dtype=np.int64),
                        np.array(arch_row, dtype=np.int64), np.array(is_unit, dtype=bool),
                        np.array(area, dtype=float), np.array(vintage, dtype=np.int64),
                        hvac_year, thermostat, pv_kw, storage, tuple(archetypes))


def simulate_trajectory(inputs: ModelInputs, development: Development | str,
                        adoption: AdoptionPolicy | str, seed: int) -> Trajectory:
    """Run redevelopment and (unless disabled) the ABM across the timeline."""
    development, adoption = Development(development), AdoptionPolicy(adoption)
    stock = _Stock(inputs)
    state = NeighborhoodState.initial(inputs.parcels, inputs.catalog)
    model = None
    if adoption is not AdoptionPolicy.NO_ADOPTION:
        p = inputs.abm
        e = inputs.energy
        model = AdoptionModel(p, PolicyContext.of(adoption, p.mandate_set), seed,
                              days_constant=e.days_constant, s_avg=e.s_avg,
                              thermostat_multiplier=e.thermostat_multiplier,
                              self_sufficiency=e.self_sufficiency)
        units = state.all_units()
        try:
            model.initialize(units, stock.sites(state, units))
        except Exception as exc:
            raise RunError(f"adoption_abm at initialization: {exc}") from exc
    snapshots, counts = [], {}
    for decade in DECADES:
        try:
            state, changes = apply_decade(state, decade, development, inputs.schedule,
                                          inputs.rules, inputs.catalog)
        except Exception as exc:
            raise RunError(f"redevelopment at {decade}: {exc}") from exc
        try:
            if model is not None:
                added = [u for c in changes for u in c.added]
                model.sync(changes, decade, stock.sites(state, added))
            snapshots.append(stock.snapshot(state, model))
            counts[decade] = model.counts() if model is not None else \
                {t: (0, 0) for t in TECHS}
            if model is not None and decade < DECADES[-1]:
                for year in range(decade, decade + 10):
                    model.step(year)
        except Exception as exc:
            raise RunError(f"adoption_abm at {decade}: {exc}") from exc
    return Trajectory(development, adoption, seed, tuple(p.id for p in inputs.parcels),
                      tuple(p.neighborhood for p in inputs.parcels), tuple(snapshots), counts)


def evaluate(trajectory: Trajectory, inputs: ModelInputs, climate: Climate | str,
             grid: GridPathwayId | str) -> ScenarioResult:
    """Demand and emissions of a trajectory under one climate and grid pathway."""
    climate = Climate(climate)
    spec = ScenarioSpec.make(climate, grid, trajectory.development, trajectory.adoption,
                             trajectory.seed)
    intensity = intensity_lookup(spec.grid.value, inputs.grid)
    e = inputs.energy
    ci = CLIMATES.index(climate)
    n = len(trajectory.parcel_ids)
    shape = (len(DECADES), n)
    units, area = np.zeros(shape, dtype=np.int64), np.zeros(shape)
    kwh, tco2e = np.zeros(shape), np.zeros(shape)
    points = []
    hoods = np.array(trajectory.parcel_hood)
    for di, snap in enumerate(trajectory.snapshots):
        decade = snap.decade
        try:
            regular = _regular_multiplier(snap.vintage, decade)
            gross = inputs.demand.values[snap.arch_row, di, ci] * regular
            gain = np.ones(len(gross))
            hv = snap.hvac_year >= 0
            if hv.any():
                gain[hv] = np.minimum(1.0, hvac_vintage_multiplier(snap.hvac_year[hv])
                                      / regular[hv])
            gen = pv_annual_generation(snap.pv_kw, e.s_avg, e.days_constant)
            net = net_demand_array(gross, gain, snap.thermostat, gen, snap.storage,
                                   e.thermostat_multiplier, e.self_sufficiency)
        except Exception as exc:
            raise RunError(f"energy at {decade}: {exc}") from exc
        try:
            g = intensity(decade)
        except Exception as exc:
            raise RunError(f"grid at {decade}: {exc}") from exc
        kwh[di] = np.bincount(snap.parcel, weights=net, minlength=n)
        tco2e[di] = kwh[di] * g * 1e-6
        units[di] = np.bincount(snap.parcel, weights=snap.is_unit, minlength=n).astype(np.int64)
        area[di] = np.bincount(snap.parcel, weights=snap.area, minlength=n)
        points += aggregate(hoods, decade, kwh[di], tco2e[di], units[di], area[di], spec)
    return ScenarioResult(spec, points, trajectory.parcel_ids, trajectory.parcel_hood,
                          [s.parcel_archetype for s in trajectory.snapshots], units, area,
                          kwh, tco2e, trajectory.adoption_counts)


def run_scenario(inputs: ModelInputs, spec: ScenarioSpec) -> ScenarioResult:
    traj = simulate_trajectory(inputs, spec.development, spec.adoption, spec.seed)
    return evaluate(traj, inputs, spec.climate, spec.grid)


def _run_group(inputs: ModelInputs, development: str, adoption: str, seed: int,
               cells: Sequence[tuple[str, str]]):
    """One trajectory, evaluated for every (climate, grid) cell; never raises."""
    out, failed = {}, {}
    try:
        traj = simulate_trajectory(inputs, development, adoption, seed)
    except Exception as exc:
        msg = _describe(exc)
        return out, {(c, g, development, adoption): msg for c, g in cells}
    for clim, grid in cells:
        key = (clim, grid, development, adoption)
        try:
            out[key] = evaluate(traj, inputs, clim, grid)
        except Exception as exc:
            failed[key] = _describe(exc)
    return out, failed


def _describe(exc: BaseException) -> str:
    if isinstance(exc, RunError):
        return str(exc)
    return "".join(traceback.format_exception_only(type(exc), exc)).strip()


def run_matrix(inputs: ModelInputs, axes: Mapping[str, Sequence[str]], seed: int,
               jobs: int = 1) -> MatrixResult:
    """Every combination of ``axes``; a failing combination does not stop the rest.

    Runs sharing (development, adoption) share one trajectory, so the adoption
    model sees identical random streams across the climate and grid axes, and
    the per-agent streams make policy runs common-random-number pairs.
    """
    cells = list(itertools.product(axes["climate"], axes["grid"]))
    groups = list(itertools.product(axes["development"], axes["adoption"]))
    result = MatrixResult()
    if jobs > 1 and len(groups) > 1:
        with ProcessPoolExecutor(max_workers=min(jobs, len(groups))) as pool:
            futures = [pool.submit(_run_group, inputs, d, a, seed, cells) for d, a in groups]
            parts = [f.result() for f in futures]
    else:
        parts = [_run_group(inputs, d, a, seed, cells) for d, a in groups]
    for out, failed in parts:
        result.results.update(out)
        result.failures.update(failed)
    result.results = dict(sorted(result.results.items()))
    result.failures = dict(sorted(result.failures.items()))
    return result


def matrix_size(axes: Mapping[str, Sequence[str]]) -> int:
    return math.prod(len(v) for v in axes.values())

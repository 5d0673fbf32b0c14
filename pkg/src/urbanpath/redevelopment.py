"""Decade-by-decade neighborhood redevelopment.

Parcels are ranked by improvement-to-land ratio (lowest first) within each
location stratum.  Each decade the neighborhood's scheduled fraction of lots
is redeveloped, split across strata by largest-remainder apportionment, and
every selected parcel receives a new archetype from the rule table for the
development scenario.  A parcel redevelops at most once.
"""

from __future__ import annotations

import csv
import math
from collections import defaultdict
from dataclasses import dataclass, field, replace
from decimal import ROUND_HALF_UP, Decimal
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .domain import (
    DECADES,
    Catalog,
    Development,
    LandUseClass,
    LocationClass,
    Parcel,
    ResidenceUnit,
)

SCHEDULE_CSV_HEADER = ("neighborhood", "decade", "fraction")
RULE_CSV_HEADER = ("scenario", "land_use_class", "location_class", "lot_area_min_m2",
                   "lot_area_max_m2", "target_archetype_id", "subdivision_count")

STRATA: tuple[LocationClass, ...] = (LocationClass.INTERIOR, LocationClass.CORRIDOR,
                                     LocationClass.TOD)

# stock that exists before the first timeline decade
INITIAL_DECADE = DECADES[0] - 10


class RedevelopmentError(ValueError):
    pass


def round_half_up(x: float) -> int:
    # Decimal(repr) avoids 0.15*100 = 15.000000000000002 style surprises
    return int(Decimal(repr(x)).quantize(Decimal(1), rounding=ROUND_HALF_UP))


def largest_remainder(total: int, weights: Sequence[float]) -> list[int]:
    """Split ``total`` into integers proportional to ``weights``.

    Floors first, then hands the leftover units to the largest fractional
    parts; ties go to the earlier weight.
    """
    wsum = sum(weights)
    if total < 0:
        raise ValueError("total must be non-negative")
    if wsum <= 0:
        if total:
            raise ValueError("cannot apportion a positive total over zero weight")
        return [0] * len(weights)
    quotas = [total * w / wsum for w in weights]
    seats = [math.floor(q) for q in quotas]
    leftover = total - sum(seats)
    order = sorted(range(len(weights)), key=lambda i: (-(quotas[i] - seats[i]), i))
    for i in order[:leftover]:
        seats[i] += 1
    return seats


class RedevelopmentSchedule:
    """Per-neighborhood fraction of lots redeveloped in each decade."""

    def __init__(self, fractions: Mapping[str, Mapping[int, float]]):
        self.fractions = {n: dict(row) for n, row in fractions.items()}
        for n, row in self.fractions.items():
            missing = [d for d in DECADES if d not in row]
            if missing:
                raise ValueError(f"schedule for {n} lacks decades {missing}")
            if any(not 0 <= f <= 1 for f in row.values()):
                raise ValueError(f"schedule for {n} has fractions outside [0, 1]")
            if not math.isclose(sum(row[d] for d in DECADES), 1.0, abs_tol=1e-9):
                raise ValueError(f"schedule for {n} sums to {sum(row.values())}, not 1")

    @classmethod
    def from_csv(cls, path: str | Path) -> "RedevelopmentSchedule":
        rows: dict[str, dict[int, float]] = defaultdict(dict)
        with Path(path).open(newline="") as fh:
            reader = csv.DictReader(fh)
            if tuple(reader.fieldnames or ()) != SCHEDULE_CSV_HEADER:
                raise ValueError(f"{path}: expected header {','.join(SCHEDULE_CSV_HEADER)}")
            for row_no, row in enumerate(reader, start=2):
                try:
                    rows[row["neighborhood"]][int(row["decade"])] = float(row["fraction"])
                except ValueError as exc:
                    raise ValueError(f"{path}:{row_no}: {exc}") from None
        return cls(rows)

    @classmethod
    def default(cls) -> "RedevelopmentSchedule":
        return cls.from_csv(Path(__file__).parent / "data" / "schedule.csv")

    @property
    def neighborhoods(self) -> tuple[str, ...]:
        return tuple(self.fractions)

    def fraction(self, neighborhood: str, decade: int) -> float:
        try:
            return self.fractions[neighborhood][decade]
        except KeyError:
            raise RedevelopmentError(
                f"no schedule entry for ({neighborhood}, {decade})") from None


def schedule_fraction(neighborhood: str, decade: int,
                      schedule: RedevelopmentSchedule | None = None) -> float:
    return (schedule or RedevelopmentSchedule.default()).fraction(neighborhood, decade)


@dataclass(frozen=True)
class AssignmentRule:
    scenario: Development
    land_use_class: LandUseClass
    location_class: LocationClass
    lot_area_min: float
    lot_area_max: float
    target_archetype: str
    subdivision_count: int = 1

    def matches(self, parcel: Parcel, scenario: Development) -> bool:
        return (self.scenario is scenario
                and self.land_use_class is parcel.land_use_class
                and self.location_class is parcel.location_class
                and self.lot_area_min <= parcel.lot_area < self.lot_area_max)


def load_rules(path: str | Path) -> list[AssignmentRule]:
    rules = []
    with Path(path).open(newline="") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != RULE_CSV_HEADER:
            raise ValueError(f"{path}: expected header {','.join(RULE_CSV_HEADER)}")
        for row_no, row in enumerate(reader, start=2):
            try:
                hi = row["lot_area_max_m2"].strip()
                rules.append(AssignmentRule(
                    scenario=Development(row["scenario"]),
                    land_use_class=LandUseClass(row["land_use_class"]),
                    location_class=LocationClass(row["location_class"]),
                    lot_area_min=float(row["lot_area_min_m2"]),
                    lot_area_max=float(hi) if hi else math.inf,
                    target_archetype=row["target_archetype_id"],
                    subdivision_count=int(row["subdivision_count"]),
                ))
            except ValueError as exc:
                raise ValueError(f"{path}:{row_no}: {exc}") from None
    return rules


def default_rules() -> list[AssignmentRule]:
    return load_rules(Path(__file__).parent / "data" / "rules.csv")


def check_rules(rules: Sequence[AssignmentRule], catalog: Catalog | None = None) -> list[str]:
    """Coverage check: every (class, location) band set must tile [0, inf) once."""
    problems = []
    groups: dict[tuple, list[AssignmentRule]] = defaultdict(list)
    for r in rules:
        groups[r.scenario, r.land_use_class, r.location_class].append(r)
        if catalog is not None and r.target_archetype not in catalog:
            problems.append(f"rule targets unknown archetype {r.target_archetype}")
        if r.subdivision_count < 1:
            problems.append(f"rule for {r.target_archetype} has subdivision_count < 1")
    for scen in (Development.LOW_DENSITY, Development.HIGH_DENSITY):
        for luc in LandUseClass:
            for loc in LocationClass:
                bands = sorted(groups.get((scen, luc, loc), []), key=lambda r: r.lot_area_min)
                edge = 0.0
                for r in bands:
                    if r.lot_area_min != edge:
                        problems.append(f"{scen.value}/{luc.value}/{loc.value}: "
                                        f"gap or overlap at {edge} m2")
                    edge = r.lot_area_max
                if edge != math.inf:
                    problems.append(f"{scen.value}/{luc.value}/{loc.value}: "
                                    f"lots above {edge} m2 unmatched")
    return problems


def rank_parcels(parcels: Iterable[Parcel]) -> dict[LocationClass, list[Parcel]]:
    """Order parcels within each location stratum, lowest ILR first, ties by id."""
    strata: dict[LocationClass, list[Parcel]] = {loc: [] for loc in STRATA}
    for p in parcels:
        if p.ilr is None or (isinstance(p.ilr, float) and math.isnan(p.ilr)):
            raise RedevelopmentError(f"parcel {p.id} has no ILR")
        if p.ilr < 0:
            raise RedevelopmentError(f"parcel {p.id} has negative ILR {p.ilr}")
        strata[p.location_class].append(p)
    for loc in strata:
        strata[loc].sort(key=lambda p: (p.ilr, p.id))
    return strata


def assign_archetype(parcel: Parcel, scenario: Development | str,
                     rules: Sequence[AssignmentRule]) -> tuple[str, int]:
    """Target (archetype id, number of buildings) for a redeveloping parcel."""
    scenario = Development(scenario)
    if scenario is Development.REFERENCE:
        return parcel.current_archetype, parcel.buildings
    hits = [r for r in rules if r.matches(parcel, scenario)]
    if len(hits) != 1:
        what = "no rule" if not hits else f"{len(hits)} rules"
        raise RedevelopmentError(
            f"{what} for parcel {parcel.id} ({parcel.land_use_class.value}, "
            f"{parcel.location_class.value}, {parcel.lot_area:.0f} m2) under {scenario.value}")
    return hits[0].target_archetype, hits[0].subdivision_count


def units_for_parcel(parcel: Parcel, catalog: Catalog, vintage: int) -> list[ResidenceUnit]:
    arch = catalog[parcel.current_archetype]
    n = arch.units_per_building * parcel.buildings
    return [ResidenceUnit(f"{parcel.id}:{vintage}:{k}", parcel.id, arch.id,
                          arch.dwelling_class, vintage) for k in range(n)]


@dataclass(frozen=True)
class NeighborhoodState:
    """Composition of one or more neighborhoods after ``decade``.

    ``units`` maps parcel id to the residence units on it.  Pre-timeline
    units carry the parcel's construction year as vintage.
    """

    decade: int
    parcels: tuple[Parcel, ...]
    units: Mapping[str, tuple[ResidenceUnit, ...]] = field(repr=False)

    @classmethod
    def initial(cls, parcels: Iterable[Parcel], catalog: Catalog) -> "NeighborhoodState":
        parcels = tuple(parcels)
        ids = [p.id for p in parcels]
        if len(set(ids)) != len(ids):
            raise RedevelopmentError("duplicate parcel ids")
        units = {p.id: tuple(units_for_parcel(p, catalog, p.year_built)) for p in parcels}
        return cls(INITIAL_DECADE, parcels, units)

    def all_units(self) -> list[ResidenceUnit]:
        return [u for p in self.parcels for u in self.units[p.id]]

    @property
    def unit_count(self) -> int:
        return sum(len(v) for v in self.units.values())

    def neighborhoods(self) -> list[str]:
        return sorted({p.neighborhood for p in self.parcels})


@dataclass(frozen=True)
class ParcelChange:
    parcel_id: str
    removed: tuple[ResidenceUnit, ...]
    added: tuple[ResidenceUnit, ...]


def select_for_decade(state: NeighborhoodState, decade: int,
                      schedule: RedevelopmentSchedule) -> set[str]:
    """Parcel ids to redevelop in ``decade``.

    Per neighborhood: ``round_half_up(fraction * lots)`` parcels, apportioned
    across location strata in proportion to the parcels still awaiting
    redevelopment there; the last decade takes everything left.
    """
    if state.decade != decade - 10:
        raise RedevelopmentError(f"state is at {state.decade}, cannot step to {decade}")
    chosen: set[str] = set()
    by_hood: dict[str, list[Parcel]] = defaultdict(list)
    for p in state.parcels:
        by_hood[p.neighborhood].append(p)
    for hood in sorted(by_hood):
        parcels = by_hood[hood]
        ranked = rank_parcels(p for p in parcels if p.redeveloped_in is None)
        remaining = sum(len(v) for v in ranked.values())
        if decade == DECADES[-1]:
            want = remaining
        else:
            want = min(round_half_up(schedule.fraction(hood, decade) * len(parcels)), remaining)
        seats = largest_remainder(want, [len(ranked[s]) for s in STRATA])
        for s, k in zip(STRATA, seats):
            chosen.update(p.id for p in ranked[s][:k])
    return chosen


def planned_counts(n_lots: int, fractions: Sequence[float]) -> list[int]:
    """Per-decade lot counts implied by the schedule for an ``n_lots`` neighborhood."""
    out, left = [], n_lots
    for i, f in enumerate(fractions):
        k = left if i == len(fractions) - 1 else min(round_half_up(f * n_lots), left)
        out.append(k)
        left -= k
    return out


def apply_decade(state: NeighborhoodState, decade: int, scenario: Development | str,
                 schedule: RedevelopmentSchedule, rules: Sequence[AssignmentRule],
                 catalog: Catalog) -> tuple[NeighborhoodState, list[ParcelChange]]:
    """Advance ``state`` by one decade; returns the new state and parcel changes.

    Under the reference scenario nothing is rebuilt.
    """
    scenario = Development(scenario)
    if decade <= state.decade:
        raise RedevelopmentError(f"decade {decade} already applied (state at {state.decade})")
    if scenario is Development.REFERENCE:
        if state.decade != decade - 10:
            raise RedevelopmentError(f"state is at {state.decade}, cannot step to {decade}")
        return NeighborhoodState(decade, state.parcels, state.units), []
    selected = select_for_decade(state, decade, schedule)
    parcels = []
    units = dict(state.units)
    changes = []
    for p in state.parcels:
        if p.id not in selected:
            parcels.append(p)
            continue
        target, n_buildings = assign_archetype(p, scenario, rules)
        if target not in catalog:
            raise RedevelopmentError(f"rule target {target} not in catalog")
        q = replace(p, current_archetype=target, buildings=n_buildings, redeveloped_in=decade)
        parcels.append(q)
        new_units = tuple(units_for_parcel(q, catalog, decade))
        changes.append(ParcelChange(p.id, units[p.id], new_units))
        units[p.id] = new_units
    return NeighborhoodState(decade, tuple(parcels), units), changes

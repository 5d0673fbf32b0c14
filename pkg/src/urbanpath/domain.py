"""Shared domain vocabulary: timeline, archetypes, parcels, units, scenarios.

All types are frozen dataclasses so a state can be shared between scenario
runs without copying.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterable

OCCUPANTS_PER_UNIT = 2.5

DECADES: tuple[int, ...] = tuple(range(2020, 2101, 10))

CATALOG_HEADER = (
    "archetype_id",
    "dwelling_class",
    "units_per_building",
    "unit_floor_area_m2",
    "stories",
    "footprint_m2",
    "base_intensity_kwh_m2_yr",
)


class DwellingClass(str, Enum):
    SINGLE_FAMILY = "single_family"
    MULTI_FAMILY = "multi_family"
    MIXED_USE = "mixed_use"
    COMMERCIAL = "commercial"


class LandUseClass(str, Enum):
    SMALL_RESIDENTIAL = "small_residential"
    LARGE_RESIDENTIAL = "large_residential"
    COMMERCIAL_MIXED = "commercial_mixed"


class LocationClass(str, Enum):
    INTERIOR = "interior"
    CORRIDOR = "corridor"
    TOD = "tod"


class Climate(str, Enum):
    TMY = "TMY"
    B1 = "B1"
    A1B = "A1B"
    A2 = "A2"


class GridPathwayId(str, Enum):
    NONE = "none"
    MODERATE = "moderate"
    RAPID = "rapid"


class Development(str, Enum):
    REFERENCE = "reference"
    LOW_DENSITY = "low_density"
    HIGH_DENSITY = "high_density"


class AdoptionPolicy(str, Enum):
    NO_ADOPTION = "no_adoption"
    NEUTRAL = "neutral"
    SUPPORTIVE = "supportive"


class Timeline:
    """The fixed decade grid 2020, 2030, ..., 2100."""

    decades: tuple[int, ...] = DECADES
    step = 10

    def __len__(self) -> int:
        return len(self.decades)

    def __iter__(self):
        return iter(self.decades)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Timeline)

    def __hash__(self) -> int:
        return hash(self.decades)

    def __repr__(self) -> str:
        return "Timeline(2020..2100)"

    @property
    def start(self) -> int:
        return self.decades[0]

    @property
    def end(self) -> int:
        return self.decades[-1]

    def index(self, year: int) -> int:
        if year not in self.decades:
            raise ValueError(f"{year} is not a timeline decade")
        return (year - self.start) // self.step

    def year(self, index: int) -> int:
        if not 0 <= index < len(self.decades):
            raise IndexError(f"decade index {index} out of range")
        return self.decades[index]

    def previous(self, year: int) -> int:
        """Decade preceding ``year``; 2010 stands for the pre-timeline stock."""
        if year != self.start - self.step:
            self.index(year)
        return year - self.step


TIMELINE = Timeline()


@dataclass(frozen=True)
class Archetype:
    id: str
    dwelling_class: DwellingClass
    units_per_building: int
    unit_floor_area: float
    stories: int
    footprint: float
    base_intensity: float

    @property
    def is_residential(self) -> bool:
        return self.units_per_building > 0

    @property
    def nonresidential_area(self) -> float:
        # a zero-unit building is modelled as one space of unit_floor_area
        return self.unit_floor_area if self.units_per_building == 0 else 0.0


@dataclass(frozen=True)
class Parcel:
    id: str
    neighborhood: str
    land_use_class: LandUseClass
    location_class: LocationClass
    lot_area: float
    ilr: float | None
    year_built: int
    current_archetype: str
    x: float = 0.0
    y: float = 0.0
    buildings: int = 1
    redeveloped_in: int | None = None


@dataclass(frozen=True)
class ResidenceUnit:
    id: str
    parcel_id: str
    archetype_id: str
    dwelling_class: DwellingClass
    vintage: int


@dataclass(frozen=True)
class ScenarioSpec:
    climate: Climate
    grid: GridPathwayId
    development: Development
    adoption: AdoptionPolicy
    seed: int = 0
    timeline: Timeline = field(default=TIMELINE, compare=False)

    @classmethod
    def make(cls, climate="TMY", grid="none", development="reference",
             adoption="no_adoption", seed=0) -> "ScenarioSpec":
        return cls(Climate(climate), GridPathwayId(grid), Development(development),
                   AdoptionPolicy(adoption), int(seed))

    @property
    def label(self) -> str:
        return (f"{self.climate.value}|{self.grid.value}|"
                f"{self.development.value}|{self.adoption.value}")


def occupants(units: float) -> float:
    """People housed by ``units`` dwelling units (2.5 per unit, no rounding)."""
    if units < 0:
        raise ValueError("unit count must be non-negative")
    return units * OCCUPANTS_PER_UNIT


def validate_catalog(catalog: Iterable[Archetype]) -> list[str]:
    """Return one message per archetype invariant violation; empty if valid."""
    problems: list[str] = []
    seen: set[str] = set()
    for a in catalog:
        if a.id in seen:
            problems.append(f"{a.id}: duplicate archetype id")
        seen.add(a.id)
        if a.unit_floor_area <= 0:
            problems.append(f"{a.id}: unit_floor_area must be > 0")
        if a.footprint <= 0:
            problems.append(f"{a.id}: footprint must be > 0")
        if a.base_intensity <= 0:
            problems.append(f"{a.id}: base_intensity must be > 0")
        if a.stories < 1:
            problems.append(f"{a.id}: stories must be >= 1")
        if a.units_per_building < 0:
            problems.append(f"{a.id}: units_per_building must be >= 0")
        if a.dwelling_class is DwellingClass.SINGLE_FAMILY and a.units_per_building != 1:
            problems.append(f"{a.id}: single_family archetype must have exactly 1 unit")
        if (a.units_per_building == 0
                and a.dwelling_class not in (DwellingClass.MIXED_USE, DwellingClass.COMMERCIAL)):
            problems.append(f"{a.id}: only mixed_use/commercial may have 0 units")
    return problems


class Catalog:
    """Archetype lookup by id that keeps file order."""

    def __init__(self, archetypes: Iterable[Archetype]):
        self.archetypes = tuple(archetypes)
        self._by_id = {a.id: a for a in self.archetypes}
        self._pos = {a.id: i for i, a in enumerate(self.archetypes)}

    def __getitem__(self, archetype_id: str) -> Archetype:
        return self._by_id[archetype_id]

    def __contains__(self, archetype_id: object) -> bool:
        return archetype_id in self._by_id

    def __iter__(self):
        return iter(self.archetypes)

    def __len__(self) -> int:
        return len(self.archetypes)

    def index_of(self, archetype_id: str) -> int:
        return self._pos[archetype_id]


def load_catalog(path: str | Path) -> list[Archetype]:
    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.DictReader(fh)
        missing = set(CATALOG_HEADER) - set(reader.fieldnames or ())
        if missing:
            raise ValueError(f"{path}: missing columns {sorted(missing)}")
        out = []
        for row_no, row in enumerate(reader, start=2):
            try:
                out.append(Archetype(
                    id=row["archetype_id"],
                    dwelling_class=DwellingClass(row["dwelling_class"]),
                    units_per_building=int(row["units_per_building"]),
                    unit_floor_area=float(row["unit_floor_area_m2"]),
                    stories=int(row["stories"]),
                    footprint=float(row["footprint_m2"]),
                    base_intensity=float(row["base_intensity_kwh_m2_yr"]),
                ))
            except ValueError as exc:
                raise ValueError(f"{path}:{row_no}: {exc}") from None
    return out


def default_catalog() -> list[Archetype]:
    return load_catalog(Path(__file__).parent / "data" / "archetypes.csv")

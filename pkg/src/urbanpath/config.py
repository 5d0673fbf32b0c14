"""Run configuration: YAML file <-> dataclasses, plus loaded model inputs.

A config file looks like::

    seed: 42
    output_dir: out
    data:
      parcels: [parcels_brentwood.csv]   # omitted -> shipped fixtures
      catalog: archetypes.csv            # omitted -> shipped catalog
      schedule: schedule.csv
      rules: rules.csv
      demand_table: demand.csv           # omitted -> synthesized
      climate_curve: climate.csv
      grid_pathways: grid.csv
    scenario: {climate: A1B, grid: moderate, development: low_density, adoption: neutral}
    matrix: {climate: [TMY, A1B], grid: [none, rapid]}
    energy: {days_constant: 356, s_avg: 5.0}
    abm: {phi_m: 500, rho: 0.1, lambda: 0.1}

Relative paths are resolved against the config file's directory.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path
from typing import Any

import yaml

from .adoption.model import AbmParams
from .domain import (
    AdoptionPolicy,
    Catalog,
    Climate,
    Development,
    GridPathwayId,
    ScenarioSpec,
    load_catalog,
    validate_catalog,
)
from .energy import ClimateMultiplierCurve, DemandTable, EnergyParams
from .fixtures import STUDY_NEIGHBORHOODS, fixture_path
from .grid import CustomPathway, load_pathways
from .io import DataError, load_parcels
from .redevelopment import (
    AssignmentRule,
    RedevelopmentSchedule,
    check_rules,
    default_rules,
    load_rules,
)

DATA_DIR = Path(__file__).parent / "data"

AXES = {
    "climate": tuple(c.value for c in Climate),
    "grid": tuple(g.value for g in GridPathwayId),
    "development": tuple(d.value for d in Development),
    "adoption": tuple(a.value for a in AdoptionPolicy),
}
_SCENARIO_ALIASES = {"dev": "development", "adopt": "adoption"}


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class DataPaths:
    parcels: tuple[str, ...] = ()
    catalog: str | None = None
    schedule: str | None = None
    rules: str | None = None
    demand_table: str | None = None
    climate_curve: str | None = None
    grid_pathways: str | None = None


@dataclass(frozen=True)
class RunConfig:
    seed: int = 0
    output_dir: str = "out"
    data: DataPaths = DataPaths()
    scenario: dict[str, str] = field(default_factory=lambda: {
        "climate": "TMY", "grid": "none", "development": "reference",
        "adoption": "no_adoption"})
    matrix: dict[str, tuple[str, ...]] = field(default_factory=lambda: dict(AXES))
    energy: EnergyParams = EnergyParams()
    abm: AbmParams = AbmParams()
    base_dir: str = field(default=".", compare=False)

    def spec(self, **overrides) -> ScenarioSpec:
        s = {**self.scenario, **overrides}
        return ScenarioSpec.make(s["climate"], s["grid"], s["development"], s["adoption"],
                                 self.seed)

    def to_dict(self) -> dict[str, Any]:
        d = {
            "seed": self.seed,
            "output_dir": self.output_dir,
            "data": {k: (list(v) if isinstance(v, tuple) else v)
                     for k, v in asdict(self.data).items() if v not in (None, ())},
            "scenario": dict(self.scenario),
            "matrix": {k: list(v) for k, v in self.matrix.items()},
            "energy": asdict(self.energy),
            "abm": self.abm.to_dict(),
        }
        return d

    def to_yaml(self) -> str:
        return yaml.safe_dump(self.to_dict(), sort_keys=True)

    def digest(self) -> str:
        """sha256 over the canonical JSON form; key order and formatting do not matter."""
        payload = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(payload.encode()).hexdigest()

    def resolve(self, path: str) -> Path:
        p = Path(path)
        return p if p.is_absolute() else Path(self.base_dir) / p


def _check_axis(name: str, values) -> tuple[str, ...]:
    if isinstance(values, str):
        values = [values]
    values = tuple(str(v) for v in values)
    bad = [v for v in values if v not in AXES[name]]
    if bad or not values:
        raise ConfigError(f"{name}: unknown value(s) {bad or '(empty)'}; "
                          f"expected subset of {list(AXES[name])}")
    return values


def parse_scenario(text: str) -> dict[str, str]:
    """Parse ``climate=A1B,grid=moderate,dev=low,adopt=neutral``."""
    out = {}
    shorthand = {"low": "low_density", "high": "high_density", "ref": "reference",
                 "none": "no_adoption"}
    for part in filter(None, (p.strip() for p in text.split(","))):
        if "=" not in part:
            raise ConfigError(f"scenario item {part!r} is not key=value")
        key, value = (s.strip() for s in part.split("=", 1))
        key = _SCENARIO_ALIASES.get(key, key)
        if key not in AXES:
            raise ConfigError(f"unknown scenario key {key!r}")
        if value not in AXES[key] and key in ("development", "adoption"):
            value = shorthand.get(value, value)
        out[key] = _check_axis(key, value)[0]
    return out


def config_from_dict(raw: dict[str, Any], base_dir: str | Path = ".") -> RunConfig:
    raw = dict(raw or {})
    known = {"seed", "output_dir", "data", "scenario", "matrix", "energy", "abm"}
    unknown = set(raw) - known
    if unknown:
        raise ConfigError(f"unknown top-level key(s): {sorted(unknown)}")
    data = dict(raw.get("data") or {})
    bad = set(data) - {f.name for f in fields(DataPaths)}
    if bad:
        raise ConfigError(f"unknown data key(s): {sorted(bad)}")
    parcels = data.get("parcels") or ()
    if isinstance(parcels, str):
        parcels = (parcels,)
    data["parcels"] = tuple(str(p) for p in parcels)
    scenario = dict(RunConfig().scenario)
    for k, v in (raw.get("scenario") or {}).items():
        k = _SCENARIO_ALIASES.get(k, k)
        if k not in AXES:
            raise ConfigError(f"unknown scenario key {k!r}")
        scenario[k] = _check_axis(k, v)[0]
    matrix = dict(AXES)
    for k, v in (raw.get("matrix") or {}).items():
        k = _SCENARIO_ALIASES.get(k, k)
        if k not in AXES:
            raise ConfigError(f"unknown matrix axis {k!r}")
        matrix[k] = _check_axis(k, v)
    energy_raw = raw.get("energy") or {}
    bad = set(energy_raw) - {f.name for f in fields(EnergyParams)}
    if bad:
        raise ConfigError(f"unknown energy key(s): {sorted(bad)}")
    try:
        energy = EnergyParams(**{k: float(v) for k, v in energy_raw.items()})
        abm = AbmParams.from_dict(raw.get("abm") or {})
        seed = int(raw.get("seed", 0))
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None
    return RunConfig(seed=seed, output_dir=str(raw.get("output_dir", "out")),
                     data=DataPaths(**data), scenario=scenario, matrix=matrix,
                     energy=energy, abm=abm, base_dir=str(base_dir))


def load_config(path: str | Path) -> RunConfig:
    path = Path(path)
    try:
        raw = yaml.safe_load(path.read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: invalid YAML: {exc}") from None
    if raw is not None and not isinstance(raw, dict):
        raise ConfigError(f"{path}: top level must be a mapping")
    return config_from_dict(raw or {}, base_dir=path.parent)


@dataclass(frozen=True)
class ModelInputs:
    """Everything a scenario run reads, loaded and validated."""

    parcels: tuple
    catalog: Catalog
    schedule: RedevelopmentSchedule
    rules: tuple[AssignmentRule, ...]
    demand: DemandTable
    grid: dict[str, CustomPathway]
    energy: EnergyParams
    abm: AbmParams

    def with_parcels(self, parcels) -> "ModelInputs":
        return replace(self, parcels=tuple(parcels))


def load_inputs(cfg: RunConfig) -> ModelInputs:
    """Read and cross-validate every input referenced by ``cfg``.

    Raises :class:`DataError` listing all problems found.
    """
    try:
        return _load_inputs(cfg)
    except DataError:
        raise
    except (ValueError, KeyError, OSError) as exc:
        raise DataError(str(exc)) from exc


def _load_inputs(cfg: RunConfig) -> ModelInputs:
    d = cfg.data

    def path_or_default(value, default):
        p = cfg.resolve(value) if value else default
        if not Path(p).exists():
            raise DataError(f"file not found: {p}")
        return p

    problems: list[str] = []
    archetypes = load_catalog(path_or_default(d.catalog, DATA_DIR / "archetypes.csv"))
    problems += validate_catalog(archetypes)
    catalog = Catalog(archetypes)
    schedule = RedevelopmentSchedule.from_csv(path_or_default(d.schedule,
                                                              DATA_DIR / "schedule.csv"))
    rules = tuple(load_rules(path_or_default(d.rules, DATA_DIR / "rules.csv"))
                  if d.rules else default_rules())
    problems += check_rules(rules, catalog)
    curve = (ClimateMultiplierCurve.from_csv(path_or_default(d.climate_curve, None))
             if d.climate_curve else ClimateMultiplierCurve.default())
    demand = (DemandTable.from_csv(path_or_default(d.demand_table, None))
              if d.demand_table else DemandTable.synthetic(catalog, curve))
    problems += demand.validate(catalog)
    grid = load_pathways(path_or_default(d.grid_pathways, None)) if d.grid_pathways else {}
    parcel_files = ([path_or_default(p, None) for p in d.parcels] if d.parcels
                    else [fixture_path(t.name) for t in STUDY_NEIGHBORHOODS])
    parcels = []
    for f in parcel_files:
        parcels.extend(load_parcels(f))
    ids = [p.id for p in parcels]
    if len(set(ids)) != len(ids):
        problems.append("duplicate parcel ids across parcel files")
    for p in parcels:
        if p.current_archetype not in catalog:
            problems.append(f"parcel {p.id}: unknown archetype {p.current_archetype}")
        if p.neighborhood not in schedule.neighborhoods:
            problems.append(f"parcel {p.id}: no redevelopment schedule for {p.neighborhood}")
    if problems:
        shown = problems[:20] + ([f"... and {len(problems) - 20} more"]
                                 if len(problems) > 20 else [])
        raise DataError("input validation failed:\n  " + "\n  ".join(shown))
    return ModelInputs(tuple(parcels), catalog, schedule, rules, demand, grid,
                       cfg.energy, cfg.abm)

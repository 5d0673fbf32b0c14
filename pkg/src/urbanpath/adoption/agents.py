"""Household agents stored as parallel arrays, one agent per residence unit."""

from __future__ import annotations

import zlib
from dataclasses import dataclass, fields
from enum import Enum
from typing import Mapping, Sequence

import numpy as np

from ..domain import DwellingClass, ResidenceUnit
from .policy import TECH_CODE, TECHS, Tech

NO_TECH = -1
PLAN_STREAM = 0x91A
POP_STREAM = 0x909


class Tenure(str, Enum):
    OWNER = "owner"
    RENTER = "renter"


@dataclass(frozen=True)
class Agent:
    """Read-only view of one agent."""

    id: str
    unit_id: str
    location: tuple[float, float]
    financial_index: float
    info_index: float
    tenure: Tenure
    dwelling_class: DwellingClass
    installed: frozenset[Tech]
    plan: tuple[Tech, ...]
    activated: bool


@dataclass
class Population:
    """Struct of arrays; row ``i`` is one agent."""

    unit_id: np.ndarray  # object
    parcel_id: np.ndarray  # object
    dwelling: np.ndarray  # object, DwellingClass value
    x: np.ndarray
    y: np.ndarray
    financial: np.ndarray
    info: np.ndarray
    owner: np.ndarray  # bool
    activated: np.ndarray  # bool
    plan: np.ndarray  # int8 (n, 4), NO_TECH padded
    installed: np.ndarray  # bool (n, 4)
    mandated: np.ndarray  # bool (n, 4)
    install_year: np.ndarray  # int (n, 4), NO_TECH when absent
    pv_size: np.ndarray  # kW the agent would install
    roof_kw: np.ndarray
    design_kwh: np.ndarray  # gross yearly demand used for sizing and payback

    def __len__(self) -> int:
        return len(self.unit_id)

    @property
    def single_family(self) -> np.ndarray:
        return self.dwelling == DwellingClass.SINGLE_FAMILY.value

    @property
    def eligible_all(self) -> np.ndarray:
        """Owners of single-family homes may adopt every technology."""
        return self.owner & self.single_family

    def agent(self, i: int) -> Agent:
        plan = tuple(TECHS[c] for c in self.plan[i] if c != NO_TECH)
        return Agent(
            id=f"a:{self.unit_id[i]}", unit_id=str(self.unit_id[i]),
            location=(float(self.x[i]), float(self.y[i])),
            financial_index=float(self.financial[i]), info_index=float(self.info[i]),
            tenure=Tenure.OWNER if self.owner[i] else Tenure.RENTER,
            dwelling_class=DwellingClass(self.dwelling[i]),
            installed=frozenset(TECHS[k] for k in np.flatnonzero(self.installed[i])),
            plan=plan, activated=bool(self.activated[i]))

    def agents(self) -> list[Agent]:
        return [self.agent(i) for i in range(len(self))]

    def take(self, idx) -> "Population":
        return Population(**{f.name: getattr(self, f.name)[idx] for f in fields(self)})

    @staticmethod
    def concat(a: "Population", b: "Population") -> "Population":
        return Population(**{f.name: np.concatenate([getattr(a, f.name), getattr(b, f.name)])
                             for f in fields(a)})

    def index(self) -> dict[str, int]:
        return {u: i for i, u in enumerate(self.unit_id)}


@dataclass(frozen=True)
class UnitSite:
    """Per-unit inputs that come from the parcel and the energy model."""

    x: float
    y: float
    roof_kw: float
    design_kwh: float
    pv_size: float


def init_population(units: Sequence[ResidenceUnit], seed: int, params,
                    sites: Mapping[str, UnitSite], stream: int = 0) -> Population:
    """One agent per residence unit; every draw comes from ``(seed, stream)``.

    Coordinates are the parcel centroid plus uniform jitter of
    ``params.jitter_m``.  A share ``params.initial_activation_share`` of the
    agents start activated (the innovators that seed diffusion).
    """
    n = len(units)
    rng = np.random.default_rng([seed, POP_STREAM, stream])
    a, b = params.financial_beta
    financial = rng.beta(a, b, n)
    sf = np.array([u.dwelling_class is DwellingClass.SINGLE_FAMILY for u in units], dtype=bool)
    p_owner = np.where(sf, params.owner_prob_sf, params.owner_prob_mf)
    owner = rng.random(n) < p_owner
    jitter = rng.uniform(-params.jitter_m, params.jitter_m, (n, 2))
    activated = rng.random(n) < params.initial_activation_share
    s = [sites[u.id] for u in units]
    pop = Population(
        unit_id=np.array([u.id for u in units], dtype=object),
        parcel_id=np.array([u.parcel_id for u in units], dtype=object),
        dwelling=np.array([u.dwelling_class.value for u in units], dtype=object),
        x=np.array([t.x for t in s], dtype=float) + jitter[:, 0],
        y=np.array([t.y for t in s], dtype=float) + jitter[:, 1],
        financial=financial, info=np.zeros(n), owner=owner, activated=activated,
        plan=np.full((n, len(TECHS)), NO_TECH, dtype=np.int8),
        installed=np.zeros((n, len(TECHS)), dtype=bool),
        mandated=np.zeros((n, len(TECHS)), dtype=bool),
        install_year=np.full((n, len(TECHS)), NO_TECH, dtype=np.int64),
        pv_size=np.array([t.pv_size for t in s], dtype=float),
        roof_kw=np.array([t.roof_kw for t in s], dtype=float),
        design_kwh=np.array([t.design_kwh for t in s], dtype=float),
    )
    for i in np.flatnonzero(activated):
        pop.plan[i] = encode_plan(sample_plan_for(pop, i, params, seed))
    return pop


def plan_rng(seed: int, unit_id: str) -> np.random.Generator:
    """Per-agent stream, identical in every policy scenario run with ``seed``."""
    return np.random.default_rng([seed, PLAN_STREAM, zlib.crc32(unit_id.encode())])


def draw_gateway(gateway_distribution: Mapping[Tech | str, float],
                 rng: np.random.Generator) -> Tech:
    """One draw from the categorical gateway distribution."""
    techs = [Tech(t) for t in gateway_distribution]
    probs = np.array([float(gateway_distribution[t]) for t in gateway_distribution])
    if probs.sum() <= 0:
        raise ValueError("gateway distribution has no mass")
    return techs[int(rng.choice(len(techs), p=probs / probs.sum()))]


def sample_plan(owner: bool, single_family: bool, pv_size: float,
                gateway_distribution: Mapping[Tech | str, float],
                rng: np.random.Generator, min_pv_kw: float = 1.0) -> list[Tech]:
    """Gateway from the categorical distribution, then the rest in random order.

    Renters and non-single-family agents can only adopt a smart thermostat.
    Storage always follows solar; both are dropped when the roof or demand
    cannot carry ``min_pv_kw``.
    """
    gateway = draw_gateway(gateway_distribution, rng)
    rest = [TECHS[k] for k in rng.permutation(len(TECHS))]
    if not (owner and single_family):
        return [Tech.THERMOSTAT]
    plan = [gateway] + [t for t in rest if t is not gateway]
    if plan.index(Tech.STORAGE) < plan.index(Tech.SOLAR):
        plan.remove(Tech.SOLAR)
        plan.insert(plan.index(Tech.STORAGE), Tech.SOLAR)
    if pv_size < min_pv_kw:
        plan = [t for t in plan if t not in (Tech.SOLAR, Tech.STORAGE)]
    return plan


def sample_plan_for(pop: Population, i: int, params, seed: int) -> list[Tech]:
    sf = pop.dwelling[i] == DwellingClass.SINGLE_FAMILY.value
    return sample_plan(bool(pop.owner[i]), sf, float(pop.pv_size[i]),
                       params.gateway_distribution, plan_rng(seed, str(pop.unit_id[i])),
                       params.min_pv_kw)


def encode_plan(plan: Sequence[Tech]) -> np.ndarray:
    row = np.full(len(TECHS), NO_TECH, dtype=np.int8)
    row[:len(plan)] = [TECH_CODE[t] for t in plan]
    return row

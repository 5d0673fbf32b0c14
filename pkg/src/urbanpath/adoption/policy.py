"""Policy incentives, technology prices and the value of energy savings."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from ..domain import AdoptionPolicy


class Tech(str, Enum):
    HVAC = "high_eff_hvac"
    THERMOSTAT = "smart_thermostat"
    SOLAR = "solar_pv"
    STORAGE = "storage"


TECHS: tuple[Tech, ...] = (Tech.HVAC, Tech.THERMOSTAT, Tech.SOLAR, Tech.STORAGE)
TECH_CODE = {t: i for i, t in enumerate(TECHS)}

# supportive scenario schedule; the neutral scenario has no incentives at all
FITC_SUPPORTIVE = ((2020, 2022, 0.26), (2023, 2023, 0.22))
SOLAR_REBATE = 2500.0
SOLAR_REBATE_MIN_KW_EARLY = 2.5  # 2020-2021
SOLAR_REBATE_MIN_KW = 1.2  # from 2022
HVAC_REBATE = 2550.0
THERMOSTAT_REBATE = 110.0


@dataclass(frozen=True)
class PolicyContext:
    scenario: AdoptionPolicy
    mandate_set: frozenset[Tech] = frozenset({Tech.HVAC})

    @classmethod
    def of(cls, scenario: AdoptionPolicy | str, mandate_set=None) -> "PolicyContext":
        mandates = frozenset(Tech(t) for t in mandate_set) if mandate_set is not None \
            else frozenset({Tech.HVAC})
        return cls(AdoptionPolicy(scenario), mandates)

    @property
    def supportive(self) -> bool:
        return self.scenario is AdoptionPolicy.SUPPORTIVE


def fitc_rate(year: int, policy: PolicyContext | AdoptionPolicy | str) -> float:
    """Federal solar tax credit rate: 26% to 2022, 22% in 2023, then gone."""
    scenario = policy.scenario if isinstance(policy, PolicyContext) else AdoptionPolicy(policy)
    if scenario is not AdoptionPolicy.SUPPORTIVE:
        return 0.0
    for lo, hi, rate in FITC_SUPPORTIVE:
        if lo <= year <= hi:
            return rate
    return 0.0


def rebate(tech: Tech | str, year: int, system_size_kw: float | None,
           policy: PolicyContext | AdoptionPolicy | str) -> float:
    """Local utility rebate in dollars (supportive scenario only)."""
    scenario = policy.scenario if isinstance(policy, PolicyContext) else AdoptionPolicy(policy)
    tech = Tech(tech)
    if scenario is not AdoptionPolicy.SUPPORTIVE:
        return 0.0
    if tech is Tech.SOLAR:
        threshold = SOLAR_REBATE_MIN_KW_EARLY if year < 2022 else SOLAR_REBATE_MIN_KW
        return SOLAR_REBATE if (system_size_kw or 0.0) >= threshold else 0.0
    if tech is Tech.HVAC:
        return HVAC_REBATE
    if tech is Tech.THERMOSTAT:
        return THERMOSTAT_REBATE
    return 0.0


@dataclass(frozen=True)
class EconomicContext:
    """Technology sale prices: a declining trend times lognormal noise.

    Solar is priced per kW; the other technologies per installation.  Noise
    is drawn once per (technology, year) from ``seed`` alone, so policy
    scenarios run with the same seed face identical prices.
    """

    base_price_2020: dict = field(default_factory=lambda: {
        Tech.HVAC: 9000.0, Tech.THERMOSTAT: 250.0, Tech.SOLAR: 2800.0, Tech.STORAGE: 12000.0})
    annual_decline: dict = field(default_factory=lambda: {
        Tech.HVAC: 0.005, Tech.THERMOSTAT: 0.01, Tech.SOLAR: 0.015, Tech.STORAGE: 0.02})
    floor_fraction: float = 0.6
    volatility: float = 0.05
    seed: int = 0
    first_year: int = 2020
    last_year: int = 2110
    reference_solar_kw: float = 6.0

    def __post_init__(self):
        rng = np.random.default_rng([self.seed, 0xEC0])
        years = self.last_year - self.first_year + 1
        noise = np.exp(rng.normal(0.0, self.volatility, (len(TECHS), years)))
        object.__setattr__(self, "_noise", noise)

    def trend(self, tech: Tech, year: int) -> float:
        tech = Tech(tech)
        base = self.base_price_2020[tech]
        decayed = base * (1.0 - self.annual_decline[tech]) ** max(year - self.first_year, 0)
        return max(decayed, self.floor_fraction * base)

    def price(self, tech: Tech | str, year: int) -> float:
        tech = Tech(tech)
        i = min(max(year - self.first_year, 0), self._noise.shape[1] - 1)
        return self.trend(tech, year) * float(self._noise[TECH_CODE[tech], i])

    def affordability_scale(self) -> float:
        """Price of the costliest technology in 2020 (solar at the reference size)."""
        prices = [self.base_price_2020[t] * (self.reference_solar_kw if t is Tech.SOLAR else 1)
                  for t in TECHS]
        return max(prices)


def net_cost(tech: Tech, year: int, size_kw: float, policy: PolicyContext,
             economy: EconomicContext) -> float:
    price = economy.price(tech, year)
    if tech is Tech.SOLAR:
        gross = price * size_kw
        cost = gross * (1.0 - fitc_rate(year, policy)) - rebate(tech, year, size_kw, policy)
    else:
        cost = price - rebate(tech, year, size_kw, policy)
    return max(cost, 0.0)


@dataclass(frozen=True)
class Tariffs:
    retail: float = 0.12  # $/kWh
    feed_in: float = 0.097


def evaluate_benefit(energy_saved_kwh: float, has_solar: bool, tariffs: Tariffs) -> float:
    """Yearly value of a technology's energy savings.

    With PV on the roof a saved kWh is one more kWh exported, so it is worth
    the feed-in rate; otherwise it is worth the retail rate.
    """
    rate = tariffs.feed_in if has_solar else tariffs.retail
    return max(energy_saved_kwh, 0.0) * rate

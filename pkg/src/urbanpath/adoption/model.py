"""Annual adoption dynamics: diffusion, activation, bidding, mandates, churn."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field, fields
from typing import Any, Mapping, Sequence

import numpy as np
from scipy import sparse

from ..energy import hvac_install_year, hvac_vintage_multiplier
from .agents import (
    NO_TECH,
    Population,
    UnitSite,
    encode_plan,
    init_population,
    sample_plan_for,
)
from .network import NetworkParams, add_nodes, build_network, remove_nodes
from .policy import (
    TECH_CODE,
    TECHS,
    EconomicContext,
    PolicyContext,
    Tariffs,
    Tech,
    fitc_rate,
    rebate,
)

NET_STREAM = 0x4E7
HVAC, THERMO, SOLAR, STORAGE = (TECH_CODE[t] for t in TECHS)

_DEFAULT_GATEWAY = {Tech.SOLAR.value: 0.35, Tech.HVAC.value: 0.35,
                    Tech.THERMOSTAT.value: 0.25, Tech.STORAGE.value: 0.05}


@dataclass(frozen=True)
class AbmParams:
    phi_m: float = 500.0
    rho: float = 0.10
    lambda_: float = 0.10
    sigma: float = 0.3
    theta_info: float = 1.0
    gateway_distribution: Mapping[str, float] = field(
        default_factory=lambda: dict(_DEFAULT_GATEWAY))
    owner_prob_sf: float = 0.55
    owner_prob_mf: float = 0.10
    retail_rate: float = 0.12
    feed_in_rate: float = 0.097
    mandate_set: tuple[str, ...] = (Tech.HVAC.value,)
    initial_activation_share: float = 0.02
    financial_beta: tuple[float, float] = (2.0, 2.0)
    jitter_m: float = 10.0
    marginal_band: float = 0.05
    payback_years: float = 10.0
    price_volatility: float = 0.05
    reference_solar_kw: float = 6.0
    min_pv_kw: float = 1.0

    def __post_init__(self):
        for t in self.gateway_distribution:
            Tech(t)
        for t in self.mandate_set:
            Tech(t)
        if any(v < 0 for v in self.gateway_distribution.values()) or \
                sum(self.gateway_distribution.values()) <= 0:
            raise ValueError("gateway_distribution needs non-negative weights with positive sum")
        for name in ("owner_prob_sf", "owner_prob_mf", "initial_activation_share"):
            if not 0 <= getattr(self, name) <= 1:
                raise ValueError(f"{name} must be in [0, 1]")
        if self.sigma < 0 or self.theta_info <= 0:
            raise ValueError("sigma must be >= 0 and theta_info > 0")
        self.network  # validates phi, rho, lambda

    @property
    def network(self) -> NetworkParams:
        return NetworkParams(self.phi_m, self.rho, self.lambda_)

    @property
    def tariffs(self) -> Tariffs:
        return Tariffs(self.retail_rate, self.feed_in_rate)

    @classmethod
    def from_dict(cls, raw: Mapping[str, Any]) -> "AbmParams":
        raw = dict(raw)
        if "lambda" in raw:
            raw["lambda_"] = raw.pop("lambda")
        known = {f.name for f in fields(cls)}
        bad = set(raw) - known
        if bad:
            raise ValueError(f"unknown abm key(s): {sorted(bad)}")
        for f in fields(cls):
            # 400 and 400.0 are the same setting and must digest the same
            if f.name in raw and isinstance(f.default, float):
                raw[f.name] = float(raw[f.name])
        for key in ("mandate_set", "financial_beta"):
            if key in raw:
                raw[key] = tuple(raw[key])
        if "financial_beta" in raw:
            raw["financial_beta"] = tuple(float(v) for v in raw["financial_beta"])
        if "gateway_distribution" in raw:
            raw["gateway_distribution"] = {str(k): float(v)
                                           for k, v in raw["gateway_distribution"].items()}
        return cls(**raw)

    def to_dict(self) -> dict[str, Any]:
        d = asdict(self)
        d["lambda"] = d.pop("lambda_")
        d["mandate_set"] = list(self.mandate_set)
        d["financial_beta"] = list(self.financial_beta)
        d["gateway_distribution"] = dict(sorted(self.gateway_distribution.items()))
        return d


def _next_item(pop: Population) -> tuple[np.ndarray, np.ndarray]:
    """Plan slot and technology code of each agent's next uninstalled item."""
    n = len(pop)
    plan = pop.plan.astype(np.int64)
    valid = plan != NO_TECH
    done = np.zeros_like(valid)
    rows = np.arange(n)[:, None]
    done[valid] = pop.installed[np.broadcast_to(rows, plan.shape)[valid], plan[valid]]
    open_ = valid & ~done
    has = open_.any(axis=1)
    slot = np.where(has, open_.argmax(axis=1), -1)
    tech = np.where(has, plan[np.arange(n), np.maximum(slot, 0)], NO_TECH)
    return slot, tech


def _regular_hvac(vintage: np.ndarray, year: int) -> np.ndarray:
    """Efficiency of the regular equipment; pre-2020 stock stays at 1."""
    out = np.ones(len(vintage))
    new = vintage >= 2020
    if new.any():
        out[new] = hvac_vintage_multiplier(hvac_install_year(vintage[new], year))
    return out


def tick(pop: Population, adj: sparse.csr_matrix, year: int, policy: PolicyContext,
         economy: EconomicContext, params: AbmParams, seed: int,
         vintage: np.ndarray | None = None, days_constant: float = 356.0,
         s_avg: float = 5.0, thermostat_multiplier: float = 0.95,
         self_sufficiency: float = 0.40) -> dict[str, np.ndarray]:
    """One annual step, in place.  Returns this year's chosen installs per tech."""
    n = len(pop)
    chosen = np.zeros(len(TECHS), dtype=np.int64)
    if n == 0:
        return {"chosen": chosen}
    # (1) diffusion
    adopter = pop.installed.any(axis=1).astype(float)
    deg = np.asarray(adj.sum(axis=1)).ravel()
    frac = np.divide(adj @ adopter, deg, out=np.zeros(n), where=deg > 0)
    pop.info += params.sigma * frac
    # (2) activation
    fresh = np.flatnonzero(~pop.activated & (pop.info >= params.theta_info))
    pop.activated[fresh] = True
    for i in fresh:
        pop.plan[i] = encode_plan(sample_plan_for(pop, i, params, seed))
    # (3) bidding on the next plan item
    slot, tech = _next_item(pop)
    bidders = np.flatnonzero(pop.activated & (tech != NO_TECH))
    if bidders.size == 0:
        return {"chosen": chosen}
    t = tech[bidders]
    size = pop.pv_size[bidders]
    price = np.array([economy.price(x, year) for x in TECHS])
    fitc = fitc_rate(year, policy)
    reb = np.array([rebate(x, year, 0.0, policy) for x in TECHS])
    solar_reb = np.array([rebate(Tech.SOLAR, year, s, policy) for s in size]) \
        if policy.supportive else np.zeros(size.size)
    cost = np.where(t == SOLAR, price[SOLAR] * size * (1.0 - fitc) - solar_reb,
                    price[t] - reb[t])
    cost = np.maximum(cost, 0.0)
    threshold = cost / economy.affordability_scale()
    fin = pop.financial[bidders]

    design = pop.design_kwh[bidders]
    gen = days_constant * s_avg * size
    vin = vintage[bidders] if vintage is not None else np.full(bidders.size, -1)
    gain = np.minimum(1.0, hvac_vintage_multiplier(year) / _regular_hvac(vin, year))
    saved = np.select(
        [t == HVAC, t == THERMO, t == SOLAR, t == STORAGE],
        [design * (1.0 - gain), design * (1.0 - thermostat_multiplier),
         np.minimum(gen, design),
         np.maximum(design - gen, 0.0) - np.minimum(np.maximum(design - gen, 0.0),
                                                    (1.0 - self_sufficiency) * design)])
    has_solar = pop.installed[bidders, SOLAR]
    rate = np.where(has_solar, params.feed_in_rate, params.retail_rate)
    benefit = np.maximum(saved, 0.0) * rate
    payback = np.divide(cost, benefit, out=np.full(cost.size, np.inf), where=benefit > 0)
    ok = (fin >= threshold) | ((fin >= (1.0 - params.marginal_band) * threshold)
                               & (payback <= params.payback_years))
    win = bidders[ok]
    pop.installed[win, t[ok]] = True
    pop.install_year[win, t[ok]] = year
    np.add.at(chosen, t[ok], 1)
    return {"chosen": chosen}


def apply_mandates(pop: Population, new_idx, policy: PolicyContext, year: int) -> np.ndarray:
    """Install the mandate set on new construction; returns installs per tech.

    Mandated items are flagged and never touch plans or budgets.
    """
    counts = np.zeros(len(TECHS), dtype=np.int64)
    if not policy.supportive:
        return counts
    new_idx = np.asarray(new_idx, dtype=np.int64)
    for tech in sorted(policy.mandate_set, key=TECHS.index):
        k = TECH_CODE[tech]
        if tech in (Tech.SOLAR, Tech.STORAGE):
            target = new_idx[pop.pv_size[new_idx] > 0]
        else:
            target = new_idx
        target = target[~pop.installed[target, k]]
        pop.installed[target, k] = True
        pop.mandated[target, k] = True
        pop.install_year[target, k] = year
        counts[k] += target.size
    return counts


class AdoptionModel:
    """Population, network and cumulative counters for one scenario run."""

    def __init__(self, params: AbmParams, policy: PolicyContext, seed: int,
                 economy: EconomicContext | None = None, days_constant: float = 356.0,
                 s_avg: float = 5.0, thermostat_multiplier: float = 0.95,
                 self_sufficiency: float = 0.40):
        self.params = params
        self.policy = policy
        self.seed = seed
        self.economy = economy or EconomicContext(
            volatility=params.price_volatility, seed=seed,
            reference_solar_kw=params.reference_solar_kw)
        self._energy = dict(days_constant=days_constant, s_avg=s_avg,
                            thermostat_multiplier=thermostat_multiplier,
                            self_sufficiency=self_sufficiency)
        self.population: Population | None = None
        self.network: sparse.csr_matrix | None = None
        self.vintage = np.empty(0, dtype=np.int64)
        self.chosen_total = np.zeros(len(TECHS), dtype=np.int64)
        self.mandated_total = np.zeros(len(TECHS), dtype=np.int64)

    def initialize(self, units, sites: Mapping[str, UnitSite]) -> None:
        self.population = init_population(units, self.seed, self.params, sites, stream=0)
        self.vintage = np.array([u.vintage if u.vintage >= 2020 else -1 for u in units],
                                dtype=np.int64)
        p = self.population
        rng = np.random.default_rng([self.seed, NET_STREAM, 0])
        self.network = build_network(np.column_stack([p.x, p.y]), p.financial,
                                     self.params.network, rng)

    def sync(self, changes: Sequence, decade: int, sites: Mapping[str, UnitSite]) -> None:
        """Remove agents on redeveloped parcels, add and wire the new units' agents."""
        if not changes:
            return
        gone = {u.id for c in changes for u in c.removed}
        added = [u for c in changes for u in c.added]
        p = self.population
        keep = np.array([u not in gone for u in p.unit_id], dtype=bool)
        p = p.take(keep)
        adj = remove_nodes(self.network, keep)
        vintage = self.vintage[keep]
        if added:
            new = init_population(added, self.seed, self.params, sites, stream=decade)
            n_old = len(p)
            p = Population.concat(p, new)
            vintage = np.concatenate([vintage, np.array([u.vintage for u in added])])
            flag = np.zeros(len(p), dtype=bool)
            flag[n_old:] = True
            rng = np.random.default_rng([self.seed, NET_STREAM, decade])
            adj = add_nodes(adj, np.column_stack([p.x, p.y]), p.financial, flag,
                            self.params.network, rng)
            self.mandated_total += apply_mandates(p, np.arange(n_old, len(p)),
                                                  self.policy, decade)
        self.population, self.network, self.vintage = p, adj, vintage

    def step(self, year: int) -> None:
        out = tick(self.population, self.network, year, self.policy, self.economy,
                   self.params, self.seed, self.vintage, **self._energy)
        self.chosen_total += out["chosen"]

    def counts(self) -> dict[Tech, tuple[int, int]]:
        """Cumulative (chosen, mandated) installations per technology."""
        return {t: (int(self.chosen_total[k]), int(self.mandated_total[k]))
                for k, t in enumerate(TECHS)}

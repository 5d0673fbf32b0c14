"""Household technology adoption model."""

from .agents import Agent, Population, UnitSite, init_population, sample_plan
from .model import AbmParams, AdoptionModel, apply_mandates, tick
from .network import NetworkParams, build_network, clustering_coefficient
from .policy import (
    EconomicContext,
    PolicyContext,
    Tariffs,
    Tech,
    evaluate_benefit,
    fitc_rate,
    rebate,
)

__all__ = [
    "AbmParams", "AdoptionModel", "Agent", "EconomicContext", "NetworkParams",
    "PolicyContext", "Population", "Tariffs", "Tech", "UnitSite", "apply_mandates",
    "build_network", "clustering_coefficient", "evaluate_benefit", "fitc_rate",
    "init_population", "rebate", "sample_plan", "tick",
]

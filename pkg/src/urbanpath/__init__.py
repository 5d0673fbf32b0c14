"""Decade-resolved emission pathways for urban neighborhoods, 2020-2100.

Combines parcel redevelopment, household technology adoption, archetype
energy demand, grid carbon intensity and climate scenarios.
"""

__version__ = "0.1.0"

from .domain import (  # noqa: E402
    DECADES,
    AdoptionPolicy,
    Climate,
    Development,
    GridPathwayId,
    ScenarioSpec,
    occupants,
)

__all__ = ["DECADES", "AdoptionPolicy", "Climate", "Development", "GridPathwayId",
           "ScenarioSpec", "occupants", "__version__"]

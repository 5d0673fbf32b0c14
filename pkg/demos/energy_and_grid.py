"""
Demand, on-site generation and grid carbon intensity
====================================================

Per-unit demand is the archetype intensity times floor area, scaled by the
climate multiplier of each scenario and by the efficiency of the unit's HVAC
equipment.  Emissions follow from the grid pathway's intensity.
"""

import numpy as np

from urbanpath.domain import DECADES, default_catalog
from urbanpath.energy import (
    DemandTable,
    TechSet,
    climate_multiplier,
    hvac_install_year,
    hvac_vintage_multiplier,
    net_grid_demand,
    pv_annual_generation,
    roof_capacity,
)
from urbanpath.grid import carbon_intensity

catalog = default_catalog()
table = DemandTable.synthetic(catalog)

# %%
# Climate multipliers by decade
for clim in ("TMY", "B1", "A1B", "A2"):
    print(f"{clim:4s}", np.round([climate_multiplier(clim, d) for d in DECADES], 3))

# %%
# A new single-family home built in 2030: HVAC replaced every 20 years
arch = next(a for a in catalog if a.id == "SF_L")
for d in DECADES[1:]:
    mult = hvac_vintage_multiplier(hvac_install_year(2030, d))
    kwh = table.values[table.row(arch.id), DECADES.index(d), 2] * mult
    print(f"{d}: A1B demand {kwh:8.0f} kWh/yr (HVAC multiplier {mult:.3f})")

# %%
# Rooftop PV and a battery on the same house
roof = roof_capacity(arch.footprint)
gross = 15_000.0
for kw in (2.0, 4.0, roof):
    gen = pv_annual_generation(kw, 5.0)
    print(f"{kw:4.1f} kW: PV only {net_grid_demand(gross, TechSet(pv_kw=kw), gen):7.0f}, "
          f"with storage {net_grid_demand(gross, TechSet(pv_kw=kw, storage=True), gen):7.0f}")

# %%
# Grid pathways, gCO2eq/kWh
for g in ("none", "moderate", "rapid"):
    print(f"{g:9s}", [carbon_intensity(g, d) for d in DECADES])

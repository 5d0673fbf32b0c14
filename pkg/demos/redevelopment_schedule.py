"""
Redevelopment of the study neighborhoods
========================================

Parcels are ranked by improvement-to-land ratio within each location
stratum and redeveloped decade by decade.  The rule table decides what
replaces each parcel, so the two development scenarios diverge in how many
homes the same lots end up carrying.
"""

from collections import Counter

from urbanpath.config import RunConfig, load_inputs
from urbanpath.domain import DECADES
from urbanpath.redevelopment import NeighborhoodState, apply_decade, planned_counts

inputs = load_inputs(RunConfig())
hoods = sorted({p.neighborhood for p in inputs.parcels})

# %%
# Lots per decade implied by the schedule
for hood in hoods:
    n = sum(p.neighborhood == hood for p in inputs.parcels)
    fr = [inputs.schedule.fraction(hood, d) for d in DECADES]
    print(f"{hood:14s} {n:5d} lots ->", planned_counts(n, fr))

# %%
# Units on the ground under each development scenario
for dev in ("reference", "low_density", "high_density"):
    state = NeighborhoodState.initial(inputs.parcels, inputs.catalog)
    units = []
    for decade in DECADES:
        state, changes = apply_decade(state, decade, dev, inputs.schedule, inputs.rules,
                                      inputs.catalog)
        units.append(len(state.all_units()))
    print(f"{dev:13s}", units)

# %%
# What the high-density scenario builds by 2100
mix = Counter(p.current_archetype for p in state.parcels)
for arch, count in mix.most_common():
    print(f"  {arch:13s} {count:5d} parcels")

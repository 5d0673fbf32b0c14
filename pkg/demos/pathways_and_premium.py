"""
Emission pathways and the premium for sprawl
============================================

A scenario run chains redevelopment, adoption, energy and grid.  Comparing
the two development scenarios per housing unit shows the low-density
rebound, and scaling low-density emissions to the high-density unit count
gives the premium for sprawl.
"""

import numpy as np

from urbanpath.config import RunConfig, load_inputs
from urbanpath.domain import DECADES
from urbanpath.pathways import ALL_NEIGHBORHOODS, premium_for_sprawl, rebound_detector, series
from urbanpath.runner import evaluate, simulate_trajectory

inputs = load_inputs(RunConfig())

# %%
# One trajectory per development, evaluated under every grid pathway
traj = {dev: simulate_trajectory(inputs, dev, "no_adoption", seed=0)
        for dev in ("low_density", "high_density")}
print("decade      ", DECADES)
for grid in ("none", "moderate", "rapid"):
    res = {dev: evaluate(t, inputs, "A1B", grid) for dev, t in traj.items()}
    for dev, r in res.items():
        per_unit = series(r.points, metric="per_unit")
        reb = rebound_detector(per_unit)
        flag = f"rebound +{reb.magnitude:.0%} after {reb.min_decade}" if reb.rebound else ""
        print(f"{grid:8s} {dev[:4]}", np.round(per_unit, 2), flag)
    low, high = ([p for p in res[d].points if p.neighborhood == ALL_NEIGHBORHOODS]
                 for d in ("low_density", "high_density"))
    prem = premium_for_sprawl(low, high)
    print(f"{grid:8s} premium", np.round(prem.premium).astype(int))

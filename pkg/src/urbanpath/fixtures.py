"""Synthetic parcel fixtures for the three Austin study neighborhoods.

Real appraisal data cannot be redistributed, so each neighborhood is
generated from its published 2020 totals (lots, lot area, housing units,
housing floor area).  Lot counts, unit counts and total lot area are matched
exactly; housing floor area to within one single-family size step.

ILR is structure value over land value with lognormal noise, so old houses
on large lots rank first and apartment parcels rank last.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .domain import Catalog, LandUseClass, LocationClass, Parcel, default_catalog


@dataclass(frozen=True)
class NeighborhoodTotals:
    name: str
    lots: int
    lot_area_m2: float
    housing_units: int
    housing_area_m2: float
    population_2020: int
    corridor_share: float
    tod_share: float
    commercial_share: float
    origin: tuple[float, float]
    greenfield_share: float = 0.0  # share of SF lots that are large estates


STUDY_NEIGHBORHOODS: tuple[NeighborhoodTotals, ...] = (
    NeighborhoodTotals("Brentwood", 2580, 3_340_000, 4790, 606_240, 14_350,
                       corridor_share=0.15, tod_share=0.08, commercial_share=0.03,
                       origin=(0.0, 0.0), greenfield_share=0.02),
    NeighborhoodTotals("SouthMenchaca", 2378, 2_831_000, 3099, 441_520, 9_100,
                       corridor_share=0.12, tod_share=0.04, commercial_share=0.03,
                       origin=(6000.0, -9000.0), greenfield_share=0.03),
    NeighborhoodTotals("Montopolis", 2143, 4_744_000, 3619, 494_530, 11_600,
                       corridor_share=0.14, tod_share=0.06, commercial_share=0.03,
                       origin=(9000.0, 3000.0), greenfield_share=0.10),
)

# share of the extra units (above one per lot) housed by each MF type
_MF_SPLIT = (("MF_MIDRISE", 0.45), ("MF_8PLEX", 0.20), ("MF_4PLEX", 0.15))
_SF_SIZES = ("SF_S", "SF_M", "SF_L", "SF_XL")

_STRUCTURE_VALUE_PER_M2 = {  # relative replacement value of the improvement
    "SF_S": 1.0, "SF_M": 1.0, "SF_L": 1.1, "SF_XL": 1.2, "MF_DUPLEX": 1.1,
    "MF_4PLEX": 1.2, "MF_8PLEX": 1.3, "MF_MIDRISE": 1.5, "MU_LOW": 1.4,
    "MU_MID": 1.5, "COM_S": 1.0, "COM_M": 1.2,
}
_LAND_PREMIUM = {LocationClass.INTERIOR: 1.0, LocationClass.CORRIDOR: 1.3,
                 LocationClass.TOD: 1.5}
_LOT_MEDIAN_M2 = {"SF": 650.0, "MF_DUPLEX": 700.0, "MF_4PLEX": 1000.0, "MF_8PLEX": 1800.0,
                  "MF_MIDRISE": 4000.0, "COM_S": 2000.0}


def _stock_mix(t: NeighborhoodTotals, catalog: Catalog) -> list[str]:
    """Archetype per lot so that lot and unit counts match exactly."""
    n_com = round(t.commercial_share * t.lots)
    extra = t.housing_units - (t.lots - n_com)  # units beyond one per residential lot
    counts = {}
    for aid, share in _MF_SPLIT:
        per = catalog[aid].units_per_building - 1
        counts[aid] = round(share * extra / per)
    duplex = extra - sum(counts[a] * (catalog[a].units_per_building - 1) for a in counts)
    if duplex < 0:
        raise ValueError(f"{t.name}: unit total too small for the MF split")
    counts["MF_DUPLEX"] = duplex
    n_sf = t.lots - n_com - sum(counts.values())
    mf_area = sum(n * catalog[a].units_per_building * catalog[a].unit_floor_area
                  for a, n in counts.items())
    sf_target = t.housing_area_m2 - mf_area
    sizes = [catalog[a].unit_floor_area for a in _SF_SIZES]
    mean = sf_target / n_sf
    # two adjacent sizes bracketing the required mean
    k = int(np.clip(np.searchsorted(sizes, mean) - 1, 0, len(sizes) - 2))
    n_big = int(round((sf_target - n_sf * sizes[k]) / (sizes[k + 1] - sizes[k])))
    n_big = min(max(n_big, 0), n_sf)
    mix = (["COM_S"] * n_com + [a for a, n in counts.items() for _ in range(n)]
           + [_SF_SIZES[k + 1]] * n_big + [_SF_SIZES[k]] * (n_sf - n_big))
    return mix


def generate_neighborhood(t: NeighborhoodTotals, catalog: Catalog, seed: int) -> list[Parcel]:
    rng = np.random.default_rng([seed, t.lots])
    mix = np.array(_stock_mix(t, catalog))
    n = t.lots
    rng.shuffle(mix)

    # lot sizes; estates on a share of single-family lots
    kind = np.array(["SF" if a.startswith("SF") else a for a in mix])
    median = np.array([_LOT_MEDIAN_M2.get(k, 1000.0) for k in kind])
    area = median * rng.lognormal(0.0, 0.35, n)
    sf_idx = np.flatnonzero(kind == "SF")
    estates = rng.choice(sf_idx, size=round(t.greenfield_share * len(sf_idx)), replace=False)
    area[estates] = rng.uniform(4000.0, 12000.0, len(estates))
    area *= t.lot_area_m2 / area.sum()

    # larger single-family houses sit on the larger lots
    sf_order = sf_idx[np.argsort(area[sf_idx] * rng.lognormal(0.0, 0.5, len(sf_idx)))]
    sf_sorted = sorted(mix[sf_idx], key=_SF_SIZES.index)
    mix[sf_order] = sf_sorted

    # geometry: jittered grid inside a square; corridor = vertical band through
    # the middle, TOD = disc around a station on the corridor
    side = np.sqrt(t.lot_area_m2 * 1.25)
    cols = int(np.ceil(np.sqrt(n)))
    cell = side / cols
    slots = rng.permutation(cols * cols)[:n]
    gx = (slots % cols + 0.5 + rng.uniform(-0.3, 0.3, n)) * cell
    gy = (slots // cols + 0.5 + rng.uniform(-0.3, 0.3, n)) * cell

    # non-SF stock gravitates to corridors: sort lots by distance to the
    # corridor and hand the nearest slots to commercial/MF first
    d_corr = np.abs(gx - side / 2)
    station = np.array([side / 2, side * 0.3])
    d_tod = np.hypot(gx - station[0], gy - station[1])
    locs = (LocationClass.INTERIOR, LocationClass.CORRIDOR, LocationClass.TOD)
    loc = np.zeros(n, dtype=int)
    n_tod = round(t.tod_share * n)
    n_corr = round(t.corridor_share * n)
    tod_slots = np.argsort(d_tod, kind="stable")[:n_tod]
    loc[tod_slots] = 2
    free = np.setdiff1d(np.arange(n), tod_slots)
    corr_slots = free[np.argsort(d_corr[free], kind="stable")[:n_corr]]
    loc[corr_slots] = 1

    prefers_corridor = np.array([not a.startswith("SF") for a in mix])
    weight = np.where(prefers_corridor, rng.uniform(0, 1.5, n), rng.uniform(0.5, 2.0, n))
    lot_order = np.argsort(weight, kind="stable")
    slot_order = np.argsort(np.minimum(d_corr, d_tod), kind="stable")
    placement = np.empty(n, dtype=int)
    placement[lot_order] = slot_order
    x = gx[placement] + t.origin[0]
    y = gy[placement] + t.origin[1]
    loc = [locs[k] for k in loc[placement]]

    year_built = np.where(prefers_corridor, rng.integers(1965, 2005, n),
                          rng.integers(1935, 1980, n))
    age_factor = np.clip(1.0 - (2020 - year_built) / 120.0, 0.3, 1.0)
    floor_area = np.array([catalog[a].unit_floor_area * max(catalog[a].units_per_building, 1)
                           for a in mix])
    structure = floor_area * np.array([_STRUCTURE_VALUE_PER_M2[a] for a in mix]) * age_factor
    land = area * np.array([_LAND_PREMIUM[lc] for lc in loc]) * 0.35
    ilr = structure / land * rng.lognormal(0.0, 0.35, n)

    parcels = []
    prefix = "".join(w[0] for w in t.name.replace("South", "South ").split()).upper()
    for i in range(n):
        aid = str(mix[i])
        arch = catalog[aid]
        if arch.units_per_building == 0 or arch.dwelling_class.value == "mixed_use":
            luc = LandUseClass.COMMERCIAL_MIXED
        elif aid in ("MF_8PLEX", "MF_MIDRISE") or area[i] >= 4000:
            luc = LandUseClass.LARGE_RESIDENTIAL
        else:
            luc = LandUseClass.SMALL_RESIDENTIAL
        parcels.append(Parcel(
            id=f"{prefix}{i:05d}", neighborhood=t.name, land_use_class=luc,
            location_class=loc[i], lot_area=round(float(area[i]), 2),
            ilr=round(float(ilr[i]), 4), year_built=int(year_built[i]),
            current_archetype=aid, x=round(float(x[i]), 1), y=round(float(y[i]), 1),
        ))
    # rounding drift: put it on the largest lot so the total stays exact
    drift = round(t.lot_area_m2 - sum(p.lot_area for p in parcels), 2)
    big = max(range(n), key=lambda i: parcels[i].lot_area)
    parcels[big] = Parcel(**{**parcels[big].__dict__,
                             "lot_area": round(parcels[big].lot_area + drift, 2)})
    return parcels


def generate_all(seed: int = 2020, catalog: Catalog | None = None) -> dict[str, list[Parcel]]:
    catalog = catalog or Catalog(default_catalog())
    return {t.name: generate_neighborhood(t, catalog, seed) for t in STUDY_NEIGHBORHOODS}


def fixture_path(name: str) -> Path:
    return Path(__file__).parent / "data" / f"parcels_{name.lower()}.csv"


def main() -> None:  # pragma: no cover - regenerates shipped data
    from .io import write_parcels

    for name, parcels in generate_all().items():
        write_parcels(parcels, fixture_path(name))
        print(name, len(parcels))


if __name__ == "__main__":  # pragma: no cover
    main()

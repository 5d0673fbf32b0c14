import itertools

import pytest

from urbanpath.domain import DECADES, Catalog, Development, default_catalog
from urbanpath.redevelopment import (
    NeighborhoodState,
    RedevelopmentError,
    RedevelopmentSchedule,
    apply_decade,
    assign_archetype,
    check_rules,
    default_rules,
    largest_remainder,
    planned_counts,
    rank_parcels,
    round_half_up,
    schedule_fraction,
    select_for_decade,
)

from conftest import make_parcel

CATALOG = Catalog(default_catalog())
RULES = default_rules()


def _ids(parcels):
    return [p.id for p in parcels]


def test_rank_by_ilr():
    ranked = rank_parcels([make_parcel("A", 0.5), make_parcel("B", 2.0), make_parcel("C", 1.0)])
    assert _ids(ranked["interior"]) == ["A", "C", "B"]


def test_rank_empty():
    assert all(v == [] for v in rank_parcels([]).values())


def test_rank_ties_by_id_any_input_order():
    for perm in itertools.permutations([make_parcel("A", 1.0), make_parcel("B", 1.0)]):
        assert _ids(rank_parcels(perm)["interior"]) == ["A", "B"]


def test_rank_rejects_missing_ilr():
    with pytest.raises(RedevelopmentError, match="P9"):
        rank_parcels([make_parcel("P9", ilr=None)])


def test_schedule_paper_values():
    assert schedule_fraction("Montopolis", 2020) == 0.15
    assert schedule_fraction("Brentwood", 2100) == 0.20
    sched = RedevelopmentSchedule.default()
    assert sum(sched.fraction("SouthMenchaca", d) for d in DECADES) == pytest.approx(1.0)
    with pytest.raises(RedevelopmentError):
        sched.fraction("Hyde Park", 2020)
    with pytest.raises(RedevelopmentError):
        sched.fraction("Brentwood", 2025)


def test_schedule_must_sum_to_one():
    with pytest.raises(ValueError):
        RedevelopmentSchedule({"X": {d: 0.1 for d in DECADES}})


def test_round_half_up():
    assert [round_half_up(x) for x in (0.5, 1.5, 2.5, 0.15 * 100, 2.4999)] == [1, 2, 3, 15, 2]


def test_largest_remainder():
    assert largest_remainder(10, [1, 1, 1]) == [4, 3, 3]
    assert largest_remainder(7, [5, 3, 2]) == [4, 2, 1]
    assert largest_remainder(0, [0, 0]) == [0, 0]
    assert sum(largest_remainder(13, [0.2, 0.7, 0.1])) == 13


def _toy(n=10, fractions=None, hood="Toy"):
    parcels = [make_parcel(f"P{i:02d}", ilr=float(i + 1), hood=hood) for i in range(n)]
    fractions = fractions or {d: float(d == DECADES[-1]) for d in DECADES}
    sched = RedevelopmentSchedule({hood: fractions})
    return NeighborhoodState.initial(parcels, CATALOG), sched


def test_select_hundred_lots():
    fr = {d: 0.0 for d in DECADES}
    fr[2020], fr[2100] = 0.15, 0.85
    state, sched = _toy(100, fr)
    assert len(select_for_decade(state, 2020, sched)) == 15


def test_select_zero_fraction():
    fr = {d: 0.0 for d in DECADES}
    fr[2100] = 1.0
    state, sched = _toy(10, fr)
    assert select_for_decade(state, 2020, sched) == set()


def test_toy_two_decades_by_ilr_rank():
    fr = {d: 0.0 for d in DECADES}
    fr[2020], fr[2030] = 0.5, 0.5
    state, sched = _toy(10, fr)
    s1 = select_for_decade(state, 2020, sched)
    assert s1 == {f"P{i:02d}" for i in range(5)}
    state, _ = apply_decade(state, 2020, "low_density", sched, RULES, CATALOG)
    assert select_for_decade(state, 2030, sched) == {f"P{i:02d}" for i in range(5, 10)}
    state, _ = apply_decade(state, 2030, "low_density", sched, RULES, CATALOG)
    assert [p.redeveloped_in for p in state.parcels] == [2020] * 5 + [2030] * 5


def test_every_parcel_once_by_2100():
    state, sched = _toy(37, {d: f for d, f in zip(DECADES, (.06, .06, .06, .09, .09, .12, .12,
                                                           .2, .2))})
    seen = []
    for d in DECADES:
        state, changes = apply_decade(state, d, "high_density", sched, RULES, CATALOG)
        seen += [c.parcel_id for c in changes]
    assert sorted(seen) == sorted(p.id for p in state.parcels)
    assert all(p.redeveloped_in is not None for p in state.parcels)


def test_planned_counts_cover_all_lots():
    counts = planned_counts(2580, [.06, .06, .06, .09, .09, .12, .12, .2, .2])
    assert counts[:8] == [155, 155, 155, 232, 232, 310, 310, 516]
    assert sum(counts) == 2580


def test_reference_is_identity():
    state, sched = _toy(5)
    before = state.all_units()
    for d in DECADES:
        state, changes = apply_decade(state, d, "reference", sched, RULES, CATALOG)
        assert changes == []
    assert state.all_units() == before


def test_decade_cannot_repeat():
    state, sched = _toy(5)
    state, _ = apply_decade(state, 2020, "low_density", sched, RULES, CATALOG)
    with pytest.raises(RedevelopmentError):
        apply_decade(state, 2020, "low_density", sched, RULES, CATALOG)


def test_assign_reference_identity():
    p = make_parcel("A", archetype="SF_S")
    assert assign_archetype(p, Development.REFERENCE, RULES) == ("SF_S", 1)


def test_assign_high_density_corridor_is_midrise():
    for lot in (400.0, 900.0, 1500.0, 3000.0):
        p = make_parcel("A", location="corridor", lot=lot)
        aid, _ = assign_archetype(p, "high_density", RULES)
        assert CATALOG[aid].stories >= 4 and CATALOG[aid].dwelling_class.value == "multi_family"


def test_assign_large_lot_subdivision():
    p = make_parcel("A", land_use="large_residential", lot=4000.0)
    aid, n = assign_archetype(p, "low_density", RULES)
    assert n == 2 and CATALOG[aid].dwelling_class.value == "single_family"


def test_assign_unmatched_names_parcel():
    p = make_parcel("Q1", location="tod", lot=500.0)
    with pytest.raises(RedevelopmentError, match="Q1.*small_residential.*tod.*500"):
        assign_archetype(p, "low_density", [r for r in RULES if r.location_class.value != "tod"])


def test_default_rules_tile_every_band():
    assert check_rules(RULES, CATALOG) == []
    broken = [r for r in RULES if not (r.lot_area_min == 1000 and r.location_class.value == "tod")]
    assert check_rules(broken, CATALOG)


def test_brentwood_high_density_adds_units(default_inputs):
    parcels = [p for p in default_inputs.parcels if p.neighborhood == "Brentwood"]
    state = NeighborhoodState.initial(parcels, CATALOG)
    assert state.unit_count == 4790
    for d in DECADES:
        state, _ = apply_decade(state, d, "high_density", default_inputs.schedule, RULES, CATALOG)
    assert state.unit_count > 4790


def test_new_units_carry_decade_vintage():
    fr = {d: 0.0 for d in DECADES}
    fr[2040] = 1.0
    state, sched = _toy(3, fr)
    for d in (2020, 2030, 2040):
        state, changes = apply_decade(state, d, "low_density", sched, RULES, CATALOG)
    assert {u.vintage for c in changes for u in c.added} == {2040}
    assert {u.vintage for c in changes for u in c.removed} == {1960}

import pytest

from urbanpath.domain import (
    DECADES,
    TIMELINE,
    Archetype,
    Catalog,
    DwellingClass,
    ScenarioSpec,
    default_catalog,
    occupants,
    validate_catalog,
)


def test_timeline():
    assert DECADES == (2020, 2030, 2040, 2050, 2060, 2070, 2080, 2090, 2100)
    assert len(TIMELINE) == 9
    assert TIMELINE.index(2050) == 3
    assert TIMELINE.year(8) == 2100
    assert TIMELINE.previous(2020) == 2010
    with pytest.raises(ValueError):
        TIMELINE.index(2055)
    with pytest.raises(IndexError):
        TIMELINE.year(9)


@pytest.mark.parametrize("units,people", [(1, 2.5), (0, 0.0), (4790, 11975.0)])
def test_occupants(units, people):
    assert occupants(units) == people


def test_default_catalog_validates():
    cat = default_catalog()
    assert validate_catalog(cat) == []
    assert "SF_M" in Catalog(cat)


def _arch(aid="SF1", cls=DwellingClass.SINGLE_FAMILY, units=1):
    return Archetype(aid, cls, units, 150.0, 1, 150.0, 100.0)


def test_duplicate_id_violation():
    report = validate_catalog([_arch(), _arch()])
    assert len(report) == 1 and "duplicate" in report[0]


def test_single_family_unit_count_violation():
    report = validate_catalog([_arch(units=2)])
    assert len(report) == 1 and "single_family" in report[0]


def test_zero_units_only_for_commercial_or_mixed():
    assert validate_catalog([_arch("C", DwellingClass.COMMERCIAL, 0)]) == []
    assert len(validate_catalog([_arch("M", DwellingClass.MULTI_FAMILY, 0)])) == 1


def test_scenario_label():
    spec = ScenarioSpec.make("A1B", "moderate", "low_density", "neutral", seed=3)
    assert spec.label == "A1B|moderate|low_density|neutral"
    with pytest.raises(ValueError):
        ScenarioSpec.make("A3")

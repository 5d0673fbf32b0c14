import pytest

from urbanpath.adoption.policy import (
    EconomicContext,
    PolicyContext,
    Tariffs,
    Tech,
    evaluate_benefit,
    fitc_rate,
    net_cost,
    rebate,
)


@pytest.mark.parametrize("year,policy,rate", [
    (2020, "supportive", 0.26), (2021, "supportive", 0.26), (2022, "supportive", 0.26),
    (2023, "supportive", 0.22), (2024, "supportive", 0.0), (2030, "neutral", 0.0),
    (2021, "neutral", 0.0),
])
def test_fitc(year, policy, rate):
    assert fitc_rate(year, policy) == rate


@pytest.mark.parametrize("tech,year,size,expected", [
    ("solar_pv", 2021, 2.0, 0.0), ("solar_pv", 2021, 2.5, 2500.0),
    ("solar_pv", 2022, 1.5, 2500.0), ("solar_pv", 2050, 1.1, 0.0),
    ("smart_thermostat", 2050, None, 110.0), ("high_eff_hvac", 2030, None, 2550.0),
    ("storage", 2030, None, 0.0),
])
def test_rebate_supportive(tech, year, size, expected):
    assert rebate(tech, year, size, "supportive") == expected


def test_rebate_neutral_is_zero():
    for t in Tech:
        assert rebate(t, 2022, 5.0, PolicyContext.of("neutral")) == 0.0


def test_benefit_examples():
    t = Tariffs(retail=0.12, feed_in=0.097)
    assert evaluate_benefit(500, True, t) == pytest.approx(48.50)
    assert evaluate_benefit(500, False, t) == pytest.approx(60.00)
    assert evaluate_benefit(0, False, t) == 0.0


def test_prices_decline_and_do_not_depend_on_policy():
    econ = EconomicContext(seed=4)
    assert econ.trend(Tech.SOLAR, 2050) < econ.trend(Tech.SOLAR, 2020)
    assert econ.trend(Tech.SOLAR, 2100) == pytest.approx(0.6 * 2800)
    assert EconomicContext(seed=4).price(Tech.SOLAR, 2031) == econ.price(Tech.SOLAR, 2031)
    assert EconomicContext(seed=5).price(Tech.SOLAR, 2031) != econ.price(Tech.SOLAR, 2031)
    assert econ.affordability_scale() == 2800 * 6


def test_net_cost_supportive_never_exceeds_neutral():
    econ = EconomicContext(seed=0)
    sup, neu = PolicyContext.of("supportive"), PolicyContext.of("neutral")
    for year in range(2020, 2101):
        for t in Tech:
            assert net_cost(t, year, 4.0, sup, econ) <= net_cost(t, year, 4.0, neu, econ)


def test_solar_net_cost_applies_fitc_then_rebate():
    econ = EconomicContext(volatility=0.0)
    cost = net_cost(Tech.SOLAR, 2020, 5.0, PolicyContext.of("supportive"), econ)
    assert cost == pytest.approx(2800 * 5 * 0.74 - 2500)

import pytest

from urbanpath.config import RunConfig, load_inputs
from urbanpath.domain import LandUseClass, LocationClass, Parcel

_acceptance: list[tuple[str, str, str]] = []


@pytest.fixture(scope="session")
def default_inputs():
    return load_inputs(RunConfig())


def make_parcel(pid, ilr=1.0, location="interior", land_use="small_residential",
                lot=800.0, archetype="SF_M", hood="Brentwood", year=1960, x=0.0, y=0.0,
                buildings=1):
    return Parcel(id=pid, neighborhood=hood, land_use_class=LandUseClass(land_use),
                  location_class=LocationClass(location), lot_area=lot, ilr=ilr,
                  year_built=year, current_archetype=archetype, x=x, y=y,
                  buildings=buildings)


# acceptance criteria get a one-line verdict each in the terminal summary

def pytest_runtest_logreport(report):
    if "test_acceptance.py" not in report.nodeid:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        detail = dict(report.user_properties).get("detail", "")
        name = report.nodeid.split("::")[-1]
        _acceptance.append((name, report.outcome.upper(), detail))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome, detail in _acceptance:
        verdict = "PASS" if outcome == "PASSED" else "FAIL"
        terminalreporter.write_line(f"{verdict}  {name}  {detail}")

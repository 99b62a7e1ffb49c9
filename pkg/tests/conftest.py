from __future__ import annotations

import pytest

from oscbound import catalog
from oscbound.error_budget import AgingSpec, OscillatorClass, OscillatorSpec, TemperatureModel
from oscbound.units import PPM, YEAR

# acceptance-criterion outcomes, filled by tests/test_acceptance.py
CRITERIA: dict[int, tuple[str, str, str]] = {}


def make_spec(
    y_temp_ppm: float = 0.5,
    y_age_ppm: float = 1.0,
    included: bool = False,
    x_min: float = -40.0,
    x_max: float = 85.0,
    model: str = "TEST",
    osc_class: OscillatorClass = OscillatorClass.TCXO,
    t_data: float = YEAR,
    **minor,
) -> OscillatorSpec:
    from oscbound.error_budget import MinorSources

    return OscillatorSpec(
        "ACME",
        model,
        osc_class,
        TemperatureModel.constant(y_temp_ppm * PPM, x_min, x_max),
        AgingSpec(y_age_ppm * PPM, t_data, included),
        MinorSources(**minor),
    )


@pytest.fixture
def tg5035():
    return catalog.lookup("TG-5035CJ").spec


@pytest.fixture
def all_entries():
    return catalog.embedded_catalog()


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(CRITERIA):
        status, title, detail = CRITERIA[n]
        line = f"criterion {n}: {status}  {title}"
        if detail:
            line += f"  [{detail}]"
        terminalreporter.write_line(line)

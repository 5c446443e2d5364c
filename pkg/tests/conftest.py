import os

from hypothesis import HealthCheck, settings

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("thorough", max_examples=400, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

import pytest
from hypothesis import strategies as st

from fbas.oracles import random_general_fbas, random_org_fbas, random_simple_fbas, random_symmetric_fbas

FAMILIES = {
    "general": lambda seed: random_general_fbas(seed, 1 + seed % 8),
    "simple": lambda seed: random_simple_fbas(seed, 1 + seed % 8),
    "symmetric": lambda seed: random_symmetric_fbas(seed, 8),
    "orgs": lambda seed: random_org_fbas(seed, 8),
}

seeds = st.integers(0, 2**32 - 1)


@pytest.fixture(params=sorted(FAMILIES))
def family(request):
    return FAMILIES[request.param]


# -- acceptance report ---------------------------------------------------------

_criteria = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    number, title = mark.args
    if rep.when == "call" or (rep.when == "setup" and rep.outcome != "passed"):
        _criteria[number] = (title, "PASS" if rep.passed else "FAIL", rep.duration)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        title, status, seconds = _criteria[number]
        terminalreporter.write_line(f"criterion {number:2d}: {status}  {title}  ({seconds:.1f} s)")

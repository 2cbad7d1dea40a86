import os
import sys

import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, os.path.dirname(__file__))

from phiflat.cakernel import Ideal, PolyRing  # noqa: E402
from phiflat.phiring import make_phi_ring  # noqa: E402

settings.register_profile(
    "phiflat",
    deadline=None,
    max_examples=25,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
    derandomize=True,
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "phiflat"))


@pytest.fixture
def R2():
    return PolyRing(("u", "v"))


@pytest.fixture
def R1():
    return PolyRing(("t",))


@pytest.fixture
def origin(R2):
    return make_phi_ring(R2, [Ideal(R2, [R2.parse("u"), R2.parse("v")])])


# -- acceptance summary: one line per criterion ------------------------------

_ACCEPTANCE = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion number")


@pytest.fixture
def note(request):
    """Attach a short detail string to the acceptance summary line."""

    def _note(text):
        request.node.user_properties.append(("detail", text))

    return _note


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    n = mark.args[0]
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        detail = "; ".join(v for k, v in item.user_properties if k == "detail")
        _ACCEPTANCE[n] = (rep.passed, item.name, detail)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for n in sorted(_ACCEPTANCE):
        ok, name, detail = _ACCEPTANCE[n]
        line = f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {name}"
        terminalreporter.write_line(line + (f"  ({detail})" if detail else ""))

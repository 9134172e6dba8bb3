import numpy as np
import pytest

from otlab import _accel

BACKENDS = ["numba", "numpy"] if _accel.HAVE_NUMBA else ["numpy"]


@pytest.fixture(params=BACKENDS)
def backend(request):
    old = _accel.set_backend(request.param)
    yield request.param
    _accel.set_backend(old)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# one PASS/FAIL line per acceptance criterion in the terminal summary

_acceptance: dict[str, tuple[str, str]] = {}


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.failed):
        return
    if "test_acceptance.py::" not in report.nodeid:
        return
    name = report.nodeid.split("::")[-1]
    doc = dict(report.user_properties).get("criterion", name)
    _acceptance[name] = ("PASS" if report.passed else "FAIL", doc)


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_acceptance):
        status, doc = _acceptance[name]
        terminalreporter.write_line(f"{status}  {doc}")

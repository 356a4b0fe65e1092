import numpy as np
import pytest

from hypofhr.core import Channel, ChannelKind, EventInterval, EventKind, TimeSpan


def ev(kind, start, end):
    return EventInterval(EventKind(kind), TimeSpan(start, end))


def spo2(values, rate=1.0, t0=0.0):
    return Channel(ChannelKind.SPO2, rate, t0, np.asarray(values, dtype=float))


def fhr(values, rate=4.0, t0=0.0):
    return Channel(ChannelKind.FHR, rate, t0, np.asarray(values, dtype=float))


@pytest.fixture
def make_event():
    return ev


# -- acceptance summary ------------------------------------------------------
# Tests marked ``acceptance(label)`` get one PASS/FAIL line in the terminal
# summary, in collection order.

_ACCEPTANCE: dict = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(label): acceptance criterion with a summary line")


def pytest_runtest_logreport(report):
    label = dict(report.user_properties).get("acceptance")
    if label is None:
        return
    prev = _ACCEPTANCE.get(label, "PASS")
    if report.failed:
        _ACCEPTANCE[label] = "FAIL"
    elif report.when == "call":
        _ACCEPTANCE[label] = prev if report.passed else "SKIP"
    else:
        _ACCEPTANCE.setdefault(label, prev)


@pytest.fixture(autouse=True)
def _acceptance_label(request):
    marker = request.node.get_closest_marker("acceptance")
    if marker is not None:
        request.node.user_properties.append(("acceptance", marker.args[0]))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for label, status in _ACCEPTANCE.items():
        terminalreporter.write_line(f"{status}  {label}")

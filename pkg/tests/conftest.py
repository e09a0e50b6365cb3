"""Shared fixtures and the per-criterion acceptance report."""
from __future__ import annotations

from collections import OrderedDict

import pytest
from hypothesis import settings

from qlommel.qcore import QContext

settings.register_profile("qlommel", max_examples=25, deadline=None)
settings.load_profile("qlommel")

_CRITERIA: "OrderedDict[int, dict]" = OrderedDict()


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion covered by a test")


def pytest_collection_modifyitems(items):
    for item in items:
        mark = item.get_closest_marker("criterion")
        if mark is not None:
            num, title = mark.args
            entry = _CRITERIA.setdefault(num, {"title": title, "outcomes": []})
            entry.setdefault("ids", []).append(item.nodeid)


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    for entry in _CRITERIA.values():
        if report.nodeid in entry.get("ids", []):
            entry["outcomes"].append(report.outcome)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_CRITERIA):
        entry = _CRITERIA[num]
        outcomes = entry["outcomes"]
        if not outcomes:
            status = "NOT RUN"
        elif all(o == "passed" for o in outcomes):
            status = "PASS"
        else:
            status = "FAIL"
        terminalreporter.write_line(f"criterion {num:2d}: {status:7s} {entry['title']}")


@pytest.fixture(scope="session")
def ctx07():
    return QContext(q="0.5", a="0.7")


@pytest.fixture(scope="session")
def ctx14():
    return QContext(q="0.5", a="1.4")


@pytest.fixture(scope="session")
def ctx1():
    return QContext(q="0.5", a=1)

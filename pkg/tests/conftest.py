"""Shared test plumbing: per-criterion summary lines for the release gate."""

import re

import pytest

_results: dict[int, bool] = {}
_details: dict[int, str] = {}


def _record_detail(n: int, text: str):
    _details[n] = text


@pytest.fixture
def note():
    """Lets an acceptance test attach a measured-values line to its verdict."""
    return _record_detail


def pytest_runtest_logreport(report):
    if report.when != "call":
        return
    m = re.search(r"test_acceptance\.py::test_criterion_(\d+)", report.nodeid)
    if m:
        _results[int(m.group(1))] = report.passed


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_results):
        verdict = "PASS" if _results[n] else "FAIL"
        extra = _details.get(n, "")
        terminalreporter.write_line(
            f"criterion {n:2d}: {verdict}" + (f" - {extra}" if extra else ""))

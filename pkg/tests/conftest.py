"""Collects acceptance outcomes and prints one line per criterion."""

import pytest

_RESULTS: dict[int, tuple[str, str]] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    number, name = marker.args
    failed = report.failed or (report.when == "call" and report.skipped)
    if report.when == "call" or failed:
        prev = _RESULTS.get(number, ("PASS", name))[0]
        status = "FAIL" if failed or prev == "FAIL" else "PASS"
        _RESULTS[number] = (status, name)


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_RESULTS):
        status, name = _RESULTS[number]
        terminalreporter.write_line(f"criterion {number}: {status}  {name}")

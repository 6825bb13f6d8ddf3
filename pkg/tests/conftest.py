from datetime import datetime, timezone

import pytest

UTC = timezone.utc
_CRITERIA = {}


@pytest.fixture
def criterion(request):
    """Register the acceptance criterion a test checks; outcome is reported at session end."""

    def register(number, text):
        _CRITERIA.setdefault(number, {"text": text, "nodes": []})["nodes"].append(request.node.nodeid)

    return register


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.skipped):
        return
    for entry in _CRITERIA.values():
        if report.nodeid in entry["nodes"]:
            entry.setdefault("outcomes", []).append(report.outcome)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        entry = _CRITERIA[number]
        outcomes = entry.get("outcomes", [])
        if outcomes and all(o == "passed" for o in outcomes):
            mark = "PASS"
        elif outcomes and all(o in ("passed", "skipped") for o in outcomes):
            mark = "SKIP"
        else:
            mark = "FAIL"
        terminalreporter.write_line(f"criterion {number:>2}: {mark}  {entry['text']}")


@pytest.fixture
def year_window():
    from repo_stability import AnalysisWindow

    return AnalysisWindow(datetime(2020, 1, 1, tzinfo=UTC), datetime(2021, 1, 1, tzinfo=UTC))

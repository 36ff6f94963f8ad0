"""Collects acceptance-criterion outcomes and prints one line per criterion."""

import pytest

_CRITERIA: dict[int, dict] = {}


@pytest.fixture
def measured(request):
    """Attach a short ``key=value`` note to the criterion line of the calling test."""
    marker = request.node.get_closest_marker("criterion")

    def note(text: str) -> None:
        if marker is not None:
            _CRITERIA.setdefault(marker.args[0], _entry(marker))["notes"].append(text)

    return note


def _entry(marker):
    return {"title": marker.args[1], "passed": 0, "failed": 0, "skipped": 0, "notes": []}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    entry = _CRITERIA.setdefault(marker.args[0], _entry(marker))
    if rep.failed:
        entry["failed"] += 1
    elif rep.skipped:
        entry["skipped"] += 1
    elif rep.when == "call":
        entry["passed"] += 1


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    tr = terminalreporter
    tr.write_sep("=", "acceptance criteria")
    for num in sorted(_CRITERIA):
        e = _CRITERIA[num]
        if e["failed"]:
            status = "FAIL"
        elif e["skipped"] or not e["passed"]:
            status = "SKIP"
        else:
            status = "PASS"
        notes = f"  [{', '.join(e['notes'])}]" if e["notes"] else ""
        tr.write_line(f"criterion {num:2d}  {status}  {e['title']}{notes}", red=status == "FAIL", green=status == "PASS")

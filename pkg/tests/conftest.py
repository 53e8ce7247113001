import pytest

_CRITERIA: dict[int, dict] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion checked by this test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    number, title = marker.args
    entry = _CRITERIA.setdefault(number, {"title": title, "status": "PASS", "detail": ""})
    measured = [str(v) for k, v in report.user_properties if k == "measured"]
    if report.when == "call" and report.passed and measured and entry["status"] == "PASS":
        entry["detail"] = "; ".join(filter(None, [entry["detail"]] + measured))
    if report.skipped and entry["status"] == "PASS":
        entry["status"] = "SKIP"
        entry["detail"] = report.longrepr[2] if isinstance(report.longrepr, tuple) else str(report.longrepr)
    elif report.failed:
        entry["status"] = "FAIL"
        lines = [ln[1:].strip() for ln in report.longreprtext.splitlines() if ln.startswith("E ")]
        entry["detail"] = (lines[0] if lines else report.longreprtext.strip().splitlines()[-1])[:200]


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        entry = _CRITERIA[number]
        line = f"criterion {number:>2} {entry['status']:<4} {entry['title']}"
        if entry["detail"]:
            line += f"  [{entry['detail']}]"
        terminalreporter.write_line(line)

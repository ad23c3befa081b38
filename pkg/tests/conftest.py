import re

_CRITERIA = {}


def pytest_runtest_logreport(report):
    m = re.search(r"test_acceptance\.py::test_criterion_(\d+)_(\w+)", report.nodeid)
    if not m:
        return
    if report.when == "call" or (report.when == "setup" and not report.passed):
        detail = dict(report.user_properties).get("detail", "")
        _CRITERIA[int(m.group(1))] = (m.group(2), report.passed, report.duration, detail)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for num in sorted(_CRITERIA):
        name, ok, secs, detail = _CRITERIA[num]
        tr.write_line(f"criterion {num:2d} {'PASS' if ok else 'FAIL'}  {name} ({secs:.1f}s) {detail}".rstrip())

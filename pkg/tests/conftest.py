import os
import re
import sys

sys.path.insert(0, os.path.dirname(__file__))

_verdicts = {}


def pytest_runtest_logreport(report):
    m = re.search(r"test_acceptance\.py::test_c(\d+)_", report.nodeid)
    if not m or not (report.when == "call" or report.failed):
        return
    detail = dict(report.user_properties).get("detail", "")
    status = "PASS" if report.passed else "FAIL"
    if report.when != "call":
        status = "ERROR"
    _verdicts[int(m.group(1))] = (status, detail)


def pytest_terminal_summary(terminalreporter):
    if not _verdicts:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_verdicts):
        status, detail = _verdicts[n]
        terminalreporter.write_line(f"criterion {n:2d}: {status:5s} {detail}")

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

_verdicts = {}


def pytest_runtest_logreport(report):
    if report.when != "call":
        return
    for name, value in report.user_properties:
        if name == "criterion":
            _verdicts[value[0]] = (report.outcome == "passed", value[1])


def pytest_terminal_summary(terminalreporter):
    if not _verdicts:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_verdicts, key=lambda k: int(k[1:])):
        ok, detail = _verdicts[key]
        terminalreporter.write_line(f"{key:>4} {'PASS' if ok else 'FAIL'}  {detail}")

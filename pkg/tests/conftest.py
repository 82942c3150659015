import sys
from pathlib import Path

from hypothesis import settings

sys.path.insert(0, str(Path(__file__).resolve().parent))

# fixed example streams keep the suite reproducible and its runtime predictable
settings.register_profile("repo", derandomize=True, deadline=None)
settings.load_profile("repo")

_CRITERIA: dict[int, list] = {}


def pytest_runtest_logreport(report):
    name = report.nodeid.split("::")[-1]
    if not name.startswith("test_criterion_"):
        return
    if report.when != "call" and not report.failed:
        return
    k = int(name.split("_")[2])
    detail = dict(report.user_properties).get("detail", "")
    ok, _ = _CRITERIA.get(k, (True, ""))
    _CRITERIA[k] = [ok and report.passed, detail or _CRITERIA.get(k, (None, ""))[1]]


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(_CRITERIA):
        ok, detail = _CRITERIA[k]
        terminalreporter.write_line(f"criterion {k}: {'PASS' if ok else 'FAIL'}  {detail}")

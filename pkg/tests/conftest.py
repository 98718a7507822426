import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

_criteria = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    number, title = mark.args
    entry = _criteria.setdefault(number, {"title": title, "ok": True, "seen": False, "detail": ""})
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        entry["seen"] = True
        if not rep.passed:
            entry["ok"] = False
            if rep.longrepr is not None:
                entry["detail"] = str(rep.longrepr).strip().splitlines()[-1][:160]


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for number in sorted(_criteria):
        e = _criteria[number]
        if not e["seen"]:
            status = "SKIP"
        else:
            status = "PASS" if e["ok"] else "FAIL"
        line = f"[{status}] criterion {number:2d}: {e['title']}"
        if status == "FAIL" and e["detail"]:
            line += f"  ({e['detail']})"
        tr.write_line(line)

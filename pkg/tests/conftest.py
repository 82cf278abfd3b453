import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))  # for the sympy oracle module

_criteria: dict = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    num, title = mark.args
    entry = _criteria.setdefault(num, {"title": title, "ok": True, "why": ""})
    if rep.failed or (rep.when == "call" and rep.skipped):
        entry["ok"] = False
        if not entry["why"] and rep.longrepr is not None:
            entry["why"] = str(getattr(rep.longrepr, "reprcrash", None) and rep.longrepr.reprcrash.message
                               or rep.longrepr).splitlines()[0][:120]


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_criteria):
        e = _criteria[num]
        line = f"criterion {num:2d} {'PASS' if e['ok'] else 'FAIL'}  {e['title']}"
        if not e["ok"] and e["why"]:
            line += f"  ({e['why']})"
        terminalreporter.write_line(line)

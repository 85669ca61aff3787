"""Shared pytest glue: surface the acceptance scorecard after the run."""

import sys


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    for name in ("test_acceptance", "tests.test_acceptance"):
        mod = sys.modules.get(name)
        if mod is not None:
            break
    else:
        return
    lines = getattr(mod, "SCORECARD", [])
    if lines:
        terminalreporter.section("acceptance scorecard")
        for line in lines:
            terminalreporter.write_line(line)

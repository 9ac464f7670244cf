"""Shared pytest hooks: surface the acceptance PASS lines on the terminal
summary even under captured output."""

import _acceptance_log


def pytest_terminal_summary(terminalreporter):
    if _acceptance_log.LINES:
        terminalreporter.section("acceptance criteria")
        for line in _acceptance_log.LINES:
            terminalreporter.write_line(line)

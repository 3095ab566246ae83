"""Shared pytest configuration.

Acceptance tests register their outcome in ``ACCEPTANCE``; the terminal
summary prints one PASS/FAIL line per criterion.
"""

ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE):
        ok, desc, detail = ACCEPTANCE[key]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  criterion {key:2d}: {desc}  [{detail}]")

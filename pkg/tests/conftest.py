import sys


def pytest_terminal_summary(terminalreporter):
    """Echo the acceptance-criteria verdict lines after capture is released."""
    for name in ("test_acceptance", "tests.test_acceptance"):
        module = sys.modules.get(name)
        lines = getattr(module, "REPORT_LINES", None)
        if lines:
            terminalreporter.section("acceptance criteria")
            for line in lines:
                terminalreporter.write_line(line)
            return

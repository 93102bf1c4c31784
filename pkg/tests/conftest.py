def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """Echo the per-criterion acceptance lines after the test report."""
    try:
        from test_acceptance import ACCEPTANCE_LINES
    except Exception:
        return
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)

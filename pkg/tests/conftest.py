import _criteria


def pytest_terminal_summary(terminalreporter):
    if not _criteria.RESULTS:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for k in sorted(_criteria.RESULTS):
        terminalreporter.write_line(_criteria.line(k))

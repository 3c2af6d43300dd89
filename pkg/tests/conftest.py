import logging


def pytest_configure(config):
    # energy warnings from deliberately unstable runs are expected noise
    logging.getLogger("congestfv").setLevel(logging.ERROR)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import LINES
    except ImportError:
        return
    if LINES:
        terminalreporter.section("acceptance criteria")
        for k in sorted(LINES):
            terminalreporter.write_line(LINES[k])

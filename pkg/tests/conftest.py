import pytest
from hypothesis import settings

from irsnoma.model import table1_scenario

settings.register_profile("default", deadline=None, max_examples=200)
settings.load_profile("default")

# filled by test_acceptance.report(); printed after the run
ACCEPTANCE_LINES = []


@pytest.fixture
def table1():
    return table1_scenario(0.0)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":").lstrip("AC"))):
        terminalreporter.write_line(line)

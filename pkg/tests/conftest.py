import pytest

from motionsnn import assemble_network, tessellate

# Filled by tests/test_acceptance.py; shown after the run so the checklist
# survives output capture.
acceptance_lines: list[str] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in acceptance_lines:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def default_layout():
    return tessellate(10, 11)


@pytest.fixture(scope="session")
def default_net(default_layout):
    return assemble_network(default_layout)

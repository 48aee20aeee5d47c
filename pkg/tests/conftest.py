import sys
from pathlib import Path

import pytest

from fpplab import kernels

sys.path.insert(0, str(Path(__file__).parent))


@pytest.fixture(params=sorted(kernels.backends()))
def backend(request):
    """Each available kernel module in turn (compiled and pure Python)."""
    return kernels.backends()[request.param]


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.__dict__.get("acceptance_lines")
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda l: int(l.split()[1][1:])):
            terminalreporter.write_line(line)

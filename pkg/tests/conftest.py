import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from hplab.numtheory import build_table  # noqa: E402


@pytest.fixture(scope="session")
def table_small():
    return build_table(10**4)


@pytest.fixture(scope="session")
def table():
    """Covers ``W n + b`` for ``w <= 3`` and ``n`` a bit beyond ``10^5``."""
    return build_table(3_300_000)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split("criterion")[1].split(":")[0])):
            terminalreporter.write_line(line)

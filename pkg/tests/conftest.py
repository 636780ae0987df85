import sys
from importlib import resources
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))
sys.setrecursionlimit(max(sys.getrecursionlimit(), 20000))

STDLIB = Path(str(resources.files("pqr").joinpath("stdlib")))
STDLIB_FILES = sorted(STDLIB.glob("*.pqr"))
GOLDEN = Path(__file__).parent / "golden"


@pytest.fixture
def stdlib():
    from pqr.parser import parse

    def load(name: str):
        return parse((STDLIB / f"{name}.pqr").read_text())
    return load


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    if module is None or not module.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in module.summary_lines():
        terminalreporter.write_line(line)

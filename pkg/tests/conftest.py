from pathlib import Path

import pytest

CORPUS = Path(__file__).resolve().parents[1] / "src" / "simploc" / "corpus"


@pytest.fixture
def corpus():
    return CORPUS


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", [])
    if lines:
        terminalreporter.section("acceptance")
        for line in lines:
            terminalreporter.write_line(line)

import sys
from pathlib import Path

import pytest

from orbigpd import fixture_path
from orbigpd.scenario import parse_scenario

sys.path.insert(0, str(Path(__file__).parent))


def load(name):
    return parse_scenario(fixture_path(name).read_text(encoding="utf-8"))


@pytest.fixture(scope="session")
def d2():
    return load("d2_circle.json")


@pytest.fixture(scope="session")
def s3():
    return load("s3_hexagon.json")


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.summary_lines():
        terminalreporter.write_line(line)

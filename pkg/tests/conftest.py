import sys
from pathlib import Path

import pytest

from gramnoise.m2stats import ErrorCounts, build_confusion_matrices, learn_from_m2

TESTS = Path(__file__).parent
DATA = TESTS / "data"
sys.path.insert(0, str(TESTS))


def read_lines(path):
    return Path(path).read_text(encoding="utf-8").splitlines()


@pytest.fixture(scope="session")
def data_dir():
    return DATA


@pytest.fixture(scope="session")
def fixture_matrices():
    return learn_from_m2(read_lines(DATA / "learner_sample.m2"))


@pytest.fixture(scope="session")
def uniform_matrices():
    return build_confusion_matrices(ErrorCounts())


@pytest.fixture(scope="session")
def table3():
    return read_lines(DATA / "table3.txt"), read_lines(DATA / "table3.ptb")


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    results = getattr(module, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in results:
        terminalreporter.write_line(line)

import pytest

from cosmash.algebra import subobject_generate, whole
from cosmash.catalog import resolve

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def S3():
    return resolve("S3")


@pytest.fixture(scope="session")
def A3(S3):
    return subobject_generate(S3, [S3.index("(123)")])


@pytest.fixture(scope="session")
def M8():
    return resolve("M8")


@pytest.fixture(scope="session")
def A(M8):
    return subobject_generate(M8, [M8.index("j"), M8.index("-1")])


@pytest.fixture(scope="session")
def W():
    return whole


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)

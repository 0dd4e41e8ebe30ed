from pathlib import Path

import pytest

from prodbg.harness import load_suite
from prodbg.parser import parse_program

FIXTURES = Path(__file__).parent / "fixtures"
PROGRAMS = FIXTURES / "programs"

# correct program -> its suite file
CORPUS = {
    "duplicate": "duplicate", "family": "family", "len": "len", "sum": "sum", "maxl": "maxl",
    "rev": "rev", "count": "count", "isort": "isort", "last": "last", "evens": "evens",
}


def load_program(name: str):
    return parse_program((PROGRAMS / f"{name}.pl").read_text(encoding="utf-8"))


def load_tests(name: str):
    return load_suite(PROGRAMS / f"{name}.tests")


@pytest.fixture
def buggy_duplicate():
    return load_program("duplicate_buggy")


@pytest.fixture
def fixed_duplicate():
    return load_program("duplicate")


@pytest.fixture
def duplicate_suite():
    return load_tests("duplicate")


@pytest.fixture
def family():
    return load_program("family")

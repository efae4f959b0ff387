import logging
from pathlib import Path

import pytest

from stablecount import parse_program

DATA = Path(__file__).parent / "data"


def load(name):
    return parse_program((DATA / name).read_text())


def lits(p, text):
    """``"a,-b"`` -> literal list of ``p``."""
    return [p.lit(t) for t in text.split(",") if t.strip()]


@pytest.fixture
def p1():
    return load("p1.lp")


@pytest.fixture
def p2():
    return load("p2.lp")


@pytest.fixture
def ex2():
    return load("ex2.lp")


@pytest.fixture
def f1():
    return load("f1.lp")


@pytest.fixture
def f2():
    return load("f2.lp")


@pytest.fixture(autouse=True)
def _quiet_warnings(caplog):
    caplog.set_level(logging.ERROR)

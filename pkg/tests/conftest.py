import pathlib

import pytest

from qtbs import parse_network

FIXTURES = pathlib.Path(__file__).resolve().parent.parent / "fixtures"


def load(name):
    return parse_network(FIXTURES.joinpath(name).read_text())


@pytest.fixture
def b4():
    return load("b4.json")


@pytest.fixture
def fat_tree():
    return load("fat_tree.json")


@pytest.fixture
def shaping():
    return load("shaping.json")


@pytest.fixture
def chain():
    return load("chain.json")


@pytest.fixture
def ladder():
    return load("ladder.json")


@pytest.fixture
def single_link():
    return load("single_link.json")

import pathlib

import pytest

from realchip import RealGraph, example1, example2, plain_banana, plain_cycle, validate

FIXTURES = pathlib.Path(__file__).parent / "fixtures"


@pytest.fixture
def fixtures_dir() -> pathlib.Path:
    return FIXTURES


@pytest.fixture
def square_antipodal() -> RealGraph:
    """4-cycle with the antipodal involution: no real vertices, no fixed
    edges, two conjugate vertex pairs."""
    return validate(
        ["n0", "n1", "n2", "n3"],
        {"a": ("n0", "n1"), "b": ("n1", "n2"), "c": ("n2", "n3"), "d": ("n3", "n0")},
        {"n0": "n2", "n1": "n3", "n2": "n0", "n3": "n1"},
        {"a": "c", "b": "d", "c": "a", "d": "b"},
    )


@pytest.fixture
def conjugate_pair_bridge() -> RealGraph:
    """Two conjugate vertices joined by one fixed edge: the smallest graph
    with an isolated real edge."""
    return validate(["p", "q"], {"e": ("p", "q")}, {"p": "q", "q": "p"}, {"e": "e"})


@pytest.fixture
def theta_identity() -> RealGraph:
    """Two vertices, three parallel edges, identity involution."""
    return plain_banana(3)


@pytest.fixture
def triangle() -> RealGraph:
    return plain_cycle(3)


@pytest.fixture
def strict_gap_graph() -> RealGraph:
    """Genus two graph on which some point has real rank strictly above
    its ordinary rank."""
    return example2(plain_cycle(3), "v0")[0]


@pytest.fixture
def m_graph_g2() -> RealGraph:
    return example1(2, 3, 0)

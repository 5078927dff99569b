import pytest

from helpers import build_net


@pytest.fixture
def line_net():
    """Two nodes joined by one 10 m arc."""
    return build_net([("u", 0.0, 0.0), ("v", 10.0, 0.0)],
                     [("a1", "u", "v", 10.0)])


@pytest.fixture
def parallel_net():
    """Two parallel u->v arcs (5 m and 7 m) plus a reverse arc."""
    return build_net(
        [("u", 0.0, 0.0), ("v", 10.0, 0.0)],
        [("a1", "u", "v", 5.0), ("a2", "u", "v", 7.0), ("r1", "v", "u", 6.0)])


@pytest.fixture
def triangle_net():
    """Direct s->d arc plus a two-hop alternative via m."""
    return build_net(
        [("s", 0.0, 0.0), ("m", 5.0, 5.0), ("d", 10.0, 0.0)],
        [("sd", "s", "d", 10.0), ("sm", "s", "m", 8.0), ("md", "m", "d", 8.0)])


@pytest.fixture
def diamond_net():
    """Two disjoint A->D paths: A->B->D and A->C->D."""
    return build_net(
        [("A", 0.0, 0.0), ("B", 100.0, 0.0), ("C", 0.0, 60.0), ("D", 100.0, 60.0)],
        [("ab", "A", "B", 100.0), ("bd", "B", "D", 60.0),
         ("ac", "A", "C", 60.0), ("cd", "C", "D", 100.0)])

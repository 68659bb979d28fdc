import pytest

from rrgather import generators as G
from rrgather.graph import Graph


@pytest.fixture
def k32() -> Graph:
    return G.complete_bipartite(3, 2)


@pytest.fixture
def h213() -> Graph:
    return G.h_family(G.named_graph("2K1"), G.complete(1), 3)


@pytest.fixture
def bf2() -> Graph:
    return G.butterfly(2)

import sys
from pathlib import Path

import pytest

from leavitt import catalog
from leavitt.graph import Edge, Vertex

sys.path.insert(0, str(Path(__file__).parent))

DATA = Path(__file__).resolve().parent.parent / "data"


@pytest.fixture
def t2():
    return catalog.two_edges()


@pytest.fixture
def clock():
    return catalog.clock()


@pytest.fixture
def loop_exit():
    return catalog.loop_with_exit()


@pytest.fixture
def loop():
    return catalog.single_loop()


@pytest.fixture
def emitter():
    return catalog.loop_emitter()


@pytest.fixture
def emitter_split():
    return catalog.loop_emitter_split()


def V(name, index=0):
    return Vertex(name, index)


def E(name, index=0):
    return Edge(name, index)

"""Small graphs used throughout the tests and demos."""
from __future__ import annotations

from .graph import Const, Diagonal, Edge, EdgeFamily, Graph, Vertex
from .monoid import Summand


def two_edges() -> Graph:
    """a with two parallel edges x, y to the sink b."""
    a, b = Vertex("a"), Vertex("b")
    return Graph({"a", "b"}, (), {"x": (a, b), "y": (a, b)})


def clock() -> Graph:
    """v with edges e[n] to the sinks w[n], n >= 1."""
    return Graph({"v"}, {"w"}, {}, [EdgeFamily("e", Const(Vertex("v")), Diagonal("w"))])


def loop_with_exit() -> Graph:
    """u with a loop c and an exit d to the sink z."""
    u, z = Vertex("u"), Vertex("z")
    return Graph({"u", "z"}, (), {"c": (u, u), "d": (u, z)})


def single_loop() -> Graph:
    u = Vertex("u")
    return Graph({"u"}, (), {"c": (u, u)})


def loop_emitter() -> Graph:
    """v with a loop e, infinitely many edges f[n] to w, and infinitely many
    edges g[n] from w to u."""
    v, w, u = Vertex("v"), Vertex("w"), Vertex("u")
    return Graph({"v", "w", "u"}, (), {"e": (v, v)},
                 [EdgeFamily("f", Const(v), Const(w)), EdgeFamily("g", Const(w), Const(u))])


def loop_emitter_split() -> Graph:
    """loop_emitter with v split along {e, f[1]} and its complement, built by hand."""
    v1, v2, w, u = Vertex("v1"), Vertex("v2"), Vertex("w"), Vertex("u")
    return Graph({"v1", "v2", "w", "u"}, (),
                 {"e1": (v1, v1), "e2": (v1, v2)},
                 [EdgeFamily("f", Const(v2), Const(w), ((1, v1),)),
                  EdgeFamily("g", Const(w), Const(u))])


def loop_emitter_spec() -> list[Summand]:
    v = Vertex("v")
    return [Summand(v, (Edge("e"),), 1), Summand(v, (Edge("f", 1),), 1)]


ALL = {
    "t2": two_edges,
    "clock": clock,
    "loop_exit": loop_with_exit,
    "loop": single_loop,
    "emitter": loop_emitter,
    "emitter_split": loop_emitter_split,
}

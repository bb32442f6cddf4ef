"""The graph monoid: generators, one-step reductions and a bounded
common-reduct search, plus normalization of projective-module presentations.

Generators are vertices and ``q(v; Z)`` for an infinite emitter ``v`` and a
nonempty finite set ``Z`` of its out-edges.  The three relation families are
only ever applied left to right (towards larger elements), so the search is a
semi-decision: it can confirm equivalence but never refute it.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Mapping, Union

from .graph import Edge, Graph, GraphError, Vertex, VertexClass


class MonoidError(GraphError):
    pass


@dataclass(frozen=True, order=True)
class Q:
    """The generator q(v; Z)."""
    vertex: Vertex
    edges: tuple[Edge, ...]

    def __post_init__(self):
        object.__setattr__(self, "edges", tuple(sorted(set(self.edges))))
        if not self.edges:
            raise MonoidError("q-generator needs a nonempty edge set")

    def __str__(self):
        return f"q({self.vertex};{{{', '.join(str(e) for e in self.edges)}}})"


Generator = Union[Vertex, Q]


def _gen_key(x: Generator):
    if isinstance(x, Vertex):
        return (0, x, ())
    return (1, x.vertex, x.edges)


@dataclass(frozen=True)
class MonoidElement:
    """Finite multiset of generators, stored as a sorted (generator, count) tuple."""
    items: tuple[tuple[Generator, int], ...] = ()

    @classmethod
    def of(cls, counts: Mapping[Generator, int] | Iterable[Generator]) -> "MonoidElement":
        c = Counter(counts)
        return cls(tuple(sorted(((g, n) for g, n in c.items() if n > 0), key=lambda t: _gen_key(t[0]))))

    def counter(self) -> Counter:
        return Counter(dict(self.items))

    def __add__(self, other: "MonoidElement") -> "MonoidElement":
        return MonoidElement.of(self.counter() + other.counter())

    def __rmul__(self, n: int) -> "MonoidElement":
        return MonoidElement.of({g: n * k for g, k in self.items})

    def __len__(self):
        return sum(n for _, n in self.items)

    def __str__(self):
        if not self.items:
            return "0"
        return " + ".join(str(g) if n == 1 else f"{n}*{g}" for g, n in self.items)

    def __repr__(self):
        return f"MonoidElement({str(self)!r})"


Universe = Mapping[Vertex, frozenset]


def check_element(g: Graph, x: MonoidElement) -> None:
    for gen, _ in x.items:
        if isinstance(gen, Vertex):
            if not g.has_vertex(gen):
                raise MonoidError(f"unknown vertex {gen}")
            continue
        if g.classify(gen.vertex) is not VertexClass.INFINITE_EMITTER:
            raise MonoidError(f"{gen}: {gen.vertex} is not an infinite emitter")
        for e in gen.edges:
            if not g.emits(gen.vertex, e):
                raise MonoidError(f"{gen}: {e} is not an out-edge of {gen.vertex}")


def default_universe(g: Graph, *elements: MonoidElement,
                     extras: Mapping[Vertex, Iterable[Edge]] | None = None) -> dict[Vertex, frozenset]:
    """Edges mentioned by q-generators, per infinite emitter, plus extras."""
    uni: dict[Vertex, set] = {}
    for x in elements:
        for gen, _ in x.items:
            if isinstance(gen, Q):
                uni.setdefault(gen.vertex, set()).update(gen.edges)
            elif g.classify(gen) is VertexClass.INFINITE_EMITTER:
                uni.setdefault(gen, set())
    for v, es in (extras or {}).items():
        uni.setdefault(v, set()).update(es)
    return {v: frozenset(es) for v, es in uni.items()}


def _ranges(g: Graph, edges: Iterable[Edge]) -> Counter:
    return Counter(g.range(e) for e in edges)


def reduce_once(g: Graph, x: MonoidElement, universe: Universe) -> list[MonoidElement]:
    """All one-step successors of x under the three relation families."""
    base = x.counter()
    out = set()
    for gen, _ in x.items:
        rest = base.copy()
        rest[gen] -= 1
        if isinstance(gen, Vertex):
            cls = g.classify(gen)
            if cls is VertexClass.REGULAR:
                out.add(MonoidElement.of(rest + _ranges(g, g.out_edges(gen))))
            elif cls is VertexClass.INFINITE_EMITTER:
                uni = sorted(universe.get(gen, ()))
                for k in range(1, len(uni) + 1):
                    for Z in combinations(uni, k):
                        out.add(MonoidElement.of(rest + _ranges(g, Z) + Counter({Q(gen, Z): 1})))
        else:
            uni = universe.get(gen.vertex, frozenset())
            if not set(gen.edges) <= uni:
                raise MonoidError(f"{gen} mentions edges outside the universe")
            spare = sorted(uni - set(gen.edges))
            for k in range(1, len(spare) + 1):
                for extra in combinations(spare, k):
                    W = gen.edges + extra
                    out.add(MonoidElement.of(rest + _ranges(g, extra) + Counter({Q(gen.vertex, W): 1})))
    return sorted(out, key=_elem_key)


def _elem_key(x: MonoidElement):
    return (len(x), [(_gen_key(g), n) for g, n in x.items])


@dataclass(frozen=True)
class Verdict:
    """Outcome of the bounded search.  ``witness`` holds the two reduction
    chains x -> ... -> z and y -> ... -> z when the answer is Yes."""
    answer: str
    witness: tuple[tuple[MonoidElement, ...], tuple[MonoidElement, ...]] | None = None
    explored: int = 0

    def __bool__(self):
        return self.answer == "Yes"

    @property
    def meeting_point(self) -> MonoidElement | None:
        return self.witness[0][-1] if self.witness else None


def _chain(parents: dict, z: MonoidElement) -> tuple[MonoidElement, ...]:
    out = [z]
    while parents[out[-1]] is not None:
        out.append(parents[out[-1]])
    return tuple(reversed(out))


def equivalent(g: Graph, x: MonoidElement, y: MonoidElement, depth: int,
               universe: Universe | None = None, max_states: int = 50_000) -> Verdict:
    """Search for a common reduct of x and y, each side reduced at most
    ``depth`` times.  Returns Yes with a witness, otherwise Unknown."""
    check_element(g, x)
    check_element(g, y)
    if universe is None:
        universe = default_universe(g, x, y)
    sides = [({x: None}, [x]), ({y: None}, [y])]
    if x == y:
        return Verdict("Yes", ((x,), (y,)), 1)
    for _ in range(depth):
        for i, (parents, frontier) in enumerate(sides):
            other = sides[1 - i][0]
            nxt = []
            for node in frontier:
                for succ in reduce_once(g, node, universe):
                    if succ in parents:
                        continue
                    parents[succ] = node
                    nxt.append(succ)
                    if succ in other:
                        cx = _chain(sides[0][0], succ)
                        cy = _chain(sides[1][0], succ)
                        return Verdict("Yes", (cx, cy), len(sides[0][0]) + len(sides[1][0]))
                if len(parents) > max_states:
                    return Verdict("Unknown", None, len(sides[0][0]) + len(sides[1][0]))
            sides[i] = (parents, nxt)
    return Verdict("Unknown", None, len(sides[0][0]) + len(sides[1][0]))


def replay_witness(g: Graph, verdict: Verdict, universe: Universe) -> bool:
    """Re-check that every step of a Yes witness is a single reduction."""
    if not verdict.witness:
        return False
    cx, cy = verdict.witness
    if cx[-1] != cy[-1]:
        return False
    for chain in (cx, cy):
        for a, b in zip(chain, chain[1:]):
            if b not in reduce_once(g, a, universe):
                return False
    return True


def relation_difference(a: MonoidElement, b: MonoidElement) -> tuple[Counter, Counter]:
    """Generators removed from a and added in b."""
    ca, cb = a.counter(), b.counter()
    return ca - cb, cb - ca


# -- projective presentations ---------------------------------------------------------

@dataclass(frozen=True, order=True)
class Summand:
    """n copies of L(v - sum_{e in T} e e*)."""
    vertex: Vertex
    edges: tuple[Edge, ...] = ()
    mult: int = 1

    def __post_init__(self):
        object.__setattr__(self, "edges", tuple(sorted(set(self.edges))))
        if self.mult < 1:
            raise MonoidError("multiplicity must be positive")

    def __str__(self):
        return f"({self.vertex}, {{{', '.join(str(e) for e in self.edges)}}}, {self.mult})"


ProjectiveSpec = tuple[Summand, ...]


def validate_spec(g: Graph, spec: Iterable[Summand]) -> None:
    spec = list(spec)
    if not spec:
        raise MonoidError("empty projective presentation")
    for s in spec:
        if not g.has_vertex(s.vertex):
            raise MonoidError(f"unknown vertex {s.vertex}")
        if s.edges and g.classify(s.vertex) is not VertexClass.INFINITE_EMITTER:
            raise MonoidError(f"{s}: nonempty edge set at a vertex that is not an infinite emitter")
        for e in s.edges:
            if not g.emits(s.vertex, e):
                raise MonoidError(f"{s}: {e} is not an out-edge of {s.vertex}")


def _spec_key(s: Summand):
    return (0 if s.edges else 1, s.vertex, s.edges)


def sort_spec(spec: Iterable[Summand]) -> ProjectiveSpec:
    merged: Counter = Counter()
    for s in spec:
        merged[(s.vertex, s.edges)] += s.mult
    out = [Summand(v, T, n) for (v, T), n in merged.items()]
    return tuple(sorted(out, key=_spec_key))


def normalize_projective_spec(g: Graph, spec: Iterable[Summand]) -> ProjectiveSpec:
    """One edge set per infinite emitter: each (v, T, n) with T a proper
    subset of the union T_v becomes n (v, T_v) plus n (r(e), {}) for
    e in T_v \\ T.  Output lists q-type summands first, then vertices."""
    spec = list(spec)
    validate_spec(g, spec)
    unions: dict[Vertex, set] = {}
    for s in spec:
        if s.edges:
            unions.setdefault(s.vertex, set()).update(s.edges)
    out = []
    for s in spec:
        if not s.edges:
            out.append(s)
            continue
        Tv = tuple(sorted(unions[s.vertex]))
        out.append(Summand(s.vertex, Tv, s.mult))
        for e in Tv:
            if e not in s.edges:
                out.append(Summand(g.range(e), (), s.mult))
    return sort_spec(out)


def to_monoid(spec: Iterable[Summand]) -> MonoidElement:
    c: Counter = Counter()
    for s in spec:
        c[Q(s.vertex, s.edges) if s.edges else s.vertex] += s.mult
    return MonoidElement.of(c)


def spec_universe(g: Graph, *specs: Iterable[Summand]) -> dict[Vertex, frozenset]:
    uni: dict[Vertex, set] = {}
    for spec in specs:
        for s in spec:
            if s.edges:
                uni.setdefault(s.vertex, set()).update(s.edges)
    return {v: frozenset(es) for v, es in uni.items()}

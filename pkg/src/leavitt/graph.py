"""Directed graphs with finitely described infinite emitters.

A graph holds finitely many concrete vertices and edges together with
omega-indexed families.  A vertex family ``w`` stands for ``w[1], w[2], ...``
and an edge family ``e`` for ``e[1], e[2], ...``.  Edge families carry a
source kind and a range kind, so a single family can model the infinitely
many edges of an infinite emitter (constant source) or one edge per member of
a vertex family (diagonal source, used by stabilization heads).
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Union


class GraphError(ValueError):
    """Raised for malformed graphs, unknown references and bad paths."""


@dataclass(frozen=True, order=True)
class Vertex:
    name: str
    index: int = 0

    def __post_init__(self):
        if self.index < 0:
            raise GraphError(f"negative family index for {self.name!r}")

    @property
    def is_member(self) -> bool:
        return self.index > 0

    def __str__(self):
        return self.name if self.index == 0 else f"{self.name}[{self.index}]"

    def __repr__(self):
        return f"Vertex({str(self)!r})"


@dataclass(frozen=True, order=True)
class Edge:
    name: str
    index: int = 0

    def __post_init__(self):
        if self.index < 0:
            raise GraphError(f"negative family index for {self.name!r}")

    @property
    def is_member(self) -> bool:
        return self.index > 0

    def __str__(self):
        return self.name if self.index == 0 else f"{self.name}[{self.index}]"

    def __repr__(self):
        return f"Edge({str(self)!r})"


# -- family endpoint kinds ---------------------------------------------------

@dataclass(frozen=True)
class Const:
    """Every member has the same endpoint."""
    vertex: Vertex


@dataclass(frozen=True)
class Diagonal:
    """Member ``n`` has endpoint ``family[n]``."""
    family: str


@dataclass(frozen=True)
class Shift:
    """Member ``1`` ends at ``base``, member ``n`` at ``family[n-1]``."""
    family: str
    base: Vertex


@dataclass(frozen=True)
class PairedShift:
    """Member ``pair(n, k)`` ends at ``base_family[n]`` if ``k == 1``,
    else at ``family[pair(n, k-1)]``.  Encodes one chain per member of a
    vertex family inside a single omega-family."""
    family: str
    base_family: str


SourceKind = Union[Const, Diagonal]
RangeKind = Union[Const, Diagonal, Shift, PairedShift]


def pair(n: int, k: int) -> int:
    """Bijection from pairs of positive integers to positive integers."""
    a, b = n - 1, k - 1
    return (a + b) * (a + b + 1) // 2 + b + 1


def unpair(m: int) -> tuple[int, int]:
    c = m - 1
    s = 0
    while (s + 1) * (s + 2) // 2 <= c:
        s += 1
    b = c - s * (s + 1) // 2
    a = s - b
    return a + 1, b + 1


@dataclass(frozen=True)
class EdgeFamily:
    name: str
    source: SourceKind
    range: RangeKind
    # finitely many members whose source differs from the family default
    source_overrides: tuple[tuple[int, Vertex], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "source_overrides",
                           tuple(sorted(dict(self.source_overrides).items())))

    @property
    def overrides(self) -> dict[int, Vertex]:
        return dict(self.source_overrides)

    def member_source(self, n: int) -> Vertex:
        ov = self.overrides
        if n in ov:
            return ov[n]
        if isinstance(self.source, Const):
            return self.source.vertex
        return Vertex(self.source.family, n)

    def member_range(self, n: int) -> Vertex:
        rk = self.range
        if isinstance(rk, Const):
            return rk.vertex
        if isinstance(rk, Diagonal):
            return Vertex(rk.family, n)
        if isinstance(rk, Shift):
            return rk.base if n == 1 else Vertex(rk.family, n - 1)
        base, k = unpair(n)
        return Vertex(rk.base_family, base) if k == 1 else Vertex(rk.family, pair(base, k - 1))


class VertexClass(enum.Enum):
    SINK = "Sink"
    REGULAR = "Regular"
    INFINITE_EMITTER = "InfiniteEmitter"

    def __str__(self):
        return self.value


@dataclass(frozen=True, order=True)
class Path:
    """A finite path, stored with the full vertex sequence so that prefixes
    and suffixes can be formed without consulting the graph."""
    vertices: tuple[Vertex, ...]
    edges: tuple[Edge, ...] = ()

    def __post_init__(self):
        if len(self.vertices) != len(self.edges) + 1:
            raise GraphError("path needs exactly one more vertex than edges")

    @classmethod
    def trivial(cls, v: Vertex) -> "Path":
        return cls((v,), ())

    @property
    def start(self) -> Vertex:
        return self.vertices[0]

    @property
    def end(self) -> Vertex:
        return self.vertices[-1]

    def __len__(self):
        return len(self.edges)

    def then(self, other: "Path") -> "Path":
        if self.end != other.start:
            raise GraphError(f"cannot compose {self} with {other}: {self.end} != {other.start}")
        return Path(self.vertices + other.vertices[1:], self.edges + other.edges)

    def is_prefix_of(self, other: "Path") -> bool:
        n = len(self.edges)
        return self.start == other.start and other.edges[:n] == self.edges

    def prefix(self, n: int) -> "Path":
        return Path(self.vertices[: n + 1], self.edges[:n])

    def suffix_from(self, n: int) -> "Path":
        return Path(self.vertices[n:], self.edges[n:])

    def remainder(self, prefix: "Path") -> "Path":
        if not prefix.is_prefix_of(self):
            raise GraphError(f"{prefix} is not a prefix of {self}")
        return self.suffix_from(len(prefix))

    def __str__(self):
        if not self.edges:
            return str(self.start)
        return ".".join(str(e) for e in self.edges)

    def __repr__(self):
        return f"Path({str(self)!r})"


def compose_paths(p: Path, q: Path) -> Path:
    return p.then(q)


class Graph:
    """Immutable directed graph; see module docstring for the encoding."""

    def __init__(self, vertices: Iterable[str] = (), vertex_families: Iterable[str] = (),
                 edges: Mapping[str, tuple[Vertex, Vertex]] | None = None,
                 edge_families: Iterable[EdgeFamily] = ()):
        self._vertices = frozenset(vertices)
        self._vfams = frozenset(vertex_families)
        self._edges = {k: (v[0], v[1]) for k, v in (edges or {}).items()}
        self._efams = {f.name: f for f in edge_families}
        self._validate()
        self._out_concrete: dict[Vertex, list[Edge]] = {}
        for name, (s, _) in self._edges.items():
            self._out_concrete.setdefault(s, []).append(Edge(name))
        self._out_cache: dict[Vertex, tuple[bool, tuple[Edge, ...]]] = {}

    # -- construction helpers ------------------------------------------------

    def _validate(self):
        seen: dict[str, str] = {}
        for ns, names in (("vertex", self._vertices), ("vertex family", self._vfams),
                          ("edge", self._edges), ("edge family", self._efams)):
            for n in names:
                if n in seen:
                    raise GraphError(f"identifier {n!r} used as {seen[n]} and {ns}")
                seen[n] = ns
        if not self._vertices and not self._vfams:
            raise GraphError("graph has no vertices")
        for name, (s, r) in self._edges.items():
            for end in (s, r):
                if not self.has_vertex(end):
                    raise GraphError(f"edge {name}: unknown vertex {end}")
        for f in self._efams.values():
            src = f.source
            if isinstance(src, Const):
                if src.vertex.is_member or src.vertex.name not in self._vertices:
                    raise GraphError(f"edge family {f.name}: source must be a concrete vertex")
            elif src.family not in self._vfams:
                raise GraphError(f"edge family {f.name}: unknown vertex family {src.family}")
            rk = f.range
            if isinstance(rk, Const):
                if not self.has_vertex(rk.vertex):
                    raise GraphError(f"edge family {f.name}: unknown vertex {rk.vertex}")
            else:
                if rk.family not in self._vfams:
                    raise GraphError(f"edge family {f.name}: unknown vertex family {rk.family}")
                if isinstance(rk, Shift) and not self.has_vertex(rk.base):
                    raise GraphError(f"edge family {f.name}: unknown vertex {rk.base}")
                if isinstance(rk, PairedShift) and rk.base_family not in self._vfams:
                    raise GraphError(f"edge family {f.name}: unknown vertex family {rk.base_family}")
            for n, v in f.source_overrides:
                if n < 1 or not self.has_vertex(v):
                    raise GraphError(f"edge family {f.name}: bad source override {n} -> {v}")

    # -- accessors -------------------------------------------------------------

    @property
    def vertices(self) -> frozenset[str]:
        return self._vertices

    @property
    def vertex_families(self) -> frozenset[str]:
        return self._vfams

    @property
    def edges(self) -> dict[str, tuple[Vertex, Vertex]]:
        return dict(self._edges)

    @property
    def edge_families(self) -> dict[str, EdgeFamily]:
        return dict(self._efams)

    def names(self) -> set[str]:
        return set(self._vertices) | set(self._vfams) | set(self._edges) | set(self._efams)

    def _key(self):
        return (tuple(sorted(self._vertices)), tuple(sorted(self._vfams)),
                tuple(sorted(self._edges.items())),
                tuple(sorted((f.name, repr(f)) for f in self._efams.values())))

    def __eq__(self, other):
        return isinstance(other, Graph) and self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __repr__(self):
        return (f"Graph(vertices={sorted(self._vertices)}, vertex_families={sorted(self._vfams)}, "
                f"edges={len(self._edges)}, edge_families={sorted(self._efams)})")

    def has_vertex(self, v: Vertex) -> bool:
        if v.index == 0:
            return v.name in self._vertices
        return v.name in self._vfams

    def has_edge(self, e: Edge) -> bool:
        if e.index == 0:
            return e.name in self._edges
        return e.name in self._efams

    def _check_vertex(self, v: Vertex):
        if not self.has_vertex(v):
            raise GraphError(f"unknown vertex {v}")

    def _check_edge(self, e: Edge):
        if not self.has_edge(e):
            raise GraphError(f"unknown edge {e}")

    def source(self, e: Edge) -> Vertex:
        self._check_edge(e)
        if e.index == 0:
            return self._edges[e.name][0]
        return self._efams[e.name].member_source(e.index)

    def range(self, e: Edge) -> Vertex:
        self._check_edge(e)
        if e.index == 0:
            return self._edges[e.name][1]
        return self._efams[e.name].member_range(e.index)

    # -- out-edges and classification ----------------------------------------

    def _out(self, v: Vertex) -> tuple[bool, tuple[Edge, ...]]:
        """(infinite?, explicit finite out-edges).  For infinite emitters the
        explicit list holds the out-edges that are not default family members."""
        hit = self._out_cache.get(v)
        if hit is not None:
            return hit
        self._check_vertex(v)
        infinite = False
        explicit = list(self._out_concrete.get(v, ()))
        for f in self._efams.values():
            ov = f.overrides
            if isinstance(f.source, Const) and f.source.vertex == v:
                infinite = True
            if isinstance(f.source, Diagonal) and v.name == f.source.family and v.index > 0:
                if v.index not in ov:
                    explicit.append(Edge(f.name, v.index))
            for n, w in ov.items():
                if w == v:
                    explicit.append(Edge(f.name, n))
        hit = (infinite, tuple(sorted(set(explicit))))
        self._out_cache[v] = hit
        return hit

    def classify(self, v: Vertex) -> VertexClass:
        infinite, explicit = self._out(v)
        if infinite:
            return VertexClass.INFINITE_EMITTER
        return VertexClass.REGULAR if explicit else VertexClass.SINK

    def is_regular(self, v: Vertex) -> bool:
        return self.classify(v) is VertexClass.REGULAR

    def out_edges(self, v: Vertex, limit: int | None = None) -> tuple[Edge, ...]:
        """All out-edges of a non-infinite-emitter, or for an infinite emitter
        the explicit ones plus default family members with index <= limit."""
        infinite, explicit = self._out(v)
        if not infinite:
            return explicit
        if limit is None:
            raise GraphError(f"{v} is an infinite emitter; pass a family limit")
        extra = []
        for f in self._efams.values():
            if isinstance(f.source, Const) and f.source.vertex == v:
                ov = f.overrides
                extra.extend(Edge(f.name, n) for n in range(1, limit + 1) if n not in ov)
        return tuple(sorted(set(explicit) | set(extra)))

    def emits(self, v: Vertex, e: Edge) -> bool:
        return self.has_edge(e) and self.source(e) == v

    def special_edge(self, v: Vertex) -> Edge:
        """Least out-edge of a regular vertex; fixes the rewriting basis."""
        if not self.is_regular(v):
            raise GraphError(f"{v} is not regular")
        return self._out(v)[1][0]

    # -- sampling ---------------------------------------------------------------

    def vertex_sample(self, limit: int = 3) -> list[Vertex]:
        vs = [Vertex(n) for n in self._vertices]
        vs += [Vertex(f, k) for f in self._vfams for k in range(1, limit + 1)]
        return sorted(vs)

    def edge_sample(self, limit: int = 3) -> list[Edge]:
        es = [Edge(n) for n in self._edges]
        for f in self._efams.values():
            idx = set(range(1, limit + 1)) | set(f.overrides)
            es += [Edge(f.name, k) for k in idx]
        return sorted(es)

    def infinite_emitters(self) -> list[Vertex]:
        return sorted(f.source.vertex for f in self._efams.values() if isinstance(f.source, Const))

    # -- paths ------------------------------------------------------------------

    def vertex_path(self, v: Vertex | str) -> Path:
        if isinstance(v, str):
            v = Vertex(v)
        self._check_vertex(v)
        return Path.trivial(v)

    def path(self, *edges: Edge | str, start: Vertex | None = None) -> Path:
        es = [Edge(e) if isinstance(e, str) else e for e in edges]
        if not es:
            if start is None:
                raise GraphError("a length-0 path needs a start vertex")
            return self.vertex_path(start)
        vs = [self.source(es[0])]
        if start is not None and start != vs[0]:
            raise GraphError(f"path does not start at {start}")
        for e in es:
            if self.source(e) != vs[-1]:
                raise GraphError(f"non-composable path: {vs[-1]} != s({e})")
            vs.append(self.range(e))
        return Path(tuple(vs), tuple(es))

    def check_path(self, p: Path) -> None:
        self._check_vertex(p.start)
        for i, e in enumerate(p.edges):
            if self.source(e) != p.vertices[i] or self.range(e) != p.vertices[i + 1]:
                raise GraphError(f"path {p} does not match the graph at {e}")

    def paths_from(self, v: Vertex, max_len: int, limit: int = 3) -> Iterator[Path]:
        """All paths from v of length <= max_len (infinite emitters truncated)."""
        frontier = [Path.trivial(v)]
        while frontier:
            p = frontier.pop(0)
            yield p
            if len(p) < max_len:
                for e in self.out_edges(p.end, limit):
                    frontier.append(Path(p.vertices + (self.range(e),), p.edges + (e,)))

    def family_bound_edges(self, limit: int) -> list[Edge]:
        return self.edge_sample(limit)


def classify_vertex(g: Graph, v: Vertex) -> VertexClass:
    return g.classify(v)


# -- morphisms ----------------------------------------------------------------

@dataclass(frozen=True)
class GraphMorphism:
    """Concrete maps plus index-preserving family-to-family maps."""
    vertex_map: Mapping[Vertex, Vertex] = field(default_factory=dict)
    vertex_family_map: Mapping[str, str] = field(default_factory=dict)
    edge_map: Mapping[Edge, Edge] = field(default_factory=dict)
    edge_family_map: Mapping[str, str] = field(default_factory=dict)

    def vertex(self, v: Vertex) -> Vertex:
        if v.index == 0:
            return self.vertex_map[v]
        return Vertex(self.vertex_family_map[v.name], v.index)

    def edge(self, e: Edge) -> Edge:
        if e.index == 0:
            return self.edge_map[e]
        return Edge(self.edge_family_map[e.name], e.index)

    def path(self, p: Path) -> Path:
        return Path(tuple(self.vertex(v) for v in p.vertices), tuple(self.edge(e) for e in p.edges))

    @classmethod
    def identity(cls, g: Graph) -> "GraphMorphism":
        return cls.inclusion(g)

    @classmethod
    def inclusion(cls, g: Graph) -> "GraphMorphism":
        """Name-preserving map of g into any graph containing it."""
        return cls({Vertex(v): Vertex(v) for v in g.vertices}, {f: f for f in g.vertex_families},
                   {Edge(e): Edge(e) for e in g.edges}, {f: f for f in g.edge_families})


@dataclass(frozen=True)
class CKCheck:
    ok: bool
    witness: str | None = None

    def __bool__(self):
        return self.ok


def check_ck_morphism(e: Graph, f: Graph, m: GraphMorphism, sample: int = 4) -> CKCheck:
    """Injectivity, s/r compatibility and the out-edge bijection at regular
    vertices, checked on all concrete elements and sampled family members."""
    try:
        vs = e.vertex_sample(sample)
        es = e.edge_sample(sample)
        vimg = {v: m.vertex(v) for v in vs}
        eimg = {x: m.edge(x) for x in es}
    except KeyError as exc:
        return CKCheck(False, f"unmapped element {exc.args[0]}")
    for v, w in vimg.items():
        if not f.has_vertex(w):
            return CKCheck(False, f"image {w} of {v} not in target")
    for x, y in eimg.items():
        if not f.has_edge(y):
            return CKCheck(False, f"image {y} of {x} not in target")
        if f.source(y) != m.vertex(e.source(x)) or f.range(y) != m.vertex(e.range(x)):
            return CKCheck(False, f"{x} -> {y} does not commute with s, r")
    fams = m.vertex_family_map
    if len(set(vimg.values())) != len(vimg) or len(set(fams.values())) != len(fams):
        return CKCheck(False, "vertex map not injective")
    if len(set(eimg.values())) != len(eimg) or len(set(m.edge_family_map.values())) != len(m.edge_family_map):
        dup = _first_collision(eimg)
        return CKCheck(False, f"edge map not injective: {dup}")
    for v in vs:
        if not e.is_regular(v):
            continue
        w = vimg[v]
        if not f.is_regular(w):
            return CKCheck(False, f"regular {v} maps to non-regular {w}")
        src = sorted(m.edge(x) for x in e.out_edges(v))
        if src != sorted(f.out_edges(w)):
            return CKCheck(False, f"out-edges of {v} not bijective onto out-edges of {w}")
    return CKCheck(True)


def _first_collision(mapping):
    seen = {}
    for k, v in mapping.items():
        if v in seen:
            return f"{seen[v]} and {k} both map to {v}"
        seen[v] = k
    return "family map"

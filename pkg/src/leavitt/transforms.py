"""Graph transformations and the endomorphism pipelines.

* :func:`out_split` splits a vertex according to a partition of its
  out-edges and returns the generator images of the induced isomorphism.
* :func:`cateiso_pipeline` turns a projective presentation into a plain
  multiplicity map by out-splitting each infinite emitter that carries an
  edge set, transporting the presentation at every step.
* :func:`attach_heads` adds a finite chain feeding each vertex of
  multiplicity n (n - 1 new vertices); :func:`stabilize` adds an infinite
  chain to every vertex.
* :func:`end_pipeline` and :func:`cstar_pipeline` chain these together.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .graph import (Const, Diagonal, Edge, EdgeFamily, Graph, GraphError, GraphMorphism,
                    PairedShift, Path, Shift, Vertex, VertexClass, check_ck_morphism, pair)
from .lpa import LpaElement, in_block, normal_form, product
from .monoid import (MonoidElement, MonoidError, Q, Summand, equivalent, normalize_projective_spec,
                     sort_spec, to_monoid, validate_spec)
from .steinberg import Bisection, restrict_basis


def fresh_name(base: str, used: set[str]) -> str:
    """base, or base with primes appended until it is unused; records the result."""
    name = base
    while name in used:
        name += "'"
    used.add(name)
    return name


def flat_name(v: Vertex) -> str:
    return v.name if v.index == 0 else f"{v.name}_{v.index}"


# -- out-splitting -------------------------------------------------------------------

class OutSplitImages:
    """Generator images v -> v1 + ... + vk, e -> e1 + ... + ek (r(e) = v),
    everything else to its namesake."""

    def __init__(self, source: Graph, target: Graph, vertex: Vertex, new_vertices: list[Vertex],
                 edge_copies: dict[str, list[str]], family_copies: dict[str, list[str]]):
        self.source = source
        self.target = target
        self.split_vertex = vertex
        self.new_vertices = new_vertices
        self._edge_copies = edge_copies
        self._family_copies = family_copies

    def vertex_copies(self, u: Vertex) -> list[Vertex]:
        return list(self.new_vertices) if u == self.split_vertex else [u]

    def edge_copies(self, e: Edge) -> list[Edge]:
        if e.index == 0:
            return [Edge(n) for n in self._edge_copies.get(e.name, [e.name])]
        return [Edge(n, e.index) for n in self._family_copies.get(e.name, [e.name])]

    def vertex(self, u):
        return _sum(self.target, [LpaElement.vertex(self.target, w) for w in self.vertex_copies(u)])

    def edge(self, e):
        return _sum(self.target, [LpaElement.edge(self.target, c) for c in self.edge_copies(e)])

    def ghost(self, e):
        return _sum(self.target, [LpaElement.ghost(self.target, c) for c in self.edge_copies(e)])


def _sum(g: Graph, xs: Iterable[LpaElement]) -> LpaElement:
    out = LpaElement(g)
    for x in xs:
        out = out + x
    return out


@dataclass
class OutSplitResult:
    graph_in: Graph
    graph_out: Graph
    vertex: Vertex
    vertex_names: tuple[str, ...]
    parts: tuple[tuple[Edge, ...], ...]  # finite parts; the complement is implicit
    images: OutSplitImages
    trace: list[str] = field(default_factory=list)

    @property
    def new_vertices(self) -> list[Vertex]:
        return [Vertex(n) for n in self.vertex_names]

    def part_of(self, e: Edge) -> int:
        for i, part in enumerate(self.parts):
            if e in part:
                return i
        return len(self.parts)

    def generator_map(self, limit: int = 3) -> dict[object, LpaElement]:
        """Images of sampled vertices, edges and ghost edges (keyed ("ghost", e))."""
        g = self.graph_in
        out: dict[object, LpaElement] = {}
        for v in g.vertex_sample(limit):
            out[v] = self.images.vertex(v)
        for e in g.edge_sample(limit):
            out[e] = self.images.edge(e)
            out[("ghost", e)] = self.images.ghost(e)
        return out


def out_split(g: Graph, v: Vertex | str, parts: Sequence[Iterable[Edge]]) -> OutSplitResult:
    """Split v into one vertex per finite part plus one for the complement.

    Edges leaving v move to the copy of their part; every edge entering v is
    replaced by one copy per new vertex.
    """
    if isinstance(v, str):
        v = Vertex(v)
    if v.is_member:
        raise GraphError(f"cannot out-split the family member {v}")
    cls = g.classify(v)
    if cls is VertexClass.SINK:
        raise GraphError(f"cannot out-split the sink {v}")
    parts_t = tuple(tuple(sorted(set(p))) for p in parts)
    if not parts_t:
        raise GraphError("out-split needs at least one finite part")
    seen: set[Edge] = set()
    for p in parts_t:
        if not p:
            raise GraphError("out-split parts must be nonempty")
        for e in p:
            if not g.emits(v, e):
                raise GraphError(f"{e} is not an out-edge of {v}")
            if e in seen:
                raise GraphError(f"{e} appears in two parts")
            seen.add(e)
    if cls is VertexClass.REGULAR and seen >= set(g.out_edges(v)):
        raise GraphError(f"degenerate split: the parts exhaust s^-1({v})")
    for f in g.edge_families.values():
        if isinstance(f.range, Shift) and f.range.base == v:
            raise GraphError(f"edge family {f.name} feeds {v} through a shift; not supported")

    k = len(parts_t) + 1
    used = g.names() - {v.name}
    vnames = tuple(fresh_name(f"{v.name}{i}", used) for i in range(1, k + 1))
    trace = [f"out-split {v} into {', '.join(vnames)} with parts "
             + "; ".join("{" + ", ".join(map(str, p)) + "}" for p in parts_t) + "; rest"]

    def part_of(e: Edge) -> int:
        for i, p in enumerate(parts_t):
            if e in p:
                return i
        return k - 1

    def new_source(e: Edge, s: Vertex) -> Vertex:
        return Vertex(vnames[part_of(e)]) if s == v else s

    # concrete edges
    for name, (s, r) in g.edges.items():
        if r == v:
            used.discard(name)
    edges: dict[str, tuple[Vertex, Vertex]] = {}
    edge_copies: dict[str, list[str]] = {}
    for name, (s, r) in sorted(g.edges.items()):
        src = new_source(Edge(name), s)
        if r == v:
            copies = [fresh_name(f"{name}{i}", used) for i in range(1, k + 1)]
            edge_copies[name] = copies
            for c, vn in zip(copies, vnames):
                edges[c] = (src, Vertex(vn))
            trace.append(f"double {name} into {', '.join(copies)}")
        else:
            edges[name] = (src, r)

    # edge families
    fams: list[EdgeFamily] = []
    family_copies: dict[str, list[str]] = {}
    for f in sorted(g.edge_families.values(), key=lambda f: f.name):
        ov = {n: (Vertex(vnames[part_of(Edge(f.name, n))]) if w == v else w)
              for n, w in f.overrides.items()}
        src = f.source
        if isinstance(src, Const) and src.vertex == v:
            src = Const(Vertex(vnames[-1]))
            for p_i, p in enumerate(parts_t):
                for e in p:
                    if e.name == f.name and e.index > 0 and e.index not in ov:
                        ov[e.index] = Vertex(vnames[p_i])
        rk = f.range
        if isinstance(rk, Const) and rk.vertex == v:
            used.discard(f.name)
            copies = [fresh_name(f"{f.name}{i}", used) for i in range(1, k + 1)]
            family_copies[f.name] = copies
            for c, vn in zip(copies, vnames):
                fams.append(EdgeFamily(c, src, Const(Vertex(vn)), tuple(ov.items())))
            trace.append(f"double family {f.name} into {', '.join(copies)}")
        else:
            fams.append(EdgeFamily(f.name, src, rk, tuple(ov.items())))

    verts = (set(g.vertices) - {v.name}) | set(vnames)
    out = Graph(verts, g.vertex_families, edges, fams)
    images = OutSplitImages(g, out, v, [Vertex(n) for n in vnames], edge_copies, family_copies)
    return OutSplitResult(g, out, v, vnames, parts_t, images, trace)


def transform_spec(s: Summand, r: OutSplitResult) -> list[Summand]:
    """Transport one summand of a projective presentation along an out-split."""
    v = r.vertex
    if s.vertex == v:
        if not s.edges:
            return [Summand(w, (), s.mult) for w in r.new_vertices]
        if len(r.parts) == 1 and set(s.edges) == set(r.parts[0]):
            return [Summand(r.new_vertices[-1], (), s.mult)]
        raise MonoidError(f"summand {s} does not match the out-split of {v}")
    W = []
    for e in s.edges:
        W.extend(r.images.edge_copies(e))
    return [Summand(s.vertex, tuple(W), s.mult)]


def transport_monoid(x: MonoidElement, r: OutSplitResult) -> MonoidElement:
    """Image of a graph-monoid element under the out-split isomorphism."""
    g = r.graph_in
    v = r.vertex
    finite = {e for p in r.parts for e in p}
    c: Counter = Counter()
    for gen, n in x.items:
        if isinstance(gen, Vertex):
            for w in r.images.vertex_copies(gen):
                c[w] += n
            continue
        if gen.vertex != v:
            W = [c2 for e in gen.edges for c2 in r.images.edge_copies(e)]
            c[Q(gen.vertex, tuple(W))] += n
            continue
        # v - sum_Z ee* splits over the new vertices; the finite copies are regular
        for e in sorted(finite - set(gen.edges)):
            for w in r.images.vertex_copies(g.range(e)):
                c[w] += n
        rest = [c2 for e in gen.edges if e not in finite for c2 in r.images.edge_copies(e)]
        last = r.new_vertices[-1]
        c[Q(last, tuple(rest)) if rest else last] += n
    return MonoidElement.of(c)


@dataclass
class CateisoResult:
    graph: Graph
    multiplicities: dict[Vertex, int]
    splits: list[OutSplitResult]
    specs: list[tuple[Summand, ...]]  # presentation before and after each split
    trace: list[str]


def cateiso_pipeline(g: Graph, spec: Iterable[Summand]) -> CateisoResult:
    """Out-split every infinite emitter carrying an edge set, in ascending
    vertex order, until the presentation is a sum of vertex summands."""
    current = normalize_projective_spec(g, spec)
    specs = [current]
    graph = g
    splits: list[OutSplitResult] = []
    trace: list[str] = []
    todo = sorted({s.vertex for s in current if s.edges})
    for v in todo:
        T = [s for s in current if s.vertex == v and s.edges]
        if len(T) != 1:
            raise MonoidError(f"expected a single edge set at {v}, found {len(T)}")
        res = out_split(graph, v, [T[0].edges])
        moved: list[Summand] = []
        for s in current:
            moved.extend(transform_spec(s, res))
        current = sort_spec(moved)
        validate_spec(res.graph_out, current)
        graph = res.graph_out
        splits.append(res)
        specs.append(current)
        trace.extend(res.trace)
    if any(s.edges for s in current):
        raise MonoidError("presentation still carries edge sets after all out-splits")
    mults = {s.vertex: s.mult for s in sorted(current, key=lambda s: s.vertex)}
    return CateisoResult(graph, mults, splits, specs, trace)


def pipeline_monoid_check(g: Graph, spec: Iterable[Summand], depth: int = 12):
    """Transport the class of the input presentation through every out-split
    and compare with the final multiplicities in the last graph's monoid."""
    spec = list(spec)
    res = cateiso_pipeline(g, spec)
    x = to_monoid(spec)
    for r in res.splits:
        x = transport_monoid(x, r)
    y = MonoidElement.of(res.multiplicities)
    return equivalent(res.graph, x, y, depth)


# -- heads ---------------------------------------------------------------------------

@dataclass
class HeadResult:
    graph: Graph
    H: list[Vertex]
    provenance: dict[Vertex, tuple[Vertex, int]]  # head vertex -> (base, height)
    head_edges: dict[tuple[Vertex, int], Edge]  # (base, y) -> edge leaving the y-th head vertex
    multiplicities: dict[Vertex, int]
    trace: list[str]

    def head_vertex(self, base: Vertex, y: int) -> Vertex:
        if y == 0:
            return base
        for w, (b, k) in self.provenance.items():
            if b == base and k == y:
                return w
        raise GraphError(f"{base} has no head vertex at height {y}")

    def head_path(self, base: Vertex, y: int) -> Path:
        """The path from the y-th head vertex down to base."""
        if y == 0:
            return Path.trivial(base)
        return self.graph.path(*[self.head_edges[(base, k)] for k in range(y, 0, -1)])


def _h_order(mults: Mapping[Vertex, int]) -> list[Vertex]:
    return sorted(mults)


def attach_heads(f: Graph, mults: Mapping[Vertex, int]) -> HeadResult:
    """Feed each vertex u of multiplicity n by a chain u_{n-1} -> ... -> u_1 -> u."""
    for u, n in mults.items():
        if n < 1:
            raise GraphError(f"multiplicity of {u} must be positive")
        if not f.has_vertex(u):
            raise GraphError(f"unknown vertex {u}")
    used = f.names()
    verts = set(f.vertices)
    edges = f.edges
    H: list[Vertex] = []
    prov: dict[Vertex, tuple[Vertex, int]] = {}
    hedges: dict[tuple[Vertex, int], Edge] = {}
    trace: list[str] = []
    for u in _h_order(mults):
        n = mults[u]
        below = u
        chain = []
        for y in range(1, n):
            want = f"{flat_name(u)}_{y}"
            name = fresh_name(want, used)
            ename = fresh_name(f"{flat_name(u)}_e{y}", used)
            if name != want:
                trace.append(f"rename head vertex {want} to {name}")
            verts.add(name)
            w = Vertex(name)
            edges[ename] = (w, below)
            prov[w] = (u, y)
            hedges[(u, y)] = Edge(ename)
            chain.append(w)
            below = w
        if chain:
            trace.append(f"attach head of length {n - 1} at {u}: "
                         + " -> ".join(str(x) for x in reversed(chain)) + f" -> {u}")
        H.extend(reversed(chain))
        H.append(u)
    G = Graph(verts, f.vertex_families, edges, f.edge_families.values())
    return HeadResult(G, H, prov, hedges, dict(mults), trace)


def phi_conjugate(heads: HeadResult, i: Vertex, y: int, j: Vertex, z: int,
                  r: LpaElement) -> LpaElement:
    """p_i^y r (p_j^z)* for r in the (i, j) corner, p the head paths."""
    G = heads.graph
    ni, nj = heads.multiplicities.get(i, 1), heads.multiplicities.get(j, 1)
    if not (0 <= y < ni and 0 <= z < nj):
        raise GraphError(f"head heights ({y}, {z}) out of range for ({i}, {j})")
    r = normal_form(r.over(G))
    if not in_block(r, i, j):
        raise GraphError(f"{r} is not in the corner {i} L {j}")
    p = heads.head_path(i, y)
    q = heads.head_path(j, z)
    left = LpaElement.monomial(G, p, Path.trivial(i))
    right = LpaElement.monomial(G, Path.trivial(j), q)
    return normal_form(product(left, r, right))


# -- reports ---------------------------------------------------------------------------

@dataclass
class MatrixShape:
    """sigma x sigma block layout: entry (a, b) is H[a] L H[b] on the headed
    side and base(H[a]) L base(H[b]) before heads were attached."""
    labels: list[str]
    base_labels: list[str]

    @property
    def size(self) -> int:
        return len(self.labels)

    def cell(self, a: int, b: int) -> str:
        return f"{self.labels[a]} L {self.labels[b]}"

    def base_cell(self, a: int, b: int) -> str:
        return f"{self.base_labels[a]} L {self.base_labels[b]}"

    def rows(self) -> list[list[str]]:
        return [[self.cell(a, b) for b in range(self.size)] for a in range(self.size)]

    def base_rows(self) -> list[list[str]]:
        return [[self.base_cell(a, b) for b in range(self.size)] for a in range(self.size)]


@dataclass
class PipelineReport:
    input_spec: tuple[Summand, ...]
    normalized_spec: tuple[Summand, ...]
    split_graph: Graph
    multiplicities: dict[Vertex, int]
    final_graph: Graph
    H: list[Vertex]
    provenance: dict[Vertex, tuple[Vertex, int]]
    matrix_shape: MatrixShape
    trace: list[str]
    basis_sample: list[Bisection]
    ck_inclusion: bool

    @property
    def sigma(self) -> int:
        return sum(self.multiplicities.values())


def _shape(H: list[Vertex], prov: Mapping[Vertex, tuple[Vertex, int]]) -> MatrixShape:
    return MatrixShape([str(h) for h in H], [str(prov.get(h, (h, 0))[0]) for h in H])


def end_pipeline(g: Graph, spec: Iterable[Summand], basis_len: int = 1, limit: int = 2) -> PipelineReport:
    spec = tuple(spec)
    cat = cateiso_pipeline(g, spec)
    heads = attach_heads(cat.graph, cat.multiplicities)
    ck = bool(check_ck_morphism(cat.graph, heads.graph, GraphMorphism.inclusion(cat.graph)))
    trace = [f"normalize presentation: {', '.join(map(str, cat.specs[0]))}"]
    trace += cat.trace + heads.trace
    sample = restrict_basis(heads.graph, heads.H, basis_len, limit)
    return PipelineReport(spec, cat.specs[0], cat.graph, cat.multiplicities, heads.graph,
                          heads.H, heads.provenance, _shape(heads.H, heads.provenance),
                          trace, sample, ck)


# -- stabilization -----------------------------------------------------------------------

@dataclass
class StabilizeResult:
    graph: Graph
    H: list[Vertex]
    provenance: dict[Vertex, tuple[Vertex, int]]
    head_families: dict[str, str]  # vertex or vertex family -> head vertex family
    trace: list[str]

    def head_vertex(self, u: Vertex, k: int) -> Vertex:
        if k == 0:
            return u
        fam = self.head_families[u.name]
        return Vertex(fam, k) if u.index == 0 else Vertex(fam, pair(u.index, k))


def stabilize(f: Graph, mults: Mapping[Vertex, int]) -> StabilizeResult:
    """Attach an infinite head ... -> u^2 -> u^1 -> u at every vertex u and
    select H = T together with u^1, ..., u^{n_u - 1}."""
    for u, n in mults.items():
        if n < 1:
            raise GraphError(f"multiplicity of {u} must be positive")
        if not f.has_vertex(u):
            raise GraphError(f"unknown vertex {u}")
    used = f.names()
    vfams = set(f.vertex_families)
    efams = list(f.edge_families.values())
    heads: dict[str, str] = {}
    trace: list[str] = []
    for u in sorted(f.vertices):
        hv = fresh_name(f"{u}_h", used)
        he = fresh_name(f"{u}_eh", used)
        vfams.add(hv)
        efams.append(EdgeFamily(he, Diagonal(hv), Shift(hv, Vertex(u))))
        heads[u] = hv
        trace.append(f"infinite head at {u}: vertices {hv}[k], edges {he}[k]")
    for w in sorted(f.vertex_families):
        hv = fresh_name(f"{w}_h", used)
        he = fresh_name(f"{w}_eh", used)
        vfams.add(hv)
        efams.append(EdgeFamily(he, Diagonal(hv), PairedShift(hv, w)))
        heads[w] = hv
        trace.append(f"infinite heads at {w}[n]: vertices {hv}[pair(n, k)], edges {he}[pair(n, k)]")
    SF = Graph(f.vertices, vfams, f.edges, efams)
    res = StabilizeResult(SF, [], {}, heads, trace)
    for u in _h_order(mults):
        for k in range(mults[u] - 1, 0, -1):
            w = res.head_vertex(u, k)
            res.H.append(w)
            res.provenance[w] = (u, k)
        res.H.append(u)
    return res


def cstar_pipeline(g: Graph, spec: Iterable[Summand], basis_len: int = 1, limit: int = 2) -> PipelineReport:
    """Graph-level run: normalize, out-split, stabilize."""
    spec = tuple(spec)
    cat = cateiso_pipeline(g, spec)
    trace = [f"normalize presentation: {', '.join(map(str, cat.specs[0]))}"]
    for r in cat.splits:
        trace.extend(r.trace)
        v = r.vertex
        trace.append(f"p_{v} -> " + " + ".join(f"p_{w}" for w in r.new_vertices))
        for e in r.graph_in.edge_sample(1):
            if r.graph_in.range(e) == v:
                trace.append(f"s_{e} -> " + " + ".join(f"s_{c}" for c in r.images.edge_copies(e)))
    st = stabilize(cat.graph, cat.multiplicities)
    trace += st.trace
    ck = bool(check_ck_morphism(cat.graph, st.graph, GraphMorphism.inclusion(cat.graph)))
    sample = restrict_basis(st.graph, st.H, basis_len, limit)
    return PipelineReport(spec, cat.specs[0], cat.graph, cat.multiplicities, st.graph,
                          st.H, st.provenance, _shape(st.H, st.provenance), trace, sample, ck)

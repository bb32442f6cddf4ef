"""Exact arithmetic in Leavitt path algebras on the monomials ``p q*``.

Elements are finite linear combinations of monomials with rational
coefficients.  Products are formed with the ghost-edge cancellation rule and
left unreduced; :func:`normal_form` rewrites them into the special-edge
basis.  At each regular vertex ``u`` the least out-edge ``g`` is special and
``(p'g)(q'g)*`` is replaced by ``p'q'* - sum (p'e)(q'e)*`` over the other
out-edges ``e``.  Monomials ending at infinite emitters are never rewritten.
"""
from __future__ import annotations

import random
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Protocol

from .graph import Edge, Graph, GraphError, GraphMorphism, Path, Vertex

Scalar = Fraction


def as_scalar(c) -> Fraction:
    return c if isinstance(c, Fraction) else Fraction(c)


@dataclass(frozen=True, order=True)
class Monomial:
    p: Path
    q: Path

    def __post_init__(self):
        if self.p.end != self.q.end:
            raise GraphError(f"monomial needs r(p) = r(q): {self.p.end} != {self.q.end}")

    @property
    def degree(self) -> int:
        return len(self.p) - len(self.q)

    def star(self) -> "Monomial":
        return Monomial(self.q, self.p)

    def sort_key(self):
        return (len(self.p) + len(self.q), self.p, self.q)

    def __str__(self):
        return format_monomial(self)


class LpaElement:
    """Finite map monomial -> nonzero rational, tied to a graph.

    Arithmetic is raw: ``a * b`` multiplies monomials but does not rewrite;
    call :func:`normal_form` to compare elements.
    """

    __slots__ = ("graph", "_terms")

    def __init__(self, graph: Graph, terms: Mapping[Monomial, object] | Iterable = ()):
        self.graph = graph
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[Monomial, Fraction] = defaultdict(Fraction)
        for m, c in items:
            acc[m] += as_scalar(c)
        self._terms = {m: c for m, c in acc.items() if c != 0}

    # constructors
    @classmethod
    def zero(cls, g: Graph) -> "LpaElement":
        return cls(g)

    @classmethod
    def vertex(cls, g: Graph, v: Vertex | str) -> "LpaElement":
        p = g.vertex_path(v)
        return cls(g, {Monomial(p, p): 1})

    @classmethod
    def edge(cls, g: Graph, e: Edge | str) -> "LpaElement":
        p = g.path(e)
        return cls(g, {Monomial(p, Path.trivial(p.end)): 1})

    @classmethod
    def ghost(cls, g: Graph, e: Edge | str) -> "LpaElement":
        q = g.path(e)
        return cls(g, {Monomial(Path.trivial(q.end), q): 1})

    @classmethod
    def monomial(cls, g: Graph, p: Path, q: Path, coeff=1) -> "LpaElement":
        return cls(g, {Monomial(p, q): coeff})

    @property
    def terms(self) -> dict[Monomial, Fraction]:
        return dict(self._terms)

    def items(self) -> list[tuple[Monomial, Fraction]]:
        return sorted(self._terms.items(), key=lambda t: t[0].sort_key())

    def __len__(self):
        return len(self._terms)

    def __bool__(self):
        return bool(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def over(self, g: Graph) -> "LpaElement":
        """Reinterpret in a graph that contains every path used here."""
        for m in self._terms:
            g.check_path(m.p)
            g.check_path(m.q)
        return LpaElement(g, self._terms)

    def _same(self, other: "LpaElement"):
        if other.graph is not self.graph and other.graph != self.graph:
            raise GraphError("elements live over different graphs")

    def __add__(self, other):
        if not isinstance(other, LpaElement):
            return NotImplemented
        self._same(other)
        return LpaElement(self.graph, list(self._terms.items()) + list(other._terms.items()))

    def __neg__(self):
        return LpaElement(self.graph, {m: -c for m, c in self._terms.items()})

    def __sub__(self, other):
        if not isinstance(other, LpaElement):
            return NotImplemented
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, LpaElement):
            return mul(self, other)
        c = as_scalar(other)
        return LpaElement(self.graph, {m: c * v for m, v in self._terms.items()})

    def __rmul__(self, other):
        if isinstance(other, LpaElement):
            return NotImplemented
        return self * other

    def __eq__(self, other):
        return isinstance(other, LpaElement) and self.graph == other.graph and self._terms == other._terms

    def __hash__(self):
        return hash(frozenset(self._terms.items()))

    def __str__(self):
        return format_element(self)

    def __repr__(self):
        return f"LpaElement({format_element(self)!r})"


# -- multiplication -------------------------------------------------------------

def mul_monomial(g: Graph, a: Monomial, b: Monomial) -> LpaElement:
    """(p q*)(x y*) = (p mu) y* if x = q mu; p (y nu)* if q = x nu; 0 otherwise."""
    p, q = a.p, a.q
    x, y = b.p, b.q
    if q.is_prefix_of(x):
        return LpaElement(g, {Monomial(p.then(x.remainder(q)), y): 1})
    if x.is_prefix_of(q):
        return LpaElement(g, {Monomial(p, y.then(q.remainder(x))): 1})
    return LpaElement(g)


def _mul_terms(a: Monomial, b: Monomial) -> Monomial | None:
    p, q = a.p, a.q
    x, y = b.p, b.q
    if q.is_prefix_of(x):
        return Monomial(p.then(x.remainder(q)), y)
    if x.is_prefix_of(q):
        return Monomial(p, y.then(q.remainder(x)))
    return None


def mul(a: LpaElement, b: LpaElement) -> LpaElement:
    a._same(b)
    out: dict[Monomial, Fraction] = defaultdict(Fraction)
    for m1, c1 in a._terms.items():
        for m2, c2 in b._terms.items():
            m = _mul_terms(m1, m2)
            if m is not None:
                out[m] += c1 * c2
    return LpaElement(a.graph, out)


def product(*factors: LpaElement) -> LpaElement:
    acc = factors[0]
    for f in factors[1:]:
        acc = mul(acc, f)
    return acc


# -- normal form ------------------------------------------------------------------

def reduction(g: Graph, m: Monomial) -> tuple[Monomial, list[Monomial]] | None:
    """One rewrite step on m, or None if m is irreducible."""
    p, q = m.p, m.q
    if not p.edges or not q.edges or p.edges[-1] != q.edges[-1]:
        return None
    last = p.edges[-1]
    u = p.vertices[-2]
    if not g.is_regular(u) or g.special_edge(u) != last:
        return None
    p1, q1 = p.prefix(len(p) - 1), q.prefix(len(q) - 1)
    others = []
    for e in g.out_edges(u):
        if e == last:
            continue
        r = g.range(e)
        others.append(Monomial(Path(p1.vertices + (r,), p1.edges + (e,)),
                               Path(q1.vertices + (r,), q1.edges + (e,))))
    return Monomial(p1, q1), others


def is_reducible(g: Graph, m: Monomial) -> bool:
    return reduction(g, m) is not None


def normal_form_with_steps(a: LpaElement) -> tuple[LpaElement, int]:
    g = a.graph
    out: dict[Monomial, Fraction] = defaultdict(Fraction)
    stack = list(a._terms.items())
    steps = 0
    while stack:
        m, c = stack.pop()
        red = reduction(g, m)
        if red is None:
            out[m] += c
            continue
        steps += 1
        short, others = red
        stack.append((short, c))
        for o in others:
            out[o] -= c
    return LpaElement(g, out), steps


def normal_form(a: LpaElement) -> LpaElement:
    """Canonical representative in the special-edge basis."""
    return normal_form_with_steps(a)[0]


def step_bound(a: LpaElement) -> int:
    """Upper bound on rewrite steps: total length times the largest regular out-degree."""
    g = a.graph
    degs = [len(g.out_edges(m.p.vertices[i]))
            for m in a._terms for i in range(len(m.p)) if g.is_regular(m.p.vertices[i])]
    width = max(degs, default=1)
    return sum(len(m.p) + len(m.q) for m in a._terms) * max(width, 1)


def nf_equal(a: LpaElement, b: LpaElement) -> bool:
    return normal_form(a - b).is_zero()


# -- involution, grading, corners ---------------------------------------------

def star(a: LpaElement) -> LpaElement:
    return LpaElement(a.graph, {m.star(): c for m, c in a._terms.items()})


def graded_components(a: LpaElement) -> dict[int, LpaElement]:
    parts: dict[int, dict[Monomial, Fraction]] = defaultdict(dict)
    for m, c in a._terms.items():
        parts[m.degree][m] = c
    return {d: LpaElement(a.graph, t) for d, t in sorted(parts.items())}


def corner_filter(a: LpaElement, H: Iterable[Vertex]) -> tuple[LpaElement, bool]:
    """Sub-sum of monomials with both sources in H, and whether that was all of a."""
    hs = set(H)
    kept = {m: c for m, c in a._terms.items() if m.p.start in hs and m.q.start in hs}
    return LpaElement(a.graph, kept), len(kept) == len(a._terms)


def in_block(a: LpaElement, left: Vertex, right: Vertex) -> bool:
    """True iff every monomial of a lies in left * L * right."""
    return all(m.p.start == left and m.q.start == right for m in a._terms)


# -- enumeration and sampling -----------------------------------------------------

def enumerate_monomials(g: Graph, max_len: int, limit: int = 3,
                        sources: Iterable[Vertex] | None = None,
                        normal_only: bool = False) -> list[Monomial]:
    starts = sorted(sources) if sources is not None else g.vertex_sample(limit)
    paths = [p for v in starts for p in g.paths_from(v, max_len, limit)]
    by_end: dict[Vertex, list[Path]] = defaultdict(list)
    for p in paths:
        by_end[p.end].append(p)
    out = []
    for ps in by_end.values():
        for p in ps:
            for q in ps:
                m = Monomial(p, q)
                if normal_only and is_reducible(g, m):
                    continue
                out.append(m)
    return sorted(set(out), key=Monomial.sort_key)


def random_monomial(g: Graph, rng: random.Random, max_len: int = 3, limit: int = 4) -> Monomial:
    """Random p q* with p and q drawn from the paths ending at a common vertex."""
    pool = _path_pool(g, max_len, limit)
    end = rng.choice(sorted(pool))
    ps = pool[end]
    return Monomial(rng.choice(ps), rng.choice(ps))


_POOLS: dict[tuple, dict[Vertex, list[Path]]] = {}


def _path_pool(g: Graph, max_len: int, limit: int) -> dict[Vertex, list[Path]]:
    key = (g, max_len, limit)
    if key not in _POOLS:
        pool: dict[Vertex, list[Path]] = defaultdict(list)
        for v in g.vertex_sample(limit):
            for p in g.paths_from(v, max_len, limit):
                pool[p.end].append(p)
        _POOLS[key] = {k: sorted(v) for k, v in pool.items()}
    return _POOLS[key]


def random_element(g: Graph, rng: random.Random, terms: int = 4, max_len: int = 3,
                   limit: int = 4) -> LpaElement:
    out = LpaElement(g)
    for _ in range(terms):
        c = Fraction(rng.randint(-5, 5), rng.randint(1, 3))
        out = out + LpaElement(g, {random_monomial(g, rng, max_len, limit): c})
    return out


# -- generator images and relation audit --------------------------------------------

class GeneratorImages(Protocol):
    target: Graph

    def vertex(self, v: Vertex) -> LpaElement: ...
    def edge(self, e: Edge) -> LpaElement: ...
    def ghost(self, e: Edge) -> LpaElement: ...


class IdentityImages:
    def __init__(self, g: Graph):
        self.target = g

    def vertex(self, v):
        return LpaElement.vertex(self.target, v)

    def edge(self, e):
        return LpaElement.edge(self.target, e)

    def ghost(self, e):
        return LpaElement.ghost(self.target, e)


class MorphismImages:
    """Generator images of the algebra map induced by a graph morphism."""

    def __init__(self, m: GraphMorphism, target: Graph):
        self.morphism = m
        self.target = target

    def vertex(self, v):
        return LpaElement.vertex(self.target, self.morphism.vertex(v))

    def edge(self, e):
        return LpaElement.edge(self.target, self.morphism.edge(e))

    def ghost(self, e):
        return LpaElement.ghost(self.target, self.morphism.edge(e))


def apply_images(a: LpaElement, images: GeneratorImages) -> LpaElement:
    """Extend generator images multiplicatively to an element p q*."""
    out = LpaElement(images.target)
    for m, c in a._terms.items():
        term = images.vertex(m.p.start)
        for e in m.p.edges:
            term = mul(term, images.edge(e))
        for e in reversed(m.q.edges):
            term = mul(term, images.ghost(e))
        out = out + term * c
    return out


def relation_residuals(g: Graph, images: GeneratorImages, limit: int = 3
                       ) -> Iterator[tuple[str, LpaElement]]:
    """Normal forms of every relation instance moved to one side, evaluated
    on the given generator images.  All of them vanish iff the images satisfy
    the defining relations (on the sampled generators)."""
    vs = g.vertex_sample(limit)
    es = g.edge_sample(limit)
    V = {v: images.vertex(v) for v in vs}
    for e in es:
        for x in (g.source(e), g.range(e)):
            if x not in V:
                V[x] = images.vertex(x)
    T = {e: images.edge(e) for e in es}
    Ts = {e: images.ghost(e) for e in es}
    zero = LpaElement(images.target)
    for v in vs:
        for w in vs:
            rhs = V[w] if v == w else zero
            yield f"(1) {v}*{w}", normal_form(mul(V[v], V[w]) - rhs)
    for e in es:
        s, r = g.source(e), g.range(e)
        yield f"(2) s({e}){e}", normal_form(mul(V[s], T[e]) - T[e])
        yield f"(2) {e}r({e})", normal_form(mul(T[e], V[r]) - T[e])
        yield f"(2) r({e}){e}*", normal_form(mul(V[r], Ts[e]) - Ts[e])
        yield f"(2) {e}*s({e})", normal_form(mul(Ts[e], V[s]) - Ts[e])
    for e in es:
        for f in es:
            rhs = V[g.range(e)] if e == f else zero
            yield f"(3) {e}*{f}", normal_form(mul(Ts[e], T[f]) - rhs)
    for v in vs:
        if g.is_regular(v):
            total = zero
            for e in g.out_edges(v):
                te = T.get(e) or images.edge(e)
                tse = Ts.get(e) or images.ghost(e)
                total = total + mul(te, tse)
            yield f"(4) {v}", normal_form(V[v] - total)


# -- printing --------------------------------------------------------------------

def format_monomial(m: Monomial) -> str:
    parts = [str(e) for e in m.p.edges] + [f"{e}^" for e in reversed(m.q.edges)]
    if not parts:
        return str(m.p.start)
    return ".".join(parts)


def format_element(a: LpaElement) -> str:
    items = a.items()
    if not items:
        return "0"
    out = []
    for i, (m, c) in enumerate(items):
        sign = "-" if c < 0 else "+"
        mag = -c if c < 0 else c
        body = format_monomial(m) if mag == 1 else f"{mag}*{format_monomial(m)}"
        if i == 0:
            out.append(body if sign == "+" else f"-{body}")
        else:
            out.append(f" {sign} {body}")
    return "".join(out)

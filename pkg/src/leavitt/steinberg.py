"""The boundary-path groupoid, its basic bisections and the Steinberg algebra.

Groupoid points are triples ``(x, k, y)`` of boundary points.  Elements of
the Steinberg algebra are finite combinations of indicators of bisections
``Z(alpha, beta)``.  Convolution is computed by bisection bookkeeping;
:func:`convolution_at` evaluates the convolution sum at a single point and
serves as an independent pointwise check.  Normalization here is written
against the set identity

    Z(a, b) = Z(a e1, b e1) + ... + Z(a ek, b ek)   (r(a) regular)

and deliberately does not reuse the rewriting code of :mod:`leavitt.lpa`.
"""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

from .graph import Edge, Graph, GraphError, Path, Vertex
from .lpa import LpaElement, Monomial, as_scalar
from .pathspace import BoundaryPoint, enumerate_boundary_points


# -- groupoid points ------------------------------------------------------------

@dataclass(frozen=True, order=True)
class GroupoidPoint:
    """(x, k, y): range x, source y, degree k."""
    x: BoundaryPoint
    k: int
    y: BoundaryPoint

    @classmethod
    def of(cls, mu: Path, nu: Path, tail: BoundaryPoint) -> "GroupoidPoint":
        if mu.end != tail.start or nu.end != tail.start:
            raise GraphError(f"tail {tail} does not start at r({mu}) = r({nu})")
        return cls(tail.prepend(mu), len(mu) - len(nu), tail.prepend(nu))

    @classmethod
    def unit(cls, x: BoundaryPoint) -> "GroupoidPoint":
        return cls(x, 0, x)

    @property
    def range(self) -> BoundaryPoint:
        return self.x

    @property
    def source(self) -> BoundaryPoint:
        return self.y

    def inverse(self) -> "GroupoidPoint":
        return GroupoidPoint(self.y, -self.k, self.x)

    def __str__(self):
        return f"({self.x}, {self.k}, {self.y})"


def compose_points(g1: GroupoidPoint, g2: GroupoidPoint) -> GroupoidPoint:
    if g1.y != g2.x:
        raise GraphError(f"cannot compose {g1} with {g2}: source {g1.y} != range {g2.x}")
    return GroupoidPoint(g1.x, g1.k + g2.k, g2.y)


# -- bisections -----------------------------------------------------------------

@dataclass(frozen=True, order=True)
class Bisection:
    """Z(alpha, beta) = {(alpha t, |alpha| - |beta|, beta t)}."""
    alpha: Path
    beta: Path

    def __post_init__(self):
        if self.alpha.end != self.beta.end:
            raise GraphError(f"bisection needs r(alpha) = r(beta): {self.alpha.end} != {self.beta.end}")

    @property
    def degree(self) -> int:
        return len(self.alpha) - len(self.beta)

    def sort_key(self):
        return (len(self.alpha) + len(self.beta), self.alpha, self.beta)

    def __str__(self):
        return f"Z({self.alpha}, {self.beta})"


def in_bisection(pt: GroupoidPoint, b: Bisection) -> bool:
    if pt.k != b.degree:
        return False
    if not (pt.x.starts_with(b.alpha) and pt.y.starts_with(b.beta)):
        return False
    return pt.x.strip(len(b.alpha)) == pt.y.strip(len(b.beta))


def point_with_source(b: Bisection, z: BoundaryPoint) -> GroupoidPoint | None:
    """The unique point of b whose source is z, if any."""
    if not z.starts_with(b.beta):
        return None
    return GroupoidPoint(z.strip(len(b.beta)).prepend(b.alpha), b.degree, z)


def bisection_product(b1: Bisection, b2: Bisection) -> Bisection | None:
    """Z(a, b) Z(c, d) as a set of products of composable points."""
    a, b = b1.alpha, b1.beta
    c, d = b2.alpha, b2.beta
    if len(c) >= len(b):
        if c.edges[: len(b)] == b.edges and c.start == b.start:
            return Bisection(a.then(c.suffix_from(len(b))), d)
        return None
    if b.edges[: len(c)] == c.edges and c.start == b.start:
        return Bisection(a, d.then(b.suffix_from(len(c))))
    return None


# -- Steinberg elements -------------------------------------------------------------

class SteinbergElement:
    """Finite combination of bisection indicators with rational coefficients."""

    __slots__ = ("graph", "_terms")

    def __init__(self, graph: Graph, terms: Mapping[Bisection, object] | Iterable = ()):
        self.graph = graph
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[Bisection, Fraction] = defaultdict(Fraction)
        for b, c in items:
            acc[b] += as_scalar(c)
        self._terms = {b: c for b, c in acc.items() if c != 0}

    @classmethod
    def indicator(cls, g: Graph, alpha: Path, beta: Path, coeff=1) -> "SteinbergElement":
        return cls(g, {Bisection(alpha, beta): coeff})

    @property
    def terms(self) -> dict[Bisection, Fraction]:
        return dict(self._terms)

    def items(self) -> list[tuple[Bisection, Fraction]]:
        return sorted(self._terms.items(), key=lambda t: t[0].sort_key())

    def support(self) -> list[Bisection]:
        return [b for b, _ in self.items()]

    def is_zero(self) -> bool:
        return not self._terms

    def __add__(self, other):
        if not isinstance(other, SteinbergElement):
            return NotImplemented
        return SteinbergElement(self.graph, list(self._terms.items()) + list(other._terms.items()))

    def __neg__(self):
        return SteinbergElement(self.graph, {b: -c for b, c in self._terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, c):
        c = as_scalar(c)
        return SteinbergElement(self.graph, {b: c * v for b, v in self._terms.items()})

    __rmul__ = __mul__

    def __eq__(self, other):
        return (isinstance(other, SteinbergElement) and self.graph == other.graph
                and self._terms == other._terms)

    def __hash__(self):
        return hash(frozenset(self._terms.items()))

    def __str__(self):
        items = self.items()
        if not items:
            return "0"
        parts = []
        for b, c in items:
            coef = "" if c == 1 else ("-" if c == -1 else f"{c}*")
            parts.append(f"{coef}1_{b}")
        return " + ".join(parts).replace("+ -", "- ")

    def __repr__(self):
        return f"SteinbergElement({str(self)!r})"


def _split_once(g: Graph, b: Bisection) -> tuple[Bisection, list[Bisection]] | None:
    """If b = Z(a'x, b'x) with x the least out-edge of the regular vertex
    s(x), return Z(a', b') and the siblings Z(a'e, b'e), e != x."""
    a, bb = b.alpha, b.beta
    if not a.edges or not bb.edges:
        return None
    x = a.edges[-1]
    if bb.edges[-1] != x:
        return None
    u = g.source(x)
    if not g.is_regular(u):
        return None
    outs = sorted(g.out_edges(u))
    if outs[0] != x:
        return None
    a0, b0 = a.prefix(len(a) - 1), bb.prefix(len(bb) - 1)
    sibs = []
    for e in outs[1:]:
        step = g.path(e)
        sibs.append(Bisection(a0.then(step), b0.then(step)))
    return Bisection(a0, b0), sibs


def normalize(f: SteinbergElement) -> SteinbergElement:
    g = f.graph
    todo = dict(f._terms)
    done: dict[Bisection, Fraction] = defaultdict(Fraction)
    while todo:
        b = max(todo, key=Bisection.sort_key)
        c = todo.pop(b)
        if c == 0:
            continue
        split = _split_once(g, b)
        if split is None:
            done[b] += c
            continue
        parent, sibs = split
        todo[parent] = todo.get(parent, Fraction(0)) + c
        for s in sibs:  # siblings never split further
            done[s] -= c
    return SteinbergElement(g, done)


def convolve(f: SteinbergElement, h: SteinbergElement) -> SteinbergElement:
    """Bilinear extension of 1_U * 1_V = 1_{UV}, then normalized."""
    acc: dict[Bisection, Fraction] = defaultdict(Fraction)
    for b1, c1 in f._terms.items():
        for b2, c2 in h._terms.items():
            b = bisection_product(b1, b2)
            if b is not None:
                acc[b] += c1 * c2
    return normalize(SteinbergElement(f.graph, acc))


def evaluate(f: SteinbergElement, pt: GroupoidPoint) -> Fraction:
    return sum((c for b, c in f._terms.items() if in_bisection(pt, b)), Fraction(0))


def convolution_at(f: SteinbergElement, h: SteinbergElement, pt: GroupoidPoint) -> Fraction:
    """(f * h)(pt) as the sum over factorizations pt = a b with b in a
    bisection of h's support.  Each bisection meets the source fibre of pt
    in at most one point, so the sum is finite."""
    total = Fraction(0)
    for b, c in h._terms.items():
        eta = point_with_source(b, pt.y)
        if eta is None:
            continue
        first = GroupoidPoint(pt.x, pt.k - eta.k, eta.x)
        total += c * evaluate(f, first)
    return total


# -- the isomorphism with the Leavitt path algebra ---------------------------------------

def pi_map(a: LpaElement) -> SteinbergElement:
    """p q* to the indicator of Z(p, q)."""
    return SteinbergElement(a.graph, {Bisection(m.p, m.q): c for m, c in a.terms.items()})


def pi_inv(f: SteinbergElement) -> LpaElement:
    return LpaElement(f.graph, {Monomial(b.alpha, b.beta): c for b, c in f._terms.items()})


def indicator_F(g: Graph, alpha: Path, beta: Path, F: Iterable[Edge]) -> SteinbergElement:
    """1_{Z(alpha, beta, F)} written as 1_{Z(alpha, beta)} minus the children."""
    out = {Bisection(alpha, beta): Fraction(1)}
    for e in F:
        if g.source(e) != alpha.end:
            raise GraphError(f"{e} does not leave r({alpha})")
        step = g.path(e)
        out[Bisection(alpha.then(step), beta.then(step))] = Fraction(-1)
    return SteinbergElement(g, out)


# -- restriction ---------------------------------------------------------------------

def restrict_basis(g: Graph, H: Iterable[Vertex], maxlen: int, limit: int = 3) -> list[Bisection]:
    """All Z(alpha, beta) with |alpha|, |beta| <= maxlen and both sources in H
    (infinite emitters truncated at family index ``limit``)."""
    H = sorted(set(H))
    if not H:
        raise GraphError("restriction needs a nonempty vertex set")
    by_end: dict[Vertex, list[Path]] = defaultdict(list)
    for v in H:
        for p in g.paths_from(v, maxlen, limit):
            by_end[p.end].append(p)
    out = {Bisection(a, b) for ps in by_end.values() for a in ps for b in ps}
    return sorted(out, key=Bisection.sort_key)


def in_restriction(pt: GroupoidPoint, H: Iterable[Vertex]) -> bool:
    hs = set(H)
    return pt.x.start in hs and pt.y.start in hs


def restricted_units(g: Graph, H: Iterable[Vertex], max_len: int = 2, limit: int = 3,
                     cycle_len: int = 2) -> list[GroupoidPoint]:
    """Units (x, 0, x) of the restricted groupoid with x among the enumerated
    boundary points starting in H."""
    xs = enumerate_boundary_points(g, max_len, limit, starts=H, cycle_len=cycle_len)
    return [GroupoidPoint.unit(x) for x in xs]


def sample_points(g: Graph, max_len: int = 2, limit: int = 3, cycle_len: int = 2,
                  head: int = 2) -> list[GroupoidPoint]:
    """Groupoid points (mu t, |mu| - |nu|, nu t) built from enumerated tails
    and short paths mu, nu ending where the tail starts."""
    tails = enumerate_boundary_points(g, max_len, limit, cycle_len=cycle_len)
    into: dict[Vertex, list[Path]] = defaultdict(list)
    for v in g.vertex_sample(limit):
        for p in g.paths_from(v, head, limit):
            into[p.end].append(p)
    out = set()
    for t in tails:
        ps = into.get(t.start, [Path.trivial(t.start)])
        for mu in ps:
            for nu in ps:
                out.add(GroupoidPoint.of(mu, nu, t))
    return sorted(out)

"""Cylinder sets and boundary points.

A boundary point is either a finite path or an eventually periodic infinite
path ``prefix . cycle . cycle ...`` (a lasso).  Lassos are kept in a
canonical form (primitive cycle, shortest prefix) so that structural
equality is equality of the infinite paths they denote.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import total_ordering
from typing import Iterable, Union

from .graph import Edge, Graph, GraphError, Path, Vertex, VertexClass


def _rotate_right(cycle: Path) -> Path:
    vs, es = cycle.vertices, cycle.edges
    return Path((vs[-2],) + vs[:-1], (es[-1],) + es[:-1])


def _rotate_left(cycle: Path, k: int = 1) -> Path:
    k %= len(cycle)
    if not k:
        return cycle
    vs, es = cycle.vertices, cycle.edges
    return Path(vs[k:-1] + vs[: k + 1], es[k:] + es[:k])


def _primitive(cycle: Path) -> Path:
    es = cycle.edges
    n = len(es)
    for d in range(1, n + 1):
        if n % d == 0 and es == es[:d] * (n // d):
            return cycle.prefix(d)
    return cycle


@total_ordering
@dataclass(frozen=True)
class BoundaryPoint:
    """A finite path (``cycle is None``) or the lasso ``prefix . cycle^inf``."""
    prefix: Path
    cycle: Path | None = None

    def __post_init__(self):
        c = self.cycle
        if c is None:
            return
        if not c.edges or c.start != c.end:
            raise GraphError(f"lasso cycle {c} must be a nonempty closed path")
        if self.prefix.end != c.start:
            raise GraphError(f"lasso prefix {self.prefix} does not end at the cycle start")
        # canonical form: primitive cycle, then absorb the prefix tail into the cycle
        p = self.prefix
        c = _primitive(c)
        while p.edges and p.edges[-1] == c.edges[-1]:
            c = _rotate_right(c)
            p = p.prefix(len(p) - 1)
        object.__setattr__(self, "prefix", p)
        object.__setattr__(self, "cycle", c)

    def _key(self):
        return (self.prefix, () if self.cycle is None else (self.cycle,))

    def __lt__(self, other: "BoundaryPoint") -> bool:
        return self._key() < other._key()

    @classmethod
    def finite(cls, p: Path) -> "BoundaryPoint":
        return cls(p, None)

    @classmethod
    def lasso(cls, prefix: Path, cycle: Path) -> "BoundaryPoint":
        return cls(prefix, cycle)

    @property
    def is_infinite(self) -> bool:
        return self.cycle is not None

    @property
    def start(self) -> Vertex:
        return self.prefix.start

    def take(self, n: int) -> Path:
        """The first n edges as a path (fewer for a short finite point)."""
        if self.cycle is None or n <= len(self.prefix):
            return self.prefix.prefix(min(n, len(self.prefix)))
        out = self.prefix
        c = self.cycle
        while len(out) < n:
            need = n - len(out)
            out = out.then(c if need >= len(c) else c.prefix(need))
        return out

    def starts_with(self, alpha: Path) -> bool:
        if alpha.start != self.start:
            return False
        if self.cycle is None and len(alpha) > len(self.prefix):
            return False
        return self.take(len(alpha)).edges == alpha.edges

    def first_edge(self) -> Edge | None:
        t = self.take(1)
        return t.edges[0] if t.edges else None

    def strip(self, n: int) -> "BoundaryPoint":
        """Remove the first n edges."""
        if n <= len(self.prefix):
            return BoundaryPoint(self.prefix.suffix_from(n), self.cycle)
        if self.cycle is None:
            raise GraphError(f"cannot strip {n} edges from {self}")
        k = n - len(self.prefix)
        c = _rotate_left(self.cycle, k)
        return BoundaryPoint(Path.trivial(c.start), c)

    def remainder(self, alpha: Path) -> "BoundaryPoint":
        if not self.starts_with(alpha):
            raise GraphError(f"{self} does not start with {alpha}")
        return self.strip(len(alpha))

    def prepend(self, p: Path) -> "BoundaryPoint":
        return BoundaryPoint(p.then(self.prefix), self.cycle)

    def __str__(self):
        if self.cycle is None:
            return str(self.prefix)
        head = "" if not self.prefix.edges else f"{self.prefix}."
        return f"{head}({self.cycle})"

    def __repr__(self):
        return f"BoundaryPoint({str(self)!r})"


@dataclass(frozen=True)
class CylinderSpec:
    """C(alpha, G): paths through alpha whose next edge is not in G."""
    alpha: Path
    G: tuple[Edge, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "G", tuple(sorted(set(self.G))))

    def check(self, g: Graph) -> None:
        g.check_path(self.alpha)
        for e in self.G:
            if not g.emits(self.alpha.end, e):
                raise GraphError(f"{e} does not leave r({self.alpha})")

    def __str__(self):
        return f"({self.alpha}, {{{', '.join(str(e) for e in self.G)}}})"


@dataclass(frozen=True)
class Disjoint:
    def __str__(self):
        return "Disjoint"


@dataclass(frozen=True)
class Extends:
    """The cylinder of the longer path sits inside the shorter one."""
    longer: str  # "alpha" or "beta"
    remainder: Path

    def __str__(self):
        return f"Extends({self.longer}, {self.remainder})"


def cylinder_meet(alpha: Path, beta: Path) -> Disjoint | Extends:
    """C(alpha) and C(beta) are nested when one path extends the other and
    disjoint otherwise."""
    if len(alpha) >= len(beta):
        if beta.is_prefix_of(alpha):
            return Extends("alpha", alpha.remainder(beta))
        return Disjoint()
    if alpha.is_prefix_of(beta):
        return Extends("beta", beta.remainder(alpha))
    return Disjoint()


def in_cylinder(x: BoundaryPoint, alpha: Path) -> bool:
    return x.starts_with(alpha)


def point_in_Z(x: BoundaryPoint, spec: CylinderSpec) -> bool:
    if not x.starts_with(spec.alpha):
        return False
    nxt = x.strip(len(spec.alpha)).first_edge()
    return nxt is None or nxt not in spec.G


def in_XE(g: Graph, x: Path | BoundaryPoint) -> bool:
    if isinstance(x, BoundaryPoint):
        if x.is_infinite:
            return True
        x = x.prefix
    return g.classify(x.end) in (VertexClass.SINK, VertexClass.INFINITE_EMITTER)


def check_point(g: Graph, x: BoundaryPoint) -> None:
    g.check_path(x.prefix)
    if x.cycle is not None:
        g.check_path(x.cycle)
    elif not in_XE(g, x):
        raise GraphError(f"{x} ends at a regular vertex")


# -- basic sets ---------------------------------------------------------------

def in_basic_set(x: BoundaryPoint, F: Iterable[Path], G: Iterable[Path]) -> bool:
    """Membership in the intersection of C(a), a in F, minus the union of C(b), b in G."""
    return all(x.starts_with(a) for a in F) and not any(x.starts_with(b) for b in G)


def _decompose(alpha: Path, rems: set[Path]) -> list[CylinderSpec]:
    if not rems:
        return [CylinderSpec(alpha, ())]
    firsts = sorted({p.edges[0] for p in rems})
    out = [CylinderSpec(alpha, tuple(firsts))]
    for e in firsts:
        sub = {p.suffix_from(1) for p in rems if p.edges[0] == e}
        if any(not p.edges for p in sub):
            continue  # C(alpha e) is removed entirely
        step = Path(alpha.vertices + (next(iter(sub)).start,), alpha.edges + (e,))
        out.extend(_decompose(step, sub))
    return out


def normalize_basic_set(F: Iterable[Path], G: Iterable[Path] = (),
                        g: Graph | None = None) -> tuple[CylinderSpec, ...]:
    """Rewrite the intersection of C(a), a in F, minus the union of C(b),
    b in G, as a disjoint union of sets C(alpha, edges).  The empty tuple
    means the set is empty."""
    F, G = list(F), list(G)
    if not F:
        raise GraphError("basic set needs at least one path in F")
    if g is not None:
        for p in F + G:
            g.check_path(p)
    alpha = max(F, key=len)
    if not all(a.is_prefix_of(alpha) for a in F):
        return ()
    rems = set()
    for b in G:
        if b.is_prefix_of(alpha):
            return ()
        if alpha.is_prefix_of(b):
            rems.add(b.remainder(alpha))
    return tuple(_decompose(alpha, rems))


def in_spec_list(x: BoundaryPoint, specs: Iterable[CylinderSpec]) -> bool:
    return any(point_in_Z(x, s) for s in specs)


# -- enumeration --------------------------------------------------------------

def enumerate_boundary_points(g: Graph, max_len: int = 3, limit: int = 3,
                              starts: Iterable[Vertex] | None = None,
                              cycle_len: int = 3) -> list[BoundaryPoint]:
    """Finite boundary paths up to max_len and lassos whose prefix has length
    at most max_len and whose cycle has length at most cycle_len."""
    starts = sorted(starts) if starts is not None else g.vertex_sample(limit)
    out: set[BoundaryPoint] = set()
    for v in starts:
        for p in g.paths_from(v, max_len + cycle_len, limit):
            if len(p) <= max_len and in_XE(g, p):
                out.add(BoundaryPoint(p))
            n = len(p)
            for i in range(max(0, n - cycle_len), n):
                if i <= max_len and p.vertices[i] == p.end:
                    out.add(BoundaryPoint(p.prefix(i), p.suffix_from(i)))
    return sorted(out)


def z_witness(g: Graph, spec: CylinderSpec, unroll: int = 3, limit: int = 4) -> BoundaryPoint | None:
    """A boundary point of C(alpha, G), searched up to the unroll bound;
    None means no witness was found (not that the set is empty)."""
    for t in enumerate_boundary_points(g, unroll, limit, starts=[spec.alpha.end], cycle_len=unroll):
        x = t.prepend(spec.alpha)
        if point_in_Z(x, spec):
            return x
    return None


BoundaryLike = Union[Path, BoundaryPoint]

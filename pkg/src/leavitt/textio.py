"""Text formats: graph documents, element expressions, monoid elements,
projective presentations, boundary and groupoid points, and reports.

Graph documents are line oriented::

    # the clock graph
    VERTICES
    v
    VERTEX_FAMILIES
    w
    EDGES
    EDGE_FAMILIES
    e: v -> w

An edge-family line ``id: src -> dst`` gets a diagonal range when ``dst`` is a
vertex family and a constant range otherwise; ``shift(fam, base)`` and
``pairshift(fam, basefam)`` give chain ranges, a vertex-family ``src`` gives a
diagonal source, and a trailing ``override 1=v1, 2=v1`` moves single members.

Element expressions: ``^`` (star) binds tightest, then ``.`` (product), then
``*`` (scalar or product), then ``+``/``-``.  Example: ``2*e[1].e[1]^ + v``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from .graph import (Const, Diagonal, Edge, EdgeFamily, Graph, GraphError, PairedShift, Path,
                    Shift, Vertex)
from .lpa import LpaElement, format_element, mul, star
from .monoid import MonoidElement, Q, Summand
from .pathspace import BoundaryPoint
from .steinberg import GroupoidPoint

IDENT = r"[A-Za-z_][A-Za-z0-9_']*"


class TextError(GraphError):
    """Syntax or semantic error with a 1-based line and column."""

    def __init__(self, msg: str, line: int = 1, col: int = 1):
        super().__init__(f"{line}:{col}: {msg}")
        self.line = line
        self.col = col
        self.msg = msg


# -- tokenizer ---------------------------------------------------------------------------

_TOKEN = re.compile(rf"\s*(?:(?P<num>\d+)|(?P<id>{IDENT})|(?P<op>->|[-+*./^()\[\]{{}};:,=]))")


@dataclass
class Tok:
    kind: str  # num, id, op, end
    text: str
    col: int


def tokenize(text: str, line: int = 1, offset: int = 0) -> list[Tok]:
    out = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            bad = pos + len(text[pos:]) - len(text[pos:].lstrip())
            raise TextError(f"unexpected character {text[bad]!r}", line, offset + bad + 1)
        kind = m.lastgroup
        out.append(Tok(kind, m.group(kind), offset + m.start(kind) + 1))
        pos = m.end()
    out.append(Tok("end", "", offset + len(text) + 1))
    return out


class _Stream:
    def __init__(self, toks: list[Tok], line: int = 1):
        self.toks = toks
        self.i = 0
        self.line = line

    def peek(self, k: int = 0) -> Tok:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def next(self) -> Tok:
        t = self.peek()
        self.i += 1
        return t

    def accept(self, text: str) -> bool:
        if self.peek().kind == "op" and self.peek().text == text:
            self.i += 1
            return True
        return False

    def expect(self, text: str) -> Tok:
        t = self.peek()
        if not (t.kind == "op" and t.text == text):
            self.fail(f"expected {text!r}, found {t.text or 'end of input'!r}", t)
        return self.next()

    def ident(self) -> Tok:
        t = self.peek()
        if t.kind != "id":
            self.fail(f"expected identifier, found {t.text or 'end of input'!r}", t)
        return self.next()

    def integer(self) -> int:
        t = self.peek()
        if t.kind != "num":
            self.fail(f"expected integer, found {t.text or 'end of input'!r}", t)
        self.next()
        return int(t.text)

    def done(self):
        t = self.peek()
        if t.kind != "end":
            self.fail(f"unexpected {t.text!r}", t)

    def fail(self, msg: str, t: Tok | None = None):
        t = t or self.peek()
        raise TextError(msg, self.line, t.col)


def _indexed(s: _Stream) -> tuple[str, int, Tok]:
    t = s.ident()
    idx = 0
    if s.accept("["):
        idx = s.integer()
        if idx < 1:
            s.fail("family index must be positive")
        s.expect("]")
    return t.text, idx, t


# -- graph documents ----------------------------------------------------------------------

SECTIONS = ("VERTICES", "VERTEX_FAMILIES", "EDGES", "EDGE_FAMILIES")


def _strip_comment(line: str) -> str:
    i = line.find("#")
    return line if i < 0 else line[:i]


def parse_graph(text: str) -> Graph:
    section = None
    decl: dict[str, tuple[str, int, int]] = {}  # name -> (namespace, line, col)
    vertices: list[str] = []
    vfams: list[str] = []
    edge_lines: list[tuple[int, list[Tok]]] = []
    fam_lines: list[tuple[int, list[Tok]]] = []
    header_line = 1

    def declare(name: str, ns: str, line: int, col: int):
        if name in decl:
            other = decl[name]
            first = f"first declared as {other[0]} at line {other[1]}"
            raise TextError(f"duplicate identifier {name!r} ({first})",
                            line, col)
        decl[name] = (ns, line, col)

    for ln, raw in enumerate(text.splitlines(), start=1):
        body = _strip_comment(raw)
        if not body.strip():
            continue
        word = body.strip()
        if word in SECTIONS:
            section = word
            if word == "VERTICES":
                header_line = ln
            continue
        if section is None:
            raise TextError("content before the first section header", ln, 1)
        toks = tokenize(body, ln)
        if section in ("VERTICES", "VERTEX_FAMILIES"):
            s = _Stream(toks, ln)
            while s.peek().kind != "end":
                t = s.ident()
                declare(t.text, "vertex" if section == "VERTICES" else "vertex family", ln, t.col)
                (vertices if section == "VERTICES" else vfams).append(t.text)
                s.accept(",")
        elif section == "EDGES":
            s = _Stream(toks, ln)
            t = s.ident()
            declare(t.text, "edge", ln, t.col)
            edge_lines.append((ln, toks))
        else:
            s = _Stream(toks, ln)
            t = s.ident()
            declare(t.text, "edge family", ln, t.col)
            fam_lines.append((ln, toks))

    if not vertices and not vfams:
        raise TextError("graph has no vertices", header_line, 1)

    def vref(s: _Stream) -> Vertex:
        name, idx, t = _indexed(s)
        ns = decl.get(name, (None,))[0]
        if idx == 0 and ns != "vertex":
            if ns == "vertex family":
                s.fail(f"{name!r} is a vertex family; give an index", t)
            s.fail(f"unknown vertex {name!r}", t)
        if idx > 0 and ns != "vertex family":
            s.fail(f"index on {name!r}, which is not a vertex family", t)
        return Vertex(name, idx)

    def vfam(s: _Stream) -> str:
        t = s.ident()
        if decl.get(t.text, (None,))[0] != "vertex family":
            s.fail(f"unknown vertex family {t.text!r}", t)
        return t.text

    edges: dict[str, tuple[Vertex, Vertex]] = {}
    for ln, toks in edge_lines:
        s = _Stream(toks, ln)
        name = s.ident().text
        s.expect(":")
        src = vref(s)
        s.expect("->")
        dst = vref(s)
        s.done()
        edges[name] = (src, dst)

    fams: list[EdgeFamily] = []
    for ln, toks in fam_lines:
        s = _Stream(toks, ln)
        name = s.ident().text
        s.expect(":")
        t = s.peek()
        if decl.get(t.text, (None,))[0] == "vertex family" and s.peek(1).text != "[":
            source = Diagonal(s.ident().text)
        else:
            v = vref(s)
            if v.is_member:
                s.fail("an edge family's source must be a concrete vertex or a vertex family", t)
            source = Const(v)
        s.expect("->")
        t = s.peek()
        if t.kind == "id" and t.text in ("shift", "pairshift") and s.peek(1).text == "(":
            s.next()
            s.expect("(")
            fam = vfam(s)
            s.expect(",")
            if t.text == "shift":
                rng = Shift(fam, vref(s))
            else:
                rng = PairedShift(fam, vfam(s))
            s.expect(")")
        elif decl.get(t.text, (None,))[0] == "vertex family" and s.peek(1).text != "[":
            rng = Diagonal(s.ident().text)
        else:
            rng = Const(vref(s))
        overrides = []
        if s.peek().kind == "id" and s.peek().text == "override":
            s.next()
            while True:
                n = s.integer()
                if n < 1:
                    s.fail("override index must be positive")
                s.expect("=")
                overrides.append((n, vref(s)))
                if not s.accept(","):
                    break
        s.done()
        fams.append(EdgeFamily(name, source, rng, tuple(overrides)))
    try:
        return Graph(vertices, vfams, edges, fams)
    except TextError:
        raise
    except GraphError as exc:
        raise TextError(str(exc), header_line, 1) from None


def _fmt_range(rk) -> str:
    if isinstance(rk, Const):
        return str(rk.vertex)
    if isinstance(rk, Diagonal):
        return rk.family
    if isinstance(rk, Shift):
        return f"shift({rk.family}, {rk.base})"
    return f"pairshift({rk.family}, {rk.base_family})"


def format_graph(g: Graph) -> str:
    lines = ["VERTICES"]
    lines += sorted(g.vertices)
    lines.append("VERTEX_FAMILIES")
    lines += sorted(g.vertex_families)
    lines.append("EDGES")
    for name, (s, r) in sorted(g.edges.items()):
        lines.append(f"{name}: {s} -> {r}")
    lines.append("EDGE_FAMILIES")
    for name, f in sorted(g.edge_families.items()):
        src = str(f.source.vertex) if isinstance(f.source, Const) else f.source.family
        line = f"{name}: {src} -> {_fmt_range(f.range)}"
        if f.source_overrides:
            line += " override " + ", ".join(f"{n}={v}" for n, v in f.source_overrides)
        lines.append(line)
    return "\n".join(lines) + "\n"


# -- references ---------------------------------------------------------------------------------

def _resolve(g: Graph, s: _Stream, name: str, idx: int, t: Tok) -> Vertex | Edge:
    if idx == 0:
        if name in g.vertices:
            return Vertex(name)
        if name in g.edges:
            return Edge(name)
        if name in g.vertex_families or name in g.edge_families:
            s.fail(f"{name!r} is a family; give an index", t)
        s.fail(f"unknown identifier {name!r}", t)
    if name in g.vertex_families:
        return Vertex(name, idx)
    if name in g.edge_families:
        return Edge(name, idx)
    if name in g.vertices or name in g.edges:
        s.fail(f"index on {name!r}, which is not a family", t)
    s.fail(f"unknown identifier {name!r}", t)


def parse_vertex(text: str, g: Graph) -> Vertex:
    s = _Stream(tokenize(text))
    x = _resolve(g, s, *_indexed(s))
    s.done()
    if not isinstance(x, Vertex):
        raise TextError(f"{text.strip()!r} is not a vertex")
    return x


def parse_edge(text: str, g: Graph) -> Edge:
    s = _Stream(tokenize(text))
    x = _resolve(g, s, *_indexed(s))
    s.done()
    if not isinstance(x, Edge):
        raise TextError(f"{text.strip()!r} is not an edge")
    return x


# -- element expressions ----------------------------------------------------------------------------

@dataclass
class _Val:
    value: object  # Fraction or LpaElement
    ends: tuple[Vertex, Vertex] | None = None  # set for bare generator literals


class _ElementParser:
    def __init__(self, text: str, g: Graph):
        self.g = g
        self.s = _Stream(tokenize(text))

    def parse(self) -> LpaElement:
        v = self.expr()
        self.s.done()
        return self.as_element(v.value)

    def as_element(self, x) -> LpaElement:
        if isinstance(x, LpaElement):
            return x
        if x == 0:  # the printer writes the zero element as "0"
            return LpaElement(self.g, {})
        raise TextError("a bare number is not an algebra element; multiply it by a generator")

    def expr(self) -> _Val:
        acc = self.term()
        while True:
            if self.s.accept("+"):
                sign = 1
            elif self.s.accept("-"):
                sign = -1
            else:
                return _Val(acc.value)
            rhs = self.term()
            acc = _Val(self.add(acc.value, rhs.value, sign))

    def add(self, a, b, sign):
        if isinstance(a, LpaElement) and isinstance(b, LpaElement):
            return a + b * sign
        if not isinstance(a, LpaElement) and not isinstance(b, LpaElement):
            return a + b * sign
        self.s.fail("cannot add a number to an algebra element")

    def term(self) -> _Val:
        neg = self.s.accept("-")
        acc = self.chain()
        while self.s.accept("*"):
            rhs = self.chain()
            acc = _Val(self.times(acc.value, rhs.value))
        if neg:
            acc = _Val(acc.value * -1)
        return acc

    def times(self, a, b):
        if isinstance(a, LpaElement) and isinstance(b, LpaElement):
            return mul(a, b)
        return a * b

    def chain(self) -> _Val:
        acc = self.unary()
        while self.s.peek().text == "." and self.s.peek().kind == "op":
            t = self.s.next()
            rhs = self.unary()
            if acc.ends and rhs.ends and acc.ends[1] != rhs.ends[0]:
                self.s.fail(f"non-composable path literal: {acc.ends[1]} != {rhs.ends[0]}", t)
            ends = None
            if acc.ends and rhs.ends:
                ends = (acc.ends[0], rhs.ends[1])
            acc = _Val(self.times(acc.value, rhs.value), ends)
        return acc

    def unary(self) -> _Val:
        v = self.atom()
        while self.s.accept("^"):
            if not isinstance(v.value, LpaElement):
                v = _Val(v.value)
                continue
            ends = (v.ends[1], v.ends[0]) if v.ends else None
            v = _Val(star(v.value), ends)
        return v

    def atom(self) -> _Val:
        t = self.s.peek()
        if t.kind == "num":
            self.s.next()
            num = int(t.text)
            if self.s.peek().text == "/" and self.s.peek(1).kind == "num":
                self.s.next()
                den = int(self.s.next().text)
                if den == 0:
                    self.s.fail("zero denominator", t)
                return _Val(Fraction(num, den))
            return _Val(Fraction(num))
        if self.s.accept("("):
            v = self.expr()
            self.s.expect(")")
            return _Val(v.value)
        if t.kind == "id":
            name, idx, tok = _indexed(self.s)
            x = _resolve(self.g, self.s, name, idx, tok)
            if isinstance(x, Vertex):
                return _Val(LpaElement.vertex(self.g, x), (x, x))
            return _Val(LpaElement.edge(self.g, x), (self.g.source(x), self.g.range(x)))
        self.s.fail(f"unexpected {t.text or 'end of input'!r}", t)


def parse_element(text: str, g: Graph) -> LpaElement:
    """Parse an element expression; the result is not normalized."""
    return _ElementParser(text, g).parse()


def format_lpa(a: LpaElement) -> str:
    return format_element(a)


# -- paths and points --------------------------------------------------------------------------------

def _path_tokens(s: _Stream, g: Graph) -> Path:
    name, idx, t = _indexed(s)
    x = _resolve(g, s, name, idx, t)
    if isinstance(x, Vertex):
        return Path.trivial(x)
    edges = [x]
    while s.peek().text == "." and s.peek(1).kind == "id":
        s.next()
        e = _resolve(g, s, *_indexed(s))
        if not isinstance(e, Edge):
            s.fail(f"{e} is not an edge")
        edges.append(e)
    try:
        return g.path(*edges)
    except GraphError as exc:
        s.fail(str(exc), t)


def parse_path(text: str, g: Graph) -> Path:
    s = _Stream(tokenize(text))
    p = _path_tokens(s, g)
    s.done()
    return p


def _point_tokens(s: _Stream, g: Graph) -> BoundaryPoint:
    if s.accept("("):
        cyc = _path_tokens(s, g)
        s.expect(")")
        return BoundaryPoint(Path.trivial(cyc.start), cyc)
    p = _path_tokens(s, g)
    if s.peek().text == "." and s.peek(1).text == "(":
        s.next()
        s.next()
        cyc = _path_tokens(s, g)
        s.expect(")")
        return BoundaryPoint(p, cyc)
    return BoundaryPoint(p)


def parse_point(text: str, g: Graph) -> BoundaryPoint:
    s = _Stream(tokenize(text))
    x = _point_tokens(s, g)
    s.done()
    return x


def parse_groupoid_point(text: str, g: Graph) -> GroupoidPoint:
    """``x, k, y`` with boundary points x, y and an integer k; the point must
    be of the form (mu t, |mu| - |nu|, nu t)."""
    s = _Stream(tokenize(text))
    x = _point_tokens(s, g)
    s.expect(",")
    neg = s.accept("-")
    k = s.integer() * (-1 if neg else 1)
    s.expect(",")
    y = _point_tokens(s, g)
    s.done()
    if not groupoid_member(x, k, y):
        raise TextError(f"({x}, {k}, {y}) is not a groupoid element")
    return GroupoidPoint(x, k, y)


def groupoid_member(x: BoundaryPoint, k: int, y: BoundaryPoint, extra: int = 4) -> bool:
    """Is there m, n with m - n = k and the two points agreeing after m and n edges?"""
    bound = len(x.prefix) + len(y.prefix) + extra
    if x.cycle is not None:
        bound += len(x.cycle) * len(y.cycle or x.cycle)
    for m in range(bound + 1):
        n = m - k
        if n < 0:
            continue
        try:
            if x.strip(m) == y.strip(n):
                return True
        except GraphError:
            continue
    return False


def format_point(x: BoundaryPoint) -> str:
    return str(x)


# -- monoid elements and presentations ------------------------------------------------------------

def parse_monoid(text: str, g: Graph) -> MonoidElement:
    s = _Stream(tokenize(text))
    counts: dict = {}
    if s.peek().kind == "num" and s.peek().text == "0" and s.peek(1).kind == "end":
        return MonoidElement()
    while True:
        n = 1
        if s.peek().kind == "num":
            n = s.integer()
            s.expect("*")
        t = s.peek()
        if t.kind == "id" and t.text == "q" and s.peek(1).text == "(":
            s.next()
            s.expect("(")
            v = _resolve(g, s, *_indexed(s))
            if not isinstance(v, Vertex):
                s.fail(f"{v} is not a vertex", t)
            s.expect(";")
            edges = _edge_set(s, g)
            s.expect(")")
            if not edges:
                s.fail("q-generator needs a nonempty edge set", t)
            gen = Q(v, tuple(edges))
        else:
            v = _resolve(g, s, *_indexed(s))
            if not isinstance(v, Vertex):
                s.fail(f"{v} is not a vertex", t)
            gen = v
        counts[gen] = counts.get(gen, 0) + n
        if not s.accept("+"):
            break
    s.done()
    return MonoidElement.of(counts)


def _edge_set(s: _Stream, g: Graph) -> list[Edge]:
    s.expect("{")
    out = []
    if s.accept("}"):
        return out
    while True:
        t = s.peek()
        e = _resolve(g, s, *_indexed(s))
        if not isinstance(e, Edge):
            s.fail(f"{e} is not an edge", t)
        out.append(e)
        if s.accept("}"):
            return out
        s.expect(",")


def parse_spec(text: str, g: Graph) -> list[Summand]:
    """One summand per line: ``vertex {edges} multiplicity`` (edges and
    multiplicity optional)."""
    out = []
    for ln, raw in enumerate(text.splitlines(), start=1):
        body = _strip_comment(raw)
        if not body.strip():
            continue
        s = _Stream(tokenize(body, ln), ln)
        t = s.peek()
        v = _resolve(g, s, *_indexed(s))
        if not isinstance(v, Vertex):
            s.fail(f"{v} is not a vertex", t)
        edges = _edge_set(s, g) if s.peek().text == "{" else []
        n = s.integer() if s.peek().kind == "num" else 1
        s.done()
        if n < 1:
            raise TextError("multiplicity must be positive", ln, t.col)
        out.append(Summand(v, tuple(edges), n))
    if not out:
        raise TextError("empty presentation")
    return out


def format_spec(spec) -> str:
    return "\n".join(f"{s.vertex} {{{', '.join(map(str, s.edges))}}} {s.mult}" for s in spec) + "\n"


# -- reports -------------------------------------------------------------------------------------------

def _table(rows: list[list[str]]) -> list[str]:
    width = max((len(c) for r in rows for c in r), default=0)
    return ["  " + " | ".join(c.ljust(width) for c in r).rstrip() for r in rows]


def format_pipeline_report(rep, title: str = "endomorphism pipeline", sample: int = 12) -> str:
    lines = [f"# {title}"]
    lines.append("input: " + ", ".join(map(str, rep.input_spec)))
    lines.append("normalized: " + ", ".join(map(str, rep.normalized_spec)))
    lines.append("multiplicities: " + ", ".join(f"{v}:{n}" for v, n in rep.multiplicities.items()))
    lines.append(f"sigma = {rep.sigma}")
    lines.append("H = {" + ", ".join(map(str, rep.H)) + "}")
    lines.append(f"CK inclusion: {'ok' if rep.ck_inclusion else 'FAILED'}")
    n = rep.matrix_shape.size
    lines.append(f"matrix shape: {n}x{n}")
    lines += _table(rep.matrix_shape.rows())
    lines.append("blocks before heads:")
    lines += _table(rep.matrix_shape.base_rows())
    lines.append("trace:")
    lines += [f"  {t}" for t in rep.trace]
    lines.append("final graph:")
    lines += [f"  {x}" for x in format_graph(rep.final_graph).splitlines()]
    total = len(rep.basis_sample)
    lines.append(f"restricted basis sample ({min(sample, total)} of {total}):")
    lines += [f"  {b}" for b in rep.basis_sample[:sample]]
    return "\n".join(lines) + "\n"


def format_verdict(v) -> str:
    lines = [v.answer]
    if v.witness:
        cx, cy = v.witness
        lines.append("left:  " + " -> ".join(map(str, cx)))
        lines.append("right: " + " -> ".join(map(str, cy)))
    return "\n".join(lines) + "\n"


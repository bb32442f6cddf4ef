"""Command-line interface.

Exit status: 0 on success, 1 when a search ends with Unknown, 2 on errors
(including usage errors and failed checks).
"""
from __future__ import annotations

import argparse
import contextlib
import io
import sys
from pathlib import Path as FilePath

from .graph import Graph, GraphError, Vertex
from .lpa import graded_components, mul, normal_form, star
from .monoid import default_universe, equivalent, normalize_projective_spec
from .pathspace import normalize_basic_set
from .steinberg import (SteinbergElement, convolution_at, convolve, evaluate, pi_inv, pi_map,
                        restrict_basis, sample_points)
from .textio import (format_graph, format_pipeline_report, format_spec, format_verdict,
                     parse_edge, parse_element, parse_graph, parse_groupoid_point, parse_monoid,
                     parse_path, parse_spec, parse_vertex)
from .transforms import cstar_pipeline, end_pipeline, out_split


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


def _read(path: str) -> str:
    try:
        return FilePath(path).read_text()
    except OSError as exc:
        raise GraphError(f"cannot read {path}: {exc.strerror}") from None


def _graph(path: str) -> Graph:
    return parse_graph(_read(path))


def _element(text: str, g: Graph):
    return parse_element(text, g)


# -- commands -----------------------------------------------------------------------------------

def cmd_validate(a) -> tuple[int, str]:
    g = _graph(a.graph)
    lines = ["ok"]
    for v in sorted(g.vertex_sample(0)):
        lines.append(f"vertex {v}: {g.classify(v)}")
    for f in sorted(g.vertex_families):
        kinds = sorted({str(g.classify(Vertex(f, n))) for n in range(1, a.limit + 1)})
        lines.append(f"vertex family {f}: members {', '.join(kinds)} (checked to index {a.limit})")
    lines.append(f"edges: {len(g.edges)}, edge families: {len(g.edge_families)}")
    return 0, "\n".join(lines) + "\n"


def cmd_nf(a):
    g = _graph(a.graph)
    return 0, f"{normal_form(_element(a.expr, g))}\n"


def cmd_mul(a):
    g = _graph(a.graph)
    x, y = _element(a.left, g), _element(a.right, g)
    return 0, f"{normal_form(mul(x, y))}\n"


def cmd_star(a):
    g = _graph(a.graph)
    return 0, f"{normal_form(star(_element(a.expr, g)))}\n"


def cmd_grade(a):
    g = _graph(a.graph)
    parts = graded_components(normal_form(_element(a.expr, g)))
    if not parts:
        return 0, "0\n"
    return 0, "".join(f"{d}: {x}\n" for d, x in parts.items())


def _universe_arg(g: Graph, specs: list[str]):
    out = {}
    for item in specs or []:
        if ":" not in item:
            raise GraphError(f"universe entry {item!r} must look like v:e[1],e[2]")
        v, es = item.split(":", 1)
        out[parse_vertex(v, g)] = [parse_edge(e, g) for e in es.split(",") if e.strip()]
    return out


def cmd_monoid_eq(a):
    g = _graph(a.graph)
    x, y = parse_monoid(a.left, g), parse_monoid(a.right, g)
    uni = default_universe(g, x, y, extras=_universe_arg(g, a.universe))
    v = equivalent(g, x, y, a.depth, uni, max_states=a.max_states)
    return (0 if v else 1), format_verdict(v)


def cmd_decompose(a):
    g = _graph(a.graph)
    if a.spec:
        return 0, format_spec(normalize_projective_spec(g, parse_spec(_read(a.spec), g)))
    if not a.meet:
        raise UsageError("decompose needs a presentation file or at least one --meet path")
    F = [parse_path(p, g) for p in a.meet]
    G = [parse_path(p, g) for p in a.minus or []]
    specs = normalize_basic_set(F, G, g)
    if not specs:
        return 0, "Empty\n"
    return 0, "".join(f"{s}\n" for s in specs)


def cmd_outsplit(a):
    g = _graph(a.graph)
    v = parse_vertex(a.vertex, g)
    parts = [[parse_edge(e, g) for e in p.split(",") if e.strip()] for p in a.part]
    r = out_split(g, v, parts)
    lines = [*r.trace, "graph:"]
    lines += [f"  {x}" for x in format_graph(r.graph_out).splitlines()]
    lines.append("generator images:")
    for key, img in r.generator_map(a.limit).items():
        label = f"{key[1]}^" if isinstance(key, tuple) else str(key)
        lines.append(f"  {label} -> {img}")
    return 0, "\n".join(lines) + "\n"


def cmd_pipeline_end(a):
    g = _graph(a.graph)
    rep = end_pipeline(g, parse_spec(_read(a.spec), g), a.maxlen, a.limit)
    return 0, format_pipeline_report(rep, "endomorphism pipeline", a.sample)


def cmd_pipeline_cstar(a):
    g = _graph(a.graph)
    rep = cstar_pipeline(g, parse_spec(_read(a.spec), g), a.maxlen, a.limit)
    return 0, format_pipeline_report(rep, "graph-level C*-corner pipeline", a.sample)


def cmd_corner_basis(a):
    g = _graph(a.graph)
    H = [parse_vertex(h, g) for h in a.H.split(",") if h.strip()]
    basis = restrict_basis(g, H, a.maxlen, a.limit)
    lines = [f"{len(basis)} bisections"]
    for b in basis:
        lines.append(f"{b}  <->  {pi_inv(SteinbergElement(g, {b: 1}))}")
    return 0, "\n".join(lines) + "\n"


def cmd_steinberg_check(a):
    g = _graph(a.graph)
    x = normal_form(_element(a.left, g))
    y = normal_form(_element(a.right, g))
    lhs = pi_map(normal_form(mul(x, y)))
    rhs = convolve(pi_map(x), pi_map(y))
    lines = [f"pi(ab)   = {lhs}", f"pi(a)*pi(b) = {rhs}"]
    ok = lhs == rhs
    pts = sample_points(g, a.maxlen, a.limit)
    bad = [p for p in pts if evaluate(rhs, p) != convolution_at(pi_map(x), pi_map(y), p)]
    lines.append(f"homomorphism: {'ok' if ok else 'MISMATCH'}")
    lines.append(f"pointwise: {len(pts) - len(bad)}/{len(pts)} points agree")
    for p in bad[:5]:
        lines.append(f"  disagreement at {p}")
    return (0 if ok and not bad else 2), "\n".join(lines) + "\n"


def cmd_eval(a):
    g = _graph(a.graph)
    f = pi_map(normal_form(_element(a.expr, g)))
    pt = parse_groupoid_point(a.point, g)
    return 0, f"{evaluate(f, pt)}\n"


# -- parser ----------------------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="leavitt", description="Exact computation in Leavitt path and Steinberg algebras.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def cmd(name, fn, help_, graph=True):
        sp = sub.add_parser(name, help=help_, description=help_)
        if graph:
            sp.add_argument("graph", help="graph document")
        sp.set_defaults(fn=fn)
        return sp

    sp = cmd("validate", cmd_validate, "parse a graph document and classify its vertices")
    sp.add_argument("--limit", type=int, default=3, help="family members to classify")
    sp = cmd("nf", cmd_nf, "normal form of an element expression")
    sp.add_argument("expr")
    sp = cmd("mul", cmd_mul, "normal form of a product")
    sp.add_argument("left")
    sp.add_argument("right")
    sp = cmd("star", cmd_star, "normal form of the adjoint")
    sp.add_argument("expr")
    sp = cmd("grade", cmd_grade, "homogeneous components of the normal form")
    sp.add_argument("expr")
    sp = cmd("monoid-eq", cmd_monoid_eq, "bounded search for a common reduct in the graph monoid")
    sp.add_argument("left")
    sp.add_argument("right")
    sp.add_argument("--depth", type=int, default=5)
    sp.add_argument("--universe", action="append", metavar="V:E1,E2",
                    help="extra edges allowed in q-generators at an infinite emitter")
    sp.add_argument("--max-states", type=int, default=50_000)
    sp = cmd("decompose", cmd_decompose,
             "normalize a projective presentation, or split a basic set of cylinders")
    sp.add_argument("spec", nargs="?", help="presentation file (one 'vertex {edges} n' per line)")
    sp.add_argument("--meet", action="append", metavar="PATH", help="path whose cylinder is intersected")
    sp.add_argument("--minus", action="append", metavar="PATH", help="path whose cylinder is removed")
    sp = cmd("outsplit", cmd_outsplit, "out-split a vertex")
    sp.add_argument("vertex")
    sp.add_argument("--part", action="append", required=True, metavar="E1,E2",
                    help="a finite part of the out-edges (repeatable); the rest forms the last part")
    sp.add_argument("--limit", type=int, default=2)
    for name, fn, help_ in (("pipeline-end", cmd_pipeline_end, "endomorphism-ring pipeline"),
                            ("pipeline-cstar", cmd_pipeline_cstar, "graph-level C*-corner pipeline")):
        sp = cmd(name, fn, help_)
        sp.add_argument("spec", help="presentation file")
        sp.add_argument("--maxlen", type=int, default=1)
        sp.add_argument("--limit", type=int, default=2)
        sp.add_argument("--sample", type=int, default=12)
    sp = cmd("corner-basis", cmd_corner_basis, "bisections Z(a, b) with both sources in H")
    sp.add_argument("--H", required=True, help="comma separated vertices")
    sp.add_argument("--maxlen", type=int, default=1)
    sp.add_argument("--limit", type=int, default=3)
    sp = cmd("steinberg-check", cmd_steinberg_check,
             "compare pi(ab) with pi(a)*pi(b) and check the convolution pointwise")
    sp.add_argument("left")
    sp.add_argument("right")
    sp.add_argument("--maxlen", type=int, default=2)
    sp.add_argument("--limit", type=int, default=3)
    sp = cmd("eval", cmd_eval, "value of pi(element) at a groupoid point 'x, k, y'")
    sp.add_argument("expr")
    sp.add_argument("point")
    return p


def run_command(argv: list[str]) -> tuple[int, str]:
    parser = build_parser()
    out = io.StringIO()
    try:
        with contextlib.redirect_stdout(out):
            args = parser.parse_args(argv)
    except UsageError as exc:
        return 2, f"{exc}\n"
    except SystemExit as exc:  # --help
        return (0 if not exc.code else 2), out.getvalue()
    try:
        return args.fn(args)
    except UsageError as exc:
        return 2, f"error: {exc}\n"
    except (GraphError, ValueError) as exc:
        return 2, f"error: {exc}\n"


def main(argv: list[str] | None = None) -> int:
    status, text = run_command(sys.argv[1:] if argv is None else argv)
    (sys.stdout if status != 2 else sys.stderr).write(text)
    return status


if __name__ == "__main__":
    raise SystemExit(main())

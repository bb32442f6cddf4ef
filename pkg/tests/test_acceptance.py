"""Acceptance suite: one check per criterion, each printing a PASS/FAIL line.

Run with ``pytest -s tests/test_acceptance.py`` or ``python3 tests/test_acceptance.py``.
"""
import random
import sys
from collections import Counter
from pathlib import Path as FilePath

import pytest

sys.path.insert(0, str(FilePath(__file__).parent))

import oracles  # noqa: E402
from conftest import DATA, E, V  # noqa: E402
from leavitt import catalog  # noqa: E402
from leavitt.cli import run_command  # noqa: E402
from leavitt.graph import Vertex  # noqa: E402
from leavitt.lpa import (LpaElement, Monomial, corner_filter, enumerate_monomials,  # noqa: E402
                         graded_components, mul, mul_monomial, normal_form,
                         normal_form_with_steps, product, random_element, random_monomial,
                         relation_residuals, step_bound)
from leavitt.monoid import (MonoidElement, Q, Summand, default_universe, equivalent,  # noqa: E402
                            normalize_projective_spec, replay_witness, spec_universe, to_monoid)
from leavitt.steinberg import (GroupoidPoint, SteinbergElement, convolution_at, convolve,  # noqa: E402
                               evaluate, pi_inv, pi_map, restrict_basis, sample_points)
from leavitt.textio import format_lpa, parse_element  # noqa: E402
from leavitt.transforms import (attach_heads, cateiso_pipeline, cstar_pipeline,  # noqa: E402
                                end_pipeline, out_split, stabilize)
from leavitt.pathspace import enumerate_boundary_points  # noqa: E402

ALL_GRAPHS = ["t2", "clock", "loop_exit", "loop", "emitter", "emitter_split"]


def el(text, g):
    return parse_element(text, g)


def check(cond, msg):
    if not cond:
        raise AssertionError(msg)


# -- 1. the clock corner --------------------------------------------------------------------------

def criterion_1():
    g = catalog.clock()
    v = V("v")
    es = [g.path(E("e", n)) for n in range(1, 11)]
    basis = enumerate_monomials(g, 2, 10, normal_only=True)
    corner = {m for m in basis if corner_filter(LpaElement(g, {m: 1}), [v])[1]}
    want = {Monomial(g.vertex_path("v"), g.vertex_path("v"))} | {Monomial(p, p) for p in es}
    check(corner == want, f"corner basis {sorted(map(str, corner))}")

    units = {Monomial(p, p): n for n, p in enumerate(es, 1)}
    for a, n in units.items():
        for b, m in units.items():
            got = mul_monomial(g, a, b)
            check(got == (LpaElement(g, {a: 1}) if n == m else LpaElement(g)),
                  f"e{n}e{n}* times e{m}e{m}*")

    # v -> (1, 0) and e_n e_n* -> (0, eps_n) into the unitized direct sum
    def image(x: LpaElement):
        k, vec = 0, Counter()
        for mono, c in x.terms.items():
            if mono in units:
                vec[units[mono]] += c
            else:
                check(mono == Monomial(g.vertex_path("v"), g.vertex_path("v")), f"{mono} left the corner")
                k += c
        return (k, {n: c for n, c in vec.items() if c})

    elems = [LpaElement.vertex(g, v)] + [LpaElement(g, {m: 1}) for m in units]
    for a in elems:
        for b in elems:
            check(image(normal_form(mul(a, b))) == oracles.unitized_mul(image(a), image(b)),
                  f"unitized map on {a} * {b}")

    for n in range(1, 11):
        got = normal_form(product(el(f"e[{n}]^", g), el("v", g), el(f"e[{n}]", g)))
        check(got == el(f"w[{n}]", g), f"e{n}* v e{n} = {got}")
    return f"{len(corner)} corner monomials, {len(elems) ** 2} products, identity for n <= 10"


# -- 2. the worked example end to end ---------------------------------------------------------------

def criterion_2():
    g = catalog.loop_emitter()
    spec = catalog.loop_emitter_spec()
    check(spec == [Summand(V("v"), (E("e"),), 1), Summand(V("v"), (E("f", 1),), 1)], "input spec")
    norm = normalize_projective_spec(g, spec)
    check(list(norm) == [Summand(V("v"), (E("e"), E("f", 1)), 2), Summand(V("v"), (), 1),
                         Summand(V("w"), (), 1)], f"normalized {norm}")
    cat = cateiso_pipeline(g, spec)
    check(cat.graph == catalog.loop_emitter_split(), "split graph")
    check(cat.multiplicities == {V("v1"): 1, V("v2"): 3, V("w"): 1}, f"multiplicities {cat.multiplicities}")
    heads = attach_heads(cat.graph, cat.multiplicities)
    check(heads.H == [V("v1"), V("v2_2"), V("v2_1"), V("v2"), V("w")], f"H {heads.H}")
    rep = end_pipeline(g, spec)
    shape = rep.matrix_shape
    check(shape.size == 5, "matrix size")
    check(shape.labels == ["v1", "v2_2", "v2_1", "v2", "w"], f"labels {shape.labels}")
    check(shape.base_labels == ["v1", "v2", "v2", "v2", "w"], f"base labels {shape.base_labels}")
    check(shape.base_rows()[1] == ["v2 L v1", "v2 L v2", "v2 L v2", "v2 L v2", "v2 L w"], "block row")
    check(rep.ck_inclusion, "F is not a complete subgraph of the headed graph")
    return "normalized spec, multiplicities {v1:1, v2:3, w:1}, H of size 5, 5x5 blocks"


# -- 3. out-split relation audit ------------------------------------------------------------------------

def criterion_3():
    cases = [(catalog.two_edges(), V("a"), [[E("x")]]),
             (catalog.clock(), V("v"), [[E("e", 1)]]),
             (catalog.loop_emitter(), V("v"), [[E("e"), E("f", 1)]])]
    audited = 0
    for g, v, parts in cases:
        r = out_split(g, v, parts)
        for label, resid in relation_residuals(g, r.images, 3):
            check(resid.is_zero(), f"{label} on {v}: {resid}")
            audited += 1
        for key, img in r.generator_map(3).items():
            degs = set(graded_components(normal_form(img)))
            want = -1 if isinstance(key, tuple) else 0 if isinstance(key, Vertex) else 1
            check(degs == {want}, f"degree of image of {key}")
        F = r.graph_out
        for e in g.edge_sample(3):
            copies = r.images.edge_copies(e)
            for c1 in copies:
                for c2 in copies:
                    if c1 != c2:
                        x = normal_form(mul(LpaElement.edge(F, c1), LpaElement.ghost(F, c2)))
                        check(x.is_zero(), f"{c1} {c2}* = {x}")
    return f"{audited} relation instances vanish, degrees kept, copies orthogonal"


# -- 4. the homomorphism into the Steinberg algebra ------------------------------------------------------

def _support_points(f):
    g = f.graph
    out = set()
    for b in f.support():
        for t in enumerate_boundary_points(g, 2, 2, starts=[b.alpha.end], cycle_len=2)[:2]:
            out.add(GroupoidPoint.of(b.alpha, b.beta, t))
    return out


def criterion_4():
    counts = {}
    for name in ("t2", "clock", "loop_exit", "emitter_split"):
        g = catalog.ALL[name]()
        rng = random.Random(2024)
        base = sample_points(g, 2, 6)
        if name == "t2":
            check(len(base) == 9, "T2 groupoid is not exhausted")  # the whole groupoid
        else:
            check(len(base) >= 20, f"only {len(base)} points on {name}")
        if name == "loop_exit":
            check(any(p.x.is_infinite for p in base), "no lasso points")
        fewest = None
        for _ in range(200):
            a, b = random_monomial(g, rng), random_monomial(g, rng)
            fa, fb = pi_map(LpaElement(g, {a: 1})), pi_map(LpaElement(g, {b: 1}))
            conv = convolve(fa, fb)
            check(pi_map(normal_form(mul_monomial(g, a, b))) == conv, f"pi({a} {b}) on {name}")
            pts = set(rng.sample(base, min(len(base), 20))) | _support_points(conv)
            for p in pts:
                check(evaluate(conv, p) == convolution_at(fa, fb, p), f"pointwise at {p} on {name}")
            fewest = len(pts) if fewest is None else min(fewest, len(pts))
        counts[name] = fewest
    return "200 pairs per graph; fewest points per pair " + ", ".join(f"{k}:{v}" for k, v in counts.items())


# -- 5. the graph monoid --------------------------------------------------------------------------------

PIPELINE_SPECS = [
    ("emitter", catalog.loop_emitter_spec()),
    ("clock", [Summand(V("v"), (E("e", 1),), 1), Summand(V("v"), (E("e", 1), E("e", 2)), 1)]),
    ("clock", [Summand(V("v"), (E("e", 1),), 1)]),
    ("clock", [Summand(V("v"), (), 2), Summand(V("w", 2), (), 1)]),
    ("emitter", [Summand(V("w"), (E("g", 1),), 2), Summand(V("v"), (), 1)]),
    ("t2", [Summand(V("a"), (), 1), Summand(V("b"), (), 2)]),
]


def M(*gens):
    return MonoidElement.of(Counter(gens))


def _depth_one(g, x, y, uni=None):
    uni = default_universe(g, x, y) if uni is None else uni
    verdict = equivalent(g, x, y, 1, uni)
    check(verdict and replay_witness(g, verdict, uni), f"{x} ~ {y} at depth 1")


def criterion_5():
    t2, clock, em = catalog.two_edges(), catalog.clock(), catalog.loop_emitter()
    le, split = catalog.loop_with_exit(), catalog.loop_emitter_split()
    # relation (1): regular vertices
    _depth_one(t2, M(V("a")), M(V("b"), V("b")))
    _depth_one(le, M(V("u")), M(V("u"), V("z")))
    _depth_one(split, M(V("v1")), M(V("v1"), V("v2"), V("w")))
    # relation (2): infinite emitters
    _depth_one(clock, M(V("v")), M(V("w", 1), Q(V("v"), (E("e", 1),))))
    _depth_one(em, M(V("v")), M(V("v"), V("w"), Q(V("v"), (E("e"), E("f", 1)))))
    # relation (3): enlarging the edge set of a q-generator
    _depth_one(clock, M(Q(V("v"), (E("e", 1),))), M(V("w", 2), Q(V("v"), (E("e", 1), E("e", 2)))))
    _depth_one(em, M(Q(V("w"), (E("g", 1),))), M(V("u"), Q(V("w"), (E("g", 1), E("g", 2)))))

    for name, spec in PIPELINE_SPECS:
        g = catalog.ALL[name]()
        x, y = to_monoid(spec), to_monoid(normalize_projective_spec(g, spec))
        uni = spec_universe(g, spec)
        verdict = equivalent(g, x, y, 10, uni)
        check(verdict and replay_witness(g, verdict, uni), f"normalized spec on {name}: {x} vs {y}")

    yes = 0
    rng = random.Random(5)
    for name in ("t2", "clock", "loop_exit", "emitter", "emitter_split"):
        g = catalog.ALL[name]()
        gens = g.vertex_sample(2)
        uni = {v: frozenset(g.out_edges(v, 2)) for v in g.infinite_emitters()}
        for _ in range(30):
            x = MonoidElement.of(Counter(rng.choice(gens) for _ in range(rng.randint(1, 2))))
            y = MonoidElement.of(Counter(rng.choice(gens) for _ in range(rng.randint(1, 3))))
            verdict = equivalent(g, x, y, 3, uni)
            if verdict:
                yes += 1
                check(replay_witness(g, verdict, uni), f"unreplayable Yes for {x} ~ {y}")
    check(equivalent(t2, M(V("a")), M(V("b")), 6).answer == "Unknown", "a ~ b answered Yes")
    return f"7 defining instances, {len(PIPELINE_SPECS)} pipeline specs, {yes} random Yes verdicts replayed"


# -- 6. restricted groupoid and corners -------------------------------------------------------------------

CORNER_CASES = [("t2", [V("a")]), ("t2", [V("b")]), ("clock", [V("v"), V("w", 2)]),
                ("loop_exit", [V("u")]), ("loop", [V("u")]), ("emitter", [V("v")]),
                ("emitter_split", [V("v1"), V("w")])]


def criterion_6():
    total = 0
    for name, H in CORNER_CASES:
        g = catalog.ALL[name]()
        basis = restrict_basis(g, H, 3, 3)
        images = set()
        for b in basis:
            x = pi_inv(SteinbergElement(g, {b: 1}))
            check(corner_filter(x, H)[1], f"{b} leaves the corner on {name}")
            (mono,) = x.terms
            images.add(mono)
        corner = {m for m in enumerate_monomials(g, 3, 3, sources=H)
                  if corner_filter(LpaElement(g, {m: 1}), H)[1]}
        check(corner == images, f"corner monomials differ on {name}: "
                                f"{sorted(map(str, corner ^ images))[:5]}")
        total += len(basis)
    return f"{total} bisections over {len(CORNER_CASES)} choices of H equal the corner monomials"


# -- 7. graph-level C*-corner pipeline ----------------------------------------------------------------------

def criterion_7():
    g = catalog.loop_emitter()
    rep = cstar_pipeline(g, catalog.loop_emitter_spec())
    SF = rep.final_graph
    F = rep.split_graph
    want = {V("v1"), V("v2_h", 1), V("v2_h", 2), V("v2"), V("w")}
    check(set(rep.H) == want and len(rep.H) == 5, f"H {rep.H}")
    st = stabilize(F, rep.multiplicities)
    check(st.graph == SF, "stabilized graph")
    for u in F.vertex_sample(3):
        below = u
        for k in range(1, 6):
            w = st.head_vertex(u, k)
            check(SF.has_vertex(w), f"missing head vertex {w}")
            outs = SF.out_edges(w, 3)
            check(len(outs) == 1 and SF.range(outs[0]) == below, f"head edge at {w}")
            below = w
    clock = catalog.clock()
    triv = cstar_pipeline(clock, [Summand(V("v"), (), 1)])
    check(triv.split_graph == clock, "the clock was split")
    check(triv.final_graph == stabilize(clock, {V("v"): 1}).graph, "SC")
    check(triv.H == [V("v")], f"H {triv.H}")
    return "H = {v1, v2^1, v2^2, v2, w}, an infinite head at every vertex, clock gives (SC, {v})"


# -- 8. rewriting robustness ---------------------------------------------------------------------------------

def criterion_8():
    worst = 0.0
    for name in ALL_GRAPHS:
        g = catalog.ALL[name]()
        rng = random.Random(8)
        for _ in range(200):
            a = random_element(g, rng, terms=5)
            nf, steps = normal_form_with_steps(a)
            bound = step_bound(a)
            check(steps <= bound, f"{steps} steps > bound {bound} on {name}")
            if bound:
                worst = max(worst, steps / bound)
            items = list(a.terms.items())
            rng.shuffle(items)
            acc = LpaElement(g)
            for m, c in items:
                acc = normal_form(acc + LpaElement(g, {m: c}))
            check(acc == nf, f"order dependence on {name}")
            check(normal_form(nf) == nf, f"normal form not idempotent on {name}")
    return f"200 elements on each of {len(ALL_GRAPHS)} graphs; worst steps/bound {worst:.2f}"


# -- 9. the command line ------------------------------------------------------------------------------------

CLI_EXAMPLES = [
    (["pipeline-end", DATA / "example3_7.graph", DATA / "spec.txt"], 0,
     ["H = {v1, v2_2, v2_1, v2, w}", "matrix shape: 5x5"]),
    (["monoid-eq", DATA / "clock.graph", "v", "w[1] + q(v;{e[1]})", "--depth", "3"], 0, ["Yes"]),
    (["nf", DATA / "t2.graph", "x.x^ + y.y^"], 0, ["a"]),
]


def criterion_9():
    for argv, status, lines in CLI_EXAMPLES:
        argv = [str(a) for a in argv]
        runs = [run_command(argv) for _ in range(3)]
        check(runs[0] == runs[1] == runs[2], f"{argv[0]} is not deterministic")
        got_status, text = runs[0]
        check(got_status == status, f"{argv[0]} exit {got_status}")
        for line in lines:
            check(line in text.splitlines(), f"{argv[0]} lacks {line!r}")
    for name in ALL_GRAPHS:
        g = catalog.ALL[name]()
        rng = random.Random(9)
        for _ in range(100):
            a = normal_form(random_element(g, rng, terms=4))
            check(parse_element(format_lpa(a), g) == a, f"round trip of {a} on {name}")
    return f"3 commands byte-identical over 3 runs; 100 round trips on each of {len(ALL_GRAPHS)} graphs"


CRITERIA = {1: criterion_1, 2: criterion_2, 3: criterion_3, 4: criterion_4, 5: criterion_5,
            6: criterion_6, 7: criterion_7, 8: criterion_8, 9: criterion_9}


def run_one(n):
    try:
        detail = CRITERIA[n]()
    except AssertionError as exc:
        return False, f"criterion {n}: FAIL - {exc}"
    return True, f"criterion {n}: PASS - {detail}"


@pytest.mark.parametrize("n", sorted(CRITERIA))
def test_criterion(n, capsys):
    ok, line = run_one(n)
    with capsys.disabled():
        print(f"\n{line}")
    assert ok, line


if __name__ == "__main__":
    results = [run_one(n) for n in sorted(CRITERIA)]
    for _, line in results:
        print(line)
    sys.exit(0 if all(ok for ok, _ in results) else 1)

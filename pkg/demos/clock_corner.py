"""The corner at v of the infinite clock.

The clock has one vertex v emitting edges e[1], e[2], ... to sinks w[1],
w[2], ...  Cutting the algebra down to H = {v} leaves v together with the
range projections e[n] e[n]*, which multiply like the unit and the standard
idempotents of a unitized direct sum.
"""
from leavitt import catalog
from leavitt.lpa import LpaElement, corner_filter, enumerate_monomials, mul, normal_form
from leavitt.textio import parse_element

N = 5

g = catalog.clock()
v = g.vertex_path("v").start

corner = [m for m in enumerate_monomials(g, 2, N, normal_only=True)
          if corner_filter(LpaElement(g, {m: 1}), [v])[1]]
print(f"corner monomials up to index {N}:", ", ".join(map(str, corner)))

print("\nproducts inside the corner:")
for a in corner[:4]:
    row = []
    for b in corner[:4]:
        row.append(str(normal_form(mul(LpaElement(g, {a: 1}), LpaElement(g, {b: 1})))))
    print("  " + " | ".join(f"{x:>12}" for x in row))

# v - e[1]e[1]* is again an idempotent, and it kills e[1]
p = parse_element("v - e[1].e[1]^", g)
print("\n(v - e1 e1*)^2 =", normal_form(mul(p, p)))
print("(v - e1 e1*) e1 =", normal_form(mul(p, parse_element("e[1]", g))))

# each w[n] sits outside the corner but is reached through e[n]
for n in range(1, 4):
    x = normal_form(parse_element(f"e[{n}]^.v.e[{n}]", g))
    print(f"e{n}* v e{n} = {x}")

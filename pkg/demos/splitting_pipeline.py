"""From a projective presentation to a matrix of corners.

Start from a graph with an infinite emitter v and the presentation
P = vL(v - ee*) + vL(v - f1 f1*).  Its class in the graph monoid is rewritten
into summands that sit at single vertices after one out-split of v, and
chains of head vertices then turn multiplicities into an honest corner.
"""
from leavitt import catalog
from leavitt.monoid import equivalent, normalize_projective_spec, spec_universe, to_monoid
from leavitt.transforms import attach_heads, cateiso_pipeline, cstar_pipeline

E = catalog.loop_emitter()
spec = catalog.loop_emitter_spec()

print("presentation: ", ", ".join(map(str, spec)))
norm = normalize_projective_spec(E, spec)
print("normalized:   ", ", ".join(map(str, norm)))

# the two presentations define the same monoid element
uni = spec_universe(E, spec)
print("same class:   ", equivalent(E, to_monoid(spec), to_monoid(norm), 10, uni).answer)

cat = cateiso_pipeline(E, spec)
for line in cat.trace:
    print("  ", line)
print("multiplicities:", {str(k): n for k, n in cat.multiplicities.items()})

heads = attach_heads(cat.graph, cat.multiplicities)
print("H =", [str(h) for h in heads.H])
for base, n in cat.multiplicities.items():
    for y in range(n):
        print(f"  head path of height {y} at {base}: {heads.head_path(base, y)}")

# the analytic variant uses infinite heads instead of finite chains
rep = cstar_pipeline(E, spec)
print("\nwith infinite heads, H =", [str(h) for h in rep.H])

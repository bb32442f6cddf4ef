"""Monomials as bisections of the boundary path groupoid.

A monomial p q* becomes the indicator of the compact open set of triples
(p x, |p| - |q|, q x).  Products of monomials turn into convolutions, and
the convolution can be checked one groupoid point at a time.
"""
import random

from leavitt import catalog
from leavitt.lpa import LpaElement, mul, normal_form, random_monomial
from leavitt.pathspace import enumerate_boundary_points
from leavitt.steinberg import convolution_at, convolve, evaluate, pi_map, sample_points
from leavitt.textio import parse_element

g = catalog.loop_with_exit()
print("boundary points:", ", ".join(map(str, enumerate_boundary_points(g, 3, 3, cycle_len=1))))

a, b = parse_element("c", g), parse_element("c^", g)
print("pi(c) =", pi_map(a), "  pi(c*) =", pi_map(b))
print("pi(c) * pi(c*) =", convolve(pi_map(a), pi_map(b)))
print("pi(c c*)       =", pi_map(normal_form(mul(a, b))))

pts = sample_points(g, 2, 3)
f = convolve(pi_map(a), pi_map(b))
print("\nvalue of pi(c) * pi(c*) on sample points:")
for p in pts[:8]:
    print(f"  {str(p):<18} direct {evaluate(f, p)}  pointwise {convolution_at(pi_map(a), pi_map(b), p)}")

rng = random.Random(0)
agree = 0
for _ in range(50):
    m1, m2 = random_monomial(g, rng), random_monomial(g, rng)
    x, y = LpaElement(g, {m1: 1}), LpaElement(g, {m2: 1})
    agree += pi_map(normal_form(mul(x, y))) == convolve(pi_map(x), pi_map(y))
print(f"\nhomomorphism holds on {agree}/50 random pairs")

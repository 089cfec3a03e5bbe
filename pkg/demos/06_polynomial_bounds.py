"""
Second-order polynomial bounds
==============================

Costs of oracle runs are compared with polynomials in the size function
``f`` of the name and the precision ``n``.
"""

from fractions import Fraction

from seqreal import check_bound, parse_sop, tail_sum
from seqreal.encoding import size_of
from seqreal.machine import eval_sop, run
from seqreal.names import Geometric, Spike, make_name

p = parse_sop("f(x+2) + f(f(x)*f(x)) + x*x + 4")
print(p)
print([eval_sop(p, lambda m: m**3, x) for x in range(3)])

names = [make_name(Geometric(ratio=Fraction(1, 2)), s) for s in ("standard", "seeded(1)")]
names += [make_name(Spike(index=4, value_at=Fraction(10**6)))]

quadratic = check_bound(tail_sum, parse_sop("(f(n+2)+n+2)^2"), names, range(13))
print(quadratic.passed, quadratic.checked)

linear = check_bound(tail_sum, parse_sop("n+1"), names, range(3))
print(linear.passed, linear.violations[0])

# cost against bound for one name
fn = names[0].regular_fn()
for n in (0, 4, 8, 12):
    _, trace = run(tail_sum, names[0], n)
    print(n, trace.cost, eval_sop(parse_sop("(f(n+2)+n+2)^2"), lambda m: size_of(fn, m), n))

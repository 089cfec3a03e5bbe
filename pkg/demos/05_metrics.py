"""
Metrics on sequence spaces
==========================

``d1`` and ``d2`` need a summability modulus to approximate from above;
without one only the truncated sums, which increase to the metric, are
available.  ``D`` induces the product topology and needs no modulus.
"""

from fractions import Fraction

from seqreal import metric_full, metric_lower, product_metric_d
from seqreal.names import Expr, Geometric, PerIndex, Spike, Zeros, make_name
from seqreal.numerics import render_decimal

zeros = Zeros(modulus=Expr("0"))
half = Geometric(ratio=Fraction(1, 2), modulus=Expr("k+1"))
quarter = Geometric(ratio=Fraction(1, 4), modulus=Expr("(k+1)/2"))

# lower bounds climb toward the full value
for M in (0, 2, 5, 10, 20):
    print(M, render_decimal(metric_lower(half, quarter, "d1", M)))
print("d1 ~", render_decimal(metric_full(half, quarter, "d1", 20)), "exact 2/3")

# d2 without a root, and with one
print(render_decimal(metric_full(half, zeros, "d2", 16)), render_decimal(metric_full(half, zeros, "d2", 16, root=True)))

# unit spikes at 0 and 1 are at d1-distance 2 once both indices are summed
e0, e1 = Spike(index=0, value_at=Fraction(1)), Spike(index=1, value_at=Fraction(1))
print(metric_lower(e0, e1, "d1", 0), metric_lower(e0, e1, "d1", 1))

# D(x, y) = sup_i min(|x_i - y_i|, 1) / (i + 1)
for k in (2, 6, 10):
    print(k, product_metric_d(make_name(Zeros()), make_name(Spike(index=3, value_at=Fraction(10))), k))
print(render_decimal(product_metric_d(make_name(PerIndex(expr=Expr("k"))), make_name(Zeros()), 8)))

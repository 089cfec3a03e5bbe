"""
Which coordinates does a functional read?
=========================================

The cord of a run is the set of coordinates it queried.  For the tail sum
it is ``{0..n+1}`` whatever the representation; for the shifted tail sum it
also depends on the size of ``x_0``.
"""

from fractions import Fraction

from seqreal import shifted_tail_sum, tail_sum, verify_cord_fixed, verify_cord_invariance
from seqreal.cli import render_cord
from seqreal.names import Geometric, Spike, Zeros

# same cords across five representations and two implementations
report = verify_cord_invariance(tail_sum, Geometric(ratio=Fraction(1, 2)), precisions=range(6))
print(report.passed, report.runs)
for n, cord in report.cords.items():
    print(n, render_cord(cord))

# a large |x_0| shrinks the shifted tail sum's window
for x0 in (0, 3, 6, 12):
    r = verify_cord_invariance(shifted_tail_sum, Spike(index=0, value_at=Fraction(x0)), precisions=[8])
    print(f"x0={x0:<3} cord {render_cord(r.cords[8])}")

# so its cord is not fixed across inputs
fixed = verify_cord_fixed(shifted_tail_sum, [Zeros(), Spike(index=0, value_at=Fraction(12))], range(4))
for v in fixed.violations:
    print(v.kind, v.detail)

# near |x_0| = 7/2 two legal names already disagree on the window
edge = verify_cord_invariance(shifted_tail_sum, Spike(index=0, value_at=Fraction(7, 2)),
                              styles=["standard", "seeded(1)", "seeded(2)", "seeded(3)", "seeded(4)"], precisions=[4])
print("half-integer x0 invariant:", edge.passed)

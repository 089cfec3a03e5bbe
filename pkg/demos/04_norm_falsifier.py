"""
No computable norm on summable sequences
========================================

Any candidate reads finitely many coordinates of the zero sequence.  A
spike just past them, scaled by ``l = 2^(n+2)``, produces the same answers,
so the candidate cannot tell ``y_1`` from ``y_l`` or from zero.
"""

from seqreal import falsify_norm
from seqreal.functionals import fake_sup, fake_trunc_l1, fake_weighted

for candidate in (fake_sup(3), fake_weighted(5), fake_trunc_l1):
    for n in (4, 10):
        r = falsify_norm(candidate, n)
        o1, ol = r.observed_outputs
        print(f"{candidate.id:15} n={n:<3} k={r.max_queried_coord:<3} spike at {r.witness_spike.index:<3}"
              f" F(y_1)={o1} F(y_l)={ol} demand={r.homogeneity_demand} {r.verdict.value}")

# the record is checkable on its own
r = falsify_norm(fake_trunc_l1, 8)
print(r.to_dict())
print("certificate holds:", r.certificate_holds())

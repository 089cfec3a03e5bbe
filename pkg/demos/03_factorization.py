"""
Bounded queries factor through finitely many coordinates
========================================================

A functional that never asks more than ``l`` queries is a function of the
``l`` coordinates it asks about.  ``factor`` finds them and replays the
functional against plain arguments.
"""

from fractions import Fraction

from seqreal import factor, finite_combo, projection
from seqreal.experiments import CordMismatch, project
from seqreal.functionals import AVERAGE, shifted_tail_sum
from seqreal.names import FiniteList, Geometric, Spike, Zeros, make_name

samples = [Zeros(), Geometric(ratio=Fraction(-1, 3)), FiniteList(entries=(Fraction(5), Fraction(1, 7), Fraction(2), Fraction(9)))]

fact = factor(finite_combo([2, 7], AVERAGE), samples, 8)
print(fact.coordinates)

# the replayed finite function on plain rationals: (1 + 1/3) / 2
print(fact([Fraction(1), Fraction(1, 3)], 8))

# and on a projected sequence
name = make_name(Geometric(ratio=Fraction(1, 2)))
print(fact(project(name, fact.coordinates), 8), (Fraction(1, 4) + Fraction(1, 128)) / 2)

print(factor(projection(5), samples, 4).coordinates)

# no bound holds for the shifted tail sum: its coordinates move with x_0
try:
    factor(shifted_tail_sum, samples + [Spike(index=0, value_at=Fraction(20))], 6, ell=3)
except CordMismatch as exc:
    print("CordMismatch:", exc)

"""
Names, answer words and traces
==============================

A sequence reaches a functional only through its name: a word function
answering ``0^i 1 0^j`` with a padded code of a dyadic near ``x_i``.
"""

from fractions import Fraction

from seqreal import make_name, run, tail_sum
from seqreal.encoding import query_word
from seqreal.names import Geometric, SequenceName

# the sequence 1, -2/3, 4/9, ... under three representations
spec = Geometric(ratio=Fraction(-2, 3))
names = [make_name(spec, style) for style in ("standard", "leftApprox", "seeded(1)")]

# one query, three different but equally legal answers
w = query_word(1, 5)
for name in names:
    answer = name.respond(w)
    print(f"{name.id:28} {answer}  -> {SequenceName.read(1, answer)}")

# answer lengths depend only on the query length
print([names[0].schedule(m) for m in range(1, 12)])

# a traced run: output, queried coordinates and cost
out, trace = run(tail_sum, names[2], 6)
print(out, sorted(trace.cord), trace.cost)
print(trace.to_json()[:160], "...")

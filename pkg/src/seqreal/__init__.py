"""Exact oracle computation over sequences of reals.

Sequences are handed to functionals as names: answer-word functions that
return a dyadic within ``2**-j`` of coordinate ``i`` on the query
``0^i 1 0^j``.  Runs are fully traced, so query sets, costs and
counterexamples are observable objects.
"""

from .encoding import decode_dyadic, encode_dyadic, pad_to, parse_query, query_word, unpad
from .experiments import (
    CordMismatch,
    FiniteFactorization,
    NormCounterexample,
    QueryBoundExceeded,
    Verdict,
    factor,
    falsify_norm,
    verify_cord_fixed,
    verify_cord_invariance,
)
from .functionals import (
    approximate,
    constant,
    finite_combo,
    metric_full,
    metric_lower,
    product_metric_d,
    projection,
    resolve_functional,
    shifted_tail_sum,
    tail_sum,
)
from .machine import Functional, QueryBudgetExceeded, QueryTrace, check_bound, parse_sop, run
from .names import MissingModulus, SequenceName, SequenceSpec, SpecError, load_spec, make_name, spec_from_json
from .numerics import Dyadic, parse_dyadic, parse_number, rat_approx, round_to

__all__ = [
    "CordMismatch",
    "Dyadic",
    "FiniteFactorization",
    "Functional",
    "MissingModulus",
    "NormCounterexample",
    "QueryBoundExceeded",
    "QueryBudgetExceeded",
    "QueryTrace",
    "SequenceName",
    "SequenceSpec",
    "SpecError",
    "Verdict",
    "approximate",
    "check_bound",
    "constant",
    "decode_dyadic",
    "encode_dyadic",
    "factor",
    "falsify_norm",
    "finite_combo",
    "load_spec",
    "make_name",
    "metric_full",
    "metric_lower",
    "pad_to",
    "parse_dyadic",
    "parse_number",
    "parse_query",
    "parse_sop",
    "product_metric_d",
    "projection",
    "query_word",
    "rat_approx",
    "resolve_functional",
    "round_to",
    "run",
    "shifted_tail_sum",
    "spec_from_json",
    "tail_sum",
    "unpad",
    "verify_cord_fixed",
    "verify_cord_invariance",
]

__version__ = "0.1.0"

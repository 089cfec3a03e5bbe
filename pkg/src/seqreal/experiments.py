"""Executable constructions: cord checks, bounded-query factorization, norm falsifier."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Iterable, Sequence

from .machine import Functional, QueryBudgetExceeded, QueryTrace, run
from .names import SequenceName, SequenceSpec, Spike, Zeros, make_name, spec_from_json
from .numerics import Dyadic, parse_dyadic, rat_approx, to_fraction

__all__ = [
    "CordMismatch",
    "QueryBoundExceeded",
    "FiniteFactorization",
    "factor",
    "project",
    "InvarianceReport",
    "verify_cord_invariance",
    "FixedCordReport",
    "verify_cord_fixed",
    "Verdict",
    "NormCounterexample",
    "falsify_norm",
]

DEFAULT_STYLES = ("standard", "leftApprox", "seeded(1)", "seeded(2)", "seeded(3)")


class CordMismatch(Exception):
    """Two runs that should share their query coordinates did not."""

    def __init__(self, message: str, first: QueryTrace | None = None, second: QueryTrace | None = None):
        super().__init__(message)
        self.first = first
        self.second = second


class QueryBoundExceeded(Exception):
    """A run submitted more queries than the declared bound ``l``."""

    def __init__(self, message: str, trace: QueryTrace | None = None):
        super().__init__(message)
        self.trace = trace


# -- factorization -------------------------------------------------------

Arg = Callable[[int], Dyadic]


def _as_arg(x: Any) -> Arg:
    if callable(x):
        return x
    q = to_fraction(parse_dyadic(x) if isinstance(x, str) and "*" in x else x) if not isinstance(x, Fraction) else x
    return lambda j: rat_approx(q, j)


class _RoutingOracle:
    """Sends the t-th query of the simulated functional to argument t."""

    def __init__(self, args: Sequence[Arg], coordinates: Sequence[int]):
        self.args = args
        self.coordinates = coordinates
        self.count = 0

    def query(self, i: int, j: int) -> Dyadic:
        t = self.count
        if t >= len(self.args):
            raise QueryBoundExceeded(f"simulated functional asked a query beyond its {len(self.args)} arguments")
        if self.coordinates[t] != i:
            raise CordMismatch(f"query {t + 1} asked coordinate {i}, factorization expected {self.coordinates[t]}")
        self.count += 1
        return self.args[t](j)


@dataclass(frozen=True)
class FiniteFactorization:
    """``f(x) = phi(x_{i_1}, ..., x_{i_l})`` with ``phi`` obtained by simulating ``f``.

    ``coordinates`` lists the coordinate of each query in submission order.
    Calling the factorization with ``l`` arguments (oracles ``j -> Dyadic``
    or plain rationals) replays ``f`` with its t-th query answered by
    argument t.
    """

    coordinates: tuple[int, ...]
    source: Functional
    samples_checked: int = 0

    @property
    def provenance(self) -> str:
        return self.source.id

    def __call__(self, args: Sequence[Any], n: int) -> Dyadic:
        if len(args) != len(self.coordinates):
            raise ValueError(f"expected {len(self.coordinates)} arguments, got {len(args)}")
        return self.source.body(_RoutingOracle([_as_arg(a) for a in args], self.coordinates), n)

    def to_dict(self) -> dict[str, Any]:
        return {"functional": self.provenance, "coordinates": list(self.coordinates), "samplesChecked": self.samples_checked}


def project(name: SequenceName, coordinates: Sequence[int]) -> list[Arg]:
    """Argument oracles reading the listed coordinates of ``name``."""
    return [lambda j, i=i: name.approx(i, j) for i in coordinates]


def factor(
    f: Functional,
    sample_specs: Sequence[SequenceSpec],
    n: int,
    ell: int | None = None,
    precisions: Iterable[int] = (),
    style: str = "standard",
) -> FiniteFactorization:
    """Factor a bounded-query functional through finitely many coordinates.

    Every sample is run at ``n`` (and at each extra precision); all runs must
    submit queries with the same coordinate sequence, else
    :class:`CordMismatch`.  The replayed finite function is then checked to
    reproduce every sample's output exactly.
    """
    bound = f.query_bound if ell is None else ell
    if bound is None:
        raise ValueError(f"{f.id} declares no query bound")
    if not sample_specs:
        raise ValueError("factor needs at least one sample")
    probe: QueryTrace | None = None
    outputs: list[tuple[SequenceName, Dyadic]] = []
    for spec in sample_specs:
        name = make_name(spec, style)
        for m in (n, *precisions):
            out, trace = run(f, name, m)
            if probe is None:
                probe = trace
            elif trace.coordinates() != probe.coordinates():
                raise CordMismatch(
                    f"{f.id}: {probe.name} at n={probe.n} queried {probe.coordinates()}, "
                    f"{trace.name} at n={m} queried {trace.coordinates()}",
                    probe,
                    trace,
                )
            if m == n:
                outputs.append((name, out))
    assert probe is not None
    coords = tuple(probe.coordinates())
    if len(coords) > bound:
        raise QueryBoundExceeded(f"{f.id} submitted {len(coords)} queries, declared bound is {bound}", probe)
    fact = FiniteFactorization(coords, f, len(outputs))
    for name, out in outputs:
        replay = fact(project(name, coords), n)
        if replay != out:
            raise AssertionError(f"replay of {f.id} on {name.id} gave {replay}, run gave {out}")
    return fact


# -- cord invariance -----------------------------------------------------


@dataclass
class CordDisagreement:
    n: int
    first: QueryTrace
    second: QueryTrace

    def to_dict(self) -> dict[str, Any]:
        return {"n": self.n, "first": self.first.to_dict(), "second": self.second.to_dict()}


@dataclass
class InvarianceReport:
    functional: str
    spec: str
    cords: dict[int, list[int]] = field(default_factory=dict)
    disagreements: list[CordDisagreement] = field(default_factory=list)
    runs: int = 0

    @property
    def passed(self) -> bool:
        return not self.disagreements

    def to_dict(self) -> dict[str, Any]:
        return {
            "functional": self.functional,
            "spec": self.spec,
            "passed": self.passed,
            "runs": self.runs,
            "cords": {str(n): c for n, c in self.cords.items()},
            "disagreements": [d.to_dict() for d in self.disagreements],
        }


def verify_cord_invariance(
    f: Functional,
    spec: SequenceSpec,
    styles: Sequence[str] = DEFAULT_STYLES,
    precisions: Iterable[int] = range(9),
    with_alternative: bool = True,
) -> InvarianceReport:
    """Check that the cord at each precision is the same for every name of ``spec``.

    When ``f`` has an alternative implementation, its runs join the
    comparison, which tests independence from the machine as well.
    """
    machines = [f] + ([f.alternative] if with_alternative and f.alternative is not None else [])
    names = [make_name(spec, s) for s in styles]
    report = InvarianceReport(f.id, spec.label())
    for n in precisions:
        reference: QueryTrace | None = None
        for machine in machines:
            for name in names:
                _, trace = run(machine, name, n)
                report.runs += 1
                if reference is None:
                    reference = trace
                    report.cords[n] = sorted(trace.cord)
                elif trace.cord != reference.cord:
                    report.disagreements.append(CordDisagreement(n, reference, trace))
    return report


# -- fixed cords ---------------------------------------------------------

VARIES_ACROSS_INPUTS = "cord-varies-across-inputs"
VARIES_ACROSS_PRECISIONS = "cord-varies-across-precisions"
BOUND_EXCEEDED = "query-bound-exceeded"


@dataclass(frozen=True)
class CordViolation:
    kind: str
    detail: str


@dataclass
class FixedCordReport:
    functional: str
    common_cord: list[int] | None = None
    max_coordinate: int = -1
    violations: list[CordViolation] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations

    def kinds(self) -> set[str]:
        return {v.kind for v in self.violations}

    def to_dict(self) -> dict[str, Any]:
        return {
            "functional": self.functional,
            "passed": self.passed,
            "commonCord": self.common_cord,
            "maxCoordinate": self.max_coordinate,
            "violations": [{"kind": v.kind, "detail": v.detail} for v in self.violations],
        }


def verify_cord_fixed(
    f: Functional,
    specs: Sequence[SequenceSpec],
    precisions: Sequence[int] = tuple(range(13)),
) -> FixedCordReport:
    """Check that ``f``'s cord is bounded, the same at every precision and the same for every input."""
    report = FixedCordReport(f.id)
    table: dict[tuple[int, int], frozenset[int]] = {}
    for s, spec in enumerate(specs):
        name = make_name(spec)
        for n in precisions:
            _, trace = run(f, name, n)
            table[s, n] = trace.cord
            report.max_coordinate = max(report.max_coordinate, *trace.cord, -1)
            if f.query_bound is not None and len(trace.queries) > f.query_bound:
                report.violations.append(
                    CordViolation(BOUND_EXCEEDED, f"{name.id} n={n}: {len(trace.queries)} > {f.query_bound}")
                )
    for n in precisions:
        cords = {table[s, n] for s in range(len(specs))}
        if len(cords) > 1:
            shown = sorted(sorted(c) for c in cords)[:2]
            report.violations.append(CordViolation(VARIES_ACROSS_INPUTS, f"n={n}: {shown}"))
    for s, spec in enumerate(specs):
        cords = {table[s, n] for n in precisions}
        if len(cords) > 1:
            report.violations.append(CordViolation(VARIES_ACROSS_PRECISIONS, f"{spec.label()}: {len(cords)} distinct cords"))
    if report.passed and table:
        report.common_cord = sorted(next(iter(table.values())))
    return report


# -- norm falsifier ------------------------------------------------------


class Verdict(str, enum.Enum):
    HOMOGENEITY_OR_DEFINITENESS = "HomogeneityOrDefinitenessViolated"
    APPROXIMATION_CONTRACT = "ApproximationContractViolated"
    QUERY_BUDGET = "QueryBudgetExceeded"


@dataclass
class NormCounterexample:
    """Outcome of running the no-computable-norm construction against a candidate.

    For the two violation verdicts, the candidate's outputs on the zero
    sequence, on ``y_1`` and on ``y_l = l * y_1`` coincide because the three
    runs see identical oracle answers.  A norm approximated to ``2**-n``
    would then have ``F(y_1), F(y_l) <= 2**-(n-1)`` while homogeneity asks
    ``F(y_l) = l F(y_1)``; ``homogeneity_demand`` is the value ``l * 2**-n``
    that ``F(y_l)`` would reach if ``F(y_1)`` were visible at precision ``n``.
    """

    candidate: str
    n: int
    verdict: Verdict
    max_queried_coord: int | None = None
    witness_spike: SequenceSpec | None = None
    scaling: int = 0
    zero_output: Dyadic | None = None
    observed_outputs: tuple[Dyadic, Dyadic] | None = None
    claimed_values: tuple[Fraction, Fraction] | None = None
    traces_coincide: bool = False
    queries_on_zero: int = 0

    @property
    def output_bound(self) -> Fraction:
        return Fraction(2, 2**self.n)

    @property
    def homogeneity_demand(self) -> Fraction:
        return Fraction(self.scaling, 2**self.n)

    @property
    def unit_witness(self) -> SequenceSpec | None:
        if self.witness_spike is None:
            return None
        return Spike(index=self.witness_spike.index, value_at=Fraction(1))  # type: ignore[attr-defined]

    def certificate_holds(self) -> bool:
        """Recheck the verdict from the recorded numbers with exact arithmetic."""
        if self.verdict is Verdict.QUERY_BUDGET:
            return self.max_queried_coord is None
        if self.observed_outputs is None or self.zero_output is None or not self.traces_coincide:
            return False
        o1, ol = self.observed_outputs
        collapsed = o1 == ol == self.zero_output
        small = abs(o1) <= self.output_bound and abs(ol) <= self.output_bound
        k = -1 if self.max_queried_coord is None else self.max_queried_coord
        support_ok = self.witness_spike is not None and self.witness_spike.index == k + 1  # type: ignore[attr-defined]
        if self.verdict is Verdict.HOMOGENEITY_OR_DEFINITENESS:
            return collapsed and small and support_ok and self.homogeneity_demand >= 1
        if self.claimed_values is None:
            return abs(self.zero_output) > Fraction(1, 2**self.n)
        eps = Fraction(1, 2**self.n)
        c1, cl = self.claimed_values
        return collapsed and (abs(o1.to_fraction() - c1) > eps or abs(ol.to_fraction() - cl) > eps)

    def to_dict(self) -> dict[str, Any]:
        return {
            "candidate": self.candidate,
            "n": self.n,
            "verdict": self.verdict.value,
            "maxQueriedCoord": self.max_queried_coord,
            "witnessSpike": self.witness_spike.to_json() if self.witness_spike is not None else None,
            "scaling": self.scaling,
            "zeroOutput": str(self.zero_output) if self.zero_output is not None else None,
            "observedOutputs": [str(o) for o in self.observed_outputs] if self.observed_outputs else None,
            "claimedValues": [str(c) for c in self.claimed_values] if self.claimed_values else None,
            "tracesCoincide": self.traces_coincide,
            "queriesOnZero": self.queries_on_zero,
        }

    @classmethod
    def from_dict(cls, doc: dict[str, Any]) -> "NormCounterexample":
        outs = doc.get("observedOutputs")
        claimed = doc.get("claimedValues")
        return cls(
            candidate=doc["candidate"],
            n=doc["n"],
            verdict=Verdict(doc["verdict"]),
            max_queried_coord=doc.get("maxQueriedCoord"),
            witness_spike=spec_from_json(doc["witnessSpike"]) if doc.get("witnessSpike") else None,
            scaling=doc.get("scaling", 0),
            zero_output=parse_dyadic(doc["zeroOutput"]) if doc.get("zeroOutput") is not None else None,
            observed_outputs=(parse_dyadic(outs[0]), parse_dyadic(outs[1])) if outs else None,
            claimed_values=(Fraction(claimed[0]), Fraction(claimed[1])) if claimed else None,
            traces_coincide=doc.get("tracesCoincide", False),
            queries_on_zero=doc.get("queriesOnZero", 0),
        )

    def __eq__(self, other: object) -> bool:
        return isinstance(other, NormCounterexample) and self.to_dict() == other.to_dict()


def _same_queries(a: QueryTrace, b: QueryTrace) -> bool:
    return a.queries == b.queries


def falsify_norm(candidate: Functional, n: int, budget: int = 10**6) -> NormCounterexample:
    """Run the zero-sequence argument against a claimed computable norm.

    The candidate runs on a name of the zero sequence; with ``k`` the largest
    coordinate it queried, it is rerun on ``y_1 = spike(k+1, 1)`` and
    ``y_l = spike(k+1, l)`` with ``l = 2^(n+2)``.  All three names share one
    length schedule, so on coordinates ``<= k`` they give the zero run's
    answers word for word.
    """
    scaling = 2 ** (n + 2)
    floor = scaling.bit_length()
    zero_name = make_name(Zeros(), magnitude_floor=floor)
    try:
        o0, t0 = run(candidate, zero_name, n, budget)
    except QueryBudgetExceeded:
        return NormCounterexample(candidate.id, n, Verdict.QUERY_BUDGET, scaling=scaling, queries_on_zero=budget)
    k = max(t0.cord, default=-1)
    y1 = Spike(index=k + 1, value_at=Fraction(1))
    yl = Spike(index=k + 1, value_at=Fraction(scaling))
    o1, t1 = run(candidate, make_name(y1, magnitude_floor=floor), n, budget)
    ol, tl = run(candidate, make_name(yl, magnitude_floor=floor), n, budget)
    coincide = _same_queries(t0, t1) and _same_queries(t0, tl)
    result = NormCounterexample(
        candidate.id,
        n,
        Verdict.HOMOGENEITY_OR_DEFINITENESS,
        max_queried_coord=k if t0.queries else None,
        witness_spike=yl,
        scaling=scaling,
        zero_output=o0,
        observed_outputs=(o1, ol),
        traces_coincide=coincide,
        queries_on_zero=len(t0.queries),
    )
    eps = Fraction(1, 2**n)
    if abs(o0.to_fraction()) > eps:
        result.verdict = Verdict.APPROXIMATION_CONTRACT
    elif candidate.claims is not None:
        c1, cl = Fraction(candidate.claims(y1)), Fraction(candidate.claims(yl))
        result.claimed_values = (c1, cl)
        if abs(o1.to_fraction() - c1) > eps or abs(ol.to_fraction() - cl) > eps:
            result.verdict = Verdict.APPROXIMATION_CONTRACT
    return result

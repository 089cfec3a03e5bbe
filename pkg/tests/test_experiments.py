import json
import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from seqreal.experiments import (
    BOUND_EXCEEDED,
    VARIES_ACROSS_INPUTS,
    VARIES_ACROSS_PRECISIONS,
    CordMismatch,
    NormCounterexample,
    QueryBoundExceeded,
    Verdict,
    factor,
    falsify_norm,
    project,
    verify_cord_fixed,
    verify_cord_invariance,
)
from seqreal.functionals import (
    AVERAGE,
    MAX_ABS,
    SUM,
    constant,
    fake_sup,
    fake_trunc_l1,
    fake_weighted,
    finite_combo,
    projection,
    shifted_tail_sum,
    tail_sum,
)
from seqreal.machine import Functional, run
from seqreal.names import FiniteList, Geometric, Spike, Zeros, make_name
from seqreal.numerics import Dyadic, rat_approx

from conftest import specs


def random_specs(count, seed):
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        entries = tuple(Fraction(rng.randint(-10**6, 10**6), rng.randint(1, 999)) for _ in range(rng.randint(0, 12)))
        out.append(FiniteList(entries=entries))
    return out


def test_factor_projection():
    samples = random_specs(100, 1)
    fact = factor(projection(5), samples, 8)
    assert fact.coordinates == (5,)
    assert fact.samples_checked == 100
    # the finite function is the identity on its argument
    assert fact([Fraction(7, 3)], 8) == rat_approx(Fraction(7, 3), 8)


def test_factor_average_and_constant():
    samples = random_specs(20, 2)
    assert factor(finite_combo([2, 7], AVERAGE), samples, 6).coordinates == (2, 7)
    fact = factor(constant(Dyadic(3, -1)), samples, 6)
    assert fact.coordinates == ()
    assert fact([], 6) == Fraction(3, 2)


def test_factor_replays_through_routing():
    f = finite_combo([4, 0, 4], SUM)
    fact = factor(f, random_specs(10, 3), 5)
    assert fact.coordinates == (4, 0, 4)
    name = make_name(Geometric(ratio=Fraction(-1, 3)))
    assert fact(project(name, fact.coordinates), 5) == run(f, name, 5)[0]
    with pytest.raises(ValueError):
        fact([1, 2], 5)


def test_factor_errors():
    samples = [Zeros(), Spike(index=0, value_at=Fraction(9))]
    with pytest.raises(CordMismatch) as info:
        factor(shifted_tail_sum, samples, 6, ell=3)
    assert info.value.first is not None and info.value.second is not None
    with pytest.raises(CordMismatch):
        factor(tail_sum, [Zeros()], 2, ell=10, precisions=[3])
    with pytest.raises(QueryBoundExceeded):
        factor(finite_combo([1, 2, 3], MAX_ABS), [Zeros()], 2, ell=2)
    with pytest.raises(ValueError):
        factor(tail_sum, [Zeros()], 2)
    with pytest.raises(ValueError):
        factor(projection(1), [], 2)


def test_factorization_json():
    fact = factor(finite_combo([2, 7], AVERAGE), [Zeros()], 3)
    assert json.loads(json.dumps(fact.to_dict())) == {"functional": "avg:2,7", "coordinates": [2, 7], "samplesChecked": 1}


@given(st.lists(st.integers(0, 9), min_size=1, max_size=4), specs(), st.integers(0, 10))
def test_factor_soundness_property(coords, spec, n):
    f = finite_combo(coords, AVERAGE)
    fact = factor(f, [spec, Zeros()], n)
    name = make_name(spec)
    assert fact(project(name, fact.coordinates), n) == run(f, name, n)[0]


def test_cord_invariance_passes():
    for f in (tail_sum, shifted_tail_sum, projection(2), constant(0)):
        for spec in (Geometric(ratio=Fraction(1, 2)), Spike(index=0, value_at=Fraction(5)), FiniteList(entries=(Fraction(-9, 4), Fraction(1)))):
            report = verify_cord_invariance(f, spec, precisions=range(9))
            assert report.passed, report.to_dict()
    report = verify_cord_invariance(tail_sum, Geometric(ratio=Fraction(1, 2)), precisions=range(9))
    assert all(report.cords[n] == list(range(n + 2)) for n in range(9))
    assert report.runs == 9 * 2 * 5
    assert verify_cord_invariance(constant(0), Zeros()).cords[3] == []


def test_shifted_cord_varies_at_a_half_integer_boundary():
    spec = Spike(index=0, value_at=Fraction(7, 2))
    report = verify_cord_invariance(shifted_tail_sum, spec, styles=["standard", "leftApprox", "seeded(1)", "seeded(2)", "seeded(3)", "seeded(4)"], precisions=[4])
    assert not report.passed


def test_cord_invariance_reports_disagreement():
    def peek(oracle, n):
        a = oracle.query(0, 1)
        if a.to_fraction() * 2 % 2 == 1:  # depends on the representation
            oracle.query(1, 1)
        return a

    report = verify_cord_invariance(Functional("peek", peek), Spike(index=0, value_at=Fraction(3, 4)), precisions=[0])
    assert not report.passed
    d = report.disagreements[0]
    assert d.first.cord != d.second.cord
    assert json.loads(json.dumps(report.to_dict()))["disagreements"][0]["first"]["cord"] == sorted(d.first.cord)


def test_cord_fixed():
    samples = random_specs(10, 4)
    rep = verify_cord_fixed(finite_combo([2, 7], AVERAGE), samples, range(13))
    assert rep.passed and rep.common_cord == [2, 7]
    assert verify_cord_fixed(projection(0), samples).common_cord == [0]
    assert verify_cord_fixed(constant(1), samples).common_cord == []
    bad = verify_cord_fixed(shifted_tail_sum, samples + [Spike(index=0, value_at=Fraction(40))], range(6))
    assert VARIES_ACROSS_INPUTS in bad.kinds()
    assert not bad.passed and bad.common_cord is None


def test_cord_fixed_other_violations():
    rep = verify_cord_fixed(tail_sum, [Zeros()], range(4))
    assert rep.kinds() == {VARIES_ACROSS_PRECISIONS}
    assert rep.max_coordinate == 4
    liar = Functional("liar", finite_combo([1, 2], SUM).body, query_bound=1)
    assert BOUND_EXCEEDED in verify_cord_fixed(liar, [Zeros()], [0]).kinds()


# -- falsifier -----------------------------------------------------------


@pytest.mark.parametrize("n", [4, 8, 10])
def test_falsify_sup(n):
    r = falsify_norm(fake_sup(3), n)
    assert r.verdict is Verdict.HOMOGENEITY_OR_DEFINITENESS
    assert r.max_queried_coord == 3 and r.witness_spike.index == 4
    assert r.scaling == 2 ** (n + 2) and r.homogeneity_demand == 4
    assert r.certificate_holds()


def test_falsify_trunc_l1():
    r = falsify_norm(fake_trunc_l1, 8)
    assert r.verdict is Verdict.APPROXIMATION_CONTRACT
    assert r.witness_spike.index == 9
    assert r.claimed_values == (1, 2**10)
    assert r.unit_witness == Spike(index=9, value_at=Fraction(1))
    assert r.certificate_holds()


@given(st.sampled_from(["sup", "weighted", "trunc"]), st.integers(0, 8), st.integers(0, 12))
def test_falsifier_always_finds_a_counterexample(family, k, n):
    cand = {"sup": fake_sup, "weighted": fake_weighted, "trunc": lambda _: fake_trunc_l1}[family](k)
    r = falsify_norm(cand, n)
    assert r.verdict is not Verdict.QUERY_BUDGET
    assert r.traces_coincide and r.certificate_holds()
    assert r.witness_spike.index == r.max_queried_coord + 1


def test_falsify_budget_and_no_query_candidates():
    r = falsify_norm(tail_sum, 6, budget=3)
    assert r.verdict is Verdict.QUERY_BUDGET and r.certificate_holds()
    zero = falsify_norm(constant(0), 5)
    assert zero.max_queried_coord is None and zero.witness_spike.index == 0
    assert zero.certificate_holds()
    big = falsify_norm(constant(1), 5)
    assert big.verdict is Verdict.APPROXIMATION_CONTRACT


def test_falsify_propagates_candidate_errors():
    def broken(oracle, n):
        raise ArithmeticError("bad candidate")

    with pytest.raises(ArithmeticError):
        falsify_norm(Functional("broken", broken), 3)


def test_certificate_rejects_tampering():
    r = falsify_norm(fake_sup(2), 6)
    r.observed_outputs = (Dyadic(1), Dyadic(1))
    assert not r.certificate_holds()


@pytest.mark.parametrize("cand", [fake_sup(3), fake_weighted(2), fake_trunc_l1])
def test_counterexample_json_roundtrip(cand):
    r = falsify_norm(cand, 6)
    back = NormCounterexample.from_dict(json.loads(json.dumps(r.to_dict())))
    assert back == r
    assert back.certificate_holds()

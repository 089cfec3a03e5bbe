import json
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from seqreal.encoding import audit_regularity, decode_dyadic, query_word, unpad
from seqreal.names import (
    Expr,
    FiniteList,
    Geometric,
    MissingModulus,
    PerIndex,
    SequenceName,
    SpecError,
    Spike,
    Zeros,
    left_approx_name,
    load_spec,
    make_name,
    name_from_spec,
    perturb_representation,
    spec_from_json,
)

from conftest import STYLES, specs


def test_expr_evaluates_exactly():
    e = Expr("1/(k+1)^2 - 3*k")
    assert e(2) == Fraction(1, 9) - 6
    assert Expr("(k+1)**3")(1) == 8
    assert Expr("-k")(3) == -3


@pytest.mark.parametrize("source", ["k.real", "foo(k)", "k**k", "lambda: 1", "k if k else 1", "1.5"])
def test_expr_rejects_unsafe_or_inexact(source):
    with pytest.raises(SpecError):
        Expr(source)


@pytest.mark.parametrize(
    "doc,values",
    [
        ({"kind": "zeros"}, [0, 0, 0]),
        ({"kind": "spike", "index": 1, "value": "5/2"}, [0, Fraction(5, 2), 0]),
        ({"kind": "finiteList", "values": ["1", "-1/3"]}, [1, Fraction(-1, 3), 0]),
        ({"kind": "geometric", "ratio": "1/2", "modulus": "k+1"}, [1, Fraction(1, 2), Fraction(1, 4)]),
        ({"kind": "perIndex", "expr": "1/(k+1)"}, [1, Fraction(1, 2), Fraction(1, 3)]),
        ({"kind": "spike", "index": 0, "value": "3*2^-2"}, [Fraction(3, 4), 0, 0]),
    ],
)
def test_spec_documents(doc, values):
    spec = spec_from_json(doc)
    assert spec.values(3) == values
    assert spec_from_json(json.dumps(spec.to_json())) == spec


@pytest.mark.parametrize(
    "doc",
    [
        "not json",
        [1, 2],
        {"kind": "triangle"},
        {"kind": "spike", "index": -1, "value": "1"},
        {"kind": "spike", "index": "3", "value": "1"},
        {"kind": "spike", "index": 2},
        {"kind": "spike", "index": 2, "value": "1/0"},
        {"kind": "zeros", "colour": "red"},
        {"kind": "geometric", "ratio": "2", "modulus": "k"},
        {"kind": "geometric", "ratio": "1/2", "modulus": "0"},
        {"kind": "perIndex", "expr": "1/(k-3)"},
        {"kind": "zeros", "modulus": "1/(k-2)"},
    ],
)
def test_malformed_specs(doc):
    with pytest.raises(SpecError):
        spec_from_json(doc)


def test_load_spec(tmp_path):
    p = tmp_path / "s.json"
    p.write_text('{"kind": "spike", "index": 3, "value": "5/2"}')
    assert load_spec(p) == Spike(index=3, value_at=Fraction(5, 2))
    with pytest.raises(SpecError):
        load_spec(tmp_path / "missing.json")


def test_moduli():
    g = spec_from_json({"kind": "geometric", "ratio": "1/2", "modulus": "k+1"})
    assert g.summability_modulus(4) == 5
    assert g.abs_tail(5) == Fraction(1, 16)
    assert g.square_summability_modulus(6) == g.summability_modulus(3)
    with pytest.raises(MissingModulus):
        Geometric(ratio=Fraction(1, 2)).summability_modulus(1)
    with pytest.raises(MissingModulus):
        Zeros().square_summability_modulus(1)


def test_geometric_modulus_checked_against_closed_form():
    assert Geometric(ratio=Fraction(1, 2), modulus=Expr("k+1")).check_moduli() == []
    assert Geometric(ratio=Fraction(1, 2), modulus=Expr("k")).check_moduli() != []


@given(specs(), st.sampled_from(STYLES), st.integers(0, 15), st.integers(0, 40))
def test_answers_meet_the_contract(spec, style, i, j):
    name = make_name(spec, style)
    w = name.respond(query_word(i, j))
    r = SequenceName.read(i, w)
    assert abs(r.to_fraction() - spec.value(i)) <= Fraction(1, 2**j)
    assert len(w) == name.schedule(i + j + 1)


def test_style_behaviour():
    spec = Spike(index=0, value_at=Fraction(-7, 3))
    assert make_name(spec).approx(0, 2) == Fraction(-9, 4)  # toward zero
    assert make_name(spec, "leftApprox").approx(0, 2) == Fraction(-10, 4)
    for j in range(30):
        assert left_approx_name(spec).approx(0, j) <= spec.value(0)
        assert make_name(spec, "seeded(0)").approx(0, j) == name_from_spec(spec).approx(0, j)


def test_seeded_styles_differ_but_stay_legal():
    spec = Geometric(ratio=Fraction(-2, 3))
    plain = name_from_spec(spec)
    seeded = perturb_representation(plain, 5)
    assert seeded.id == "geometric(-2/3)#seeded(5)"
    diffs = sum(seeded.approx(i, j) != plain.approx(i, j) for i in range(10) for j in range(10))
    assert diffs > 0
    for i in range(10):
        for j in range(10):
            assert abs(seeded.approx(i, j).to_fraction() - spec.value(i)) <= Fraction(1, 2**j)


def test_answers_carry_coordinate_prefix():
    name = make_name(Spike(index=2, value_at=Fraction(5)))
    w = name.answer(2, 0)
    assert w.startswith("00" + "0110011")
    assert decode_dyadic(unpad(w)[2:]) == 5


@pytest.mark.parametrize("style", STYLES)
def test_regularity_audit_on_all_words_up_to_length_10(style):
    name = make_name(FiniteList(entries=(Fraction(900), Fraction(-1, 3), Fraction(70000))), style)
    words = [format(v, "b").zfill(m)[-m:] if m else "" for m in range(11) for v in range(2**m)]
    assert audit_regularity(name.regular_fn(), words) == []


def test_schedule_depends_on_magnitude_floor_only_through_max():
    spec = Spike(index=4, value_at=Fraction(4096))
    raised = make_name(Zeros(), magnitude_floor=13)
    spiky = make_name(spec, magnitude_floor=13)
    assert [raised.schedule(m) for m in range(40)] == [spiky.schedule(m) for m in range(40)]
    assert raised.id == "zeros#standard^13"


def test_schedule_is_monotone():
    name = make_name(PerIndex(expr=Expr("(k-5)^3")))
    lengths = [name.schedule(m) for m in range(80)]
    assert lengths == sorted(lengths)

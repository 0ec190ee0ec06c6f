import itertools

import pytest

from fracbessel.equation import EquationSpec, Term, validate
from fracbessel.errors import ValidationError


def raw(terms, beta=1.0, nu2=0.0):
    return {"terms": [{"d": d, "alpha": a} for d, a in terms], "beta": beta, "nu2": nu2}


def test_classical_bessel_is_integer_only():
    spec = validate(raw([(1, 2), (1, 1)], beta=2, nu2=0.25))
    assert spec.integer_only
    assert spec.n_max is None and spec.caputo_floor is None
    assert spec.p == 2 and spec.alpha_max == 2


def test_duplicate_orders_merge():
    spec = validate(raw([(1, 2), (1, 2)]))
    assert spec.terms == (Term(2.0, 2.0),)


def test_example_7_3_derived_quantities():
    spec = validate(raw([(1, 4.9), (3.1, 3.75), (3, 2.7)], beta=3.1, nu2=1))
    assert spec.n_max == 5 and spec.n_min == 3
    assert spec.alpha_max == 4.9 and spec.p == 5
    assert spec.m == 3 and spec.m0 == 3
    assert spec.all_positive


def test_integer_detection_tolerance():
    spec = validate(raw([(1, 4.0 + 1e-13), (1, 0.5)]))
    assert spec.terms[0].is_integer and spec.terms[0].alpha == 4.0
    assert spec.n_max == 1 and spec.p == 4


def test_merge_is_order_independent():
    terms = [(0.1, 2.7), (0.2, 2.7), (0.3, 2.7), (1.0, 4.9), (-6.0, 3.75)]
    specs = {validate(raw(list(p), beta=3.1, nu2=9)) for p in itertools.permutations(terms)}
    assert len(specs) == 1


def test_cancelling_terms_dropped():
    spec = validate(raw([(1, 2), (-1, 2), (1, 0.5)]))
    assert spec.terms == (Term(1.0, 0.5),)
    with pytest.raises(ValidationError):
        validate(raw([(1, 2), (-1, 2)]))


def test_all_violations_reported():
    with pytest.raises(ValidationError) as e:
        validate({"terms": [{"d": 1, "alpha": -1}, {"d": float("nan"), "alpha": 2}], "beta": 0})
    msgs = e.value.problems
    assert any(m.startswith("beta") for m in msgs)
    assert any(m.startswith("nu2: missing") for m in msgs)
    assert any(m.startswith("terms[0].alpha") for m in msgs)
    assert any(m.startswith("terms[1].d") for m in msgs)


@pytest.mark.parametrize(
    "doc, field",
    [
        ({"terms": [], "beta": 1, "nu2": 0}, "terms"),
        ({"beta": 1, "nu2": 0}, "terms"),
        ({"terms": [{"d": 1, "alpha": 1}], "nu2": 0}, "beta"),
        ({"terms": [{"d": 1, "alpha": 1}], "beta": -2, "nu2": 0}, "beta"),
        ({"terms": [{"d": 1, "alpha": 0}], "beta": 1, "nu2": 0}, "terms[0].alpha"),
        ({"terms": [{"d": True, "alpha": 1}], "beta": 1, "nu2": 0}, "terms[0].d"),
        ({"terms": ["x"], "beta": 1, "nu2": 0}, "terms[0]"),
    ],
)
def test_invalid_inputs(doc, field):
    with pytest.raises(ValidationError) as e:
        validate(doc)
    assert any(p.startswith(field) for p in e.value.problems)


def test_n_max_never_exceeds_p():
    for terms in ([(1, 4.9), (1, 6)], [(1, 0.3)], [(1, 2.5), (2, 3)], [(1, 7), (1, 6.2)]):
        spec = validate(raw(terms))
        assert spec.n_max <= spec.p


def test_scaled_and_roundtrip():
    spec = validate(raw([(1, 4.9), (3.1, 3.75)], beta=3.1, nu2=2))
    assert spec.scaled(2.0).nu2 == 4.0
    assert validate(spec.to_dict()) == spec
    assert validate(spec) == spec
    assert isinstance(spec.with_nu2(5), EquationSpec)

import json
import pathlib

import pytest

from nclaurent.blockring import validate_h
from nclaurent.errors import BudgetExceeded
from nclaurent.freealg import (
    NCElem,
    embed_word,
    generator,
    parse_element,
    render_element,
    substitute,
)
from nclaurent.kontsevich import Budget, Engine, sigma_spec, tau_spec

FIXTURES = pathlib.Path(__file__).parent / "fixtures" / "v1"

H_SET = ([1, 0, 1], [1, 1, 1], [1, 0, 0, 1])


@pytest.fixture(scope="module")
def eng():
    return Engine(validate_h([1, 0, 1]))


# -- endomorphism construction ------------------------------------------------

def test_sigma_image_of_x(eng):
    assert render_element(eng.sigma.x) == "y^-1 + y^-1*x^2"


def test_sigma_inverse_pairs():
    for coeffs in H_SET:
        sig = sigma_spec(validate_h(coeffs))
        one = NCElem.one(sig.ring)
        assert sig.x * sig.x_inv == one
        assert sig.x_inv * sig.x == one
        assert sig.y * sig.y_inv == one


def test_tau_formula(eng):
    assert render_element(eng.tau.x) == "x^-1*y*x"
    assert render_element(eng.tau.y) == "x^-1 + x^-1*y^2"


def test_tau_inverts_sigma():
    # re-derived: tau(x) = x^-1 y x, tau(y) = x^-1 H(y); machine-verified here
    for coeffs in H_SET:
        h = validate_h(coeffs)
        eng = Engine(h)
        for letter in ("x", "y"):
            g = generator(eng.ring, letter)
            assert substitute(substitute(g, eng.tau), eng.sigma) == g
            assert substitute(substitute(g, eng.sigma), eng.tau) == g


# -- iteration ------------------------------------------------------------------

def test_iterate_k0(eng):
    res = eng.iterate(0, "y")
    assert res.value == generator(eng.ring, "y")
    assert res.laurent


def test_iterate_golden_sigma1(eng):
    golden = json.loads((FIXTURES / "sigma1_x.json").read_text())
    assert eng.iterate(1, "x").to_json() == golden


def test_iterate_golden_sigma2(eng):
    golden = json.loads((FIXTURES / "sigma2_x.json").read_text())
    assert eng.iterate(2, "x").to_json() == golden


def test_iterate_sigma2_expected_element(eng):
    expected = parse_element(
        eng.ring,
        "y^-1*x^-1*y + y^-1*x^-1*y^-1 + y^-1*x^-1*y^-1*x^2 "
        "+ y^-1*x*y^-1 + y^-1*x*y^-1*x^2")
    assert eng.value(2, "x") == expected


def test_iterate_negative_k(eng):
    res = eng.iterate(-1, "x")
    assert res.value == parse_element(eng.ring, "x^-1*y*x")


def test_laurent_certificate_small_range():
    for coeffs in H_SET:
        eng = Engine(validate_h(coeffs))
        for k in range(-3, 4):
            for target in ("x", "y"):
                assert eng.iterate(k, target).laurent, (coeffs, k, target)


def test_mirror_duality(eng):
    # swapping the generators conjugates the map into its inverse, so
    # map^-k(x) is the letter-swapped map^k(y)
    def mirror(e):
        return NCElem(e.ring, {tuple(a ^ 1 for a in w): c for w, c in e.terms.items()})

    for k in range(0, 5):
        assert eng.value(-k, "x") == mirror(eng.value(k, "y"))
        assert eng.value(-k, "y") == mirror(eng.value(k, "x"))


def test_iterate_caches(eng):
    v1 = eng.value(3, "x")
    v2 = eng.value(3, "x")
    assert v1 is v2


def test_nonreversible_still_iterates():
    # the distinct-roots / reversibility warnings do not block the engine
    h = validate_h([1, 2, 1], allow_nonreversible=False)
    assert not h.distinct_roots
    eng = Engine(h)
    assert eng.iterate(2, "x").laurent


# -- invariant checks ---------------------------------------------------------

@pytest.mark.parametrize("coeffs", H_SET)
def test_commutator_preserved(coeffs):
    assert Engine(validate_h(coeffs)).check_commutator()


@pytest.mark.parametrize("coeffs", H_SET)
def test_inverse_roundtrip(coeffs):
    assert Engine(validate_h(coeffs)).check_inverse()


def test_recurrence(eng):
    for k in range(0, 4):
        assert eng.recurrence_check(k)
    # also valid through negative powers
    assert eng.recurrence_check(-2)


def test_recurrence_k0_by_hand(eng):
    # y * (y^-1 + y^-1 x^2) = 1 + x^2
    y = generator(eng.ring, "y")
    lhs = y * eng.value(1, "x")
    assert lhs == parse_element(eng.ring, "1 + x^2")


def test_positivity_report(eng):
    rep = eng.positivity_report(range(1, 4))
    assert rep["assertion_grade"]
    assert all(v[t]["all_positive"] for v in rep["per_k"].values() for t in v)
    rep3 = Engine(validate_h([1, 0, 0, 1])).positivity_report(range(1, 3))
    assert not rep3["assertion_grade"]


# -- budgets --------------------------------------------------------------------

def test_budget_max_k():
    eng = Engine(validate_h([1, 0, 1]), Budget(max_k=2))
    with pytest.raises(BudgetExceeded):
        eng.iterate(3, "x")


def test_budget_max_terms():
    eng = Engine(validate_h([1, 0, 1]), Budget(max_terms=3))
    with pytest.raises(BudgetExceeded):
        eng.iterate(3, "x")


def test_budget_wall_clock():
    eng = Engine(validate_h([1, 0, 1]), Budget(max_seconds=0.0))
    with pytest.raises(BudgetExceeded):
        eng.iterate(2, "x")


def test_budget_release(eng):
    eng2 = Engine(validate_h([1, 1, 1]))
    eng2.value(3, "x")
    eng2.release(1, "x")
    assert len(eng2._chains[1]["x"]) == 2
    assert eng2.value(2, "x").terms  # recomputes transparently

import random
from fractions import Fraction

import pytest

from nclaurent.blockring import (
    BlockElem,
    BlockRing,
    HSpec,
    has_distinct_roots,
    to_laurent_block,
    is_laurent_block,
    validate_h,
)
from nclaurent.errors import (
    DegreeZero,
    NotLaurent,
    NotMonicOrUnitConstant,
    NotReversible,
)


def ring(coeffs, **kw):
    return BlockRing(validate_h(coeffs, **kw))


# -- validation -------------------------------------------------------------

def test_validate_1_x2():
    h = validate_h([1, 0, 1])
    assert h.n == 2 and h.reversible_ok and h.distinct_roots
    assert h.render() == "1 + x^2"


def test_validate_1_x_x2():
    h = validate_h([1, 1, 1])
    assert h.n == 2 and h.reversible_ok


def test_validate_non_reversible():
    with pytest.raises(NotReversible):
        validate_h([1, 2, 0, 1])
    h = validate_h([1, 2, 0, 1], allow_nonreversible=True)
    assert not h.reversible_ok
    assert h.warnings


def test_validate_rejects_bad_ends():
    with pytest.raises(NotMonicOrUnitConstant):
        validate_h([1, 2, 2])
    with pytest.raises(NotMonicOrUnitConstant):
        validate_h([2, 0, 1])
    with pytest.raises(DegreeZero):
        validate_h([1])


def test_validate_rational_strings():
    h = validate_h(["1", "1/2", "1"])
    assert h.coeffs[1] == Fraction(1, 2)
    assert h.reversible_ok


def test_distinct_roots():
    assert has_distinct_roots(validate_h([1, 0, 1]))
    assert not has_distinct_roots(validate_h([1, 2, 1], allow_nonreversible=True))
    assert has_distinct_roots(validate_h([1, 1]))


# -- reduce_pf golden values (derived by hand from h*H = 1) -----------------

def test_reduce_pf_ht2_is_1_minus_h():
    r = ring([1, 0, 1])
    # h*(1+t^2) = 1  =>  h t^2 = 1 - h
    assert r.reduce_pf(1, 2) == BlockElem({0: 1}, {(1, 0): -1})


def test_reduce_pf_negative_exponent():
    r = ring([1, 0, 1])
    # t^-1 = h t^-1 (1 + t^2) = h t^-1 + h t  =>  h t^-1 = t^-1 - h t
    assert r.reduce_pf(1, -1) == BlockElem({-1: 1}, {(1, 1): -1})


def test_reduce_pf_no_localization():
    r = ring([1, 1, 1])
    assert r.reduce_pf(0, 5) == BlockElem({5: 1})


def test_reduce_pf_key_bounds():
    rng = random.Random(7)
    r = ring([1, 2, 3, 2, 1])
    for _ in range(200):
        out = r.reduce_pf(rng.randrange(0, 4), rng.randrange(-9, 12))
        for (j, i) in out.frac:
            assert j >= 1 and 0 <= i < r.n


# -- multiplication ----------------------------------------------------------

def test_mul_h_times_H_is_one():
    for coeffs in ([1, 0, 1], [1, 1, 1], [1, 0, 0, 1], [1, "1/2", "1/2", 1]):
        r = ring(coeffs)
        assert r.mul(r.h_inverse(), r.embed_h()) == r.one()


def test_mul_monomials():
    r = ring([1, 0, 1])
    assert r.mul(r.monomial(2), r.monomial(-2)) == r.one()


def test_mul_h_ht2():
    r = ring([1, 0, 1])
    # h * (h t^2) = h(1 - h) = h - h^2
    got = r.mul(r.frac_term(1, 0), r.reduce_pf(1, 2))
    assert got == BlockElem({}, {(1, 0): 1, (2, 0): -1})


def test_add_cancels():
    r = ring([1, 0, 1])
    a = r.monomial(1)
    assert r.add(a, r.scale(-1, a)) == r.zero()
    b = r.add(r.monomial(-1), r.frac_term(1, 0))
    assert b.laurent == {-1: 1} and b.frac == {(1, 0): 1}
    half = r.frac_term(1, 0, Fraction(1, 2))
    assert r.add(half, half) == r.frac_term(1, 0)


def test_laurent_extraction():
    r = ring([1, 0, 1])
    a = r.add(r.monomial(3), r.monomial(-1, -2))
    assert is_laurent_block(a)
    assert to_laurent_block(a) == {3: 1, -1: -2}
    assert not is_laurent_block(r.frac_term(1, 0))
    assert not is_laurent_block(r.reduce_pf(1, 2))
    with pytest.raises(NotLaurent):
        to_laurent_block(r.frac_term(1, 0))


def test_embed_extract_roundtrip_random():
    rng = random.Random(31)
    r = ring([1, 0, 0, 1])
    for _ in range(100):
        coeffs = {rng.randrange(-6, 7): Fraction(rng.randrange(-5, 6), rng.choice([1, 2, 3]))
                  for _ in range(rng.randrange(0, 5))}
        coeffs = {m: c for m, c in coeffs.items() if c}
        assert to_laurent_block(r.embed_laurent(coeffs)) == coeffs


def test_reversibility_identity():
    # t^n * H(1/t) = H(t) for reversible H
    for coeffs in ([1, 0, 1], [1, 1, 1], [1, 0, 0, 1], [1, 3, 3, 1]):
        r = ring(coeffs)
        h_at_inv = r.embed_laurent({-i: c for i, c in enumerate(r.h.coeffs) if c})
        assert r.mul(r.monomial(r.n), h_at_inv) == r.embed_h()


# -- randomized ring laws -----------------------------------------------------

def random_block(r, rng):
    out = r.zero()
    for _ in range(rng.randrange(0, 4)):
        out = r.add(out, r.monomial(rng.randrange(-4, 5),
                                    Fraction(rng.randrange(-3, 4), rng.choice([1, 1, 2]))))
    for _ in range(rng.randrange(0, 3)):
        out = r.add(out, r.frac_term(rng.randrange(1, 3), rng.randrange(0, r.n),
                                     rng.randrange(-2, 3)))
    return out


def run_ring_law_trials(trials, seed=20240608):
    rng = random.Random(seed)
    rings = [ring([1, 0, 1]), ring([1, 1, 1]), ring([1, 0, 0, 1])]
    failures = 0
    for _ in range(trials):
        r = rng.choice(rings)
        a, b, c = (random_block(r, rng) for _ in range(3))
        if r.mul(a, b) != r.mul(b, a):
            failures += 1
        if r.mul(r.mul(a, b), c) != r.mul(a, r.mul(b, c)):
            failures += 1
        if r.mul(a, r.add(b, c)) != r.add(r.mul(a, b), r.mul(a, c)):
            failures += 1
        if r.mul(r.one(), a) != a:
            failures += 1
        if r.add(r.add(a, b), c) != r.add(a, r.add(b, c)):
            failures += 1
    return failures


def test_ring_laws_random():
    assert run_ring_law_trials(120) == 0

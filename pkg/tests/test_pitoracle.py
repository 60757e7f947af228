import random

import pytest

from nclaurent.blockring import validate_h
from nclaurent.errors import CoeffDenominatorDivisibleByP, NotLaurentInput
from nclaurent.freealg import NCElem, generator, nc_scale
from nclaurent.kontsevich import Engine, sigma_spec
from nclaurent.pitoracle import (
    DEFAULT_PRIME,
    EvalPoint,
    eval_nc,
    mat_mul,
    mat_poly,
    orbit_step,
    random_point,
    verify_iterate,
)
from fractions import Fraction

H2 = validate_h([1, 0, 1])


def test_scalar_orbit_step_mod7():
    # (x, y) = (2, 3) over F_7: H(2) = 5, fwd gives (5 * 3^-1, 2) = (4, 2)
    pt = EvalPoint(d=1, p=7, x=[[2]], y=[[3]], seed=0)
    out = orbit_step(H2, pt, "fwd")
    assert (out.x, out.y) == ([[4]], [[2]])


def test_random_point_deterministic():
    a = random_point(3, DEFAULT_PRIME, 99)
    b = random_point(3, DEFAULT_PRIME, 99)
    assert a.x == b.x and a.y == b.y


def test_random_point_invertible_scalars():
    pt = random_point(1, 11, 3)
    assert pt.x[0][0] % 11 and pt.y[0][0] % 11


def test_eval_generators():
    pt = random_point(2, DEFAULT_PRIME, 5)
    eng = Engine(H2)
    assert eval_nc(generator(eng.ring, "x"), pt) == pt.x
    xxi = generator(eng.ring, "x") * generator(eng.ring, "x", -1)
    assert eval_nc(xxi, pt) == [[1, 0], [0, 1]]


def test_eval_sigma_x_matches_formula():
    pt = random_point(3, DEFAULT_PRIME, 17)
    eng = Engine(H2)
    got = eval_nc(eng.value(1, "x"), pt)
    from nclaurent.pitoracle import mat_inv
    want = mat_mul(mat_inv(pt.y, pt.p), mat_poly(H2, pt.x, pt.p), pt.p)
    assert got == want


def test_eval_requires_laurent():
    eng = Engine(H2)
    sig = sigma_spec(eng.h, eng.ring)
    pt = random_point(2, DEFAULT_PRIME, 1)
    with pytest.raises(NotLaurentInput):
        eval_nc(sig.x_inv, pt)


def test_eval_homomorphism_random():
    rng = random.Random(12)
    eng = Engine(H2)
    pt = random_point(2, DEFAULT_PRIME, 23)
    from nclaurent.freealg import embed_word
    for _ in range(30):
        def rand_elem():
            acc = NCElem.zero(eng.ring)
            for _ in range(rng.randrange(0, 3)):
                w = [(rng.choice("xy"), rng.randrange(-2, 3)) for _ in range(2)]
                acc = acc + nc_scale(rng.randrange(-2, 3), embed_word(eng.ring, w))
            return acc
        a, b = rand_elem(), rand_elem()
        lhs = eval_nc(a * b, pt)
        rhs = mat_mul(eval_nc(a, pt), eval_nc(b, pt), pt.p)
        assert lhs == rhs


def test_eval_orbit_compatibility():
    # eval(sub(a, sigma)) at pt == eval(a) at the stepped point; sample
    # only words whose image stays Laurent (x with positive powers, y
    # with any power), otherwise the left side is not even evaluable
    rng = random.Random(3)
    eng = Engine(H2)
    from nclaurent.freealg import embed_word, substitute
    pt = random_point(2, DEFAULT_PRIME, 31)
    stepped = orbit_step(H2, pt, "fwd")
    for _ in range(20):
        acc = NCElem.zero(eng.ring)
        for _ in range(rng.randrange(1, 3)):
            w = []
            for _ in range(2):
                if rng.random() < 0.5:
                    w.append(("x", rng.randrange(1, 3)))
                else:
                    w.append(("y", rng.choice([-2, -1, 1, 2])))
            acc = acc + embed_word(eng.ring, w)
        assert eval_nc(substitute(acc, eng.sigma), pt) == eval_nc(acc, stepped)


def test_orbit_roundtrip():
    pt = random_point(3, DEFAULT_PRIME, 7)
    back = orbit_step(H2, orbit_step(H2, pt, "fwd"), "bwd")
    assert back.x == pt.x and back.y == pt.y


def test_coeff_denominator_mod_p():
    eng = Engine(H2)
    bad = nc_scale(Fraction(1, 7), generator(eng.ring, "x"))
    pt = random_point(2, 7, 2)
    with pytest.raises(CoeffDenominatorDivisibleByP):
        eval_nc(bad, pt)


def test_verify_iterate_zero_mismatches():
    eng = Engine(H2)
    for k in (-3, 0, 3):
        for target in ("x", "y"):
            rep = verify_iterate(H2, eng.value(k, target), k, target,
                                 trials=10, dims=(2, 3), seed=7)
            assert rep.ok, rep.mismatches


def test_verify_iterate_detects_wrong_value():
    eng = Engine(H2)
    wrong = eng.value(2, "x") + generator(eng.ring, "x")
    rep = verify_iterate(H2, wrong, 2, "x", trials=4, dims=(2,), seed=7)
    assert not rep.ok


def test_report_deterministic():
    eng = Engine(H2)
    a = verify_iterate(H2, eng.value(2, "x"), 2, "x", seed=5).to_json()
    b = verify_iterate(H2, eng.value(2, "x"), 2, "x", seed=5).to_json()
    assert a == b

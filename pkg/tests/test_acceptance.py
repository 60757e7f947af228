"""Acceptance suite: one test and one printed pass/fail line per criterion.

Run as `pytest tests/test_acceptance.py -v -s`.  The degree-3 polynomial
1 + x^3 produces multi-million-term iterates; those are computed once in
a lazy shared helper, reduced to booleans, and released.
"""

import gc
import json
import pathlib
import time

from nclaurent.blockring import validate_h
from nclaurent.cli import main as cli_main
from nclaurent.commutative import comm_iterate, compare_abelian
from nclaurent.divcheck import SOLVED, left_divide
from nclaurent.freealg import is_laurent, parse_element, poly_eval_nc
from nclaurent.kontsevich import Engine
from nclaurent.pitoracle import DEFAULT_PRIME, verify_iterate
from nclaurent.toric import chart_checks, toric_report

import test_blockring
import test_freealg

FIXTURES = pathlib.Path(__file__).parent / "fixtures" / "v1"

H2 = validate_h([1, 0, 1])        # 1 + x^2
H2B = validate_h([1, 1, 1])       # 1 + x + x^2
H3 = validate_h([1, 0, 0, 1])     # 1 + x^3

_cache = {}


def report(num, name, ok):
    print(f"ACCEPTANCE {num:>2} [{name}]: {'PASS' if ok else 'FAIL'}")
    assert ok, f"criterion {num} failed: {name}"


def engine2():
    if "eng2" not in _cache:
        _cache["eng2"] = Engine(H2)
    return _cache["eng2"]


def heavy_results():
    """Laurent + abelian-agreement booleans for the two slower H's.

    Elements are dropped as soon as the booleans are extracted so the
    multi-GB degree-3 iterates never outlive this function.
    """
    if "heavy" in _cache:
        return _cache["heavy"]
    out = {}
    for h in (H2B, H3):
        eng = Engine(h)
        laurent_ok = True
        abelian_ok = True
        for k in range(-4, 5):
            l1, l2 = comm_iterate(h, k)
            for target, oracle in (("x", l1), ("y", l2)):
                val = eng.value(k, target)
                laurent_ok = laurent_ok and is_laurent(val)
                abelian_ok = abelian_ok and compare_abelian(val, oracle)
        out[h.coeffs] = {"laurent": laurent_ok, "abelian": abelian_ok}
        del eng
        gc.collect()
    _cache["heavy"] = out
    return out


def test_criterion_1_laurentness_deg2():
    t0 = time.monotonic()
    eng = engine2()
    ok = all(eng.iterate(k, t).laurent
             for k in range(-6, 7) for t in ("x", "y"))
    elapsed = time.monotonic() - t0
    report(1, f"H=1+x^2, k in [-6,6], both targets Laurent ({elapsed:.1f}s < 300s)",
           ok and elapsed < 300)


def test_criterion_2_laurentness_deg3():
    res = heavy_results()
    ok = all(v["laurent"] for v in res.values())
    report(2, "H=1+x+x^2 and H=1+x^3, k in [-4,4], both targets Laurent", ok)


def test_criterion_3_golden_values():
    eng = engine2()
    sigma_x = parse_element(eng.ring, "y^-1 + y^-1*x^2")
    sigma2_x = parse_element(
        eng.ring,
        "y^-1*x^-1*y + y^-1*x^-1*y^-1 + y^-1*x^-1*y^-1*x^2 "
        "+ y^-1*x*y^-1 + y^-1*x*y^-1*x^2")
    ok = eng.value(1, "x") == sigma_x and eng.value(2, "x") == sigma2_x
    golden = json.loads((FIXTURES / "sigma2_x.json").read_text())
    ok = ok and eng.iterate(2, "x").to_json() == golden
    report(3, "golden sigma(x) and sigma^2(x) for H=1+x^2, exact", ok)


def test_criterion_4_commutator():
    ok = all(Engine(h).check_commutator() for h in (H2, H2B, H3))
    report(4, "commutator x^-1*y^-1*x*y fixed for all three H", ok)


def test_criterion_5_inverse_roundtrip():
    ok = all(Engine(h).check_inverse() for h in (H2, H2B, H3))
    report(5, "sigma∘tau and tau∘sigma fix x and y for all three H", ok)


def test_criterion_6_abelian_agreement():
    eng = engine2()
    ok = True
    for k in range(-6, 7):
        l1, l2 = comm_iterate(H2, k)
        ok = ok and compare_abelian(eng.value(k, "x"), l1)
        ok = ok and compare_abelian(eng.value(k, "y"), l2)
    res = heavy_results()
    ok = ok and all(v["abelian"] for v in res.values())
    report(6, "ab(iterates) match the commutative oracle; no NotDivisible", ok)


def test_criterion_7_positivity():
    eng = engine2()
    ok = True
    for k in range(1, 7):
        for target in ("x", "y"):
            terms = eng.value(k, target).terms
            ok = ok and all(type(c) is int and c > 0 for c in terms.values())
    report(7, "H=1+x^2: all coefficients positive integers for k in [1,6]", ok)


def test_criterion_8_recurrence():
    eng = engine2()
    ok = all(eng.recurrence_check(k) for k in range(0, 6))
    report(8, "w_k * z_{k+1} = H(z_k) for k in [0,5], multiplication-only", ok)


def test_criterion_9_pit():
    eng = engine2()
    ok = True
    for k in range(-4, 5):
        for target in ("x", "y"):
            rep = verify_iterate(H2, eng.value(k, target), k, target,
                                 trials=20, dims=(2, 3), p=DEFAULT_PRIME, seed=7)
            ok = ok and rep.ok
    report(9, "PIT: 20 trials, d in {2,3}, p=2^31-1, seed 7, zero mismatches", ok)


def test_criterion_10_toric_suite():
    ok = True
    for n in range(1, 7):
        rep = toric_report(n, i=1)
        ok = ok and rep["pass"]
        z1 = rep["fans"]["Z1"]
        dets = z1["adjacent_dets"]
        ok = ok and all(abs(d) == 1 for d in dets[:-1]) and abs(dets[-1]) == n
        ok = ok and z1["primitive"]
    ok = ok and chart_checks(H2)["pass"] and chart_checks(H3)["pass"]
    control = validate_h([1, 2, 0, 1], allow_nonreversible=True)
    rep = chart_checks(control, raise_on_mismatch=False)
    ok = ok and not rep["pass"] and any("reversibility" in m for m in rep["mismatches"])
    report(10, "toric suite n in [1,6] + non-reversible chart control", ok)


def test_criterion_11_property_trials():
    fail_block = test_blockring.run_ring_law_trials(500, seed=1234)
    fail_free = test_freealg.run_algebra_law_trials(500, seed=5678)
    report(11, "1000 randomized algebra-law trials (500 blockring + 500 freealg)",
           fail_block == 0 and fail_free == 0)


def test_criterion_12_determinism(tmp_path):
    paths = [tmp_path / "a.json", tmp_path / "b.json"]
    for p in paths:
        code = cli_main(["verify", "--k-range", "-3:3", "--seed", "7",
                         "--out", str(p)])
        assert code == 0
    ok = paths[0].read_bytes() == paths[1].read_bytes()
    report(12, "verify twice with the same seed: byte-identical JSON", ok)

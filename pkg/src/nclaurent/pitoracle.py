"""Randomized semantic backstop over a prime field.

Instantiates the generators as random invertible d x d matrices over
F_p, walks the orbit of the matrix pair under the map (and its inverse)
and compares against direct evaluation of the computed Laurent iterates.
A nonzero noncommutative Laurent polynomial of the sizes arising here
vanishes on random matrix tuples with negligible probability, so any
normalization bug in the exact engine shows up as a mismatch.

Everything is deterministic given the seed: per-trial points derive
their seeds from (seed, dimension, trial), and a singular H(X) resamples
with a further derived seed, capped at 100 attempts.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

from nclaurent.blockring import HSpec
from nclaurent.errors import (
    CoeffDenominatorDivisibleByP,
    NotLaurentInput,
    SingularH,
)
from nclaurent.freealg import NCElem, dict_is_laurent

DEFAULT_PRIME = 2**31 - 1


def _mat_id(d: int):
    return [[1 if i == j else 0 for j in range(d)] for i in range(d)]


def mat_mul(a, b, p: int):
    d = len(a)
    bt = list(zip(*b))
    return [[sum(ra[k] * cb[k] for k in range(d)) % p for cb in bt] for ra in a]


def mat_scale(c: int, a, p: int):
    return [[c * v % p for v in row] for row in a]


def mat_add(a, b, p: int):
    d = len(a)
    return [[(a[i][j] + b[i][j]) % p for j in range(d)] for i in range(d)]


def mat_inv(a, p: int):
    """Inverse over F_p by Gauss-Jordan; None when singular."""
    d = len(a)
    aug = [list(row) + ident for row, ident in zip(a, _mat_id(d))]
    for col in range(d):
        piv = next((r for r in range(col, d) if aug[r][col] % p), None)
        if piv is None:
            return None
        aug[col], aug[piv] = aug[piv], aug[col]
        inv = pow(aug[col][col], p - 2, p)
        aug[col] = [v * inv % p for v in aug[col]]
        for r in range(d):
            if r != col and aug[r][col]:
                f = aug[r][col]
                aug[r] = [(v - f * w) % p for v, w in zip(aug[r], aug[col])]
    return [row[d:] for row in aug]


def mat_poly(h: HSpec, m, p: int):
    """H(M) over F_p; raises if a coefficient denominator hits p."""
    d = len(m)
    out = mat_scale(_coeff_mod(h.coeffs[0], p), _mat_id(d), p)
    power = _mat_id(d)
    for i in range(1, h.n + 1):
        power = mat_mul(power, m, p)
        c = _coeff_mod(h.coeffs[i], p)
        if c:
            out = mat_add(out, mat_scale(c, power, p), p)
    return out


def _coeff_mod(c, p: int) -> int:
    if isinstance(c, int):
        return c % p
    f = Fraction(c)
    if f.denominator % p == 0:
        raise CoeffDenominatorDivisibleByP(
            f"denominator of {f} vanishes mod {p}")
    return f.numerator * pow(f.denominator, p - 2, p) % p


@dataclass
class EvalPoint:
    d: int
    p: int
    x: list
    y: list
    seed: int
    _pow_cache: dict = field(default_factory=dict, repr=False)

    def power(self, side: int, m: int):
        """X^m or Y^m (m of either sign), cached per point."""
        key = (side, m)
        cached = self._pow_cache.get(key)
        if cached is not None:
            return cached
        if m == 0:
            out = _mat_id(self.d)
        elif m > 0:
            out = mat_mul(self.power(side, m - 1), self.x if side == 0 else self.y, self.p)
        else:
            base = self._pow_cache.get((side, -1))
            if base is None:
                base = mat_inv(self.x if side == 0 else self.y, self.p)
                self._pow_cache[(side, -1)] = base
            out = mat_mul(self.power(side, m + 1), base, self.p)
        self._pow_cache[key] = out
        return out


def random_point(d: int, p: int, seed: int) -> EvalPoint:
    """Uniform invertible matrix pair, deterministic in the seed."""
    rng = random.Random(seed)
    mats = []
    while len(mats) < 2:
        m = [[rng.randrange(p) for _ in range(d)] for _ in range(d)]
        if mat_inv(m, p) is not None:
            mats.append(m)
    return EvalPoint(d=d, p=p, x=mats[0], y=mats[1], seed=seed)


def orbit_step(h: HSpec, pt: EvalPoint, direction: str = "fwd") -> EvalPoint:
    """One map application to the matrix pair; SingularH when H(X) dies."""
    p = pt.p
    if direction == "fwd":
        hx = mat_poly(h, pt.x, p)
        y_inv = mat_inv(pt.y, p)
        if mat_inv(hx, p) is None:
            raise SingularH("H(X) is singular at this point")
        new_x = mat_mul(y_inv, hx, p)
        new_y = mat_mul(mat_mul(y_inv, pt.x, p), pt.y, p)
    elif direction == "bwd":
        hy = mat_poly(h, pt.y, p)
        x_inv = mat_inv(pt.x, p)
        if mat_inv(hy, p) is None:
            raise SingularH("H(Y) is singular at this point")
        new_x = mat_mul(mat_mul(x_inv, pt.y, p), pt.x, p)
        new_y = mat_mul(x_inv, hy, p)
    else:
        raise ValueError("direction must be 'fwd' or 'bwd'")
    return EvalPoint(d=pt.d, p=p, x=new_x, y=new_y, seed=pt.seed)


def eval_nc(a: NCElem, pt: EvalPoint):
    """Evaluate a Laurent element at the matrix pair."""
    if not dict_is_laurent(a.terms):
        raise NotLaurentInput("matrix evaluation needs a Laurent element")
    d, p = pt.d, pt.p
    total = [[0] * d for _ in range(d)]
    for word, coeff in a.terms.items():
        m = _mat_id(d)
        for atom in word:
            m = mat_mul(m, pt.power(atom & 1, atom >> 2), p)
        c = _coeff_mod(coeff, p)
        for i in range(d):
            row = m[i]
            trow = total[i]
            for j in range(d):
                trow[j] = (trow[j] + c * row[j]) % p
    return total


@dataclass
class TrialReport:
    h: list
    k: int
    target: str
    prime: int
    seed: int
    trials: int
    dims: list
    mismatches: list
    resamples: int

    @property
    def ok(self) -> bool:
        return not self.mismatches

    def to_json(self) -> dict:
        return {
            "H": self.h,
            "k": self.k,
            "target": self.target,
            "prime": self.prime,
            "seed": self.seed,
            "trials": self.trials,
            "dims": self.dims,
            "mismatch_count": len(self.mismatches),
            "mismatches": self.mismatches,
            "resamples": self.resamples,
        }


def _derive_seed(seed: int, d: int, trial: int, attempt: int) -> int:
    return (seed * 1_000_003 + d * 7919 + trial * 104_729 + attempt * 15_485_863) % (2**63)


def verify_iterate(h: HSpec, value: NCElem, k: int, target: str,
                   trials: int = 20, dims=(2, 3), p: int = DEFAULT_PRIME,
                   seed: int = 0) -> TrialReport:
    """Compare eval(map^k(target)) against the k-step matrix orbit.

    Singular H along an orbit resamples the base point from a derived
    seed (capped at 100 attempts per trial).  Mismatches are returned as
    data with full reproduction seeds; acceptance gates on zero.
    """
    mismatches = []
    resamples = 0
    direction = "fwd" if k >= 0 else "bwd"
    for d in dims:
        for trial in range(trials):
            for attempt in range(100):
                pt0 = random_point(d, p, _derive_seed(seed, d, trial, attempt))
                try:
                    pt = pt0
                    for _ in range(abs(k)):
                        pt = orbit_step(h, pt, direction)
                    break
                except SingularH:
                    resamples += 1
            else:
                raise SingularH("resample cap hit; choose another prime/seed")
            expected = pt.x if target == "x" else pt.y
            got = eval_nc(value, pt0)
            if got != expected:
                mismatches.append({
                    "d": d, "trial": trial, "seed": pt0.seed,
                    "k": k, "target": target,
                })
    return TrialReport(
        h=h.coeff_strings(), k=k, target=target, prime=p, seed=seed,
        trials=trials, dims=list(dims), mismatches=mismatches,
        resamples=resamples,
    )

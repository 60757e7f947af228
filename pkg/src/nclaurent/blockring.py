"""Exact arithmetic in K[t, t^-1] localized at a monic reversible polynomial H.

Elements are kept in a canonical partial-fraction basis

    {t^m : m in Z}  union  {t^i * h^j : 0 <= i < n, j >= 1},

where n = deg H and h stands for H(t)^-1.  The basis is an additive
K-basis of the localization, so equality, zero-testing and "is this
element actually a Laurent polynomial" are decided by inspection of the
stored coefficients.  All coefficients are exact rationals; integers are
kept as plain ints (they interoperate with Fraction transparently and
are much faster on the hot paths).

The only rewriting rule is h * H(t) = 1.  Applied leftward it lowers
h-powers of monomials t^m with m >= n; applied rightward it raises
negative exponents toward the residue window [0, n).  Both directions
strictly decrease the lexicographic measure (j, |m|), so the reduction
terminates without any confluence analysis.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from nclaurent.errors import (
    DegreeZero,
    NotLaurent,
    NotMonicOrUnitConstant,
    NotReversible,
)


def norm_coeff(c):
    """Collapse integral Fractions to plain ints (exactness preserved)."""
    if type(c) is int:
        return c
    if c.denominator == 1:
        return int(c)
    return c


def as_fraction(value) -> Fraction:
    """Parse an exact rational from int, Fraction or 'p/q' string."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"not an exact rational: {value!r}")


@dataclass(frozen=True)
class HSpec:
    """Validated defining polynomial H(t) = h_0 + h_1 t + ... + h_n t^n.

    h_0 = h_n = 1 always; reversible_ok records whether h_i = h_{n-i}
    holds, distinct_roots whether gcd(H, H') is constant.
    """

    n: int
    coeffs: tuple
    reversible_ok: bool
    distinct_roots: bool
    warnings: tuple = field(default=(), compare=False)

    def render(self) -> str:
        pieces = []
        for i, c in enumerate(self.coeffs):
            if c == 0:
                continue
            if i == 0:
                pieces.append(str(c))
            else:
                xs = "x" if i == 1 else f"x^{i}"
                pieces.append(xs if c == 1 else f"{c}*{xs}")
        return " + ".join(pieces) if pieces else "0"

    def coeff_strings(self):
        return [str(Fraction(c)) for c in self.coeffs]


def _poly_gcd_is_constant(a: list, b: list) -> bool:
    # Euclidean remainder sequence over Q; constant gcd <=> no repeated root.
    def strip(p):
        while p and p[-1] == 0:
            p.pop()
        return p

    a, b = strip(list(a)), strip(list(b))
    while b:
        # a mod b by leading-term elimination
        while len(a) >= len(b) and a:
            q = Fraction(a[-1], 1) / Fraction(b[-1], 1)
            shift = len(a) - len(b)
            for i, bc in enumerate(b):
                a[shift + i] -= q * bc
            strip(a)
        a, b = b, a
    return len(a) <= 1


def validate_h(coeffs, allow_nonreversible: bool = False) -> HSpec:
    """Validate H coefficients (constant term first) into an HSpec.

    Raises DegreeZero for degree < 1 and NotMonicOrUnitConstant unless
    h_0 = h_n = 1.  Non-reversible H is rejected unless explicitly
    allowed, in which case reversible_ok is False and a warning is
    attached; every certified claim downstream is scoped to reversible H.
    """
    cs = tuple(as_fraction(c) for c in coeffs)
    if len(cs) < 2:
        raise DegreeZero(f"H needs degree >= 1, got coefficients {list(coeffs)}")
    n = len(cs) - 1
    if cs[0] != 1 or cs[n] != 1:
        raise NotMonicOrUnitConstant(
            f"need h_0 = h_n = 1, got h_0 = {cs[0]}, h_{n} = {cs[n]}"
        )
    reversible = all(cs[i] == cs[n - i] for i in range(n + 1))
    warnings = []
    if not reversible:
        if not allow_nonreversible:
            raise NotReversible(
                "H is not reversible (h_i != h_{n-i}); pass allow_nonreversible "
                "to experiment outside the certified regime"
            )
        warnings.append("H is not reversible; Laurentness is not certified")
    hprime = [i * cs[i] for i in range(1, n + 1)]
    distinct = _poly_gcd_is_constant(list(cs), hprime)
    if not distinct:
        warnings.append("H has repeated roots; the geometric resolution needs distinct roots")
    cs_norm = tuple(norm_coeff(c) for c in cs)
    return HSpec(n=n, coeffs=cs_norm, reversible_ok=reversible,
                 distinct_roots=distinct, warnings=tuple(warnings))


def has_distinct_roots(h: HSpec) -> bool:
    """True iff gcd(H, H') is constant (exact Euclid over Q)."""
    cs = [Fraction(c) for c in h.coeffs]
    hprime = [i * cs[i] for i in range(1, h.n + 1)]
    return _poly_gcd_is_constant(cs, hprime)


class BlockElem:
    """One element of the localized ring, in canonical form.

    laurent maps exponent m to a nonzero coefficient; frac maps
    (j, i) with j >= 1, 0 <= i < n to a nonzero coefficient.  Instances
    are immutable by convention: operations always build fresh dicts.
    """

    __slots__ = ("laurent", "frac")

    def __init__(self, laurent=None, frac=None):
        self.laurent = laurent or {}
        self.frac = frac or {}

    def __eq__(self, other):
        return (isinstance(other, BlockElem)
                and self.laurent == other.laurent and self.frac == other.frac)

    def __hash__(self):
        return hash((frozenset(self.laurent.items()), frozenset(self.frac.items())))

    def is_zero(self) -> bool:
        return not self.laurent and not self.frac

    def __repr__(self):
        bits = [f"{c}*t^{m}" for m, c in sorted(self.laurent.items())]
        bits += [f"{c}*t^{i}*h^{j}" for (j, i), c in sorted(self.frac.items())]
        return "BlockElem(" + (" + ".join(bits) or "0") + ")"


def is_laurent_block(a: BlockElem) -> bool:
    """True iff the canonical form has no h-part."""
    return not a.frac


def to_laurent_block(a: BlockElem) -> dict:
    """Extract the Laurent coefficient map; reject genuine fractions."""
    if a.frac:
        raise NotLaurent(f"element has denominator part {sorted(a.frac)}")
    return dict(a.laurent)


class BlockRing:
    """The ring K[t, t^-1, H(t)^-1] for one fixed HSpec.

    Owns the reduce_pf cache; all returned BlockElems are canonical.
    """

    def __init__(self, h: HSpec):
        self.h = h
        self.n = h.n
        self._pf_cache: dict = {}
        self._pair_cache: dict = {}

    # -- constructors -------------------------------------------------

    def zero(self) -> BlockElem:
        return BlockElem()

    def one(self) -> BlockElem:
        return BlockElem({0: 1})

    def monomial(self, m: int, c=1) -> BlockElem:
        c = norm_coeff(c)
        return BlockElem({m: c}) if c else BlockElem()

    def frac_term(self, j: int, i: int, c=1) -> BlockElem:
        if j < 1 or not 0 <= i < self.n:
            raise ValueError(f"frac key out of range: j={j}, i={i}, n={self.n}")
        c = norm_coeff(c)
        return BlockElem(frac={(j, i): c}) if c else BlockElem()

    def embed_h(self) -> BlockElem:
        """H(t) itself as a Laurent element."""
        return BlockElem({i: norm_coeff(c) for i, c in enumerate(self.h.coeffs) if c})

    def h_inverse(self) -> BlockElem:
        return self.frac_term(1, 0)

    # -- canonicalization ---------------------------------------------

    def reduce_pf(self, j: int, m: int) -> BlockElem:
        """Canonical partial-fraction form of h^j * t^m.

        Iterative worklist; each rewrite strictly decreases (j, |m|)
        lexicographically, so the loop terminates.  Results are cached
        per ring (they are reused heavily by the word-merge cascade).
        """
        if j == 0:
            return self.monomial(m)
        key = (j, m)
        cached = self._pf_cache.get(key)
        if cached is not None:
            return cached
        n = self.n
        hs = self.h.coeffs
        laurent: dict = {}
        frac: dict = {}
        work = [(1, j, m)]
        while work:
            c, j_, m_ = work.pop()
            if j_ == 0:
                laurent[m_] = laurent.get(m_, 0) + c
            elif 0 <= m_ < n:
                k2 = (j_, m_)
                frac[k2] = frac.get(k2, 0) + c
            elif m_ >= n:
                # h^j t^m = h^{j-1} t^{m-n} - sum_{i<n} h_i h^j t^{m-n+i}
                work.append((c, j_ - 1, m_ - n))
                for i in range(n):
                    if hs[i]:
                        work.append((-c * hs[i], j_, m_ - n + i))
            else:
                # m < 0: h^j t^m = h^{j-1} t^m - sum_{i=1..n} h_i h^j t^{m+i}
                work.append((c, j_ - 1, m_))
                for i in range(1, n + 1):
                    if hs[i]:
                        work.append((-c * hs[i], j_, m_ + i))
        laurent = {k: norm_coeff(v) for k, v in laurent.items() if v}
        frac = {k: norm_coeff(v) for k, v in frac.items() if v}
        out = BlockElem(laurent, frac)
        self._pf_cache[key] = out
        return out

    def mul_basis(self, k1, k2) -> BlockElem:
        """Product of two basis elements; keys are m:int or (j,i):tuple."""
        pk = (k1, k2)
        cached = self._pair_cache.get(pk)
        if cached is not None:
            return cached
        if type(k1) is int:
            if type(k2) is int:
                out = self.monomial(k1 + k2)
            else:
                j, i = k2
                out = self.reduce_pf(j, i + k1)
        elif type(k2) is int:
            j, i = k1
            out = self.reduce_pf(j, i + k2)
        else:
            j1, i1 = k1
            j2, i2 = k2
            out = self.reduce_pf(j1 + j2, i1 + i2)
        self._pair_cache[pk] = out
        return out

    # -- ring operations ----------------------------------------------

    def add(self, a: BlockElem, b: BlockElem) -> BlockElem:
        laurent = dict(a.laurent)
        for m, c in b.laurent.items():
            s = laurent.get(m, 0) + c
            if s:
                laurent[m] = norm_coeff(s)
            else:
                laurent.pop(m, None)
        frac = dict(a.frac)
        for k, c in b.frac.items():
            s = frac.get(k, 0) + c
            if s:
                frac[k] = norm_coeff(s)
            else:
                frac.pop(k, None)
        return BlockElem(laurent, frac)

    def scale(self, c, a: BlockElem) -> BlockElem:
        c = norm_coeff(c)
        if not c:
            return BlockElem()
        return BlockElem({m: norm_coeff(c * v) for m, v in a.laurent.items()},
                         {k: norm_coeff(c * v) for k, v in a.frac.items()})

    def mul(self, a: BlockElem, b: BlockElem) -> BlockElem:
        out = BlockElem()
        items_a = list(a.laurent.items()) + list(a.frac.items())
        items_b = list(b.laurent.items()) + list(b.frac.items())
        laurent: dict = {}
        frac: dict = {}
        for ka, ca in items_a:
            for kb, cb in items_b:
                c = ca * cb
                part = self.mul_basis(ka, kb)
                for m, v in part.laurent.items():
                    s = laurent.get(m, 0) + c * v
                    if s:
                        laurent[m] = s
                    else:
                        laurent.pop(m, None)
                for k, v in part.frac.items():
                    s = frac.get(k, 0) + c * v
                    if s:
                        frac[k] = s
                    else:
                        frac.pop(k, None)
        out.laurent = {m: norm_coeff(v) for m, v in laurent.items() if v}
        out.frac = {k: norm_coeff(v) for k, v in frac.items() if v}
        return out

    def embed_laurent(self, coeff_map: dict) -> BlockElem:
        """Build an element from an exponent -> coefficient map."""
        return BlockElem({m: norm_coeff(as_fraction(c) if not isinstance(c, int) else c)
                          for m, c in coeff_map.items() if c})


def block_add(a: BlockElem, b: BlockElem, ring: BlockRing) -> BlockElem:
    return ring.add(a, b)


def block_mul(a: BlockElem, b: BlockElem, ring: BlockRing) -> BlockElem:
    return ring.mul(a, b)

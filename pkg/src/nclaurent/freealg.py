"""Free product of two localized Laurent block rings, with normal forms.

The noncommutative algebra is spanned by alternating words whose letters
are non-identity canonical basis elements of the x-side or y-side block
ring (see blockring).  Because each factor has a genuine linear basis,
alternating words form a linear basis of the free product, so equality
and Laurentness are decided by inspection of the stored normal form; no
rewriting search is ever needed.  Naive letter-level rewriting would not
be confluent here (sums such as h*x^-1 + h*x collapse only in the
partial-fraction basis), which is exactly why the block basis is used.

Atom encoding (performance-critical): an atom is a single int
``(payload << 2) | tag`` with tag bits

    0 -> pure x-atom,  payload = exponent m != 0
    1 -> pure y-atom,  payload = exponent m != 0
    2 -> x-fraction atom, payload = j*n + i  (j >= 1, 0 <= i < n)
    3 -> y-fraction atom, payload = j*n + i

so ``atom & 1`` is the side, ``atom & 2`` flags a denominator block.
A word is a tuple of atoms with strictly alternating sides; the empty
tuple is the identity.  An element is a dict word -> nonzero exact
rational (ints kept as ints).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from nclaurent.blockring import BlockRing, HSpec, norm_coeff
from nclaurent.errors import NotLaurentInput

# power-image cache limits: exponents beyond, or images fatter than,
# these bounds are applied by repeated chunk multiplication instead
_POW_EXP_CAP = 64
_POW_MASS_CAP = 65536


def atom_pure(side: int, m: int) -> int:
    if m == 0:
        raise ValueError("pure atom needs a nonzero exponent")
    return (m << 2) | side


def atom_frac(side: int, j: int, i: int, n: int) -> int:
    if j < 1 or not 0 <= i < n:
        raise ValueError(f"fraction atom out of range: j={j}, i={i}, n={n}")
    return ((j * n + i) << 2) | 2 | side


def atom_is_frac(a: int) -> bool:
    return bool(a & 2)


def atom_side(a: int) -> int:
    return a & 1


class NCRing:
    """Shared context: the HSpec, the block ring and the merge caches."""

    def __init__(self, h: HSpec):
        self.h = h
        self.n = h.n
        self.block = BlockRing(h)
        self._merge_cache: dict = {}

    def __eq__(self, other):
        return isinstance(other, NCRing) and self.h == other.h

    def __hash__(self):
        return hash(self.h)

    def decode_frac(self, a: int):
        payload = a >> 2
        return payload // self.n, payload % self.n

    def merge_atoms(self, a: int, b: int):
        """Product of two same-side atoms in the side's block ring.

        Returns (scalar, parts): scalar is the identity component of the
        block product, parts a tuple of (atom, coeff) for the rest.
        """
        key = (a, b)
        cached = self._merge_cache.get(key)
        if cached is not None:
            return cached
        s = a & 1
        n = self.n
        k1 = (a >> 2) if not a & 2 else divmod(a >> 2, n)
        k2 = (b >> 2) if not b & 2 else divmod(b >> 2, n)
        prod = self.block.mul_basis(k1, k2)
        scalar = prod.laurent.get(0, 0)
        parts = []
        for m, c in prod.laurent.items():
            if m:
                parts.append(((m << 2) | s, c))
        for (j, i), c in prod.frac.items():
            parts.append((((j * n + i) << 2) | 2 | s, c))
        out = (scalar, tuple(parts))
        self._merge_cache[key] = out
        return out


def word_mul(ring: NCRing, w: tuple, v: tuple):
    """All (word, coeff) pairs of the basis-word product w * v.

    Concatenates and merges boundary atoms on the same side through the
    block ring.  A merge whose block product has an identity component
    makes the next pair of atoms adjacent, so the cascade continues with
    the accumulated scalar; the loop shortens w and v each round and
    therefore terminates.  Pure-atom merges (the overwhelmingly common
    case) are special-cased: they yield either a single merged atom or a
    full cancellation, never both.
    """
    i = len(w)
    j = 0
    nv = len(v)
    c = 1
    out = []
    while i and j < nv:
        a = w[i - 1]
        b = v[j]
        if (a ^ b) & 1:
            break
        if not ((a | b) & 2):
            m = (a >> 2) + (b >> 2)
            if m:
                out.append((w[: i - 1] + ((m << 2) | (a & 1),) + v[j + 1 :], c))
                return out
            i -= 1
            j += 1
            continue
        scalar, parts = ring.merge_atoms(a, b)
        if parts:
            head = w[: i - 1]
            tail = v[j + 1 :]
            for atom, pc in parts:
                out.append((head + (atom,) + tail, c * pc))
        if not scalar:
            return out
        c = c * scalar
        i -= 1
        j += 1
    out.append((w[:i] + v[j:], c))
    return out


def dict_add(acc: dict, terms, factor=1) -> None:
    """acc += factor * terms, in place, zeros pruned."""
    if factor == 1:
        for word, c in terms.items():
            s = acc.get(word, 0) + c
            if s:
                acc[word] = s
            else:
                del acc[word]
    else:
        for word, c in terms.items():
            s = acc.get(word, 0) + factor * c
            if s:
                acc[word] = s
            else:
                del acc[word]


_IDENTITY = {(): 1}


def dict_mul(ring: NCRing, a: dict, b: dict) -> dict:
    """Bilinear product of two term dicts (canonical in, canonical out)."""
    if not a or not b:
        return {}
    if len(a) == 1 and () in a and a[()] == 1:
        return b
    if len(b) == 1 and () in b and b[()] == 1:
        return a
    acc: dict = {}
    get = acc.get
    for wa, ca in a.items():
        for wb, cb in b.items():
            cc = ca * cb
            for word, c in word_mul(ring, wa, wb):
                s = get(word, 0) + cc * c
                if s:
                    acc[word] = s
                else:
                    del acc[word]
    for word, c in acc.items():
        if type(c) is not int and c.denominator == 1:
            acc[word] = int(c)
    return acc


def dict_is_laurent(terms: dict) -> bool:
    for w in terms:
        for a in w:
            if a & 2:
                return False
    return True


class NCElem:
    """Immutable-by-convention element of the free-product algebra."""

    __slots__ = ("ring", "terms")

    def __init__(self, ring: NCRing, terms: dict):
        self.ring = ring
        self.terms = terms

    # -- constructors ---------------------------------------------------

    @staticmethod
    def zero(ring: NCRing) -> "NCElem":
        return NCElem(ring, {})

    @staticmethod
    def one(ring: NCRing) -> "NCElem":
        return NCElem(ring, {(): 1})

    @staticmethod
    def scalar(ring: NCRing, c) -> "NCElem":
        c = norm_coeff(c)
        return NCElem(ring, {(): c} if c else {})

    # -- structure ------------------------------------------------------

    def __eq__(self, other):
        return (isinstance(other, NCElem) and self.ring.h == other.ring.h
                and self.terms == other.terms)

    def __hash__(self):
        return hash((self.ring.h, frozenset(self.terms.items())))

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other):
        acc = dict(self.terms)
        dict_add(acc, other.terms)
        return NCElem(self.ring, acc)

    def __sub__(self, other):
        acc = dict(self.terms)
        dict_add(acc, other.terms, -1)
        return NCElem(self.ring, acc)

    def __mul__(self, other):
        if isinstance(other, NCElem):
            return NCElem(self.ring, dict_mul(self.ring, self.terms, other.terms))
        return nc_scale(other, self)

    def __rmul__(self, other):
        return nc_scale(other, self)

    def __neg__(self):
        return nc_scale(-1, self)

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative powers are not defined on elements")
        out = NCElem.one(self.ring)
        for _ in range(k):
            out = out * self
        return out

    def __repr__(self):
        r = render_element(self)
        return f"NCElem({r if len(r) < 120 else r[:117] + '...'})"


def nc_add(a: NCElem, b: NCElem) -> NCElem:
    return a + b


def nc_scale(c, a: NCElem) -> NCElem:
    c = norm_coeff(c) if isinstance(c, (int, Fraction)) else Fraction(c)
    if not c:
        return NCElem.zero(a.ring)
    return NCElem(a.ring, {w: norm_coeff(c * v) for w, v in a.terms.items()})


def nc_mul(a: NCElem, b: NCElem) -> NCElem:
    return a * b


def embed_word(ring: NCRing, runs) -> NCElem:
    """Single-word element from (letter, exponent) runs.

    Consecutive same-letter runs are merged with free cancellation and
    zero exponents dropped, so any letter sequence is accepted.
    """
    stack = []
    for letter, e in runs:
        if letter not in ("x", "y"):
            raise ValueError(f"unknown letter {letter!r}")
        side = 0 if letter == "x" else 1
        if e == 0:
            continue
        if stack and stack[-1][0] == side:
            s = stack[-1][1] + e
            if s:
                stack[-1] = (side, s)
            else:
                stack.pop()  # exposed run merges with later input via the top check
        else:
            stack.append((side, e))
    word = tuple((m << 2) | side for side, m in stack)
    return NCElem(ring, {word: 1})


def generator(ring: NCRing, letter: str, exponent: int = 1) -> NCElem:
    return embed_word(ring, [(letter, exponent)])


def is_laurent(a: NCElem) -> bool:
    """True iff no stored word carries a denominator block."""
    return dict_is_laurent(a.terms)


def non_laurent_witness(a: NCElem, limit: int = 10):
    """Up to `limit` offending words, rendered, for failure bundles."""
    out = []
    for w in a.terms:
        if any(atom & 2 for atom in w):
            out.append(render_word(a.ring, w))
            if len(out) >= limit:
                break
    return out


@dataclass
class EndoSpec:
    """Algebra endomorphism given by images of x, x^-1, y, y^-1.

    Inverse-pair laws are verified at construction; a violation would
    silently break every substitution downstream.
    """

    ring: NCRing
    x: NCElem
    x_inv: NCElem
    y: NCElem
    y_inv: NCElem

    def __post_init__(self):
        one = NCElem.one(self.ring)
        for g, gi, name in ((self.x, self.x_inv, "x"), (self.y, self.y_inv, "y")):
            if g * gi != one or gi * g != one:
                raise ValueError(f"images of {name} and {name}^-1 are not inverse")
        self._pow = {}

    def _power_chunks(self, side: int, m: int):
        """Decompose image(letter^m) into cached power factors.

        Powers are cached up to a mass/exponent cap; larger runs are
        covered by repeating the largest cached chunk, which keeps the
        total work proportional to the output size.
        """
        sign = 1 if m > 0 else -1
        k = -m if m < 0 else m
        key = (side, sign)
        cache = self._pow.get(key)
        if cache is None:
            if side == 0:
                base = self.x if sign > 0 else self.x_inv
            else:
                base = self.y if sign > 0 else self.y_inv
            cache = [None, base.terms]
            self._pow[key] = cache
        while (len(cache) - 1 < min(k, _POW_EXP_CAP)
               and len(cache[-1]) <= _POW_MASS_CAP):
            cache.append(dict_mul(self.ring, cache[-1], cache[1]))
        top = len(cache) - 1
        while k:
            j = k if k < top else top
            yield cache[j]
            k -= j

    def apply_atom(self, partial: dict, atom: int) -> dict:
        if atom & 2:
            raise NotLaurentInput("cannot substitute into a denominator block")
        for chunk in self._power_chunks(atom & 1, atom >> 2):
            partial = dict_mul(self.ring, partial, chunk)
        return partial


def substitute(a: NCElem, e: EndoSpec, budget_terms: int | None = None) -> NCElem:
    """Image of a Laurent element under the endomorphism.

    Words are processed in sorted order with a shared-prefix stack, so
    the partial image of a common prefix is computed once.  When
    budget_terms is set, the accumulated term count is checked after
    each word and BudgetExceeded raised beyond it.
    """
    from nclaurent.errors import BudgetExceeded

    if not dict_is_laurent(a.terms):
        raise NotLaurentInput("substitution input must be Laurent")
    ring = e.ring
    acc: dict = {}
    get = acc.get
    prev: tuple | None = None
    partials = [_IDENTITY]
    for w in sorted(a.terms):
        if prev is None:
            cp = 0
        else:
            cp = 0
            lim = len(prev) if len(prev) < len(w) else len(w)
            while cp < lim and prev[cp] == w[cp]:
                cp += 1
        del partials[cp + 1 :]
        while len(partials) <= len(w):
            partials.append(e.apply_atom(partials[-1], w[len(partials) - 1]))
        coeff = a.terms[w]
        for word, c in partials[len(w)].items():
            s = get(word, 0) + coeff * c
            if s:
                acc[word] = s
            else:
                del acc[word]
        prev = w
        if budget_terms is not None and len(acc) > budget_terms:
            raise BudgetExceeded(
                f"term count {len(acc)} exceeds budget {budget_terms}")
    for word, c in acc.items():
        if type(c) is not int and c.denominator == 1:
            acc[word] = int(c)
    return NCElem(ring, acc)


def abelianize(a: NCElem) -> dict:
    """Commutative image: word -> (x-degree, y-degree) monomial.

    Returns a sparse map (ex, ey) -> coefficient; the commutative module
    treats exactly this shape as its element type.
    """
    if not dict_is_laurent(a.terms):
        raise NotLaurentInput("abelianization input must be Laurent")
    out: dict = {}
    for w, c in a.terms.items():
        ex = 0
        ey = 0
        for atom in w:
            if atom & 1:
                ey += atom >> 2
            else:
                ex += atom >> 2
        key = (ex, ey)
        s = out.get(key, 0) + c
        if s:
            out[key] = s
        else:
            del out[key]
    return {k: norm_coeff(v) for k, v in out.items()}


def poly_eval_nc(h: HSpec, e: NCElem) -> NCElem:
    """H evaluated at an algebra element: sum h_i * e^i."""
    out = NCElem.scalar(e.ring, h.coeffs[0])
    p = NCElem.one(e.ring)
    for i in range(1, h.n + 1):
        p = p * e
        if h.coeffs[i]:
            out = out + nc_scale(h.coeffs[i], p)
    return out


def expanded_length(ring: NCRing, w: tuple) -> int:
    total = 0
    for a in w:
        if a & 2:
            j, i = ring.decode_frac(a)
            total += j + i
        else:
            m = a >> 2
            total += m if m > 0 else -m
    return total


def stats(a: NCElem) -> dict:
    """Growth record: term count, longest word, coefficient extremes."""
    if not a.terms:
        return {"term_count": 0, "max_word_length": 0, "coeff_min": None,
                "coeff_max": None, "all_positive": True}
    cmin = cmax = None
    maxlen = 0
    ring = a.ring
    for w, c in a.terms.items():
        ln = expanded_length(ring, w)
        if ln > maxlen:
            maxlen = ln
        if cmin is None or c < cmin:
            cmin = c
        if cmax is None or c > cmax:
            cmax = c
    return {"term_count": len(a.terms), "max_word_length": maxlen,
            "coeff_min": cmin, "coeff_max": cmax, "all_positive": cmin > 0}


# ---------------------------------------------------------------------------
# deterministic ordering, rendering, JSON
# ---------------------------------------------------------------------------

# letter ranks for the serialization order: x < x^-1 < y < y^-1 < h_x < h_y
def _rank_seq(ring: NCRing, w: tuple) -> tuple:
    seq = []
    for a in w:
        side = a & 1
        if a & 2:
            j, i = ring.decode_frac(a)
            seq.extend((4 + side,) * j)
            seq.extend((2 * side,) * i)
        else:
            m = a >> 2
            if m > 0:
                seq.extend((2 * side,) * m)
            else:
                seq.extend((2 * side + 1,) * (-m))
    return tuple(seq)


def word_sort_key(ring: NCRing, w: tuple):
    rs = _rank_seq(ring, w)
    return (len(rs), rs)


def sorted_terms(a: NCElem):
    ring = a.ring
    return sorted(a.terms.items(), key=lambda kv: word_sort_key(ring, kv[0]))


def render_word(ring: NCRing, w: tuple) -> str:
    if not w:
        return "1"
    bits = []
    for a in w:
        letter = "y" if a & 1 else "x"
        if a & 2:
            j, i = ring.decode_frac(a)
            bits.append(f"h{letter}" if j == 1 else f"h{letter}^{j}")
            if i:
                bits.append(letter if i == 1 else f"{letter}^{i}")
        else:
            m = a >> 2
            bits.append(letter if m == 1 else f"{letter}^{m}")
    return "*".join(bits)


def render_element(a: NCElem) -> str:
    if not a.terms:
        return "0"
    pieces = []
    for w, c in sorted_terms(a):
        body = render_word(a.ring, w)
        mag = c if c > 0 else -c
        if w == ():
            txt = str(mag)
        elif mag == 1:
            txt = body
        else:
            txt = f"{mag}*{body}"
        if not pieces:
            pieces.append(txt if c > 0 else f"-{txt}")
        else:
            pieces.append(("+ " if c > 0 else "- ") + txt)
    return " ".join(pieces)


def word_to_json(ring: NCRing, w: tuple):
    out = []
    for a in w:
        letter = "y" if a & 1 else "x"
        if a & 2:
            j, i = ring.decode_frac(a)
            out.append([f"h{letter}", j, i])
        else:
            out.append([letter, a >> 2])
    return out


def element_terms_json(a: NCElem):
    return [{"coeff": str(Fraction(c)), "word": word_to_json(a.ring, w)}
            for w, c in sorted_terms(a)]


# ---------------------------------------------------------------------------
# expression parser: terms split on +/-, factors `x|y(^int)?` or rationals,
# separated by `*`; whitespace-insensitive
# ---------------------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(?P<num>\d+(?:/\d+)?)|(?P<letter>[xy])(?:\^(?P<exp>-?\d+))?"
                    r"|(?P<op>[+\-*]))")


def parse_element(ring: NCRing, text: str) -> NCElem:
    """Parse the text rendering back into an element."""
    pos = 0
    total = NCElem.zero(ring)
    sign = 1
    coeff = None
    runs: list = []
    started = False

    def flush():
        nonlocal total, sign, coeff, runs, started
        if not started:
            return
        term = embed_word(ring, runs)
        c = Fraction(coeff if coeff is not None else 1) * sign
        total = total + nc_scale(c, term)
        sign, coeff, runs, started = 1, None, [], False

    text = text.strip()
    if text == "0":
        return total
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ValueError(f"parse error at {text[pos:pos + 20]!r}")
        pos = m.end()
        if m.group("num"):
            c = Fraction(m.group("num"))
            coeff = c if coeff is None else coeff * c
            started = True
        elif m.group("letter"):
            e = int(m.group("exp") or 1)
            runs.append((m.group("letter"), e))
            started = True
        else:
            op = m.group("op")
            if op == "*":
                continue
            flush()
            sign = 1 if op == "+" else -1
    flush()
    return total

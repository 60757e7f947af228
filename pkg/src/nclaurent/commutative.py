"""Commutative oracle: bivariate Laurent arithmetic and the classical map.

A CommLaurent is a plain sparse dict (ex, ey) -> nonzero exact rational.
The classical map sends (x, y) to (H(x)/y, x); its iterates satisfy the
three-term recurrence x_{j+1} * x_{j-1} = H(x_j) with x_0 = x and
x_{-1} = y (running in both directions), and every quotient must divide
exactly, which is the commutative Laurent phenomenon this module both
uses and re-verifies.

Fractions of ordinary polynomials are compared by cross-multiplication
only; no multivariate gcd is ever computed.
"""

from __future__ import annotations

from fractions import Fraction

from nclaurent.blockring import HSpec, norm_coeff
from nclaurent.errors import BudgetExceeded, NotDivisible
from nclaurent.freealg import NCElem, abelianize

# element type: dict[(ex, ey)] -> coeff; monomial exponents may be negative
CommLaurent = dict


def cl_const(c) -> CommLaurent:
    c = norm_coeff(c)
    return {(0, 0): c} if c else {}


def cl_gen(letter: str, e: int = 1) -> CommLaurent:
    return {(e, 0) if letter == "x" else (0, e): 1}


def cadd(a: CommLaurent, b: CommLaurent) -> CommLaurent:
    out = dict(a)
    for k, c in b.items():
        s = out.get(k, 0) + c
        if s:
            out[k] = norm_coeff(s)
        else:
            del out[k]
    return out


def csub(a: CommLaurent, b: CommLaurent) -> CommLaurent:
    out = dict(a)
    for k, c in b.items():
        s = out.get(k, 0) - c
        if s:
            out[k] = norm_coeff(s)
        else:
            del out[k]
    return out


def cmul(a: CommLaurent, b: CommLaurent) -> CommLaurent:
    out: CommLaurent = {}
    for (xa, ya), ca in a.items():
        for (xb, yb), cb in b.items():
            k = (xa + xb, ya + yb)
            s = out.get(k, 0) + ca * cb
            if s:
                out[k] = s
            else:
                del out[k]
    return {k: norm_coeff(c) for k, c in out.items()}


def cpow(a: CommLaurent, k: int) -> CommLaurent:
    out = cl_const(1)
    for _ in range(k):
        out = cmul(out, a)
    return out


def cl_poly_eval(h: HSpec, a: CommLaurent) -> CommLaurent:
    out = cl_const(h.coeffs[0])
    p = cl_const(1)
    for i in range(1, h.n + 1):
        p = cmul(p, a)
        if h.coeffs[i]:
            out = cadd(out, cmul(cl_const(h.coeffs[i]), p))
    return out


def _shift_to_poly(a: CommLaurent):
    """Multiply by the monomial clearing negative exponents."""
    sx = min((k[0] for k in a), default=0)
    sy = min((k[1] for k in a), default=0)
    sx, sy = min(sx, 0), min(sy, 0)
    return {(ex - sx, ey - sy): c for (ex, ey), c in a.items()}, (sx, sy)


def _grlex_lead(p: CommLaurent):
    return max(p, key=lambda k: (k[0] + k[1], k))


def exact_div(p: CommLaurent, d: CommLaurent) -> CommLaurent:
    """Laurent quotient q with d * q = p, or NotDivisible.

    Both operands are normalized so their minimal exponents are zero;
    monomials are units in the Laurent ring, so exact division reduces
    to ordinary polynomial division, done by leading-term elimination
    under graded lex.  The result is re-verified by multiplication.
    """
    if not d:
        raise ZeroDivisionError("division by the zero polynomial")
    if not p:
        return {}
    pn, (px, py) = _shift_to_poly(p)
    dn, (dx, dy) = _shift_to_poly(d)
    # strip the remaining monomial content so x, y do not divide dn
    mx = min(k[0] for k in dn)
    my = min(k[1] for k in dn)
    dn = {(ex - mx, ey - my): c for (ex, ey), c in dn.items()}
    dx += mx
    dy += my
    lead_d = _grlex_lead(dn)
    lc_d = dn[lead_d]
    rem = dict(pn)
    q: CommLaurent = {}
    while rem:
        lead = _grlex_lead(rem)
        ex = lead[0] - lead_d[0]
        ey = lead[1] - lead_d[1]
        if ex < 0 or ey < 0:
            raise NotDivisible("leading term not divisible")
        lt = rem[lead]
        if isinstance(lt, int) and isinstance(lc_d, int) and lt % lc_d == 0:
            c = lt // lc_d
        else:
            c = Fraction(lt) / Fraction(lc_d)
        q[(ex, ey)] = norm_coeff(c)
        for (kx, ky), dc in dn.items():
            key = (kx + ex, ky + ey)
            s = rem.get(key, 0) - c * dc
            if s:
                rem[key] = s
            else:
                rem.pop(key, None)
    out = {(ex + px - dx, ey + py - dy): c for (ex, ey), c in q.items()}
    check = cmul(d, out)
    if check != p:
        raise NotDivisible("division verification failed")
    return out


def comm_iterate(h: HSpec, k: int, max_k: int = 64):
    """(L1, L2) with the classical map^k sending (x, y) to (L1, L2).

    Runs the recurrence x_{j+1} = H(x_j) / x_{j-1} forward or backward
    from x_0 = x, x_{-1} = y; the pair at power k is (x_k, x_{k-1}).
    NotDivisible here falsifies commutative Laurentness and aborts.
    """
    if abs(k) > max_k:
        raise BudgetExceeded(f"|k|={abs(k)} exceeds commutative budget {max_k}")
    cur = cl_gen("x")   # x_j for j walking toward k
    prev = cl_gen("y")  # x_{j-1}
    if k >= 0:
        for _ in range(k):
            cur, prev = exact_div(cl_poly_eval(h, cur), prev), cur
    else:
        # backward: x_{j-1} = H(x_j) / x_{j+1}
        for _ in range(-k):
            cur, prev = prev, exact_div(cl_poly_eval(h, prev), cur)
    return cur, prev


def compare_abelian(a: NCElem, c: CommLaurent) -> bool:
    """Does the commutative image of a equal c exactly?"""
    return abelianize(a) == c


def cl_to_json(a: CommLaurent):
    items = sorted(a.items())
    return [{"coeff": str(Fraction(c)), "monomial": [ex, ey]}
            for (ex, ey), c in items]


def render_comm(a: CommLaurent) -> str:
    if not a:
        return "0"
    bits = []
    for (ex, ey), c in sorted(a.items(), key=lambda kv: (kv[0][0] + kv[0][1], kv[0])):
        parts = []
        if ex:
            parts.append("x" if ex == 1 else f"x^{ex}")
        if ey:
            parts.append("y" if ey == 1 else f"y^{ey}")
        body = "*".join(parts) or "1"
        mag = c if c > 0 else -c
        txt = body if (mag == 1 and parts) else (f"{mag}*{body}" if parts else str(mag))
        if not bits:
            bits.append(txt if c > 0 else f"-{txt}")
        else:
            bits.append(("+ " if c > 0 else "- ") + txt)
    return " ".join(bits)


# -- polynomial fractions, for the toric chart identities -----------------


class Frac:
    """num/den of ordinary (nonnegative-exponent) polynomials, unreduced."""

    __slots__ = ("num", "den")

    def __init__(self, num: CommLaurent, den: CommLaurent):
        if not den:
            raise ZeroDivisionError("zero denominator")
        self.num = num
        self.den = den

    def __repr__(self):
        return f"Frac(({render_comm(self.num)}) / ({render_comm(self.den)}))"


def frac_eq(a: Frac, b: Frac) -> bool:
    """Equality by cross-multiplication; no reduction, no gcd."""
    return cmul(a.num, b.den) == cmul(b.num, a.den)

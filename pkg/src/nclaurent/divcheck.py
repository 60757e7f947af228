"""Bounded-support left division in the Laurent subalgebra.

Solves W * Q = P for Laurent Q given Laurent W and P by exact linear
algebra over a finite candidate support, then re-verifies any solution
by multiplication.  There is no known simple complete greedy algorithm
for left division in the free group algebra, so the solver is an honest
heuristic: Inconclusive is a first-class outcome and never a disproof.
The multiplication-only recurrence check in the iteration driver remains
the authoritative cross-validation; this module exists to confirm the
quotient is recoverable without trusting the free-product normalizer.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd

from nclaurent.blockring import norm_coeff
from nclaurent.errors import NotLaurentInput, ZeroDivisor
from nclaurent.freealg import NCElem, dict_is_laurent, word_mul


SOLVED = "Solved"
INCONCLUSIVE = "Inconclusive"
NO_SOLUTION_WITHIN_SUPPORT = "NoSolutionWithinSupport"


@dataclass
class DivisionProblem:
    w: NCElem
    p: NCElem
    rounds: int
    status: str
    quotient: NCElem | None = None
    support_size: int = 0

    def to_json(self) -> dict:
        out = {"status": self.status, "rounds": self.rounds,
               "support_size": self.support_size}
        if self.quotient is not None:
            from nclaurent.freealg import element_terms_json
            out["quotient_terms"] = element_terms_json(self.quotient)
        return out


def _invert_word(w: tuple) -> tuple:
    return tuple(((-(a >> 2)) << 2) | (a & 1) for a in reversed(w))


def _reduced_concat(ring, u: tuple, v: tuple) -> tuple:
    # pure words: the product is a single word with coefficient 1
    [(word, c)] = word_mul(ring, u, v)
    assert c == 1
    return word


def verify_division(w: NCElem, q: NCElem, p: NCElem) -> bool:
    """nc_mul(w, q) == p under canonical equality."""
    return w * q == p


def _solve_exact(columns: list, rhs: dict):
    """One exact solution of sum_s c_s * col_s = rhs, or None.

    Fraction-free sparse elimination: every equation is scaled to
    coprime integers, elimination uses integer cross-multiples, and each
    resulting row is re-normalized by its gcd, so no intermediate entry
    is ever a float or an unreduced fraction.
    """
    # rows: word -> {col_index: int}, rhs per word
    rows: dict = {}
    rvec: dict = {}
    for idx, col in enumerate(columns):
        for word, c in col.items():
            rows.setdefault(word, {})[idx] = c
    for word, c in rhs.items():
        rvec[word] = c
        rows.setdefault(word, {})

    def scale_int(row: dict, b):
        denom = 1
        for c in list(row.values()) + [b]:
            if isinstance(c, Fraction):
                denom = denom * c.denominator // gcd(denom, c.denominator)
        row = {k: int(c * denom) for k, c in row.items()}
        return row, int(b * denom)

    eqs = []
    for word, row in rows.items():
        r, b = scale_int(row, rvec.get(word, 0))
        r = {k: v for k, v in r.items() if v}
        if not r:
            if b:
                return None
            continue
        eqs.append((r, b))

    nvars = len(columns)
    solution = [None] * nvars
    # eliminate one variable at a time, preferring sparse pivots
    eqs.sort(key=lambda e: len(e[0]))
    assigned: dict = {}
    pivots = []
    work = eqs
    while work:
        work.sort(key=lambda e: len(e[0]))
        row, b = work.pop(0)
        if not row:
            if b:
                return None
            continue
        piv = min(row, key=lambda k: (abs(row[k]) != 1, abs(row[k])))
        pc = row[piv]
        pivots.append((piv, row, b))
        nxt = []
        for r2, b2 in work:
            c2 = r2.get(piv)
            if c2 is None:
                nxt.append((r2, b2))
                continue
            new = {}
            for k, v in r2.items():
                nv = v * pc - row.get(k, 0) * c2
                if nv:
                    new[k] = nv
            for k, v in row.items():
                if k not in r2:
                    nv = -v * c2
                    if nv:
                        new[k] = nv
            nb = b2 * pc - b * c2
            if new:
                g = 0
                for v in new.values():
                    g = gcd(g, v)
                g = gcd(g, nb)
                if g > 1:
                    new = {k: v // g for k, v in new.items()}
                    nb //= g
                nxt.append((new, nb))
            elif nb:
                return None
            # fully-zero rows with zero rhs drop out
        work = nxt
    # back-substitution in reverse pivot order; free variables get 0
    for piv, row, b in reversed(pivots):
        s = Fraction(b)
        for k, v in row.items():
            if k == piv:
                continue
            val = assigned.get(k, 0)
            if val:
                s -= v * val
        assigned[piv] = s / row[piv]
    for i in range(nvars):
        solution[i] = assigned.get(i, Fraction(0))
    return solution


def left_divide(w: NCElem, p: NCElem, rounds: int = 2) -> DivisionProblem:
    """Attempt W * Q = P over an expanding candidate support.

    Round 0 support: free reductions of u^-1 * q for u in supp(W),
    q in supp(P).  Each later round multiplies supp(W)-inverses against
    every word the current candidates can produce, covering quotients
    whose support is not directly visible in P.  A provably inconsistent
    system over a support that stopped growing is reported as
    NoSolutionWithinSupport; hitting the round limit while the support
    is still growing is Inconclusive.
    """
    if w.is_zero():
        raise ZeroDivisor("left division by zero")
    if not dict_is_laurent(w.terms) or not dict_is_laurent(p.terms):
        raise NotLaurentInput("left division operates on Laurent elements")
    ring = w.ring
    w_inv_words = [(_invert_word(u), cu) for u, cu in w.terms.items()]

    support = set()
    for u_inv, _ in w_inv_words:
        for q in p.terms:
            support.add(_reduced_concat(ring, u_inv, q))
    if p.is_zero():
        support.add(())

    for rnd in range(rounds + 1):
        cand = sorted(support)
        index = {s: i for i, s in enumerate(cand)}
        columns = []
        produced = set()
        for s in cand:
            col: dict = {}
            for u, cu in w.terms.items():
                for word, c in word_mul(ring, u, s):
                    v = col.get(word, 0) + cu * c
                    if v:
                        col[word] = v
                    else:
                        del col[word]
            columns.append(col)
            produced.update(col)
        sol = _solve_exact(columns, p.terms)
        if sol is not None:
            terms = {}
            for s, c in zip(cand, sol):
                if c:
                    terms[s] = norm_coeff(c)
            q_elem = NCElem(ring, terms)
            if verify_division(w, q_elem, p):
                return DivisionProblem(w, p, rnd, SOLVED, q_elem, len(cand))
            # a verified-false "solution" means the system missed words;
            # fall through to expansion
        grown = set(support)
        for u_inv, _ in w_inv_words:
            for word in produced.union(p.terms):
                grown.add(_reduced_concat(ring, u_inv, word))
        if grown == support:
            return DivisionProblem(w, p, rnd, NO_SOLUTION_WITHIN_SUPPORT,
                                   None, len(cand))
        support = grown
    return DivisionProblem(w, p, rounds, INCONCLUSIVE, None, len(support))

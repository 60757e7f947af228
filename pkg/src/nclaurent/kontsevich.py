"""The Kontsevich automorphism, its inverse, and the iteration driver.

Forward map on generators: x -> y^-1 H(x), y -> y^-1 x y.  The inverse
was solved for symbolically (compose and cancel) and is machine-verified
at construction: x -> x^-1 y x, y -> x^-1 H(y).  Iteration is letterwise
substitution into the previous iterate, which keeps every input Laurent;
denominator blocks appear only transiently through the image of x^-1
(resp. y^-1) and must cancel in the canonical basis.  A surviving block
in an iterate contradicts the certified Laurent property and is raised
as a hard error with a reproduction bundle.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from fractions import Fraction

from nclaurent.blockring import HSpec, validate_h
from nclaurent.errors import BudgetExceeded, InvalidH, NotLaurent
from nclaurent.freealg import (
    EndoSpec,
    NCElem,
    NCRing,
    atom_frac,
    atom_pure,
    embed_word,
    element_terms_json,
    is_laurent,
    nc_scale,
    non_laurent_witness,
    poly_eval_nc,
    stats,
    substitute,
)


@dataclass
class Budget:
    """Iteration guard rails; term growth is exponential for deg H >= 3."""

    max_k: int = 8
    max_terms: int = 10_000_000
    max_seconds: float | None = None


@dataclass
class IterateResult:
    k: int
    target: str
    value: NCElem
    laurent: bool
    witness: list | None
    stats: dict
    timings: dict = field(default_factory=dict)

    def to_json(self, include_timings: bool = False) -> dict:
        st = dict(self.stats)
        for key in ("coeff_min", "coeff_max"):
            if st.get(key) is not None:
                st[key] = str(Fraction(st[key]))
        out = {
            "H": self.value.ring.h.coeff_strings(),
            "k": self.k,
            "target": self.target,
            "laurent": self.laurent,
            "witness": self.witness,
            "stats": st,
            "terms": element_terms_json(self.value),
        }
        if include_timings:
            out["timings"] = self.timings
        return out


def _h_image_terms(ring: NCRing, outer_side: int, inner_side: int) -> dict:
    """Terms of (outer^-1) * H(inner): the image of the inner generator."""
    h = ring.h
    out = {}
    lead = atom_pure(outer_side, -1)
    for i, c in enumerate(h.coeffs):
        if not c:
            continue
        word = (lead,) if i == 0 else (lead, atom_pure(inner_side, i))
        out[word] = c
    return out


def sigma_spec(h: HSpec, ring: NCRing | None = None) -> EndoSpec:
    """Forward automorphism: x -> y^-1 H(x), y -> y^-1 x y.

    The image of x^-1 is H(x)^-1 y, carried by a denominator block on
    the x side; the inverse-pair laws are checked by EndoSpec itself.
    """
    if h.n < 1:
        raise InvalidH("degree must be at least 1")
    ring = ring or NCRing(h)
    x_img = NCElem(ring, _h_image_terms(ring, outer_side=1, inner_side=0))
    x_inv = NCElem(ring, {(atom_frac(0, 1, 0, ring.n), atom_pure(1, 1)): 1})
    y_img = NCElem(ring, {(atom_pure(1, -1), atom_pure(0, 1), atom_pure(1, 1)): 1})
    y_inv = NCElem(ring, {(atom_pure(1, -1), atom_pure(0, -1), atom_pure(1, 1)): 1})
    return EndoSpec(ring, x_img, x_inv, y_img, y_inv)


def tau_spec(h: HSpec, ring: NCRing | None = None) -> EndoSpec:
    """Inverse automorphism: x -> x^-1 y x, y -> x^-1 H(y).

    Mirror image of sigma_spec under swapping the generators; uses the
    y-side denominator blocks, so the two directions never mix block
    types in one element.
    """
    if h.n < 1:
        raise InvalidH("degree must be at least 1")
    ring = ring or NCRing(h)
    x_img = NCElem(ring, {(atom_pure(0, -1), atom_pure(1, 1), atom_pure(0, 1)): 1})
    x_inv = NCElem(ring, {(atom_pure(0, -1), atom_pure(1, -1), atom_pure(0, 1)): 1})
    y_img = NCElem(ring, _h_image_terms(ring, outer_side=0, inner_side=1))
    y_inv = NCElem(ring, {(atom_frac(1, 1, 0, ring.n), atom_pure(0, 1)): 1})
    return EndoSpec(ring, x_img, x_inv, y_img, y_inv)


class Engine:
    """Caches iterate chains for one H in both directions."""

    def __init__(self, h, budget: Budget | None = None):
        if not isinstance(h, HSpec):
            h = validate_h(h, allow_nonreversible=True)
        self.h = h
        self.budget = budget or Budget()
        self.ring = NCRing(h)
        self.sigma = sigma_spec(h, self.ring)
        self.tau = tau_spec(h, self.ring)
        x0 = embed_word(self.ring, [("x", 1)])
        y0 = embed_word(self.ring, [("y", 1)])
        # chains[direction][target][j] = map^j(target), j >= 0
        self._chains = {
            +1: {"x": [x0], "y": [y0]},
            -1: {"x": [x0], "y": [y0]},
        }
        self._timings = {+1: {"x": {}, "y": {}}, -1: {"x": {}, "y": {}}}

    def _extend(self, direction: int, target: str, upto: int, deadline):
        chain = self._chains[direction][target]
        endo = self.sigma if direction > 0 else self.tau
        while len(chain) <= upto:
            j = len(chain)
            t0 = time.monotonic()
            nxt = substitute(chain[-1], endo, budget_terms=self.budget.max_terms)
            self._timings[direction][target][j] = time.monotonic() - t0
            if not is_laurent(nxt):
                k = direction * j
                raise NotLaurent(
                    f"iterate k={k} target={target} is not Laurent; this "
                    "contradicts the certified Laurent property and signals an engine bug",
                    bundle={
                        "H": self.h.coeff_strings(),
                        "k": k,
                        "target": target,
                        "witness": non_laurent_witness(nxt),
                    },
                )
            chain.append(nxt)
            if deadline is not None and time.monotonic() > deadline:
                raise BudgetExceeded(
                    f"wall clock budget exhausted at k={direction * j}")

    def value(self, k: int, target: str) -> NCElem:
        """map^k(target) as an element, computing and caching as needed."""
        if target not in ("x", "y"):
            raise ValueError("target must be 'x' or 'y'")
        if abs(k) > self.budget.max_k:
            raise BudgetExceeded(f"|k|={abs(k)} exceeds max_k={self.budget.max_k}")
        direction = 1 if k >= 0 else -1
        deadline = (time.monotonic() + self.budget.max_seconds
                    if self.budget.max_seconds is not None else None)
        self._extend(direction, target, abs(k), deadline)
        return self._chains[direction][target][abs(k)]

    def iterate(self, k: int, target: str) -> IterateResult:
        value = self.value(k, target)
        direction = 1 if k >= 0 else -1
        timings = {str(j): round(t, 6)
                   for j, t in self._timings[direction][target].items()
                   if j <= abs(k)}
        return IterateResult(
            k=k,
            target=target,
            value=value,
            laurent=is_laurent(value),
            witness=None,
            stats=stats(value),
            timings=timings,
        )

    def release(self, k: int, target: str) -> None:
        """Drop cached iterates beyond |k| to cap memory on heavy runs."""
        direction = 1 if k >= 0 else -1
        chain = self._chains[direction][target]
        del chain[abs(k) + 1:]

    # -- invariant checks --------------------------------------------

    def check_commutator(self) -> bool:
        """q = x^-1 y^-1 x y is fixed by both directions, exactly."""
        q = embed_word(self.ring, [("x", -1), ("y", -1), ("x", 1), ("y", 1)])
        return substitute(q, self.sigma) == q and substitute(q, self.tau) == q

    def check_inverse(self) -> bool:
        """Both compositions fix both generators."""
        for letter in ("x", "y"):
            g = embed_word(self.ring, [(letter, 1)])
            if substitute(substitute(g, self.tau), self.sigma) != g:
                return False
            if substitute(substitute(g, self.sigma), self.tau) != g:
                return False
        return True

    def recurrence_check(self, k: int) -> bool:
        """Multiplication-only cross-check w_k * z_{k+1} = H(z_k).

        Follows from y * sigma(x) = H(x) applied under sigma^k; it never
        divides, so it is independent of the division heuristics.
        """
        z_k = self.value(k, "x")
        z_k1 = self.value(k + 1, "x")
        w_k = self.value(k, "y")
        return w_k * z_k1 == poly_eval_nc(self.h, z_k)

    def positivity_report(self, k_range) -> dict:
        """Coefficient positivity per k; assertion-grade only for 1 + x^2."""
        per_k = {}
        for k in k_range:
            entry = {}
            for target in ("x", "y"):
                st = stats(self.value(k, target))
                entry[target] = {
                    "term_count": st["term_count"],
                    "all_positive": st["all_positive"],
                    "coeff_min": None if st["coeff_min"] is None else str(Fraction(st["coeff_min"])),
                    "coeff_max": None if st["coeff_max"] is None else str(Fraction(st["coeff_max"])),
                }
            per_k[str(k)] = entry
        return {
            "H": self.h.coeff_strings(),
            "assertion_grade": self.h.coeffs == (1, 0, 1),
            "per_k": per_k,
        }


_ENGINES: dict = {}


def get_engine(h, budget: Budget | None = None) -> Engine:
    """Shared per-H engine so repeated CLI/test calls reuse iterates."""
    if not isinstance(h, HSpec):
        h = validate_h(h, allow_nonreversible=True)
    key = h.coeffs
    eng = _ENGINES.get(key)
    if eng is None or budget is not None:
        eng = Engine(h, budget)
        _ENGINES[key] = eng
    return eng


def iterate(h, k: int, target: str, budget: Budget | None = None) -> IterateResult:
    return get_engine(h, budget).iterate(k, target)


def check_commutator(h) -> bool:
    return get_engine(h).check_commutator()


def check_inverse(h) -> bool:
    return get_engine(h).check_inverse()


def recurrence_check(h, k: int) -> bool:
    return get_engine(h).recurrence_check(k)


def positivity_report(h, k_range) -> dict:
    return get_engine(h).positivity_report(k_range)

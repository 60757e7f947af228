"""Exact noncommutative Laurent phenomenon engine.

Iterates the Kontsevich automorphism (x, y) -> (y^-1 H(x), y^-1 x y) of the
free x,y-algebra for any integer power and any reversible polynomial H,
certifies that every iterate is a noncommutative Laurent polynomial, and
cross-validates the result against independent oracles: the commutative
Laurent recurrence, bounded left division, toric divisor arithmetic, and
randomized matrix evaluation over a prime field.
"""

from nclaurent.blockring import HSpec, validate_h, has_distinct_roots
from nclaurent.freealg import NCElem, NCRing, EndoSpec, embed_word
from nclaurent.kontsevich import Engine, IterateResult, iterate, sigma_spec, tau_spec

__version__ = "0.1.0"

__all__ = [
    "HSpec",
    "validate_h",
    "has_distinct_roots",
    "NCElem",
    "NCRing",
    "EndoSpec",
    "embed_word",
    "Engine",
    "IterateResult",
    "iterate",
    "sigma_spec",
    "tau_spec",
    "__version__",
]

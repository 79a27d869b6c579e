"""Exact-precision toolkit for the local p-adic Simpson correspondence.

Arithmetic lives in W(n, e) = Z_p[zeta_{p^n}] / p^e with guard digits; every
check compares results modulo p^(e - g).
"""

from .errors import (FractionalPowerUnsupported, InvalidInput, NonCommuting, NotDivisible, NotSmall,
                     PrecisionExhausted, SimpsonLabError)
from .ring import CyclotomicParams, CyclotomicRing, RingElt, get_ring, ring_for

__version__ = "0.1.0"

__all__ = [
    "CyclotomicParams", "CyclotomicRing", "RingElt", "get_ring", "ring_for",
    "SimpsonLabError", "InvalidInput", "NotDivisible", "NotSmall", "PrecisionExhausted", "NonCommuting",
    "FractionalPowerUnsupported",
]

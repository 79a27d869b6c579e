"""Truncated divided-power polynomial algebras P_{<=D} = R[Y_1..Y_d]_pd.

Y^[m] Y^[n] = C(m+n, n) Y^[m+n], the Higgs derivation Theta = sum dY_i (x) e_i/xi
with d(Y^[J]) / dY_i = Y^[J - E_i], and the Gamma-action Y_j -> Y_j + n_j c with
c = rho_K (zeta_p - 1) expanded as (Y + c)^[n] = sum_k Y^[n-k] c^[k].
"""

from __future__ import annotations

import itertools
import math
from functools import lru_cache
from typing import Callable, Iterator, Sequence

import numpy as np

from .chart import GammaElement, LogDiffVector
from .errors import InvalidInput
from .ring import CyclotomicRing, RingElt, TwistTag


@lru_cache(maxsize=None)
def monomials(nvars: int, D: int) -> tuple[tuple[int, ...], ...]:
    """All exponent vectors with |J| <= D, ordered by degree then lexicographically."""
    out = []
    for deg in range(D + 1):
        for J in _compositions(deg, nvars):
            out.append(J)
    return tuple(out)


def _compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    if parts == 0:
        if total == 0:
            yield ()
        return
    for first in range(total, -1, -1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


@lru_cache(maxsize=None)
def monomial_index(nvars: int, D: int) -> dict:
    return {J: i for i, J in enumerate(monomials(nvars, D))}


def pd_binomial(J1: Sequence[int], J2: Sequence[int]) -> int:
    out = 1
    for a, b in zip(J1, J2):
        out *= math.comb(a + b, a)
    return out


class PdElement:
    """sum c_J Y^[J] with |J| <= D; sound is cleared once a product overflowed D."""

    __slots__ = ("nvars", "D", "terms", "sound", "zero")

    def __init__(self, nvars: int, D: int, terms: dict, zero, sound: bool = True):
        self.nvars = nvars
        self.D = D
        self.zero = zero
        self.terms = {J: c for J, c in terms.items() if not c.is_zero()}
        if any(sum(J) > D for J in self.terms):
            raise InvalidInput(f"term of degree > D = {D}")
        self.sound = sound

    # construction helpers
    @classmethod
    def const(cls, nvars: int, D: int, c) -> "PdElement":
        return cls(nvars, D, {(0,) * nvars: c}, c - c)

    @classmethod
    def monomial(cls, nvars: int, D: int, J: Sequence[int], c) -> "PdElement":
        return cls(nvars, D, {tuple(J): c}, c - c)

    def _check(self, other: "PdElement"):
        if other.nvars != self.nvars or other.D != self.D:
            raise InvalidInput("pd-elements over different presentations")

    def __add__(self, other: "PdElement") -> "PdElement":
        self._check(other)
        terms = dict(self.terms)
        for J, c in other.terms.items():
            terms[J] = terms[J] + c if J in terms else c
        return PdElement(self.nvars, self.D, terms, self.zero, self.sound and other.sound)

    def __neg__(self) -> "PdElement":
        return PdElement(self.nvars, self.D, {J: -c for J, c in self.terms.items()}, self.zero, self.sound)

    def __sub__(self, other: "PdElement") -> "PdElement":
        return self + (-other)

    def scale(self, s) -> "PdElement":
        return PdElement(self.nvars, self.D, {J: c * s for J, c in self.terms.items()}, self.zero, self.sound)

    def __mul__(self, other):
        if isinstance(other, PdElement):
            return pd_mul(self, other)
        return self.scale(other)

    def is_zero(self) -> bool:
        return not self.terms

    def eq_mod(self, other: "PdElement", k: int | None = None) -> bool:
        diff = self - other
        return all(c.eq_mod(self.zero, k) for c in diff.terms.values())

    def __eq__(self, other):
        if not isinstance(other, PdElement):
            return NotImplemented
        return self.eq_mod(other)

    __hash__ = None

    def degree(self) -> int:
        return max((sum(J) for J in self.terms), default=-1)

    def coeff(self, J: Sequence[int]):
        return self.terms.get(tuple(J), self.zero)

    def counit(self):
        """Evaluation at Y = 0."""
        return self.coeff((0,) * self.nvars)

    def truncate(self, D: int) -> "PdElement":
        return PdElement(self.nvars, D, {J: c for J, c in self.terms.items() if sum(J) <= D}, self.zero,
                         self.sound and D >= self.degree())

    def map_coeffs(self, f: Callable) -> "PdElement":
        return PdElement(self.nvars, self.D, {J: f(c) for J, c in self.terms.items()}, f(self.zero), self.sound)

    def to_json(self) -> dict:
        return {"D": self.D, "sound": self.sound,
                "terms": [{"J": list(J), "coeff": c.to_json()} for J, c in sorted(self.terms.items())]}

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        return " + ".join(f"{c!r}*Y^{list(J)}" for J, c in sorted(self.terms.items(), key=lambda t: (sum(t[0]), t[0])))


def pd_mul(f: PdElement, g: PdElement) -> PdElement:
    f._check(g)
    D = f.D
    terms: dict = {}
    sound = f.sound and g.sound
    for J1, c1 in f.terms.items():
        d1 = sum(J1)
        for J2, c2 in g.terms.items():
            prod = c1 * c2
            if prod.is_zero():
                continue
            if d1 + sum(J2) > D:
                sound = False
                continue
            J = tuple(a + b for a, b in zip(J1, J2))
            prod = prod * pd_binomial(J1, J2)
            terms[J] = terms[J] + prod if J in terms else prod
    return PdElement(f.nvars, D, terms, f.zero, sound)


def partial(f: PdElement, i: int) -> PdElement:
    """d/dY_i (0-based index), Y^[J] -> Y^[J - E_i]."""
    terms = {}
    for J, c in f.terms.items():
        if J[i]:
            J2 = J[:i] + (J[i] - 1,) + J[i + 1:]
            terms[J2] = c
    return PdElement(f.nvars, f.D, terms, f.zero, f.sound)


def theta_derivation(f: PdElement, r: int = 0) -> LogDiffVector:
    """Theta(f) = sum_i df/dY_i (x) e_i / xi in the reduced basis e_1..e_d (twist -1)."""
    zero = PdElement(f.nvars, f.D, {}, f.zero, f.sound)
    comps = [zero] + [partial(f, i) for i in range(f.nvars)]
    return LogDiffVector(comps, r, TwistTag(-1))


def _shift_coeffs(ring: CyclotomicRing, n: int, upto: int) -> list[RingElt]:
    """(n c)^[k] = n^k c^[k] for k = 0..upto."""
    return [ring.c_pd_power(k) * (n**k) for k in range(upto + 1)]


def gamma_act_pd(delta: GammaElement, f: PdElement, ring: CyclotomicRing) -> PdElement:
    """Apply Y_j -> Y_j + m_j c (gamma-form exponents m) and delta on the coefficients."""
    m = delta.gamma_form()
    if len(m) != f.nvars:
        raise InvalidInput("Gamma element and pd-algebra have different dimensions")
    shifts = [_shift_coeffs(ring, mj, f.D) if mj else None for mj in m]
    terms: dict = {}
    for J, c in f.terms.items():
        c = c.gamma(delta)
        ranges = [range(J[j] + 1) if shifts[j] is not None else range(1) for j in range(f.nvars)]
        for K in itertools.product(*ranges):
            s = None
            for j, k in enumerate(K):
                if k:
                    s = shifts[j][k] if s is None else s * shifts[j][k]
            val = c if s is None else c * s
            if val.is_zero():
                continue
            J2 = tuple(a - b for a, b in zip(J, K))
            terms[J2] = terms[J2] + val if J2 in terms else val
    return PdElement(f.nvars, f.D, terms, f.zero, f.sound)


# ------------------------------------------------------------------ matrices


def gamma_matrix(ring: CyclotomicRing, nvars: int, D: int, m: Sequence[int]):
    """Matrix of Y_j -> Y_j + m_j c on the monomial basis of P_{<=D} (columns = sources)."""
    from .linalg import Mat

    mons = monomials(nvars, D)
    idx = monomial_index(nvars, D)
    shifts = [_shift_coeffs(ring, mj, D) if mj else None for mj in m]
    a = ring.np.zeros(len(mons), len(mons))
    for col, J in enumerate(mons):
        ranges = [range(J[j] + 1) if shifts[j] is not None else range(1) for j in range(nvars)]
        for K in itertools.product(*ranges):
            s = ring.one
            for j, k in enumerate(K):
                if k:
                    s = s * shifts[j][k]
            J2 = tuple(x - y for x, y in zip(J, K))
            a[idx[J2], col] = (a[idx[J2], col] + np.array(s.coeffs, dtype=a.dtype)) % ring.q
    return Mat(ring, a)


def partial_matrix(ring: CyclotomicRing, nvars: int, D: int, i: int):
    """d/dY_i : P_{<=D} -> P_{<=D-1} as a matrix (columns = sources)."""
    from .linalg import Mat

    src = monomials(nvars, D)
    tgt = monomial_index(nvars, max(D - 1, 0)) if D >= 1 else {}
    a = ring.np.zeros(len(tgt) if D >= 1 else 0, len(src))
    for col, J in enumerate(src):
        if J[i]:
            J2 = J[:i] + (J[i] - 1,) + J[i + 1:]
            a[tgt[J2], col, 0] = 1
    return Mat(ring, a)


def higgs_complex_on_pd(ring: CyclotomicRing, d: int, D: int):
    """P_{<=D} -> P_{<=D-1} (x) Omega -> ... -> P_{<=D-d} (x) Lambda^d Omega."""
    from .cohomology import FreeComplex, subsets

    ranks = []
    diffs = []
    for q in range(d + 1):
        Dq = D - q
        ranks.append(len(monomials(d, Dq)) * math.comb(d, q) if Dq >= 0 else 0)
    for q in range(d):
        Dq = D - q
        src_sets, tgt_sets = subsets(d, q), subsets(d, q + 1)
        ns = len(monomials(d, Dq)) if Dq >= 0 else 0
        nt = len(monomials(d, Dq - 1)) if Dq - 1 >= 0 else 0
        a = ring.np.zeros(nt * len(tgt_sets), ns * len(src_sets))
        tindex = {I: k for k, I in enumerate(tgt_sets)}
        for si, I in enumerate(src_sets):
            for i in range(d):
                if i in I or Dq < 1:
                    continue
                Inew = tuple(sorted(I + (i,)))
                sign = -1 if sum(1 for j in I if j < i) % 2 else 1
                blk = partial_matrix(ring, d, Dq, i).a
                ti = tindex[Inew]
                a[ti * nt:(ti + 1) * nt, si * ns:(si + 1) * ns] = (sign * blk) % ring.q
        from .linalg import Mat

        diffs.append(Mat(ring, a))
    return FreeComplex(ring, ranks, diffs)


def poincare_defect(ring: CyclotomicRing, d: int, D: int, q: int | None = None):
    """Cohomology profile of the truncated Higgs complex of P_{<=D} over W(n,e)."""
    from .cohomology import cohomology_profile

    prof = cohomology_profile(higgs_complex_on_pd(ring, d, D))
    return prof if q is None else prof.degree(q)


def pd_algebra_element(ring_one, nvars: int, D: int, coeffs: dict) -> PdElement:
    zero = ring_one - ring_one
    return PdElement(nvars, D, {tuple(J): c for J, c in coeffs.items()}, zero)


def Y(nvars: int, D: int, i: int, one) -> PdElement:
    """The variable Y_{i+1} (0-based index i)."""
    J = [0] * nvars
    J[i] = 1
    return PdElement.monomial(nvars, D, J, one)

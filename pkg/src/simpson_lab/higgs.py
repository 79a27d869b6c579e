"""Higgs modules, Gamma-representations and the local correspondence between them.

With c = rho_K (zeta_p - 1) the correspondence sends commuting Higgs matrices
theta_i to gamma_i = exp(-c theta_i), and back through -log(gamma_i) / c.  Matrix
entries are RingElt (point chart) or SemistableElt (general chart); every series
is cut off only once its tail provably vanishes modulo p^e.

F(X) = (1 - exp(-(zeta_p - 1) X)) / ((zeta_p - 1) X)
     = sum_n (-1)^n (zeta_p - 1)^n / (n+1)! X^n,
so exp(-c theta) = 1 - c theta F(rho_K theta).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .chart import Chart, ChartParams, GammaElement, SemistableElt
from .errors import InvalidInput, NonCommuting, NotDivisible, NotSmall, PrecisionExhausted
from .ring import PRECISION_ZERO, CyclotomicRing, RingElt, TwistTag, digit_sum, vp_int

# ----------------------------------------------------------------- matrices

Matrix = list  # list of rows of ring-like entries


def one_like(x):
    if isinstance(x, RingElt):
        return x.ring.one
    if isinstance(x, SemistableElt):
        return x.chart.one()
    raise TypeError(f"unsupported entry type {type(x).__name__}")


def zero_like(x):
    return x - x


def mat_identity(n: int, sample) -> Matrix:
    one, zero = one_like(sample), zero_like(sample)
    return [[one if i == j else zero for j in range(n)] for i in range(n)]


def mat_zero(n: int, m: int, sample) -> Matrix:
    zero = zero_like(sample)
    return [[zero for _ in range(m)] for _ in range(n)]


def mat_add(A: Matrix, B: Matrix) -> Matrix:
    return [[a + b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def mat_sub(A: Matrix, B: Matrix) -> Matrix:
    return [[a - b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def mat_neg(A: Matrix) -> Matrix:
    return [[-a for a in r] for r in A]


def mat_scale(A: Matrix, s) -> Matrix:
    return [[a * s for a in r] for r in A]


def mat_mul(A: Matrix, B: Matrix) -> Matrix:
    n, k, m = len(A), len(B), len(B[0]) if B else 0
    out = []
    for i in range(n):
        row = []
        for j in range(m):
            acc = A[i][0] * B[0][j]
            for t in range(1, k):
                acc = acc + A[i][t] * B[t][j]
            row.append(acc)
        out.append(row)
    return out


def mat_vec(A: Matrix, v: Sequence) -> list:
    return [sum((A[i][t] * v[t] for t in range(1, len(v))), A[i][0] * v[0]) for i in range(len(A))]


def mat_transpose(A: Matrix) -> Matrix:
    return [list(r) for r in zip(*A)]


def mat_is_zero(A: Matrix, k: int | None = None) -> bool:
    return all(_entry_zero(a, k) for r in A for a in r)


def _entry_zero(a, k):
    if isinstance(a, RingElt):
        return a.eq_mod(0, k) if k is not None else a.is_zero()
    if k is None:
        return a.is_zero()
    return all(c.eq_mod(0, k) for c in a.coefficients())


def mat_eq_mod(A: Matrix, B: Matrix, k: int | None = None) -> bool:
    return len(A) == len(B) and mat_is_zero(mat_sub(A, B), k)


def mat_exact_div(A: Matrix, y: RingElt) -> Matrix:
    return [[a.exact_div(y) for a in r] for r in A]


def mat_kron(A: Matrix, B: Matrix) -> Matrix:
    return [[a * b for a in ra for b in rb] for ra in A for rb in B]


def mat_direct_sum(A: Matrix, B: Matrix) -> Matrix:
    sample = A[0][0] if A else B[0][0]
    n, m = len(A), len(B)
    out = mat_zero(n + m, n + m, sample)
    for i in range(n):
        for j in range(n):
            out[i][j] = A[i][j]
    for i in range(m):
        for j in range(m):
            out[n + i][n + j] = B[i][j]
    return out


def mat_floor(A: Matrix) -> int:
    fl = []
    for r in A:
        for a in r:
            if isinstance(a, RingElt):
                fl.append(a.floor)
            else:
                fl.extend(c.floor for c in a.coefficients())
    return min(fl) if fl else 10**9


def entry_coefficients(a) -> list[RingElt]:
    return [a] if isinstance(a, RingElt) else a.coefficients()


def _ring_of(sample) -> CyclotomicRing:
    return sample.ring if isinstance(sample, RingElt) else sample.chart.ring


def commute(mats: Sequence[Matrix]) -> bool:
    for A, B in itertools.combinations(mats, 2):
        if not mat_eq_mod(mat_mul(A, B), mat_mul(B, A)):
            return False
    return True


# ------------------------------------------------------------------ series


def _max_power_terms(ring: CyclotomicRing) -> int:
    return ring.N * 8 + 16


def power_series(X: Matrix, coeff, nmax: int | None, ring: CyclotomicRing) -> Matrix:
    """sum_{n >= 0} coeff(n) X^n.

    Summation stops at nmax (beyond which coeff(n) vanishes mod p^e) or as soon
    as X^n vanishes; without a scalar bound, failure of X^n to vanish raises.
    """
    n = len(X)
    sample = X[0][0]
    total = mat_identity(n, sample)
    c0 = coeff(0)
    total = mat_scale(total, c0)
    power = mat_identity(n, sample)
    cap = nmax if nmax is not None else _max_power_terms(ring)
    for k in range(1, cap + 1):
        power = mat_mul(power, X)
        if mat_is_zero(power):
            return total
        total = mat_add(total, mat_scale(power, coeff(k)))
    if nmax is None:
        raise PrecisionExhausted("series in a matrix that is not topologically nilpotent")
    return total


def exp_cutoff(ring: CyclotomicRing) -> int:
    """Largest n with val(c^[n]) < e; val(c^[n]) = (n + s_p(n)) / (p - 1)."""
    p, e = ring.p, ring.e
    n = 0
    last = 0
    while n < e * (p - 1) + 2:
        n += 1
        if Fraction(n + digit_sum(n, p), p - 1) < e:
            last = n
    return last


def log_cutoff(ring: CyclotomicRing) -> int:
    """Largest n with val(c^(n-1) / n) = 2(n-1)/(p-1) - v_p(n) below e."""
    p, e = ring.p, ring.e
    last = 1
    bound = (e + 2) * (p - 1) * 4 + 8
    for n in range(1, bound):
        if Fraction(2 * (n - 1), p - 1) - vp_int(n, p) < e:
            last = n
    return last


def exp_c(theta: Matrix) -> Matrix:
    """exp(-c theta) = sum (-1)^n c^[n] theta^n."""
    ring = _ring_of(theta[0][0])
    return power_series(theta, lambda n: ring.c_pd_power(n) * (-1) ** n, exp_cutoff(ring), ring)


def F_matrix(theta: Matrix, scale: RingElt | None = None) -> Matrix:
    """F(scale * theta), summed until (scale * theta)^n vanishes."""
    ring = _ring_of(theta[0][0])
    X = theta if scale is None else mat_scale(theta, scale)
    return power_series(X, lambda n: ring.f_coefficient(n) * (-1) ** n, None, ring)


def log_c(A: Matrix) -> Matrix:
    """theta with exp(-c theta) = A, i.e. -log(A) / c; requires A == 1 mod c."""
    sample = A[0][0]
    ring = _ring_of(sample)
    c = ring.c()
    n = len(A)
    try:
        B = mat_exact_div(mat_sub(A, mat_identity(n, sample)), c)
    except NotDivisible as exc:
        raise NotSmall(f"action is not congruent to the identity modulo rho_K(zeta_p - 1): {exc}") from exc
    # -log(1 + cB)/c = sum_{n>=1} (-1)^n c^(n-1)/n B^n
    def coeff(k):
        if k == 0:
            return ring.zero
        return ring.exact_constant(ring.c_exact, k - 1, k) * (-1) ** k

    return power_series(B, coeff, log_cutoff(ring), ring)


# ------------------------------------------------------------ characteristic polynomial


class SymPoly:
    """Polynomial in symbols s_1..s_d with ring-like coefficients (for symbol char-polys)."""

    __slots__ = ("terms", "nsym", "zero")

    def __init__(self, terms: dict, nsym: int, zero):
        self.terms = {m: c for m, c in terms.items() if not _entry_zero(c, None)}
        self.nsym = nsym
        self.zero = zero

    def __add__(self, other):
        t = dict(self.terms)
        for m, c in other.terms.items():
            t[m] = t[m] + c if m in t else c
        return SymPoly(t, self.nsym, self.zero)

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return SymPoly({m: -c for m, c in self.terms.items()}, self.nsym, self.zero)

    def __mul__(self, other):
        if isinstance(other, int):
            return SymPoly({m: c * other for m, c in self.terms.items()}, self.nsym, self.zero)
        t: dict = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = tuple(a + b for a, b in zip(m1, m2))
                v = c1 * c2
                t[m] = t[m] + v if m in t else v
        return SymPoly(t, self.nsym, self.zero)


def _perm_sign(perm: Sequence[int]) -> int:
    sign = 1
    perm = list(perm)
    for i in range(len(perm)):
        while perm[i] != i:
            j = perm[i]
            perm[i], perm[j] = perm[j], perm[i]
            sign = -sign
    return sign


def determinant(A: Matrix, zero, one):
    n = len(A)
    if n == 0:
        return one
    total = zero
    for perm in itertools.permutations(range(n)):
        term = one
        for i, j in enumerate(perm):
            term = term * A[i][j]
        total = total + term if _perm_sign(perm) > 0 else total - term
    return total


def elementary_coefficients(A: Matrix, zero, one) -> list:
    """[e_1, ..., e_n]: e_k is the sum of principal k-minors, so det(t - A) = sum (-1)^k e_k t^(n-k)."""
    n = len(A)
    out = []
    for k in range(1, n + 1):
        acc = zero
        for S in itertools.combinations(range(n), k):
            acc = acc + determinant([[A[i][j] for j in S] for i in S], zero, one)
        out.append(acc)
    return out


# ------------------------------------------------------------------ types


@dataclass
class SmallnessCertificate:
    kind: str  # "twisted-small" or "small"
    charpoly_vals: list  # per theta_i: minimal valuation of each non-leading coefficient

    def to_json(self) -> dict:
        return {"kind": self.kind,
                "charpoly_vals": [[None if v is PRECISION_ZERO else str(v) for v in vs] for vs in self.charpoly_vals]}


@dataclass
class HiggsModule:
    chart: Chart
    rank: int
    theta: list  # d matrices
    twist: TwistTag = field(default_factory=lambda: TwistTag(-1))
    cert: SmallnessCertificate | None = None

    def __post_init__(self):
        if len(self.theta) != self.chart.d:
            raise InvalidInput(f"expected {self.chart.d} Higgs matrices, got {len(self.theta)}")
        for t in self.theta:
            if len(t) != self.rank or any(len(r) != self.rank for r in t):
                raise InvalidInput("Higgs matrix has the wrong size")
        if not commute(self.theta):
            raise NonCommuting("theta_i do not commute (theta wedge theta != 0)")

    @property
    def ring(self) -> CyclotomicRing:
        return self.chart.ring

    @property
    def d(self) -> int:
        return self.chart.d

    @property
    def point(self) -> bool:
        return isinstance(self.theta[0][0][0], RingElt) if self.rank else True

    def certified(self) -> "HiggsModule":
        if self.cert is None:
            self.cert = is_top_nilpotent(self.theta)
        return self

    def dual(self) -> "HiggsModule":
        return HiggsModule(self.chart, self.rank, [mat_neg(mat_transpose(t)) for t in self.theta], self.twist)

    def direct_sum(self, other: "HiggsModule") -> "HiggsModule":
        return HiggsModule(self.chart, self.rank + other.rank,
                           [mat_direct_sum(a, b) for a, b in zip(self.theta, other.theta)], self.twist)

    def tensor(self, other: "HiggsModule") -> "HiggsModule":
        Ia = mat_identity(self.rank, self.theta[0][0][0])
        Ib = mat_identity(other.rank, other.theta[0][0][0])
        return HiggsModule(self.chart, self.rank * other.rank,
                           [mat_add(mat_kron(a, Ib), mat_kron(Ia, b)) for a, b in zip(self.theta, other.theta)],
                           self.twist)


@dataclass
class GammaRep:
    chart: Chart
    rank: int
    A: list  # d matrices, action of gamma_1..gamma_d
    witness: list | None = None

    def __post_init__(self):
        if len(self.A) != self.chart.d:
            raise InvalidInput(f"expected {self.chart.d} action matrices, got {len(self.A)}")
        for t in self.A:
            if len(t) != self.rank or any(len(r) != self.rank for r in t):
                raise InvalidInput("action matrix has the wrong size")
        if not commute(self.A):
            raise NonCommuting("gamma-actions do not commute")

    @property
    def ring(self) -> CyclotomicRing:
        return self.chart.ring

    def action(self, delta: GammaElement) -> Matrix:
        """Matrix of a Gamma-element given in gamma-form exponents (negative powers allowed)."""
        sample = self.A[0][0][0]
        out = mat_identity(self.rank, sample)
        for Ai, m in zip(self.A, delta.gamma_form()):
            base = Ai if m >= 0 else mat_inverse(Ai)
            for _ in range(abs(m)):
                out = mat_mul(out, base)
        return out


def mat_inverse(A: Matrix) -> Matrix:
    """Inverse of a matrix with unit determinant (adjugate formula)."""
    n = len(A)
    sample = A[0][0]
    zero, one = zero_like(sample), one_like(sample)
    det = determinant(A, zero, one)
    if not isinstance(det, RingElt):
        consts = det.terms.get((0,) * (det.chart.d + 1))
        if len(det.terms) != 1 or consts is None:
            raise NotDivisible("determinant is not a constant unit")
        det = consts
    inv = det.inverse()
    out = []
    for i in range(n):
        row = []
        for j in range(n):
            minor = [[A[r][c] for c in range(n) if c != i] for r in range(n) if r != j]
            cof = determinant(minor, zero, one)
            row.append(cof * inv if (i + j) % 2 == 0 else -(cof * inv))
        out.append(row)
    return out


# ------------------------------------------------------------ operations


def is_top_nilpotent(thetas: Sequence[Matrix]) -> SmallnessCertificate:
    """Accept iff every non-leading char-poly coefficient of every theta_i has positive valuation."""
    if not commute(thetas):
        raise NonCommuting("Higgs matrices do not commute")
    vals = []
    for idx, t in enumerate(thetas):
        sample = t[0][0]
        coeffs = elementary_coefficients(t, zero_like(sample), one_like(sample))
        row = []
        for k, ck in enumerate(coeffs, start=1):
            v = _entry_min_val(ck)
            if v is not PRECISION_ZERO and v <= 0:
                raise NotSmall(f"REJECT: theta_{idx + 1} has characteristic coefficient c_{k} of valuation {v}")
            row.append(v)
        vals.append(row)
    return SmallnessCertificate("twisted-small", vals)


def _entry_min_val(x):
    if isinstance(x, RingElt):
        return x.val()
    return x.min_val()


def small_certificate(thetas: Sequence[Matrix]) -> SmallnessCertificate:
    """theta = (zeta_p - 1) theta' with theta' twisted-small."""
    ring = _ring_of(thetas[0][0][0])
    try:
        inner = [mat_exact_div(t, ring.rho_K()) for t in thetas]
    except NotDivisible as exc:
        raise NotSmall(f"REJECT: Higgs field not divisible by zeta_p - 1 ({exc})") from exc
    cert = is_top_nilpotent(inner)
    return SmallnessCertificate("small", cert.charpoly_vals)


def rep_from_higgs(H: HiggsModule) -> GammaRep:
    H.certified()
    if H.cert.kind != "twisted-small":
        raise NotSmall("rep_from_higgs expects a twisted-small Higgs module")
    A = [exp_c(t) for t in H.theta]
    return GammaRep(H.chart, H.rank, A, witness=[list(map(list, t)) for t in H.theta])


def higgs_from_rep(M: GammaRep, use_witness: bool = True) -> HiggsModule:
    ring = M.ring
    logs = [log_c(A) for A in M.A]
    if M.witness is not None and use_witness:
        k = ring.e - ring.g
        for w, lg in zip(M.witness, logs):
            if not mat_eq_mod(w, lg, k):
                raise InvalidInput("stored Higgs witness disagrees with the logarithm of the action")
        theta = M.witness
    else:
        theta = logs
    H = HiggsModule(M.chart, M.rank, theta)
    try:
        H.cert = is_top_nilpotent(theta)
    except NotSmall as exc:
        raise NotSmall(f"logarithm of the action is not topologically nilpotent: {exc}") from exc
    return H


def twist(H: HiggsModule, direction: str = "twist") -> HiggsModule:
    """Multiply (direction 'twist') or divide ('untwist') every theta_i by zeta_p - 1."""
    rho = H.ring.rho_K()
    if direction == "twist":
        theta = [mat_scale(t, rho) for t in H.theta]
    elif direction == "untwist":
        theta = [mat_exact_div(t, rho) for t in H.theta]
    else:
        raise InvalidInput(f"unknown twist direction {direction!r}")
    out = HiggsModule(H.chart, H.rank, theta, H.twist)
    try:
        out.cert = is_top_nilpotent(theta)
        try:
            out.cert = small_certificate(theta)
        except NotSmall:
            pass
    except NotSmall:
        out.cert = None
    return out


# ------------------------------------------------------------ Hitchin map


def hitchin(H: HiggsModule) -> list[dict]:
    """Characteristic coefficients e_k of sum_i s_i theta_i as polynomials in symbols s_i.

    Returns one dict per k = 1..rank mapping symbol monomials to coefficients.
    """
    d = H.d
    sample = H.theta[0][0][0]
    zero = zero_like(sample)
    one = one_like(sample)
    n = H.rank

    def sym(i, x):
        m = tuple(1 if j == i else 0 for j in range(d))
        return SymPoly({m: x}, d, zero)

    entries = []
    for a in range(n):
        row = []
        for b in range(n):
            acc = SymPoly({}, d, zero)
            for i in range(d):
                acc = acc + sym(i, H.theta[i][a][b])
            row.append(acc)
        entries.append(row)
    zs = SymPoly({}, d, zero)
    os_ = SymPoly({(0,) * d: one}, d, zero)
    coeffs = elementary_coefficients(entries, zs, os_)
    return [dict(c.terms) for c in coeffs]


def in_small_locus(H: HiggsModule) -> bool:
    """Every coefficient of e_k divisible by (zeta_p - 1)^k times the uniformizer."""
    ring = H.ring
    unit_step = ring.rho_K().vpi()
    for k, ck in enumerate(hitchin(H), start=1):
        need = k * unit_step + 1
        for coeff in ck.values():
            for x in entry_coefficients(coeff):
                v = x.vpi()
                if v is not None and v < need:
                    return False
    return True


# --------------------------------------------------------- decompletion check


def gamma_characters(params: ChartParams, alpha: Sequence[int], den: int) -> list[Fraction]:
    """beta_i with gamma_i acting on T^alpha by zeta^beta_i (alpha given as numerators over den)."""
    out = []
    for i in range(1, params.d + 1):
        num = alpha[i] - alpha[0] if i <= params.r else alpha[i]
        out.append(Fraction(num % den, den))
    return out


@dataclass
class DecompletionReport:
    alpha: tuple
    generator: int
    factorization_ok: bool
    unit_invertible: bool
    injective: bool
    cokernel_killed: bool
    profile_ok: bool

    @property
    def ok(self) -> bool:
        return all([self.factorization_ok, self.unit_invertible, self.injective, self.cokernel_killed,
                    self.profile_ok])


def decompletion_component_check(H: HiggsModule, alpha: Sequence[int], level: int = 1) -> DecompletionReport:
    """gamma_i - 1 on M . T^alpha equals (zeta^beta - 1) U with U a unit; cohomology killed by zeta_p - 1."""
    from .cohomology import cohomology_profile, koszul
    from .linalg import Mat, smith

    ring = H.ring
    if not H.point:
        raise InvalidInput("decompletion check runs on point charts")
    den = ring.p**level
    if level > ring.n:
        raise InvalidInput(f"level {level} exceeds the cyclotomic level")
    alpha = tuple(int(a) for a in alpha)
    betas = gamma_characters(H.chart.params, alpha, den)
    if all(b == 0 for b in betas):
        raise InvalidInput("alpha = 0 has no decompletion factor")
    i = next(k for k, b in enumerate(betas) if b != 0)
    M = rep_from_higgs(H)
    z = ring.zeta_alpha(betas[i])
    rho = ring.rho_K()
    zm1 = z - 1
    ratio = rho.exact_div(zm1)
    X = mat_scale(H.theta[i], rho)
    FX = F_matrix(X)
    n = H.rank
    I = mat_identity(n, z)
    U = mat_sub(I, mat_scale(mat_mul(X, FX), z * ratio))
    lhs = mat_scale(U, zm1)
    rhs = mat_sub(mat_scale(M.A[i], z), I)
    k = ring.e - ring.g
    factorization_ok = mat_eq_mod(lhs, rhs, k)
    Um = Mat.from_elts(ring, U)
    Us = smith(Um)
    unit_invertible = all(x == 0 for x in Us.exps)
    ops = [Mat.from_elts(ring, mat_sub(mat_scale(A, ring.zeta_alpha(b)), I)) for A, b in zip(M.A, betas)]
    s_i = smith(ops[i])
    target = zm1.vpi()
    injective = all(x == target for x in s_i.exps)
    try:
        rho.exact_div(zm1)
        cokernel_killed = all(x <= rho.vpi() for x in s_i.exps)
    except NotDivisible:
        cokernel_killed = False
    prof = cohomology_profile(koszul(ops))
    T = ring.phi * (ring.e - ring.g)
    profile_ok = prof.degree(0).is_zero() and all(
        prof.degree(q).killed_by(rho.vpi()) for q in range(len(prof.degrees)))
    return DecompletionReport(alpha, i + 1, factorization_ok, unit_invertible, injective, cokernel_killed,
                              profile_ok)

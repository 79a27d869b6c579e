"""The Faltings extension E+, divided-power sequences and the period algebra as a quotient.

E+ = R+_inf . e  (+)  (sum_i R+_inf . y_i) / (y_0 + ... + y_r), with delta acting by

    a e + sum b_j y_j  ->  (delta(a) + rho_K sum_j delta(b_j) n_j) e + sum_j delta(b_j) y_j.

For a split surjection v: F -> G with kernel E the divided powers fit in

    0 -> Gamma^m(E) -> Gamma^m(F) -> Gamma^(m-1)(F) (x) G -> ... -> Lambda^m(G) -> 0,
    d(f^[J] (x) w) = sum_k f^[J - E_k] (x) v(f_k) ^ w.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .chart import Chart, ChartParams, GammaElement, LogDiffVector, PerfElt, gamma_act, perf_indices, reduce_logdiff
from .cohomology import FreeComplex, cohomology_profile, spans_equal_rows, subsets, trusted_exponent
from .errors import InvalidInput
from .linalg import Mat, column_kernel, smith
from .pd import PdElement, gamma_act_pd, monomial_index, monomials, pd_mul, theta_derivation
from .ring import CyclotomicRing, RingElt, TwistTag

# ------------------------------------------------------------ Faltings extension


class FaltingsExtElt:
    """a e + sum_j b_j y_j with coefficients in the level-n extension, y_0 eliminated on reduction."""

    __slots__ = ("chart", "a", "b")

    def __init__(self, chart: Chart, a: PerfElt, b: Sequence[PerfElt]):
        if len(b) != chart.d + 1:
            raise InvalidInput(f"need d+1 = {chart.d + 1} coefficients of y_0..y_d")
        self.chart = chart
        self.a = a
        self.b = tuple(b)

    @classmethod
    def e(cls, chart: Chart, a: PerfElt | None = None) -> "FaltingsExtElt":
        zero = PerfElt(chart, {})
        return cls(chart, a if a is not None else PerfElt.embed(chart.one()), [zero] * (chart.d + 1))

    @classmethod
    def y(cls, chart: Chart, j: int, coeff: PerfElt | None = None) -> "FaltingsExtElt":
        zero = PerfElt(chart, {})
        c = coeff if coeff is not None else PerfElt.embed(chart.one())
        return cls(chart, zero, [c if k == j else zero for k in range(chart.d + 1)])

    def reduced(self) -> "FaltingsExtElt":
        b0 = self.b[0]
        b = [b0 - b0] + [bj - b0 if j <= self.chart.r else bj for j, bj in enumerate(self.b[1:], start=1)]
        return FaltingsExtElt(self.chart, self.a, b)

    def __add__(self, other: "FaltingsExtElt") -> "FaltingsExtElt":
        return FaltingsExtElt(self.chart, self.a + other.a, [x + y for x, y in zip(self.b, other.b)])

    def __sub__(self, other: "FaltingsExtElt") -> "FaltingsExtElt":
        return FaltingsExtElt(self.chart, self.a - other.a, [x - y for x, y in zip(self.b, other.b)])

    def scale(self, s) -> "FaltingsExtElt":
        return FaltingsExtElt(self.chart, self.a * s, [x * s for x in self.b])

    def eq_mod(self, other: "FaltingsExtElt", k: int | None = None) -> bool:
        x, y = self.reduced(), other.reduced()
        return x.a.eq_mod(y.a, k) and all(u.eq_mod(v, k) for u, v in zip(x.b, y.b))

    def to_json(self) -> dict:
        r = self.reduced()
        return {"e": r.a.to_json(), "y": [x.to_json() for x in r.b[1:]]}

    def __repr__(self) -> str:
        r = self.reduced()
        return f"FaltingsExtElt(e: {r.a!r}; y: {list(r.b[1:])!r})"


def ext_gamma_act(delta: GammaElement, x: FaltingsExtElt) -> FaltingsExtElt:
    rho = x.chart.ring.rho_K()
    db = [gamma_act(delta, bj) for bj in x.b]
    a = gamma_act(delta, x.a)
    for n, bj in zip(delta.exps, db):
        if n:
            a = a + bj * (rho * n)
    return FaltingsExtElt(x.chart, a, db)


def ext_inclusion(a: PerfElt) -> FaltingsExtElt:
    return FaltingsExtElt.e(a.chart, a)


def ext_projection(x: FaltingsExtElt) -> LogDiffVector:
    """pr(y_i) = e_i / xi: the y-coefficients as a log-differential of twist -1."""
    return reduce_logdiff(LogDiffVector(list(x.b), x.chart.r, TwistTag(-1)))


def logdiff_gamma(delta: GammaElement, v: LogDiffVector) -> LogDiffVector:
    return v.map(lambda c: gamma_act(delta, c))


def random_perf(chart: Chart, rng: random.Random, terms: int = 3, max_exp: int = 2) -> PerfElt:
    ring = chart.ring
    out = PerfElt(chart, {})
    idx = list(perf_indices(chart))
    for _ in range(terms):
        alpha = rng.choice(idx)
        J = [rng.randint(0, max_exp) for _ in range(chart.r + 1)]
        J += [rng.randint(-max_exp, max_exp) for _ in range(chart.d - chart.r)]
        c = ring.elt([rng.randrange(ring.q) for _ in range(ring.phi)])
        out = out + chart.perf(alpha, chart.monomial(J, c))
    return out


def random_ext(chart: Chart, rng: random.Random) -> FaltingsExtElt:
    return FaltingsExtElt(chart, random_perf(chart, rng), [random_perf(chart, rng) for _ in range(chart.d + 1)])


def random_gamma(params: ChartParams, rng: random.Random, bound: int = 3) -> GammaElement:
    return GammaElement.from_gamma(params, [rng.randint(-bound, bound) for _ in range(params.d)])


@dataclass
class ExtensionReport:
    group_law: bool
    inclusion_injective: bool
    projection_kills_inclusion: bool
    projection_of_y: bool
    exact_in_middle: bool
    equivariant: bool
    obstruction: list  # per generator: alpha = 0 residue of the splitting equation
    non_split: bool
    samples: int

    @property
    def ok(self) -> bool:
        return all([self.group_law, self.inclusion_injective, self.projection_kills_inclusion, self.projection_of_y,
                    self.exact_in_middle, self.equivariant, self.non_split])


def splitting_obstruction(chart: Chart) -> list[RingElt]:
    """Residue of gamma_j(s(e_j)) = s(e_j) for s(e_j) = y_j + lambda e, in the alpha = 0 component.

    gamma_j - 1 never reaches the alpha = 0 component (it acts there trivially and
    preserves components), so the equation reduces to 0 = rho_K n_j.
    """
    ring = chart.ring
    out = []
    zero_alpha = (0,) * (chart.d + 1)
    for j in range(1, chart.d + 1):
        g = chart.gamma_gen(j)
        # image of (gamma_j - 1) on every basis component T^alpha, read at alpha = 0
        reach = ring.zero
        for alpha in perf_indices(chart):
            t = chart.perf(alpha)
            img = gamma_act(g, t) - t
            comp = img.comps.get(zero_alpha)
            if comp is not None:
                reach = reach + comp.terms.get(zero_alpha, ring.zero)
        lhs = ext_gamma_act(g, FaltingsExtElt.y(chart, j)) - FaltingsExtElt.y(chart, j)
        need = lhs.reduced().a.comps.get(zero_alpha)
        need_c = need.terms.get(zero_alpha, ring.zero) if need is not None else ring.zero
        out.append(need_c if reach.is_zero() else ring.zero)
    return out


def ext_ses_check(chart: Chart, samples: int = 20, seed: int = 0) -> ExtensionReport:
    rng = random.Random(seed)
    params = chart.params
    guard = chart.ring.e - chart.ring.g
    law = inj = pri = exact = equi = True
    for _ in range(samples):
        x = random_ext(chart, rng)
        g1, g2 = random_gamma(params, rng), random_gamma(params, rng)
        law &= ext_gamma_act(g1 * g2, x).eq_mod(ext_gamma_act(g1, ext_gamma_act(g2, x)))
        law &= ext_gamma_act(GammaElement.identity(params), x).eq_mod(x)
        a = random_perf(chart, rng)
        ia = ext_inclusion(a)
        inj &= (ia.reduced().a.eq_mod(a)) and (a.is_zero() or not ia.eq_mod(ext_inclusion(PerfElt(chart, {}))))
        pri &= all(c.is_zero() for c in ext_projection(ia).coeffs)
        # kernel of pr is the image of i: x - i(a_x) has the same projection, and pr = 0 forces b = 0
        r = x.reduced()
        exact &= ext_projection(x).eq_mod(ext_projection(r))
        exact &= FaltingsExtElt(chart, r.a, [PerfElt(chart, {})] * (chart.d + 1)).eq_mod(ext_inclusion(r.a))
        if all(c.is_zero() for c in ext_projection(x).coeffs):
            exact &= all(b.is_zero() for b in r.b)
        equi &= ext_projection(ext_gamma_act(g1, x)).eq_mod(logdiff_gamma(g1, ext_projection(x)))
        equi &= ext_gamma_act(g1, ia).eq_mod(ext_inclusion(gamma_act(g1, a)))
    proj_y = True
    for i in range(1, chart.d + 1):
        v = ext_projection(FaltingsExtElt.y(chart, i))
        target = reduce_logdiff(LogDiffVector([PerfElt.embed(chart.one()) if k == i else PerfElt(chart, {})
                                               for k in range(chart.d + 1)], chart.r, TwistTag(-1)))
        proj_y &= v.eq_mod(target)
    obs = splitting_obstruction(chart)
    non_split = all(not o.eq_mod(0, guard) for o in obs)
    return ExtensionReport(law, inj, pri, proj_y, exact, equi, obs, non_split, samples)


# ------------------------------------------------------------ divided powers


@dataclass
class DividedPowerModule:
    """Basis of Gamma^(m-i)(F) (x) Lambda^i(G): pairs (J, I) with |J| = m - i, I a sorted i-subset."""

    rank_f: int
    rank_g: int
    m: int
    i: int

    @property
    def basis(self) -> list[tuple[tuple[int, ...], tuple[int, ...]]]:
        Js = [J for J in monomials(self.rank_f, self.m - self.i) if sum(J) == self.m - self.i]
        return [(J, I) for J in Js for I in subsets(self.rank_g, self.i)]

    @property
    def dim(self) -> int:
        return math.comb(self.rank_f + self.m - self.i - 1, self.m - self.i) * math.comb(self.rank_g, self.i)


def _wedge_sign(l: int, I: tuple[int, ...]) -> tuple[int, tuple[int, ...]] | None:
    if l in I:
        return None
    return (-1 if sum(1 for j in I if j < l) % 2 else 1), tuple(sorted(I + (l,)))


def sz_differential(ring: CyclotomicRing, v: Mat, m: int, i: int) -> Mat:
    """Gamma^(m-i)(F) (x) Lambda^i(G) -> Gamma^(m-i-1)(F) (x) Lambda^(i+1)(G) (columns = sources)."""
    g, f = v.shape
    if not 0 <= i < m:
        raise InvalidInput(f"degree mismatch: need 0 <= i < m, got i={i}, m={m}")
    src = DividedPowerModule(f, g, m, i).basis
    tgt = DividedPowerModule(f, g, m, i + 1).basis
    tindex = {b: k for k, b in enumerate(tgt)}
    out = ring.np.zeros(len(tgt), len(src))
    V = v.a
    for col, (J, I) in enumerate(src):
        for k in range(f):
            if not J[k]:
                continue
            J2 = J[:k] + (J[k] - 1,) + J[k + 1:]
            for l in range(g):
                w = _wedge_sign(l, I)
                if w is None:
                    continue
                sign, I2 = w
                row = tindex[(J2, I2)]
                out[row, col] = (out[row, col] + sign * V[l, k]) % ring.q
    return Mat(ring, out, v.floor)


def gamma_power_map(ring: CyclotomicRing, U: Mat, m: int) -> Mat:
    """Gamma^m(u): Gamma^m(E) -> Gamma^m(F) for u: E -> F with matrix U (f x e)."""
    f, e = U.shape
    src = [J for J in monomials(e, m) if sum(J) == m]
    tgt = [J for J in monomials(f, m) if sum(J) == m]
    tindex = {J: k for k, J in enumerate(tgt)}
    out = ring.np.zeros(len(tgt), len(src))
    cols = [[U.entry(k, t) for k in range(f)] for t in range(e)]
    for ci, A in enumerate(src):
        prod = PdElement.const(f, m, ring.one)
        for t in range(e):
            if A[t]:
                prod = pd_mul(prod, linear_pd_power(ring, cols[t], A[t], m))
        for J, c in prod.terms.items():
            if sum(J) == m:
                out[tindex[J], ci] = c.coeffs
    return Mat(ring, out)


def linear_pd_power(ring: CyclotomicRing, c: Sequence[RingElt], a: int, D: int) -> PdElement:
    """(sum_k c_k f_k)^[a] = sum_{|K| = a} c^K f^[K]."""
    n = len(c)
    terms = {}
    for K in monomials(n, a):
        if sum(K) != a:
            continue
        coeff = ring.one
        for ck, kk in zip(c, K):
            if kk:
                coeff = coeff * ck**kk
        terms[K] = coeff
    return PdElement(n, D, terms, ring.zero)


def random_split_surjection(ring: CyclotomicRing, f: int, g: int, rng: random.Random) -> tuple[Mat, Mat]:
    """(v, U): v = [I | R] Q^-1 of shape g x f and U = Q [-R; I] spanning its kernel."""
    if not 0 <= g <= f:
        raise InvalidInput(f"need 0 <= rank(G) <= rank(F), got {g}, {f}")

    def rnd():
        return ring.elt([rng.randrange(ring.q) for _ in range(ring.phi)])

    Lo = [[ring.one if i == j else (rnd() if i > j else ring.zero) for j in range(f)] for i in range(f)]
    Up = [[ring.one if i == j else (rnd() if i < j else ring.zero) for j in range(f)] for i in range(f)]
    Q = Mat.from_elts(ring, Lo, f) @ Mat.from_elts(ring, Up, f) if f else Mat.zeros(ring, 0, 0)
    Qinv = _unitriangular_inverse(ring, Up, upper=True) @ _unitriangular_inverse(ring, Lo, upper=False) if f else Q
    R = [[rnd() for _ in range(f - g)] for _ in range(g)]
    left = [[ring.one if i == j else ring.zero for j in range(g)] + R[i] for i in range(g)]
    v = Mat.from_elts(ring, left, f) @ Qinv if g else Mat.zeros(ring, 0, f)
    ker = [[-R[i][j] for j in range(f - g)] for i in range(g)]
    ker += [[ring.one if i == j else ring.zero for j in range(f - g)] for i in range(f - g)]
    U = Q @ Mat.from_elts(ring, ker, f - g) if f - g else Mat.zeros(ring, f, 0)
    return v, U


def _unitriangular_inverse(ring: CyclotomicRing, A: list, upper: bool) -> Mat:
    n = len(A)
    X = [[ring.zero] * n for _ in range(n)]
    order = range(n - 1, -1, -1) if upper else range(n)
    for col in range(n):
        for i in order:
            acc = ring.one if i == col else ring.zero
            js = range(i + 1, n) if upper else range(i)
            for j in js:
                acc = acc - A[i][j] * X[j][col]
            X[i][col] = acc
    return Mat.from_elts(ring, X, n)


def sz_complex(ring: CyclotomicRing, v: Mat, U: Mat, m: int) -> FreeComplex:
    """0 -> Gamma^m(E) -> Gamma^m(F) -> ... -> Lambda^m(G) -> 0 as a complex starting at Gamma^m(E)."""
    g, f = v.shape
    e = U.shape[1]
    ranks = [math.comb(e + m - 1, m) if e else (1 if m == 0 else 0)]
    ranks += [DividedPowerModule(f, g, m, i).dim for i in range(m + 1)]
    diffs = [gamma_power_map(ring, U, m) if ranks[0] else Mat.zeros(ring, ranks[1], 0)]
    diffs += [sz_differential(ring, v, m, i) for i in range(m)]
    return FreeComplex(ring, ranks, diffs)


@dataclass
class SZReport:
    m: int
    rank_f: int
    rank_g: int
    square_zero: bool
    exact: bool
    profile: object

    @property
    def ok(self) -> bool:
        return self.square_zero and self.exact


def sz_exactness_check(ring: CyclotomicRing, m: int, rank_f: int, rank_g: int, seed: int = 0) -> SZReport:
    if not 1 <= m <= 3 or not 1 <= rank_f <= 3:
        raise InvalidInput("SZ check supports 1 <= m <= 3 and 1 <= rank(F) <= 3")
    v, U = random_split_surjection(ring, rank_f, rank_g, random.Random(seed))
    if not (v @ U).is_zero(ring.e):
        raise InvalidInput("random surjection does not kill its kernel")
    C = sz_complex(ring, v, U, m)
    prof = cohomology_profile(C)
    exact = all(dp.free == 0 and not dp.torsion for dp in prof.degrees)
    return SZReport(m, rank_f, rank_g, C.square_zero(), exact, prof)


# ------------------------------------------------------------ period algebra


@dataclass
class PeriodAlgebraReport:
    d: int
    D: int
    e_image_ok: bool  # e maps to zeta_p - 1
    dims_ok: bool  # dim Gamma(E+)_{<=D} - dim kernel == dim P_{<=D}
    kernel_ok: bool  # kernel spanned by y^[J] (e^[k] - (zeta_p - 1)^[k]), pd-ideal generators vanish
    ring_hom: bool
    theta_transport: bool
    gamma_transport: bool

    @property
    def ok(self) -> bool:
        return all([self.e_image_ok, self.dims_ok, self.kernel_ok, self.ring_hom, self.theta_transport,
                    self.gamma_transport])


def project_to_period(ring: CyclotomicRing, x: PdElement) -> PdElement:
    """e^[k] y^[J] -> (zeta_p - 1)^[k] Y^[J]; variable 0 of x is e."""
    d = x.nvars - 1
    terms: dict = {}
    for K, c in x.terms.items():
        J = K[1:]
        val = c * ring.pd_power_zeta(K[0], exact=True)
        terms[J] = terms[J] + val if J in terms else val
    return PdElement(d, x.D, terms, ring.zero, x.sound)


def ext_gamma_on_pd(ring: CyclotomicRing, delta: GammaElement, x: PdElement) -> PdElement:
    """Gamma acting on Gamma(E+): e fixed, y_j -> y_j + rho_K n_j e."""
    d = x.nvars - 1
    rho = ring.rho_K()
    n = delta.gamma_form()
    out = PdElement(x.nvars, x.D, {}, ring.zero)
    for K, c in x.terms.items():
        prod = PdElement.monomial(x.nvars, x.D, (K[0],) + (0,) * d, c)
        for j in range(d):
            if not K[j + 1]:
                continue
            mj = K[j + 1]
            terms = {}
            for l in range(mj + 1):
                E = [0] * x.nvars
                E[0] = l
                E[j + 1] = mj - l
                coeff = (rho * n[j]) ** l if l else ring.one
                terms[tuple(E)] = coeff
            prod = pd_mul(prod, PdElement(x.nvars, x.D, terms, ring.zero))
        out = out + prod
    return out


def derive_period_algebra(ring: CyclotomicRing, d: int = 1, D: int = 3, r: int = 0, samples: int = 10,
                          seed: int = 0) -> PeriodAlgebraReport:
    params = ChartParams(d=d, r=r)
    rng = random.Random(seed)
    src = monomials(d + 1, D)
    tgt_index = monomial_index(d, D)
    zp = ring.rho_K()
    # matrix of the projection
    proj = ring.np.zeros(len(tgt_index), len(src))
    for col, K in enumerate(src):
        proj[tgt_index[K[1:]], col] = ring.pd_power_zeta(K[0], exact=True).coeffs
    P = Mat(ring, proj)
    e_elt = PdElement.monomial(d + 1, D, (1,) + (0,) * d, ring.one)
    e_image_ok = project_to_period(ring, e_elt).eq_mod(PdElement.const(d, D, zp))
    S = smith(P)
    rank = sum(1 for k in S.exps if k < trusted_exponent(ring))
    # kernel generators y^[J] (e^[k] - (zeta_p - 1)^[k]) and the pd-ideal generators (e - (zeta_p - 1))^[k] y^[J]
    gens = []
    ideal_ok = True
    for K in src:
        if K[0] == 0:
            continue
        row = ring.np.zeros(len(src))
        idx = monomial_index(d + 1, D)
        row[idx[K]] = ring.one.coeffs
        base = (0,) + K[1:]
        row[idx[base]] = (-ring.pd_power_zeta(K[0], exact=True)).coeffs
        gens.append(row)
        # (e - z)^[k] = sum_l e^[l] (-z)^[k-l]
        k = K[0]
        terms = {}
        for l in range(k + 1):
            E = (l,) + K[1:]
            terms[E] = ring.pd_power_zeta(k - l, exact=True) * (-1) ** (k - l)
        ideal_ok &= project_to_period(ring, PdElement(d + 1, D, terms, ring.zero)).is_zero()
    dims_ok = rank == len(tgt_index) and len(gens) == len(src) - rank
    ker = column_kernel(P)
    T = trusted_exponent(ring)
    a, b = spans_equal_rows(ring, np.stack(gens) if gens else ring.np.zeros(0, len(src)), ker, T)
    kernel_ok = a and b and ideal_ok
    hom = theta = gam = True
    for _ in range(samples):
        x = _random_pd(ring, d + 1, D, D // 2, rng)
        y = _random_pd(ring, d + 1, D, D - D // 2, rng)
        xy = pd_mul(x, y)
        hom &= project_to_period(ring, xy).eq_mod(pd_mul(project_to_period(ring, x), project_to_period(ring, y)))
        # d(e^[k] y^[J]) = sum_i e^[k] y^[J - E_i] (x) e_i
        for i in range(d):
            dx = _partial(x, i + 1)
            theta &= project_to_period(ring, dx).eq_mod(theta_derivation(project_to_period(ring, x)).coeffs[i + 1])
        g = random_gamma(params, rng)
        gam &= project_to_period(ring, ext_gamma_on_pd(ring, g, x)).eq_mod(
            gamma_act_pd(g, project_to_period(ring, x), ring))
    return PeriodAlgebraReport(d, D, bool(e_image_ok), bool(dims_ok), bool(kernel_ok), bool(hom), bool(theta),
                               bool(gam))


def _partial(x: PdElement, i: int) -> PdElement:
    from .pd import partial

    return partial(x, i)


def _random_pd(ring: CyclotomicRing, nvars: int, D: int, deg: int, rng: random.Random) -> PdElement:
    terms = {}
    for J in monomials(nvars, deg):
        if rng.random() < 0.5:
            terms[J] = ring.elt([rng.randrange(ring.q) for _ in range(ring.phi)])
    return PdElement(nvars, D, terms, ring.zero)

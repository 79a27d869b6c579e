"""Homological algebra over W(n, e): Koszul complexes, cohomology profiles, decalage.

Complexes use the column convention: d^q has shape (rank_{q+1}, rank_q).  Koszul
terms are M (x) Lambda^q with basis e_I (I a sorted subset); the coordinate of
m e_I sits at position index(I) * dim(M) + coordinate(m), and

    d(m e_I) = sum_{i not in I} (-1)^{#{j in I : j < i}} x_i(m) e_{I + i}.

Cohomology is read off Smith forms.  With T = phi (e - g), elementary divisors
pi^k with k < T are trusted; divisors with T <= k < N are ambiguous and
reported as precision-negligible together with the bottom kernel layers
ann(pi^k) that a finite-precision kernel always contains.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np

from .errors import InvalidInput, NonCommuting, PrecisionExhausted
from .linalg import Mat, block, column_kernel, howell, row_span_with_guard, smith
from .ring import CyclotomicRing, RingElt, TwistTag


@lru_cache(maxsize=None)
def subsets(d: int, q: int) -> tuple[tuple[int, ...], ...]:
    return tuple(itertools.combinations(range(d), q))


def trusted_exponent(ring: CyclotomicRing) -> int:
    """T = phi (e - g): uniformizer exponents below T are trusted."""
    return ring.phi * (ring.e - ring.g)


@dataclass
class FreeComplex:
    ring: CyclotomicRing
    ranks: list[int]
    diffs: list[Mat]
    twists: list[TwistTag] | None = None

    def __post_init__(self):
        if len(self.diffs) != max(len(self.ranks) - 1, 0):
            raise InvalidInput("a complex with k terms needs k - 1 differentials")
        for q, dq in enumerate(self.diffs):
            if dq.shape != (self.ranks[q + 1], self.ranks[q]):
                raise InvalidInput(f"differential d^{q} has shape {dq.shape}, expected "
                                   f"{(self.ranks[q + 1], self.ranks[q])}")

    @property
    def length(self) -> int:
        return len(self.ranks)

    def diff(self, q: int) -> Mat:
        """d^q, with zero maps outside the range."""
        if 0 <= q < len(self.diffs):
            return self.diffs[q]
        src = self.ranks[q] if 0 <= q < len(self.ranks) else 0
        tgt = self.ranks[q + 1] if 0 <= q + 1 < len(self.ranks) else 0
        return Mat.zeros(self.ring, tgt, src)

    def square_zero(self) -> bool:
        """d^{q+1} d^q == 0 exactly mod p^e."""
        return all((self.diffs[q + 1] @ self.diffs[q]).is_zero(self.ring.e) for q in range(len(self.diffs) - 1))

    def to_json(self) -> dict:
        return {"ranks": list(self.ranks), "diff": [d.to_json() for d in self.diffs]}

    @classmethod
    def from_json(cls, ring: CyclotomicRing, obj) -> "FreeComplex":
        if not isinstance(obj, dict) or "ranks" not in obj or "diff" not in obj:
            raise InvalidInput("complex JSON needs 'ranks' and 'diff'")
        ranks = [int(r) for r in obj["ranks"]]
        if any(r < 0 for r in ranks):
            raise InvalidInput("negative rank")
        diffs = [Mat.from_json(ring, m, ranks[q + 1], ranks[q]) if ranks[q + 1] and ranks[q]
                 else Mat.zeros(ring, ranks[q + 1], ranks[q]) for q, m in enumerate(obj["diff"])]
        return cls(ring, ranks, diffs)


# ------------------------------------------------------------------ profiles


@dataclass
class DegreeProfile:
    q: int
    rank: int
    torsion: list[int]  # trusted elementary-divisor exponents 0 < k < T
    free: int
    negligible: list[int]  # ambiguous divisors and bottom kernel layers
    length: int  # exact length of H^q over W(n, e), in uniformizer units

    def is_zero(self) -> bool:
        return self.free == 0 and not self.torsion

    def killed_by(self, k: int) -> bool:
        """Every trusted class is annihilated by pi^k."""
        return self.free == 0 and all(t <= k for t in self.torsion)

    def to_json(self) -> dict:
        return {"q": self.q, "rank": self.rank, "torsion": sorted(self.torsion), "free": self.free,
                "negligible": sorted(self.negligible), "length": self.length}


@dataclass
class CohomologyProfile:
    degrees: list[DegreeProfile]
    trusted: int
    N: int

    def degree(self, q: int) -> DegreeProfile:
        return self.degrees[q]

    def euler_length(self) -> int:
        return sum((-1) ** d.q * d.length for d in self.degrees)

    def to_json(self) -> dict:
        return {"trusted_exponent": self.trusted, "degrees": [d.to_json() for d in self.degrees]}


def _padded_exps(exps: list[int], ncols: int, N: int) -> list[int]:
    """Smith exponents of a map, one per source coordinate (zero columns get N)."""
    return list(exps) + [N] * (ncols - len(exps))


def cohomology_profile(C: FreeComplex, smiths: list | None = None) -> CohomologyProfile:
    ring = C.ring
    N, T = ring.N, trusted_exponent(ring)
    sms = smiths if smiths is not None else [smith(d) for d in C.diffs]
    out = []
    for q, r in enumerate(C.ranks):
        out_exps = _padded_exps(sms[q].exps, r, N) if q < len(sms) else [N] * r
        in_exps = [k for k in sms[q - 1].exps if k < N] if q >= 1 else []
        solid_out = [k for k in out_exps if k < T]
        solid_in = [k for k in in_exps if k < T]
        torsion = [k for k in solid_in if k > 0]
        free = r - sum(1 for k in out_exps if k < N) - len(in_exps)
        negligible = [k for k in out_exps if T <= k < N] + [k for k in in_exps if k >= T]
        negligible += [N - k for k in solid_out if k > 0]
        ker_len = sum(out_exps)  # ann(pi^k) has length k, a zero column length N
        im_len = sum(N - k for k in in_exps)
        out.append(DegreeProfile(q, r, torsion, free, negligible, ker_len - im_len))
    return CohomologyProfile(out, T, N)


def lifted_cocycles(M: Mat, S=None) -> np.ndarray:
    """Rows z (source coordinates) with M z == 0 mod pi^T that survive to infinite precision."""
    ring = M.ring
    T = trusted_exponent(ring)
    S = S if S is not None and S.V is not None else smith(M, want_v=True)
    exps = _padded_exps(S.exps, M.shape[1], ring.N)
    keep = [j for j, k in enumerate(exps) if k >= T]
    return S.V[:, keep].transpose(1, 0, 2).copy() if keep else ring.np.zeros(0, M.shape[1])


def boundaries(C: FreeComplex, q: int) -> np.ndarray:
    """Rows spanning B^q = image of d^{q-1}."""
    if q == 0:
        return C.ring.np.zeros(0, C.ranks[0])
    return C.diffs[q - 1].a.transpose(1, 0, 2).copy()


# ------------------------------------------------------------------ Koszul


def koszul(ops: Sequence[Mat], check: bool = True) -> FreeComplex:
    """Koszul complex of commuting endomorphisms x_1..x_d of W^m."""
    if not ops:
        raise InvalidInput("Koszul complex needs at least one endomorphism")
    ring = ops[0].ring
    m = ops[0].shape[0]
    d = len(ops)
    for x in ops:
        if x.shape != (m, m):
            raise InvalidInput("Koszul operators must be square of equal size")
    if check:
        for x, y in itertools.combinations(ops, 2):
            if not (x @ y).eq_mod(y @ x, ring.e):
                raise NonCommuting("Koszul operators do not commute")
    ranks = [math.comb(d, q) * m for q in range(d + 1)]
    diffs = []
    for q in range(d):
        src, tgt = subsets(d, q), subsets(d, q + 1)
        tindex = {I: k for k, I in enumerate(tgt)}
        a = ring.np.zeros(len(tgt) * m, len(src) * m)
        for si, I in enumerate(src):
            for i in range(d):
                if i in I:
                    continue
                ti = tindex[tuple(sorted(I + (i,)))]
                sign = -1 if sum(1 for j in I if j < i) % 2 else 1
                a[ti * m:(ti + 1) * m, si * m:(si + 1) * m] = (sign * ops[i].a) % ring.q
        diffs.append(Mat(ring, a, min(x.floor for x in ops)))
    return FreeComplex(ring, ranks, diffs, [TwistTag(0)] * (d + 1))


def koszul_degree_embedding(ring: CyclotomicRing, d: int, q: int, m_small: int, m_big: int,
                            inner: Sequence[int]) -> np.ndarray:
    """Index map K^q(W^m_small) -> K^q(W^m_big) induced by an inner coordinate embedding."""
    out = []
    for si in range(len(subsets(d, q))):
        out.extend(si * m_big + inner[j] for j in range(m_small))
    return np.array(out, dtype=np.int64)


def entries_mat(ring: CyclotomicRing, rows) -> Mat:
    return Mat.from_elts(ring, rows)


def higgs_de_rham(H) -> FreeComplex:
    """DR(H, theta) = K(theta_1, ..., theta_d; H); degree q carries twist -q."""
    if not H.point:
        raise InvalidInput("cohomology is computed on point charts")
    ring = H.ring
    C = koszul([entries_mat(ring, t) for t in H.theta])
    C.twists = [TwistTag(-q) for q in range(H.d + 1)]
    return C


def rep_gamma_ops(M, D: int) -> list[Mat]:
    """gamma_i - 1 on M (x) P_{<=D} (coordinate v * |P| + J)."""
    return _tensor_gamma_ops(M.ring, M.chart.d, D, [entries_mat(M.ring, A) for A in M.A])


def trivial_gamma_ops(ring: CyclotomicRing, d: int, rank: int, D: int) -> list[Mat]:
    """gamma_i - 1 on H (x) P_{<=D} with Gamma acting on P alone."""
    return _tensor_gamma_ops(ring, d, D, [Mat.identity(ring, rank)] * d)


def _tensor_gamma_ops(ring: CyclotomicRing, d: int, D: int, actions: list[Mat]) -> list[Mat]:
    from .pd import gamma_matrix

    ops = []
    for i in range(d):
        m = [0] * d
        m[i] = 1
        K = actions[i].kron(gamma_matrix(ring, d, D, m))
        ops.append(K - Mat.identity(ring, K.shape[0]))
    return ops


def rep_koszul(M) -> FreeComplex:
    """K(gamma_1 - 1, ..., gamma_d - 1; M)."""
    ring = M.ring
    n = M.rank
    ops = [entries_mat(ring, A) - Mat.identity(ring, n) for A in M.A]
    return koszul(ops)


@dataclass
class GroupCohomology:
    complex: FreeComplex
    profile: CohomologyProfile
    h0_basis: np.ndarray  # lifted kernel rows of the degree-0 map
    D: int

    def howell_kernel(self) -> np.ndarray:
        """Exact kernel of the degree-0 map, bottom precision layers included."""
        return column_kernel(self.complex.diffs[0])


def group_cohomology(M, D: int) -> GroupCohomology:
    """Koszul complex of Gamma on M (x) P_{<=D} with its profile and degree-0 kernel."""
    if not isinstance(M.A[0][0][0], RingElt):
        raise InvalidInput("group cohomology is computed on point charts")
    C = koszul(rep_gamma_ops(M, D), check=False)
    sms = [smith(d, want_v=(q == 0)) for q, d in enumerate(C.diffs)]
    prof = cohomology_profile(C, sms)
    return GroupCohomology(C, prof, lifted_cocycles(C.diffs[0], sms[0]), D)


def closed_form_h0(H, D: int) -> np.ndarray:
    """Rows exp(sum theta_i Y_i) v for the standard basis v of H, in M (x) P_{<=D}."""
    ring = H.ring
    rows = []
    for v in range(H.rank):
        e_v = [ring.one if k == v else ring.zero for k in range(H.rank)]
        rows.append(pd_vector(ring, H.d, D, H.rank, exp_theta_Y(H, e_v, D, sign=1)))
    return np.stack(rows)


@dataclass
class H0Report:
    kernel_in_closed_form: bool  # Howell kernel of d^0 within the closed-form module
    closed_form_in_kernel: bool
    lifted_agrees: bool  # same comparison with cocycles lifted past the trusted precision
    max_degree: int

    @property
    def ok(self) -> bool:
        return self.kernel_in_closed_form and self.closed_form_in_kernel


def h0_identification(H, D: int = 12, margin: int = 3, gc: GroupCohomology | None = None) -> H0Report:
    """Degree-0 group cohomology of M (x) P_{<=D} equals exp(sum theta_i Y_i)(M) in pd-degrees <= D - margin."""
    from .higgs import rep_from_higgs
    from .pd import monomials

    ring = H.ring
    T = trusted_exponent(ring)
    gc = gc or group_cohomology(rep_from_higgs(H), D)
    mons = monomials(H.d, D)
    P = len(mons)
    keep = [k * P + j for k in range(H.rank) for j, J in enumerate(mons) if sum(J) <= D - margin]
    closed = closed_form_h0(H, D)[:, keep]
    a, b = spans_equal_rows(ring, gc.howell_kernel()[:, keep], closed, T)
    la, lb = spans_equal_rows(ring, gc.h0_basis[:, keep], closed, T)
    return H0Report(a, b, la and lb, D - margin)


def torsion_margin(H) -> int:
    """Extra pd-degrees needed to resolve c z for cocycles z: ceil((e - g) / val(theta))."""
    ring = H.ring
    v = min((x.vpi() for t in H.theta for r in t for x in r if x.vpi() is not None), default=None)
    if v is None or v >= ring.N:
        return 1
    return max(1, -(-ring.phi * (ring.e - ring.g) // v))


@dataclass
class TorsionReport:
    D: int
    D_inner: int
    per_degree: dict  # q -> (number of cocycles, all killed)

    @property
    def ok(self) -> bool:
        return all(v[1] for v in self.per_degree.values())


def torsion_check(H, D: int = 12, D_inner: int | None = None) -> TorsionReport:
    """Every cocycle of K(M (x) P_{<=D_inner}) times c is a coboundary in K(M (x) P_{<=D}), mod guard."""
    from .higgs import rep_from_higgs
    from .pd import monomials

    ring = H.ring
    T = trusted_exponent(ring)
    nr = ring.np
    if D_inner is None:
        D_inner = D - torsion_margin(H)
    if D_inner < 0:
        raise PrecisionExhausted(f"pd-degree {D} leaves no room for the resolution margin")
    M = rep_from_higgs(H)
    inner = koszul(rep_gamma_ops(M, D_inner), check=False)
    outer = koszul(rep_gamma_ops(M, D), check=False)
    P_in, P_out = len(monomials(H.d, D_inner)), len(monomials(H.d, D))
    coord = [k * P_out + j for k in range(H.rank) for j in range(P_in)]
    c = ring.c()
    res = {}
    for q in range(1, H.d + 1):
        Z = lifted_cocycles(inner.diff(q)) if q < H.d else nr.identity(inner.ranks[q])
        emb = koszul_degree_embedding(ring, H.d, q, H.rank * P_in, H.rank * P_out, coord)
        Zb = nr.zeros(Z.shape[0], outer.ranks[q])
        Zb[:, emb] = Z
        HB = row_span_with_guard(ring, boundaries(outer, q), T)
        res[q] = (int(Z.shape[0]), bool(HB.contains(nr.scale(Zb, c)).all()))
    return TorsionReport(D, D_inner, res)


# ------------------------------------------------------------------ decalage


@dataclass
class DecalageResult:
    complex: FreeComplex
    bases: list[np.ndarray]  # rows: basis of (eta_f C)^q inside C^q


def solve_in_basis(ring: CyclotomicRing, basis: np.ndarray, cols: list[int], exps: list[int],
                   X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Coordinates lam (rows) and residual R with X = lam @ basis + R, by pivot elimination."""
    nr = ring.np
    X = X.copy() % nr.q
    lam = nr.zeros(X.shape[0], basis.shape[0])
    for b, (row, col, k) in enumerate(zip(basis, cols, exps)):
        v = nr.vpi(X[:, col])
        ok = v >= k
        if not ok.any():
            continue
        t = nr.div_pi_power(X[ok][:, col], k)
        lam[ok, b] = t
        X[ok] = (X[ok] - nr.mul(t[:, None, :], row[None, :, :])) % nr.q
    return lam, X


def decalage(C: FreeComplex, f: RingElt) -> DecalageResult:
    """eta_f C: degree q is {x in f^q C^q : d x in f^{q+1} C^{q+1}} with the induced differential."""
    ring = C.ring
    T = trusted_exponent(ring)
    nr = ring.np
    if f.is_unit():
        bases = [nr.identity(r) for r in C.ranks]
        return DecalageResult(FreeComplex(ring, list(C.ranks), list(C.diffs), C.twists), bases)
    forms = []
    for q, r in enumerate(C.ranks):
        fq = f**q
        if r == 0:
            forms.append(howell(nr.zeros(0, 0), ring))
            continue
        if q < len(C.diffs) and C.ranks[q + 1]:
            r1 = C.ranks[q + 1]
            sysm = block(ring, [[C.diffs[q].scale(fq), Mat.identity(ring, r1).scale(-(fq * f))]], [r1], [r, r1])
            gens = column_kernel(sysm)[:, :r]
        else:
            gens = nr.identity(r)
        forms.append(howell(nr.scale(gens, fq) if gens.shape[0] else gens, ring))
    bases, meta = [], []
    for H in forms:
        keep = [i for i, k in enumerate(H.exps) if k < T]
        bases.append(H.rows[keep] if keep else nr.zeros(0, H.ncols))
        meta.append(([H.cols[i] for i in keep], [H.exps[i] for i in keep]))
    diffs = []
    for q in range(len(C.diffs)):
        src, tgt = bases[q], bases[q + 1]
        if src.shape[0] == 0 or tgt.shape[0] == 0:
            diffs.append(Mat.zeros(ring, tgt.shape[0], src.shape[0]))
            continue
        images = ring.np.matmul(C.diffs[q].a, src.transpose(1, 0, 2)).transpose(1, 0, 2)
        lam, resid = solve_in_basis(ring, tgt, meta[q + 1][0], meta[q + 1][1], images)
        if np.any(nr.vpi(resid) < T):
            raise PrecisionExhausted("differential does not preserve the decalage subcomplex")
        diffs.append(Mat(ring, lam.transpose(1, 0, 2).copy()))
    ranks = [b.shape[0] for b in bases]
    return DecalageResult(FreeComplex(ring, ranks, diffs, C.twists), bases)


@dataclass
class TwistEtaReport:
    chain_map_exact: bool  # d_{f theta} (f^q x) == f^{q+1} d_theta x, exactly mod p^e
    image_is_eta: bool  # f^q C^q spans (eta_f C)^q up to guard
    differential_matches: bool  # induced differential equals theta up to guard

    @property
    def ok(self) -> bool:
        return self.chain_map_exact and self.image_is_eta and self.differential_matches


def twist_eta_check(H) -> TwistEtaReport:
    """eta_{zeta_p - 1} DR(H, (zeta_p - 1) theta) is isomorphic to DR(H, theta) via x -> f^q x."""
    from .higgs import twist

    ring = H.ring
    f = ring.rho_K()
    T = trusted_exponent(ring)
    C = higgs_de_rham(H)
    Cf = higgs_de_rham(twist(H, "twist"))
    exact = True
    for q in range(len(C.diffs)):
        lhs = Cf.diffs[q].scale(f**q)
        rhs = C.diffs[q].scale(f ** (q + 1))
        exact &= lhs.eq_mod(rhs, ring.e)
    eta = decalage(Cf, f)
    image_ok, diff_ok = True, True
    nr = ring.np
    for q, r in enumerate(C.ranks):
        psi = nr.scale(nr.identity(r), f**q)
        a, b = spans_equal_rows(ring, psi, eta.bases[q], T)
        image_ok &= a and b
    if image_ok:
        # the eta differential in the bases f^q e_j must be theta
        for q in range(len(C.diffs)):
            psi_q = nr.scale(nr.identity(C.ranks[q]), f**q)
            H1 = howell(nr.scale(nr.identity(C.ranks[q + 1]), f ** (q + 1)), ring)
            images = ring.np.matmul(Cf.diffs[q].a, psi_q.transpose(1, 0, 2)).transpose(1, 0, 2)
            lam, resid = solve_in_basis(ring, H1.rows, H1.cols, H1.exps, images)
            got = Mat(ring, lam.transpose(1, 0, 2).copy())
            diff_ok &= got.eq_mod(C.diffs[q], ring.e - ring.g) and bool(np.all(nr.vpi(resid) >= T))
    return TwistEtaReport(bool(exact), bool(image_ok), bool(diff_ok))


def spans_equal_rows(ring: CyclotomicRing, X: np.ndarray, Y: np.ndarray, guard_exp: int) -> tuple[bool, bool]:
    HX = row_span_with_guard(ring, X, guard_exp)
    HY = row_span_with_guard(ring, Y, guard_exp)
    return bool(HY.contains(X).all()), bool(HX.contains(Y).all())


# --------------------------------------------------------- comparison cocycle


def pd_vector(ring: CyclotomicRing, d: int, D: int, rank: int, coeffs: dict) -> np.ndarray:
    """Coordinates in H (x) P_{<=D} of sum_J h_J Y^[J] (h_J vectors of RingElt)."""
    from .pd import monomial_index

    idx = monomial_index(d, D)
    P = len(idx)
    out = ring.np.zeros(rank * P)
    for J, h in coeffs.items():
        for k in range(rank):
            out[k * P + idx[J]] = h[k].coeffs
    return out


def exp_theta_Y(H, v: Sequence[RingElt], D: int, sign: int = 1) -> dict:
    """exp(sign * sum theta_i Y_i) v as {J: theta^J v * sign^{|J|}}, |J| <= D."""
    from .higgs import mat_vec
    from .pd import monomials

    out = {}
    for J in monomials(H.d, D):
        if sum(J) == 0:
            out[J] = list(v)
            continue
        i = next(k for k in range(H.d) if J[k])
        prev = J[:i] + (J[i] - 1,) + J[i + 1:]
        w = mat_vec(H.theta[i], out[prev])
        out[J] = w if sign > 0 else [-x for x in w]
    return out


@dataclass
class ComparisonCocycle:
    x: list  # omega components x_1..x_d (vectors of RingElt)
    m: np.ndarray  # m(omega) in H (x) P_{<=D}
    v_direct: list  # (gamma_i - 1) m(omega), H (x) P coordinates
    v_formula: list  # c F(rho theta_i) exp(-sum theta_k Y_k) x_i
    agree: bool

    def v_module(self, ring: CyclotomicRing, rank: int, P: int) -> list:
        """Degree-0 parts: v(omega) in the coordinates of the generators exp(-theta Y) h."""
        return [[RingElt(ring, tuple(int(t) for t in v[k * P]), ring.e) for k in range(rank)]
                for v in self.v_direct]


def comparison_cocycle(H, x: Sequence[Sequence[RingElt]], D: int) -> ComparisonCocycle:
    from .higgs import F_matrix, mat_mul, mat_vec
    from .pd import monomials

    ring = H.ring
    d = H.d
    if len(x) != d:
        raise InvalidInput("omega needs one component per direction")
    k = ring.e
    for i in range(d):
        for j in range(i + 1, d):
            a = mat_vec(H.theta[i], x[j])
            b = mat_vec(H.theta[j], x[i])
            if not all(u.eq_mod(w, k) for u, w in zip(a, b)):
                raise InvalidInput("omega is not closed: theta_i(x_j) != theta_j(x_i)")
    zero = [ring.zero] * H.rank
    h = {(0,) * d: zero}
    for J in monomials(d, D):
        if sum(J) == 0:
            continue
        cands = []
        for i in range(d):
            if J[i]:
                prev = J[:i] + (J[i] - 1,) + J[i + 1:]
                if sum(prev) == 0:
                    cands.append(list(x[i]))
                else:
                    cands.append([-t for t in mat_vec(H.theta[i], h[prev])])
        if any(not all(u.eq_mod(w, k) for u, w in zip(cands[0], c)) for c in cands[1:]):
            raise InvalidInput("iteration for m(omega) is inconsistent")
        h[J] = cands[0]
    m = pd_vector(ring, d, D, H.rank, h)
    ops = trivial_gamma_ops(ring, d, H.rank, D)
    v_direct = [ring.np.matmul(op.a, m[:, None, :])[:, 0, :] for op in ops]
    c = ring.c()
    v_formula = []
    for i in range(d):
        Fi = F_matrix(H.theta[i], ring.rho_K())
        y = [t * c for t in mat_vec(Fi, x[i])]
        v_formula.append(pd_vector(ring, d, D, H.rank, exp_theta_Y(H, y, D, sign=-1)))
    guard = ring.e - ring.g
    agree = all(ring.np.is_zero_mod((a - b) % ring.q, guard) for a, b in zip(v_direct, v_formula))
    return ComparisonCocycle([list(t) for t in x], m, v_direct, v_formula, bool(agree))


@dataclass
class H1ComparisonReport:
    image_in_scaled: bool  # v(Z^1_dR) within c Z^1(Gamma) + B^1(Gamma)
    scaled_in_image: bool  # c Z^1(Gamma) within v(Z^1_dR) + B^1(Gamma)
    injective: bool  # v(omega) a coboundary forces omega exact
    paths_agree: bool
    samples: int

    @property
    def ok(self) -> bool:
        return self.image_in_scaled and self.scaled_in_image and self.injective and self.paths_agree


def _v_matrix(H) -> Mat:
    """Block diagonal c F(rho theta_i) acting on K^1 = H^d."""
    from .higgs import F_matrix

    ring = H.ring
    n = H.rank
    c = ring.c()
    blocks = [[None] * H.d for _ in range(H.d)]
    for i in range(H.d):
        blocks[i][i] = entries_mat(ring, F_matrix(H.theta[i], ring.rho_K())).scale(c)
    return block(ring, blocks, [n] * H.d, [n] * H.d)


def h1_scaling_check(H, samples: int = 50, D: int = 12, rng=None) -> H1ComparisonReport:
    """H^1_dR(H, theta) maps onto c H^1(Gamma, M) via v, injectively, up to guard."""
    import random

    from .higgs import rep_from_higgs
    from .pd import monomials

    ring = H.ring
    T = trusted_exponent(ring)
    nr = ring.np
    rng = rng or random.Random(0)
    M = rep_from_higgs(H)
    K = rep_koszul(M)
    DR = higgs_de_rham(H)
    V = _v_matrix(H)
    c = ring.c()
    Z_dr = lifted_cocycles(DR.diff(1)) if H.d > 1 else nr.identity(DR.ranks[1])
    Z_g = lifted_cocycles(K.diff(1)) if H.d > 1 else nr.identity(K.ranks[1])
    B_g = boundaries(K, 1)
    B_dr = boundaries(DR, 1)
    vz = nr.matmul(V.a, Z_dr.transpose(1, 0, 2)).transpose(1, 0, 2) if Z_dr.shape[0] else Z_dr
    cz = nr.scale(Z_g, c) if Z_g.shape[0] else Z_g
    left = np.concatenate([vz, B_g], axis=0)
    right = np.concatenate([cz, B_g], axis=0)
    a, b = spans_equal_rows(ring, left, right, T)
    # injectivity: lam Z_dr with V(lam Z_dr) in B_g + pi^T  ==>  lam Z_dr in B_dr + pi^(T - vpi(c))
    injective = True
    if Z_dr.shape[0]:
        n1 = K.ranks[1]
        guard_rows = nr.scale(nr.identity(n1), ring.pi_power(T))
        sysrows = np.concatenate([vz, B_g, guard_rows], axis=0)
        from .linalg import kernel_rows

        ker = kernel_rows(ring, sysrows)
        lam = ker[:, :Z_dr.shape[0]]
        if lam.shape[0]:
            omegas = _rows_times(ring, lam, Z_dr)
            HB = row_span_with_guard(ring, B_dr, max(T - c.vpi(), 0))
            injective = bool(HB.contains(omegas).all())
    # two-path agreement on seeded exact cocycles
    paths = True
    P = len(monomials(H.d, D))
    exact_z = column_kernel(DR.diff(1)) if H.d > 1 else nr.identity(DR.ranks[1])
    n = H.rank
    for _ in range(samples):
        coeffs = nr.zeros(1, exact_z.shape[0])
        for j in range(exact_z.shape[0]):
            coeffs[0, j] = [rng.randrange(ring.q) for _ in range(ring.phi)]
        w = _rows_times(ring, coeffs, exact_z)[0]
        xs = [[RingElt(ring, tuple(int(t) for t in w[i * n + k]), ring.e) for k in range(n)] for i in range(H.d)]
        cc = comparison_cocycle(H, xs, D)
        paths &= cc.agree
        # the degree-0 part of path (a) is v(omega) in module coordinates
        vw = nr.matmul(V.a, w[:, None, :])[:, 0, :]
        for i, vd in enumerate(cc.v_direct):
            got = np.stack([vd[k * P] for k in range(n)])
            paths &= nr.is_zero_mod((got - vw[i * n:(i + 1) * n]) % ring.q, ring.e - ring.g)
    return H1ComparisonReport(a, b, injective, bool(paths), samples)


def _rows_times(ring: CyclotomicRing, lam: np.ndarray, Z: np.ndarray) -> np.ndarray:
    """lam @ Z for coordinate row stacks (lam: k x s, Z: s x n)."""
    return ring.np.matmul(lam, Z)


# ------------------------------------------------------------------ cone


def mapping_cone(A: FreeComplex, B: FreeComplex, f: list[Mat]) -> FreeComplex:
    """Cone(f: A -> B): degree q is A^{q+1} + B^q, d(a, b) = (-d_A a, f a + d_B b)."""
    ring = A.ring
    L = max(A.length - 1, B.length)
    ranks = [(A.ranks[q + 1] if q + 1 < A.length else 0) + (B.ranks[q] if 0 <= q < B.length else 0)
             for q in range(-1, L)]
    diffs = []
    for q in range(-1, L - 1):
        a_src = A.ranks[q + 1] if 0 <= q + 1 < A.length else 0
        b_src = B.ranks[q] if 0 <= q < B.length else 0
        a_tgt = A.ranks[q + 2] if q + 2 < A.length else 0
        b_tgt = B.ranks[q + 1] if q + 1 < B.length else 0
        dA = -A.diff(q + 1) if a_src and a_tgt else None
        fq = f[q + 1] if a_src and b_tgt else None
        dB = B.diff(q) if b_src and b_tgt else None
        diffs.append(block(ring, [[dA, None], [fq, dB]], [a_tgt, b_tgt], [a_src, b_src]))
    return FreeComplex(ring, ranks, diffs)


@dataclass
class ConeReport:
    d: int
    bound: int  # m with the cone killed by (rho_K (zeta_p - 1))^m
    chain_map: bool
    profile: CohomologyProfile
    killed: bool

    @property
    def ok(self) -> bool:
        return self.chain_map and self.killed


def cone_exponent(d: int) -> int:
    return max(d + 1, 2 * (d - 1))


def comparison_chain_map(H, M) -> list[Mat]:
    """f^q(x e_I) = prod_{i in I} G_i x with G_i = -c F(rho theta_i), so gamma_i - 1 = theta_i G_i."""
    from .higgs import F_matrix

    ring = H.ring
    n = H.rank
    c = ring.c()
    G = [entries_mat(ring, F_matrix(t, ring.rho_K())).scale(-c) for t in H.theta]
    out = []
    for q in range(H.d + 1):
        S = subsets(H.d, q)
        blocks = [[None] * len(S) for _ in S]
        for k, I in enumerate(S):
            P = Mat.identity(ring, n)
            for i in I:
                P = G[i] @ P
            blocks[k][k] = P
        out.append(block(ring, blocks, [n] * len(S), [n] * len(S)))
    return out


def cone_torsion_check(H) -> ConeReport:
    from .higgs import rep_from_higgs

    ring = H.ring
    M = rep_from_higgs(H)
    DR = higgs_de_rham(H)
    K = rep_koszul(M)
    f = comparison_chain_map(H, M)
    chain = all((K.diff(q) @ f[q]).eq_mod(f[q + 1] @ DR.diff(q), ring.e - ring.g) for q in range(H.d))
    C = mapping_cone(DR, K, f)
    prof = cohomology_profile(C)
    m = cone_exponent(H.d)
    bound = m * ring.c().vpi()
    killed = all(dp.killed_by(bound) for dp in prof.degrees)
    return ConeReport(H.d, m, bool(chain), prof, bool(killed))

"""Vectorized matrices over W(n, e): products, valuations, Howell and Smith forms.

A matrix is an integer array of shape (rows, cols, phi) holding power-basis
coordinates in [0, p^e).  int64 is used whenever the largest intermediate sum
provably fits, otherwise Python integers (dtype=object).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import InvalidInput, NotDivisible
from .ring import CyclotomicRing, RingElt

_INT64_BUDGET = 2**62
_CHUNK = 1024


class NumpyRing:
    """Array-level arithmetic for one CyclotomicRing."""

    def __init__(self, ring: CyclotomicRing):
        self.ring = ring
        self.phi = ring.phi
        self.q = ring.q
        self.p = ring.p
        fits = ring.q**2 * _CHUNK * ring.phi * 2**ring.phi < _INT64_BUDGET
        self.dtype = np.int64 if fits else object
        self.red = np.array(ring._red, dtype=object).astype(self.dtype)
        self.to_pi = np.array(ring._to_pi, dtype=self.dtype)
        self.from_pi = np.array(ring._from_pi, dtype=self.dtype) % self.q

    def asarray(self, a) -> np.ndarray:
        return np.asarray(a, dtype=self.dtype)

    def zeros(self, *shape) -> np.ndarray:
        return np.zeros(shape + (self.phi,), dtype=self.dtype)

    def identity(self, n: int) -> np.ndarray:
        out = self.zeros(n, n)
        out[np.arange(n), np.arange(n), 0] = 1
        return out

    def _combine(self, prod: list) -> np.ndarray:
        phi, q = self.phi, self.q
        out = np.stack(prod[:phi], axis=-1)
        if len(prod) > phi:
            high = np.stack(prod[phi:], axis=-1) % q
            out = out % q + high @ self.red[phi:len(prod)]
        return out % q

    def mul(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """Elementwise ring product with numpy broadcasting."""
        phi = self.phi
        prod = [None] * (2 * phi - 1)
        for i in range(phi):
            ai = a[..., i]
            for j in range(phi):
                t = ai * b[..., j]
                prod[i + j] = t if prod[i + j] is None else prod[i + j] + t
        return self._combine(prod)

    def matmul(self, A: np.ndarray, B: np.ndarray) -> np.ndarray:
        phi = self.phi
        k = A.shape[-2]
        prod = [None] * (2 * phi - 1)
        for start in range(0, max(k, 1), _CHUNK):
            Ac = A[..., start:start + _CHUNK, :]
            Bc = B[start:start + _CHUNK]
            for i in range(phi):
                Ai = Ac[..., i]
                for j in range(phi):
                    t = (Ai @ Bc[..., j]) % self.q
                    prod[i + j] = t if prod[i + j] is None else prod[i + j] + t
        if prod[0] is None:
            return np.zeros(A.shape[:-1][:-1] + (B.shape[1], phi), dtype=self.dtype)
        return self._combine(prod)

    def scalar_matrix(self, coeffs: Sequence[int]) -> np.ndarray:
        """Matrix S with (x * s) == x @ S for coordinate vectors x."""
        ring = self.ring
        rows = []
        for i in range(self.phi):
            basis = [0] * self.phi
            basis[i] = 1
            rows.append(ring.mul_exact(basis, coeffs, self.q))
        return np.array(rows, dtype=self.dtype)

    def scale(self, a: np.ndarray, s) -> np.ndarray:
        coeffs = s.coeffs if isinstance(s, RingElt) else s
        return (a @ self.scalar_matrix(coeffs)) % self.q

    def vpi(self, a: np.ndarray, floor: int | None = None) -> np.ndarray:
        """pi-adic valuations; precision-zero entries get phi * floor."""
        ring = self.ring
        floor = ring.e if floor is None else floor
        mod = ring.p**floor
        b = (a @ self.to_pi.T) % mod
        cap = ring.phi * floor
        out = np.full(a.shape[:-1], cap, dtype=np.int64)
        for j in range(self.phi):
            col = b[..., j]
            v = np.where(col == 0, cap, 0).astype(np.int64)
            live = col != 0
            cur = col.copy()
            t = 0
            while live.any() and t < floor:
                div = live & (cur % ring.p == 0)
                if not div.any():
                    break
                v = np.where(div, v + 1, v)
                cur = np.where(div, cur // ring.p, cur)
                live = div
                t += 1
            cand = np.where(col == 0, cap, ring.phi * v + j)
            out = np.minimum(out, cand)
        return out

    def div_pi_power(self, a: np.ndarray, k: int) -> np.ndarray:
        """Exact division of every entry by pi^k (entries must have vpi >= k)."""
        if k == 0:
            return a.copy()
        ring = self.ring
        j = -(-k // ring.phi)
        s = j * ring.phi - k
        mod = ring.p ** (ring.e + j)
        S = np.array([ring.mul_exact([int(i == t) for i in range(self.phi)], ring._pi_pows_exact[s])
                      for t in range(self.phi)], dtype=object)
        big = (a.astype(object) @ S) % mod
        pj = ring.p**j
        if np.any(big % pj != 0):
            raise NotDivisible(f"entry not divisible by pi^{k}")
        t = (big // pj).astype(self.dtype) if self.dtype is not object else big // pj
        return self.scale(t % self.q, ring.winv(j))

    def reduce_mod_pi_power(self, a: np.ndarray, k: int) -> tuple[np.ndarray, np.ndarray]:
        """Canonical remainder r and quotient t with a = r + pi^k t."""
        ring = self.ring
        b = (a @ self.to_pi.T) % self.q
        for j in range(self.phi):
            m = max(0, -(-(k - j) // ring.phi))
            b[..., j] %= ring.p**m
        r = (b @ self.from_pi.T) % self.q
        t = self.div_pi_power((a - r) % self.q, k) if k < ring.N else self.zeros(*a.shape[:-1])
        return r, t

    def unit_inverse(self, x: np.ndarray) -> np.ndarray:
        return np.array(self.ring.unit_inverse_coeffs([int(v) for v in x]), dtype=self.dtype)

    def is_zero_mod(self, a: np.ndarray, k: int) -> bool:
        return bool(np.all(a % (self.ring.p**k) == 0))


@dataclass
class Mat:
    """A matrix over W(n, e) with a single precision floor."""

    ring: CyclotomicRing
    a: np.ndarray
    floor: int = field(default=-1)

    def __post_init__(self):
        if self.floor < 0:
            self.floor = self.ring.e
        self.a = np.asarray(self.a, dtype=self.ring.np.dtype)
        if self.a.ndim != 3 or self.a.shape[2] != self.ring.phi:
            raise InvalidInput(f"bad matrix array shape {self.a.shape}")

    @property
    def shape(self) -> tuple[int, int]:
        return self.a.shape[0], self.a.shape[1]

    @classmethod
    def zeros(cls, ring, r, c) -> "Mat":
        return cls(ring, ring.np.zeros(r, c))

    @classmethod
    def identity(cls, ring, n) -> "Mat":
        return cls(ring, ring.np.identity(n))

    @classmethod
    def from_elts(cls, ring, rows: Sequence[Sequence[RingElt | int]], ncols: int | None = None) -> "Mat":
        rows = [list(r) for r in rows]
        c = ncols if ncols is not None else (len(rows[0]) if rows else 0)
        arr = ring.np.zeros(len(rows), c)
        floor = ring.e
        for i, r in enumerate(rows):
            for j, x in enumerate(r):
                x = ring.coerce(x)
                arr[i, j] = x.coeffs
                floor = min(floor, x.floor)
        return cls(ring, arr, floor)

    def to_elts(self) -> list[list[RingElt]]:
        return [[RingElt(self.ring, tuple(int(v) for v in self.a[i, j]), self.floor)
                 for j in range(self.a.shape[1])] for i in range(self.a.shape[0])]

    def entry(self, i, j) -> RingElt:
        return RingElt(self.ring, tuple(int(v) for v in self.a[i, j]), self.floor)

    def __add__(self, other: "Mat") -> "Mat":
        return Mat(self.ring, (self.a + other.a) % self.ring.q, min(self.floor, other.floor))

    def __sub__(self, other: "Mat") -> "Mat":
        return Mat(self.ring, (self.a - other.a) % self.ring.q, min(self.floor, other.floor))

    def __neg__(self) -> "Mat":
        return Mat(self.ring, (-self.a) % self.ring.q, self.floor)

    def __matmul__(self, other: "Mat") -> "Mat":
        if self.shape[1] != other.shape[0]:
            raise InvalidInput(f"shape mismatch {self.shape} @ {other.shape}")
        return Mat(self.ring, self.ring.np.matmul(self.a, other.a), min(self.floor, other.floor))

    def scale(self, s: RingElt | int) -> "Mat":
        s = self.ring.coerce(s)
        return Mat(self.ring, self.ring.np.scale(self.a, s), min(self.floor, s.floor))

    @property
    def T(self) -> "Mat":
        return Mat(self.ring, self.a.transpose(1, 0, 2).copy(), self.floor)

    def kron(self, other: "Mat") -> "Mat":
        r1, c1 = self.shape
        r2, c2 = other.shape
        prod = self.ring.np.mul(self.a[:, None, :, None, :], other.a[None, :, None, :, :])
        return Mat(self.ring, prod.reshape(r1 * r2, c1 * c2, self.ring.phi), min(self.floor, other.floor))

    def is_zero(self, k: int | None = None) -> bool:
        k = self.floor if k is None else min(k, self.floor)
        return self.ring.np.is_zero_mod(self.a, k)

    def eq_mod(self, other: "Mat", k: int | None = None) -> bool:
        if self.shape != other.shape:
            return False
        return (self - other).is_zero(k)

    def with_floor(self, floor: int) -> "Mat":
        return Mat(self.ring, self.a, min(self.floor, floor))

    def min_vpi(self) -> int:
        if self.a.size == 0:
            return self.ring.phi * self.floor
        return int(self.ring.np.vpi(self.a, self.floor).min())

    def to_json(self) -> list:
        return [[{"coeffs": [int(v) for v in self.a[i, j]], "floor": self.floor}
                 for j in range(self.shape[1])] for i in range(self.shape[0])]

    @classmethod
    def from_json(cls, ring, obj, nrows=None, ncols=None) -> "Mat":
        if not isinstance(obj, list) or not all(isinstance(r, list) for r in obj):
            raise InvalidInput("matrix must be a list of rows")
        if obj and len({len(r) for r in obj}) > 1:
            raise InvalidInput("ragged matrix")
        rows = [[RingElt.from_json(ring, x) for x in r] for r in obj]
        c = len(rows[0]) if rows else (ncols or 0)
        if nrows is not None and len(rows) != nrows or (ncols is not None and rows and c != ncols):
            raise InvalidInput(f"matrix shape mismatch, expected {nrows}x{ncols}")
        return cls.from_elts(ring, rows, c)


def block(ring: CyclotomicRing, blocks: list[list[Mat | None]], row_sizes, col_sizes) -> Mat:
    out = ring.np.zeros(sum(row_sizes), sum(col_sizes))
    floor = ring.e
    r0 = 0
    for bi, rs in enumerate(row_sizes):
        c0 = 0
        for bj, cs in enumerate(col_sizes):
            m = blocks[bi][bj]
            if m is not None:
                out[r0:r0 + rs, c0:c0 + cs] = m.a
                floor = min(floor, m.floor)
            c0 += cs
        r0 += rs
    return Mat(ring, out, floor)


# ---------------------------------------------------------------- Howell form


@dataclass
class HowellForm:
    """Row-span normal form: rows[i] has leading entry pi^exps[i] at column cols[i]."""

    ring: CyclotomicRing
    rows: np.ndarray
    cols: list[int]
    exps: list[int]
    ncols: int

    def as_mat(self) -> Mat:
        return Mat(self.ring, self.rows if len(self.cols) else self.ring.np.zeros(0, self.ncols)[..., :])

    def reduce(self, X: np.ndarray) -> np.ndarray:
        """Reduce the rows of X against the form; members reduce to zero."""
        nr = self.ring.np
        X = X.copy()
        for row, col, k in zip(self.rows, self.cols, self.exps):
            v = nr.vpi(X[:, col])
            ok = v >= k
            if not ok.any():
                continue
            sub = X[ok]
            t = nr.div_pi_power(sub[:, col], k)
            sub = (sub - nr.mul(t[:, None, :], row[None, :, :])) % nr.q
            X[ok] = sub
        return X

    def contains(self, X: np.ndarray) -> np.ndarray:
        """Boolean membership of each row of X in the row span."""
        if X.shape[0] == 0:
            return np.zeros(0, dtype=bool)
        R = self.reduce(X)
        return np.all(R.reshape(R.shape[0], -1) == 0, axis=1)


def howell(M: Mat | np.ndarray, ring: CyclotomicRing | None = None) -> HowellForm:
    """Howell form of the row span of M over W(n, e)."""
    if isinstance(M, Mat):
        ring, A = M.ring, M.a
    else:
        A = M
    nr = ring.np
    N = ring.N
    ncols = A.shape[1]
    rows = A.copy() % nr.q
    rows = rows[np.any(rows.reshape(rows.shape[0], -1) != 0, axis=1)]
    out_rows, cols, exps = [], [], []
    for col in range(ncols):
        if rows.shape[0] == 0:
            break
        v = nr.vpi(rows[:, col])
        k = int(v.min())
        if k >= N:
            continue
        i = int(np.argmax(v == k))
        piv = rows[i].copy()
        unit = nr.div_pi_power(piv[col][None, :], k)[0]
        piv = nr.mul(piv, nr.unit_inverse(unit)[None, :])
        rest = np.delete(rows, i, axis=0)
        if rest.shape[0]:
            nz = np.any(rest[:, col] != 0, axis=1)
            if nz.any():
                t = nr.div_pi_power(rest[nz, col], k)
                rest[nz, col:] = (rest[nz, col:] - nr.mul(t[:, None, :], piv[None, col:, :])) % nr.q
        if k > 0:
            sat = nr.scale(piv[None], ring.pi_power(N - k))
            rest = np.concatenate([rest, sat], axis=0)
        rows = rest[np.any(rest.reshape(rest.shape[0], -1) != 0, axis=1)] if rest.shape[0] else rest
        out_rows.append(piv)
        cols.append(col)
        exps.append(k)
    H = np.array(out_rows, dtype=nr.dtype).reshape(len(out_rows), ncols, ring.phi)
    # reduce entries above each pivot to canonical residues mod pi^k
    for i, (col, k) in enumerate(zip(cols, exps)):
        if i == 0:
            continue
        above = H[:i, col]
        r, t = nr.reduce_mod_pi_power(above, k)
        H[:i] = (H[:i] - nr.mul(t[:, None, :], H[i][None, :, :])) % nr.q
    return HowellForm(ring, H, cols, exps, ncols)


def row_span_with_guard(ring: CyclotomicRing, X: np.ndarray, guard_exp: int | None) -> HowellForm:
    """Howell form of span(X) + pi^guard_exp * W^cols (no guard when None)."""
    if guard_exp is not None and guard_exp < ring.N:
        c = X.shape[1]
        G = ring.np.scale(ring.np.identity(c), ring.pi_power(guard_exp))
        X = np.concatenate([X, G], axis=0)
    return howell(X, ring)


def kernel_rows(ring: CyclotomicRing, A: np.ndarray) -> np.ndarray:
    """Generators of the left kernel {y : y A = 0} (rows)."""
    m, c = A.shape[0], A.shape[1]
    aug = np.concatenate([A, ring.np.identity(m)], axis=1)
    H = howell(aug, ring)
    keep = [i for i, col in enumerate(H.cols) if col >= c]
    if not keep:
        return ring.np.zeros(0, m)
    return H.rows[keep][:, c:, :]


def column_kernel(M: Mat) -> np.ndarray:
    """Generators (as rows) of {x : M x = 0}."""
    return kernel_rows(M.ring, M.a.transpose(1, 0, 2))


def spans_equal(ring: CyclotomicRing, X: np.ndarray, Y: np.ndarray, guard_exp: int | None) -> tuple[bool, bool]:
    """(span X within span Y, span Y within span X), both modulo pi^guard_exp."""
    HX = row_span_with_guard(ring, X, guard_exp)
    HY = row_span_with_guard(ring, Y, guard_exp)
    return bool(HY.contains(X).all()), bool(HX.contains(Y).all())


# ---------------------------------------------------------------- Smith form


@dataclass
class SmithForm:
    """U A V = diag(pi^exps) with exps non-decreasing; exps == N marks zero."""

    exps: list[int]
    V: np.ndarray | None
    shape: tuple[int, int]


def smith(M: Mat | np.ndarray, ring: CyclotomicRing | None = None, want_v: bool = False) -> SmithForm:
    if isinstance(M, Mat):
        ring, A = M.ring, M.a
    else:
        A = M
    nr = ring.np
    N = ring.N
    r, c = A.shape[0], A.shape[1]
    A = A.copy() % nr.q
    V = nr.identity(c) if want_v else None
    exps = []
    for t in range(min(r, c)):
        sub = A[t:, t:]
        vals = nr.vpi(sub)
        k = int(vals.min())
        if k >= N:
            break
        i, j = np.unravel_index(int(np.argmax(vals == k)), vals.shape)
        i += t
        j += t
        if i != t:
            A[[t, i]] = A[[i, t]]
        if j != t:
            A[:, [t, j]] = A[:, [j, t]]
            if V is not None:
                V[:, [t, j]] = V[:, [j, t]]
        unit = nr.div_pi_power(A[t, t][None, :], k)[0]
        A[t] = nr.mul(A[t], nr.unit_inverse(unit)[None, :])
        if t + 1 < r:
            nz = t + 1 + np.flatnonzero(np.any(A[t + 1:, t] != 0, axis=1))
            if nz.size:
                q = nr.div_pi_power(A[nz, t], k)
                A[nz, t:] = (A[nz, t:] - nr.mul(q[:, None, :], A[t, t:][None, :, :])) % nr.q
        if t + 1 < c:
            q2 = nr.div_pi_power(A[t, t + 1:], k)
            A[t, t + 1:] = 0
            if V is not None:
                V[:, t + 1:] = (V[:, t + 1:] - nr.mul(V[:, t][:, None, :], q2[None, :, :])) % nr.q
        exps.append(k)
    exps += [N] * (min(r, c) - len(exps))
    return SmithForm(exps, V, (r, c))

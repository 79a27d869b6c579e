import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from simpson_lab.linalg import Mat, column_kernel, howell, kernel_rows, smith, spans_equal
from simpson_lab.ring import ring_for

TINY = ring_for(3, 1, 2, 0)  # W = Z_3[zeta_3] / 9, 81 elements, uniformizer length 4
ELEMENTS = [TINY.elt([a, b]) for a in range(TINY.q) for b in range(TINY.q)]


def tiny_matrices(rows, cols):
    entry = st.tuples(st.integers(0, TINY.q - 1), st.integers(0, TINY.q - 1))
    return st.lists(st.lists(entry, min_size=cols, max_size=cols), min_size=rows, max_size=rows).map(
        lambda rs: Mat.from_elts(TINY, [[TINY.elt(list(x)) for x in r] for r in rs]))


def brute_kernel_size(M: Mat) -> int:
    rows = M.to_elts()
    count = 0
    for x in itertools.product(ELEMENTS, repeat=M.shape[1]):
        if all(sum((a * b for a, b in zip(r, x)), TINY.zero).is_zero() for r in rows):
            count += 1
    return count


def brute_row_span(M: Mat) -> set:
    rows = M.to_elts()
    out = set()
    for coeffs in itertools.product(ELEMENTS, repeat=len(rows)):
        v = [TINY.zero] * M.shape[1]
        for c, r in zip(coeffs, rows):
            v = [a + c * b for a, b in zip(v, r)]
        out.add(tuple(x.coeffs for x in v))
    return out


@settings(max_examples=15)
@given(tiny_matrices(2, 2))
def test_smith_exponents_count_the_kernel(M):
    # each column with exponent k contributes a kernel of length k, i.e. p^k elements
    S = smith(M)
    r, c = M.shape
    length = sum(S.exps) + TINY.N * (c - min(r, c))
    assert brute_kernel_size(M) == TINY.p ** length


@settings(max_examples=15)
@given(tiny_matrices(2, 2))
def test_howell_form_counts_the_row_span(M):
    # a Howell basis row with pivot exponent k contributes p^(N - k) elements
    H = howell(M)
    span = brute_row_span(M)
    assert len(span) == TINY.p ** sum(TINY.N - k for k in H.exps)
    probe = np.array([[list(v)] for v in itertools.islice(
        (tuple(x) for x in itertools.product(range(TINY.q), repeat=TINY.phi * 2)), 0, 300, 7)], dtype=np.int64)
    probe = probe.reshape(-1, 2, TINY.phi)
    member = H.contains(probe)
    for row, m in zip(probe, member):
        assert m == (tuple(tuple(int(t) for t in e) for e in row) in span)


R = ring_for(3, 1, 8, 2)


def rand_mat(rng, r, c, ring=R):
    return Mat(ring, rng.integers(0, ring.q, size=(r, c, ring.phi)))


@pytest.mark.parametrize("shape", [(3, 4), (5, 2), (4, 4)])
def test_column_kernel_is_annihilated(shape):
    rng = np.random.default_rng(1)
    M = rand_mat(rng, *shape)
    M = M @ Mat.from_elts(R, [[R.pi_power(2)] * shape[1]] * shape[1])  # force a nontrivial kernel
    K = column_kernel(M)
    assert K.shape[0] > 0
    assert (M @ Mat(R, K.transpose(1, 0, 2))).is_zero()


def test_kernel_rows_left_annihilate():
    rng = np.random.default_rng(2)
    A = rand_mat(rng, 5, 3)
    K = kernel_rows(R, A.a)
    assert (Mat(R, K) @ A).is_zero()
    assert K.shape[0] >= 2


def test_spans_equal_detects_proper_inclusion():
    I = Mat.identity(R, 2).a
    piI = Mat.identity(R, 2).scale(R.uniformizer()).a
    a, b = spans_equal(R, piI, I, None)
    assert a and not b
    pi2I = Mat.identity(R, 2).scale(R.pi_power(2)).a
    assert spans_equal(R, piI, pi2I, None) == (False, True)
    assert spans_equal(R, piI, pi2I, 1) == (True, True)


def test_smith_of_diagonal():
    M = Mat.from_elts(R, [[R.pi_power(3), 0], [0, R.pi_power(1)]])
    assert smith(M).exps == [1, 3]


def test_smith_v_columns_transform_to_diagonal():
    rng = np.random.default_rng(3)
    M = rand_mat(rng, 3, 3) @ Mat.from_elts(R, [[R.uniformizer(), 0, 0], [0, R.c(), 0], [0, 0, 0]])
    S = smith(M, want_v=True)
    V = Mat(R, S.V)
    MV = (M @ V).to_elts()
    for j, k in enumerate(S.exps):
        col = [MV[i][j] for i in range(3)]
        assert min((x.vpi() for x in col if x.vpi() is not None), default=R.N) == k

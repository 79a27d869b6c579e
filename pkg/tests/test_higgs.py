from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from conftest import make_higgs
from oracles import qexp, qmul, reduce_mod
from simpson_lab.chart import Chart, ChartParams, perf_indices
from simpson_lab.errors import NonCommuting, NotSmall
from simpson_lab.higgs import (F_matrix, GammaRep, HiggsModule, decompletion_component_check, exp_c, hitchin,
                               higgs_from_rep, in_small_locus, is_top_nilpotent, log_c, mat_add, mat_eq_mod,
                               mat_identity, mat_inverse, mat_mul, mat_scale, mat_sub, rep_from_higgs, twist)
from simpson_lab.ring import ring_for
from simpson_lab.suites import negative_hitchin_fixtures

R = ring_for(3, 1, 8, 2)
GUARD = R.e - R.g
CHART1 = Chart(ChartParams(d=1, r=0), R)

coeffs = st.tuples(st.integers(0, R.q - 1), st.integers(0, R.q - 1))


@given(coeffs, st.integers(1, 4))
def test_exp_matches_rational_oracle(c, k):
    x = R.pi_power(k) * R.elt(list(c))
    got = exp_c([[x]])[0][0]
    # -c x with c = -3 zeta, in the basis (1, zeta) over Q
    xq = tuple(Fraction(v) for v in x.coeffs)
    arg = qmul((Fraction(0), Fraction(3)), xq)
    want = reduce_mod(qexp(arg), R.q)
    assert got.eq_mod(R.elt(list(want)), GUARD)


def higgs_pairs(rank):
    return st.integers(0, 2**31).map(lambda s: make_higgs(R, 2, rank, s))


@given(higgs_pairs(2))
def test_exponential_is_multiplicative_on_commuting_fields(H):
    t1, t2 = H.theta
    assert mat_eq_mod(exp_c(mat_add(t1, t2)), mat_mul(exp_c(t1), exp_c(t2)), GUARD)


@given(higgs_pairs(2))
def test_log_inverts_exp(H):
    for t in H.theta:
        assert mat_eq_mod(log_c(exp_c(t)), t, GUARD)


@given(higgs_pairs(2))
def test_exponential_through_F(H):
    # exp(-c theta) = 1 - c theta F(rho theta)
    for t in H.theta:
        rhs = mat_sub(mat_identity(2, R.one), mat_scale(mat_mul(t, F_matrix(t, R.rho_K())), R.c()))
        assert mat_eq_mod(exp_c(t), rhs, GUARD)


@given(st.integers(0, 2**31), st.sampled_from([(1, 1), (1, 2), (2, 1), (2, 2)]))
def test_correspondence_round_trips(seed, shape):
    H = make_higgs(R, shape[0], shape[1], seed)
    M = rep_from_higgs(H)
    back = higgs_from_rep(GammaRep(M.chart, M.rank, M.A), use_witness=False)
    assert all(mat_eq_mod(a, b, GUARD) for a, b in zip(H.theta, back.theta))
    assert M.rank == H.rank


def test_zero_field_gives_trivial_action():
    H = HiggsModule(CHART1, 2, [[[R.zero, R.zero], [R.zero, R.zero]]])
    M = rep_from_higgs(H)
    assert mat_eq_mod(M.A[0], mat_identity(2, R.one))


def test_tensor_and_dual_are_compatible():
    H1, H2 = make_higgs(R, 1, 2, 1), make_higgs(R, 1, 1, 2)
    A = rep_from_higgs(H1.tensor(H2)).A[0]
    B = rep_from_higgs(H1).A[0]
    C = rep_from_higgs(H2).A[0]
    assert mat_eq_mod(A, [[b * C[0][0] for b in row] for row in B], GUARD)
    D = rep_from_higgs(H1.dual()).A[0]
    assert mat_eq_mod(mat_mul([list(r) for r in zip(*D)], B), mat_identity(2, R.one), GUARD)


def test_non_commuting_fields_rejected():
    chart = Chart(ChartParams(d=2, r=0), R)
    p = R.uniformizer()
    a = [[R.zero, p], [R.zero, R.zero]]
    b = [[R.zero, R.zero], [p, R.zero]]
    with pytest.raises(NonCommuting):
        HiggsModule(chart, 2, [a, b])


def test_action_not_congruent_to_one_is_not_small():
    with pytest.raises(NotSmall):
        log_c([[R.one + R.uniformizer()]])


def test_unit_eigenvalue_is_not_topologically_nilpotent():
    with pytest.raises(NotSmall):
        is_top_nilpotent([[[R.one]]])
    assert is_top_nilpotent([[[R.zero]]]).kind == "twisted-small"


def test_twist_untwist_are_inverse():
    H = make_higgs(R, 2, 2, 5)
    back = twist(twist(H, "twist"), "untwist")
    assert all(mat_eq_mod(a, b) for a, b in zip(H.theta, back.theta))


def test_hitchin_coefficients_are_trace_and_determinant():
    t = [[R.from_int(3), R.from_int(6)], [R.from_int(9), R.from_int(12)]]
    e1, e2 = hitchin(HiggsModule(CHART1, 2, [t]))
    assert e1[(1,)].eq_mod(R.from_int(15))
    assert e2[(2,)].eq_mod(R.from_int(3 * 12 - 6 * 9))


@given(st.integers(0, 2**31))
def test_hitchin_is_conjugation_invariant(seed):
    H = make_higgs(R, 2, 2, seed)
    P = [[R.one, R.from_int(seed % 7 + 1)], [R.zero, R.one]]
    Pi = mat_inverse(P)
    moved = HiggsModule(H.chart, 2, [mat_mul(mat_mul(P, t), Pi) for t in H.theta])
    for a, b in zip(hitchin(H), hitchin(moved)):
        for m in set(a) | set(b):
            assert a.get(m, R.zero).eq_mod(b.get(m, R.zero))


@given(st.integers(0, 2**31), st.integers(1, 2), st.integers(1, 2))
def test_small_presentations_lie_in_hitchin_locus(seed, d, rank):
    assert in_small_locus(twist(make_higgs(R, d, rank, seed), "twist"))


def test_negative_fixtures_outside_locus():
    assert in_small_locus(HiggsModule(CHART1, 1, [[[R.zero]]]))
    for H in negative_hitchin_fixtures(R):
        assert not in_small_locus(H)


@pytest.mark.parametrize("d,r,rank", [(1, 0, 1), (1, 1, 2), (2, 1, 2)])
def test_decompletion_components(d, r, rank):
    H = make_higgs(R, d, rank, 11, r=r)
    for alpha in perf_indices(H.chart):
        if any(alpha):
            assert decompletion_component_check(H, alpha).ok, alpha

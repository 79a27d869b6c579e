import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from simpson_lab.chart import ChartParams, GammaElement
from simpson_lab.linalg import Mat
from simpson_lab.pd import (PdElement, Y, gamma_act_pd, gamma_matrix, higgs_complex_on_pd, monomial_index,
                            monomials, partial, pd_binomial, pd_mul, poincare_defect)
from simpson_lab.ring import ring_for

R = ring_for(3, 1, 8, 2)


def pd_elements(nvars, D, max_deg):
    mons = [J for J in monomials(nvars, D) if sum(J) <= max_deg]
    coeff = st.tuples(st.integers(0, R.q - 1), st.integers(0, R.q - 1)).map(lambda c: R.elt(list(c)))
    return st.dictionaries(st.sampled_from(mons), coeff, max_size=4).map(
        lambda t: PdElement(nvars, D, t, R.zero))


def test_divided_power_products():
    y = Y(1, 6, 0, R.one)
    assert pd_mul(y, y).eq_mod(PdElement.monomial(1, 6, [2], R.from_int(2)))
    a = PdElement.monomial(1, 6, [2], R.one)
    b = PdElement.monomial(1, 6, [3], R.one)
    assert pd_mul(a, b).eq_mod(PdElement.monomial(1, 6, [5], R.from_int(10)))


@given(st.lists(st.integers(0, 6), min_size=2, max_size=2), st.lists(st.integers(0, 6), min_size=2, max_size=2))
def test_pd_binomial_matches_rational_divided_powers(J1, J2):
    # (Y^J1 / J1!) (Y^J2 / J2!) = pd_binomial * Y^(J1+J2) / (J1+J2)!
    lhs = Fraction(1, math.prod(math.factorial(j) for j in J1) * math.prod(math.factorial(j) for j in J2))
    rhs = Fraction(pd_binomial(J1, J2), math.prod(math.factorial(a + b) for a, b in zip(J1, J2)))
    assert lhs == rhs


@given(pd_elements(2, 8, 2), pd_elements(2, 8, 2), pd_elements(2, 8, 2))
def test_pd_multiplication_is_commutative_and_associative(f, g, h):
    assert pd_mul(f, g).eq_mod(pd_mul(g, f))
    assert pd_mul(pd_mul(f, g), h).eq_mod(pd_mul(f, pd_mul(g, h)))


@given(pd_elements(2, 8, 4), pd_elements(2, 8, 4), st.integers(0, 1))
def test_partial_is_a_derivation(f, g, i):
    lhs = partial(pd_mul(f, g), i)
    rhs = pd_mul(partial(f, i), g) + pd_mul(f, partial(g, i))
    assert lhs.eq_mod(rhs)


def test_gamma_shifts_by_multiple_of_c():
    g = GammaElement.from_gamma(ChartParams(d=1, r=0), [2])
    y = Y(1, 6, 0, R.one)
    assert gamma_act_pd(g, y, R).eq_mod(y + PdElement.const(1, 6, R.from_int(-6) * R.zeta()))


@given(pd_elements(2, 6, 6), st.integers(-3, 3), st.integers(-3, 3))
def test_gamma_matrix_agrees_with_action(f, m1, m2):
    g = GammaElement.from_gamma(ChartParams(d=2, r=1), [m1, m2])
    lhs = gamma_act_pd(g, f, R)
    idx = monomial_index(2, 6)
    vec = R.np.zeros(len(idx), 1)
    for J, c in f.terms.items():
        vec[idx[J], 0] = c.coeffs
    out = gamma_matrix(R, 2, 6, [m1, m2]) @ Mat(R, vec)
    for J, k in idx.items():
        assert tuple(int(t) for t in out.a[k, 0]) == tuple(lhs.coeff(J).coeffs)


@given(pd_elements(2, 8, 3), pd_elements(2, 8, 3), st.integers(-3, 3), st.integers(-3, 3))
def test_gamma_is_a_ring_map(f, g, m1, m2):
    gam = GammaElement.from_gamma(ChartParams(d=2, r=0), [m1, m2])
    lhs = gamma_act_pd(gam, pd_mul(f, g), R)
    rhs = pd_mul(gamma_act_pd(gam, f, R), gamma_act_pd(gam, g, R))
    assert lhs.eq_mod(rhs)


@pytest.mark.parametrize("d,D", [(1, 0), (1, 6), (1, 12), (2, 5), (2, 12)])
def test_truncated_poincare_lemma(d, D):
    C = higgs_complex_on_pd(R, d, D)
    assert C.square_zero()
    prof = poincare_defect(R, d, D)
    h0 = prof.degree(0)
    assert (h0.free, h0.torsion, h0.length) == (1, [], R.N)
    assert all(p.is_zero() for p in prof.degrees[1:])


def test_truncated_complex_ranks():
    C = higgs_complex_on_pd(R, 2, 12)
    assert C.ranks == [math.comb(14, 2), 2 * math.comb(13, 2), math.comb(12, 2)]

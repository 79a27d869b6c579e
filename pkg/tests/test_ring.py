import math

import pytest
from hypothesis import given, strategies as st

from conftest import elements
from simpson_lab.errors import InvalidInput, NotDivisible
from simpson_lab.ring import CyclotomicParams, RingElt, digit_sum, ring_for, vp_factorial, vp_int

R = ring_for(3, 1, 8, 2)
R9 = ring_for(3, 2, 4, 1)


@pytest.mark.parametrize("ring", [R, R9])
def test_zeta_has_order_p_power(ring):
    z = ring.zeta()
    assert (z ** (ring.p ** ring.n)).eq_mod(ring.one)
    assert not (z ** (ring.p ** (ring.n - 1))).eq_mod(ring.one)


def test_uniformizer_valuations(R):
    assert R.uniformizer().vpi() == 1
    assert R.rho_K().vpi() == 1
    assert R.c().vpi() == 2
    assert R.from_int(3).vpi() == R.phi
    assert R9.rho_K().vpi() == R9.p ** (R9.n - 1)


def test_c_closed_form_at_p3(R):
    # (zeta_3 - 1)^2 = -3 zeta_3
    assert R.c().eq_mod(R.from_int(-3) * R.zeta())


def test_legendre_formula():
    for m in range(60):
        assert vp_factorial(m, 3) == vp_int(math.factorial(m), 3)
        assert vp_factorial(m, 3) == (m - digit_sum(m, 3)) // 2


@given(elements(R), elements(R), elements(R))
def test_ring_axioms(a, b, c):
    assert (a + b).eq_mod(b + a)
    assert (a * b).eq_mod(b * a)
    assert ((a * b) * c).eq_mod(a * (b * c))
    assert (a * (b + c)).eq_mod(a * b + a * c)
    assert (a - a).is_zero()
    assert (a * R.one).eq_mod(a)


@given(elements(R), elements(R))
def test_valuation_is_additive(a, b):
    va, vb = a.vpi(), b.vpi()
    if va is None or vb is None or va + vb >= R.N:
        return
    assert (a * b).vpi() == va + vb


@given(elements(R))
def test_units_invert(a):
    if a.is_unit():
        assert (a * a.inverse()).eq_mod(R.one)


@given(elements(R), st.integers(0, 5))
def test_exact_division_by_uniformizer_powers(a, k):
    x = a * R.pi_power(k)
    if x.is_zero():
        return
    q = x.exact_div(R.pi_power(k))
    assert (q * R.pi_power(k)).eq_mod(x)


def test_exact_division_rejects_non_multiples(R):
    with pytest.raises(NotDivisible):
        R.one.exact_div(R.uniformizer())


def test_json_round_trip(R):
    x = R.elt([5, 7])
    assert RingElt.from_json(R, x.to_json()).eq_mod(x)
    assert RingElt.from_json(R, 4).eq_mod(R.from_int(4))


@pytest.mark.parametrize("bad", [dict(p=4), dict(p=2), dict(e=0), dict(g=8), dict(n=0)])
def test_invalid_parameters(bad):
    with pytest.raises(InvalidInput):
        CyclotomicParams(**bad)


def test_pd_powers_of_zeta_minus_one_are_integral(R):
    # (zeta_p - 1)^[m] = (zeta_p - 1)^m / m! has valuation m - (p - 1) v_p(m!) >= 0
    for m in range(12):
        x = R.pd_power_zeta(m)
        v = x.vpi()
        assert v is None or v >= m - (R.p - 1) * vp_factorial(m, R.p) or v >= R.N - R.g * R.phi

import random

import pytest
from hypothesis import given, strategies as st

from simpson_lab.chart import Chart, ChartParams, GammaElement
from simpson_lab.cohomology import cohomology_profile
from simpson_lab.errors import InvalidInput
from simpson_lab.extension import (FaltingsExtElt, derive_period_algebra, ext_gamma_act, ext_projection,
                                   ext_ses_check, logdiff_gamma, project_to_period, random_ext, random_gamma,
                                   random_split_surjection, splitting_obstruction, sz_complex, sz_exactness_check)
from simpson_lab.pd import PdElement
from simpson_lab.ring import ring_for

R = ring_for(3, 1, 8, 2)
CHARTS = [Chart(ChartParams(d=d, r=r), R) for d, r in [(1, 0), (1, 1), (2, 0), (2, 1)]]


@pytest.mark.parametrize("chart", CHARTS, ids=lambda c: f"d{c.d}r{c.r}")
def test_faltings_extension_sequence(chart):
    rep = ext_ses_check(chart, samples=15, seed=chart.d * 10 + chart.r)
    assert rep.ok


@given(st.integers(0, 2**31), st.sampled_from(CHARTS))
def test_extension_action_law_and_equivariance(seed, chart):
    rng = random.Random(seed)
    x = random_ext(chart, rng)
    g, h = random_gamma(chart.params, rng), random_gamma(chart.params, rng)
    assert ext_gamma_act(g * h, x).eq_mod(ext_gamma_act(g, ext_gamma_act(h, x)))
    assert ext_projection(ext_gamma_act(g, x)).eq_mod(logdiff_gamma(g, ext_projection(x)))


@pytest.mark.parametrize("chart", CHARTS, ids=lambda c: f"d{c.d}r{c.r}")
def test_splitting_obstruction_is_zeta_minus_one(chart):
    # gamma_j y_j = y_j + rho_K e survives in the alpha = 0 component
    for o in splitting_obstruction(chart):
        assert o.eq_mod(R.rho_K())


def test_generator_moves_y_by_rho_e():
    chart = CHARTS[0]
    g = chart.gamma_gen(1)
    y = FaltingsExtElt.y(chart, 1)
    diff = (ext_gamma_act(g, y) - y).reduced()
    assert diff.eq_mod(FaltingsExtElt.e(chart).scale(R.rho_K()).reduced())


@pytest.mark.parametrize("m", [1, 2, 3])
@pytest.mark.parametrize("f", [1, 2, 3])
def test_sz_sequences_exact(m, f):
    for g in range(f + 1):
        rep = sz_exactness_check(R, m, f, g, seed=m * 100 + f * 10 + g)
        assert rep.square_zero and rep.exact


def test_sz_euler_length_vanishes():
    v, U = random_split_surjection(R, 3, 1, random.Random(0))
    C = sz_complex(R, v, U, 2)
    assert cohomology_profile(C).euler_length() == 0


def test_sz_rejects_out_of_range():
    with pytest.raises(InvalidInput):
        sz_exactness_check(R, 4, 1, 0)


def test_e_maps_to_zeta_minus_one():
    e = PdElement.monomial(2, 4, (1, 0), R.one)
    assert project_to_period(R, e).eq_mod(PdElement.const(1, 4, R.rho_K()))


@pytest.mark.parametrize("d,D,r", [(1, 6, 0), (1, 4, 1), (2, 4, 1)])
def test_period_algebra(d, D, r):
    assert derive_period_algebra(R, d, D, r=r, samples=5, seed=d + D).ok

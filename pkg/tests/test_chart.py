import random

import pytest
from hypothesis import given, strategies as st

from simpson_lab.chart import Chart, ChartParams, GammaElement, gamma_act, perf_indices
from simpson_lab.errors import FractionalPowerUnsupported, InvalidInput
from simpson_lab.extension import random_perf
from simpson_lab.ring import ring_for

R = ring_for(3, 1, 8, 2)
CHART = Chart(ChartParams(d=2, r=1), R)


def gammas(params):
    ints = st.integers(-4, 4)
    return st.lists(ints, min_size=params.d, max_size=params.d).map(lambda m: GammaElement.from_gamma(params, m))


def perfs(chart):
    return st.integers(0, 2**32).map(lambda s: random_perf(chart, random.Random(s)))


def test_semistable_relation_normalizes():
    # T_0 T_1 = p^a on the chart with r = 1
    lhs = CHART.T(0) * CHART.T(1)
    assert lhs.eq_mod(CHART.const(3))


def test_perf_index_rejects_outside_j_r():
    with pytest.raises(InvalidInput):
        CHART.perf((1, 1, 0))
    assert CHART.perf((0, 1, 2)) is not None


def test_perf_indices_enumerates_j_r():
    idx = list(perf_indices(CHART))
    assert len(idx) == 27 - 4 * 3
    assert all(not (a[0] and a[1]) for a in idx)


def test_gamma_element_validates_relation():
    with pytest.raises(InvalidInput):
        GammaElement(CHART.params, (1, 0, 0))


@given(gammas(CHART.params), gammas(CHART.params), perfs(CHART))
def test_gamma_action_is_a_group_action(g, h, x):
    assert gamma_act(g * h, x).eq_mod(gamma_act(g, gamma_act(h, x)))
    assert gamma_act(g.inverse(), gamma_act(g, x)).eq_mod(x)


CHART0 = Chart(ChartParams(d=2, r=0), R)


@given(gammas(CHART0.params), perfs(CHART0), perfs(CHART0))
def test_gamma_action_is_multiplicative(g, x, y):
    assert gamma_act(g, x * y).eq_mod(gamma_act(g, x) * gamma_act(g, y))
    assert gamma_act(g, x + y).eq_mod(gamma_act(g, x) + gamma_act(g, y))


def test_generator_scales_component_by_root_of_unity():
    g = CHART.gamma_gen(2)
    x = CHART.perf((0, 0, 1))
    assert gamma_act(g, x).eq_mod(x * R.zeta())
    assert gamma_act(g, CHART.perf((0, 0, 0), 5)).eq_mod(CHART.perf((0, 0, 0), 5))


def test_fractional_power_of_p_is_rejected():
    # T_0^(1/3) T_1^(1/3) = p^(1/3)
    with pytest.raises(FractionalPowerUnsupported):
        CHART.perf((1, 0, 0)) * CHART.perf((0, 1, 0))

import itertools
import math
import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import make_higgs
from simpson_lab.cohomology import (FreeComplex, cohomology_profile, cone_exponent, cone_torsion_check, decalage,
                                    h0_identification, h1_scaling_check, higgs_de_rham, koszul, torsion_check,
                                    twist_eta_check)
from simpson_lab.errors import InvalidInput, NonCommuting
from simpson_lab.higgs import twist
from simpson_lab.linalg import Mat
from simpson_lab.ring import ring_for

R = ring_for(3, 1, 8, 2)
TINY = ring_for(3, 1, 2, 0)
ELEMENTS = [TINY.elt([a, b]) for a in range(TINY.q) for b in range(TINY.q)]


def brute_log_size(rows, ncols) -> int:
    """log_p of the kernel size of a matrix given by its rows, over TINY."""
    count = 0
    for x in itertools.product(ELEMENTS, repeat=ncols):
        if all(sum((a * b for a, b in zip(r, x)), TINY.zero).is_zero() for r in rows):
            count += 1
    return round(math.log(count, TINY.p))


@settings(max_examples=12)
@given(st.tuples(*[st.integers(0, TINY.q - 1)] * 4))
def test_profile_lengths_match_brute_force(c):
    # Koszul complex of two scalars a, b on W: W -> W^2 -> W
    a, b = TINY.elt([c[0], c[1]]), TINY.elt([c[2], c[3]])
    C = koszul([Mat.from_elts(TINY, [[a]]), Mat.from_elts(TINY, [[b]])])
    prof = cohomology_profile(C)
    ker0 = brute_log_size([[a], [b]], 1)
    im0 = TINY.N - ker0
    ker1 = brute_log_size([[-b, a]], 2)
    im1 = 2 * TINY.N - ker1
    assert prof.degree(0).length == ker0
    assert prof.degree(1).length == ker1 - im0
    assert prof.degree(2).length == TINY.N - im1
    assert prof.euler_length() == 0


def test_koszul_square_zero_and_rejects_non_commuting():
    H = make_higgs(R, 2, 2, 3)
    C = higgs_de_rham(H)
    assert C.square_zero()
    a = Mat.from_elts(R, [[0, 1], [0, 0]])
    with pytest.raises(NonCommuting):
        koszul([a, a.T])


def test_free_complex_json_round_trip():
    C = higgs_de_rham(make_higgs(R, 2, 1, 4))
    back = FreeComplex.from_json(R, C.to_json())
    assert back.ranks == C.ranks
    assert all(x.eq_mod(y) for x, y in zip(back.diffs, C.diffs))
    with pytest.raises(InvalidInput):
        FreeComplex(R, [1, 2], [Mat.zeros(R, 1, 1)])


def test_euler_characteristic_of_de_rham_complex():
    C = higgs_de_rham(make_higgs(R, 2, 2, 5))
    assert cohomology_profile(C).euler_length() == sum((-1) ** q * r for q, r in enumerate(C.ranks)) * R.N


def test_decalage_by_unit_is_identity():
    C = higgs_de_rham(make_higgs(R, 2, 2, 6))
    E = decalage(C, R.one).complex
    assert E.ranks == C.ranks
    assert cohomology_profile(E).to_json() == cohomology_profile(C).to_json()


@pytest.mark.parametrize("d,rank,seed", [(1, 1, 1), (1, 2, 2), (2, 1, 3), (2, 2, 4)])
def test_twist_eta_isomorphism(d, rank, seed):
    assert twist_eta_check(make_higgs(R, d, rank, seed)).ok


def test_decalage_recovers_untwisted_profile():
    H = make_higgs(R, 2, 2, 7)
    E = decalage(higgs_de_rham(twist(H, "twist")), R.rho_K()).complex
    assert cohomology_profile(E).to_json()["degrees"] == cohomology_profile(higgs_de_rham(H)).to_json()["degrees"]


def test_h0_identification_and_torsion_small_instance():
    H = make_higgs(R, 1, 1, 8, min_vpi=2)
    assert h0_identification(H, 12).ok
    assert torsion_check(H, 12).ok


def test_h1_comparison_small_instance():
    rep = h1_scaling_check(make_higgs(R, 1, 2, 9), samples=10, D=12, rng=random.Random(0))
    assert rep.ok


@pytest.mark.parametrize("d", [1, 2])
def test_cone_bound(d):
    rep = cone_torsion_check(make_higgs(R, d, 2, 10 + d))
    assert rep.bound == cone_exponent(d) == max(d + 1, 2 * (d - 1))
    assert rep.ok


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_h0_lifted_cocycles_match_closed_form_at_valuation_one(seed):
    # truncating exp(sum theta_i Y_i) at pd-degree D leaves an error of valuation about D + 1,
    # which lifted cocycles absorb even when the exact kernel does not
    rep = h0_identification(make_higgs(R, 1, 1, seed, min_vpi=1), 12)
    assert rep.lifted_agrees

import json
import random

import pytest
from hypothesis import given, strategies as st

from conftest import make_higgs
from simpson_lab.errors import InvalidInput, NonCommuting
from simpson_lab.higgs import mat_eq_mod, rep_from_higgs
from simpson_lab.instances import digest, higgs_to_json, instance_from_json, load_instance, rep_to_json
from simpson_lab.ring import ring_for

R = ring_for(3, 1, 8, 2)


@given(st.integers(0, 2**31), st.integers(1, 2), st.integers(1, 2))
def test_higgs_json_round_trip(seed, d, rank):
    H = make_higgs(R, d, rank, seed)
    obj = json.loads(json.dumps(higgs_to_json(H)))
    inst = instance_from_json(obj)
    assert inst.kind == "higgs"
    assert all(mat_eq_mod(a, b) for a, b in zip(H.theta, inst.value.theta))
    assert inst.digest == digest(higgs_to_json(H))


def test_rep_json_round_trip():
    M = rep_from_higgs(make_higgs(R, 2, 2, 1))
    inst = instance_from_json(rep_to_json(M))
    assert inst.kind == "rep"
    assert all(mat_eq_mod(a, b) for a, b in zip(M.A, inst.value.A))


def test_generator_is_deterministic():
    a = higgs_to_json(make_higgs(R, 2, 2, 42))
    b = higgs_to_json(make_higgs(R, 2, 2, 42))
    assert digest(a) == digest(b)
    assert digest(a) != digest(higgs_to_json(make_higgs(R, 2, 2, 43)))


def test_digest_ignores_key_order():
    assert digest({"a": 1, "b": [2]}) == digest({"b": [2], "a": 1})


@pytest.mark.parametrize("obj", [
    [],
    {"rank": 1},
    {"rank": 0, "theta": []},
    {"rank": 2, "chart": {"d": 1}, "theta": [[[0]]]},
    {"rank": 1, "chart": {"d": 1}, "theta": [[["x"]]]},
    {"rank": 1, "chart": {"d": 2}, "theta": [[[0]]]},
    {"ring": {"p": 4, "e": 8}, "rank": 1, "theta": [[[0]]]},
])
def test_malformed_instances_rejected(obj):
    with pytest.raises(InvalidInput):
        instance_from_json(obj)


def test_non_commuting_instance_rejected():
    obj = {"rank": 2, "chart": {"d": 2}, "theta": [[[0, 3], [0, 0]], [[0, 0], [3, 0]]]}
    with pytest.raises(NonCommuting):
        instance_from_json(obj)


def test_load_instance_bad_file(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{not json", encoding="utf-8")
    with pytest.raises(InvalidInput):
        load_instance(str(p))

import pytest

from simpson_lab.errors import InvalidInput
from simpson_lab.ring import CyclotomicParams
from simpson_lab.suites import SUITES, SuiteConfig, run_suite


def test_reports_are_byte_deterministic():
    cfg = SuiteConfig("correspondence", d=1, rank=1, instances=5, seed=3)
    assert run_suite(cfg).render() == run_suite(cfg).render()


def test_seed_changes_instances():
    a = run_suite(SuiteConfig("twist-eta", instances=4, seed=1))
    b = run_suite(SuiteConfig("twist-eta", instances=4, seed=2))
    assert [r.instance for r in a.results] != [r.instance for r in b.results]


def test_results_sorted_by_digest():
    rep = run_suite(SuiteConfig("cone-bound", instances=2))
    keys = [(r.instance, r.property) for r in rep.results]
    assert keys == sorted(keys)


@pytest.mark.parametrize("kwargs", [
    dict(suite="nope"), dict(suite="sz", d=3), dict(suite="sz", rank=0), dict(suite="sz", D=99),
    dict(suite="sz", d=1, r=2), dict(suite="sz", a=0), dict(suite="sz", fmt="xml"),
])
def test_config_validation(kwargs):
    with pytest.raises(InvalidInput):
        SuiteConfig(**kwargs)


@pytest.mark.parametrize("suite", ["poincare", "sz", "extension", "hitchin-locus"])
def test_fast_suites_pass(suite):
    rep = run_suite(SuiteConfig(suite))
    assert rep.exit_code == 0, [r.to_json() for r in rep.results if r.status != "pass"]


def test_hitchin_suite_reports_negative_fixtures():
    rep = run_suite(SuiteConfig("hitchin-locus", instances=1))
    neg = [r for r in rep.results if r.property == "negative-fixture-rejected"]
    assert len(neg) == 2
    assert all(r.status == "pass" and r.detail["in_locus"] is False for r in neg)


def test_text_render_has_one_line_per_result():
    rep = run_suite(SuiteConfig("sz", fmt="text"))
    assert len(rep.render().splitlines()) == 1 + len(rep.results)


def test_audit_records_precision_floor():
    rep = run_suite(SuiteConfig("poincare", ring=CyclotomicParams(3, 1, 6, 1)))
    assert rep.audit["comparison_modulus"] == "p^5"
    assert rep.audit["trusted_uniformizer_exponent"] == 10


def test_suite_names():
    assert set(SUITES) == {"poincare", "sz", "extension", "correspondence", "decompletion", "twist-eta",
                           "h1-comparison", "cone-bound", "hitchin-locus"}

import json

import pytest

from pmx.verify import (DEFAULT_SUITE, REGISTRY, CheckError, CheckSpec, corrupted_f,
                        expected_codim, revalidate, run_check, run_suite, suite_json, summary)

GB_HEAVY = ["n4-reduced", "n4-linked", "n4-fgen", "n4-colon", "qminors", "min-primes"]


def test_registry_covers_all_named_checks():
    assert set(REGISTRY) == {
        "p2-ci", "p2-prime", "p2-normal", "muir", "duality", "q-codim", "min-primes",
        "height-bound", "qminors", "n4-reduced", "n4-linked", "n4-fgen", "n4-colon",
        "witnesses", "multigrade", "strata", "conj-explore"}
    assert all(s.name in REGISTRY for s in DEFAULT_SUITE)


def test_examples():
    assert run_check(CheckSpec.make("n4-reduced", field="Fp:32003")).status == "pass"
    r = run_check(CheckSpec.make("p2-ci", n=3))
    assert r.status == "pass" and r.witnesses[0]["codim"] == 3
    r = run_check(CheckSpec.make("height-bound", n=4, t=3))
    assert r.status == "pass" and r.witnesses[0] == {"codim": 4, "bound": 4}


def test_reports_are_deterministic_json():
    spec = CheckSpec.make("min-primes")
    a, b = run_check(spec).to_json(), run_check(spec).to_json()
    assert a == b
    doc = json.loads(a)
    assert set(doc) == {"check", "params", "status", "witnesses", "elapsed_ms", "seed", "field"}
    assert doc["elapsed_ms"] is None
    assert isinstance(run_check(spec, timing=True).elapsed_ms, int)


def test_invalid_specs():
    with pytest.raises(CheckError):
        run_check(CheckSpec.make("nope"))
    with pytest.raises(CheckError):
        run_check(CheckSpec.make("p2-ci", n=9))
    with pytest.raises(CheckError):
        run_check(CheckSpec.make("p2-ci", bogus=1))
    with pytest.raises(CheckError):
        run_check(CheckSpec.make("p2-ci", field="Fp:4"))
    with pytest.raises(CheckError):
        run_suite([])


def test_tiny_budget_skips_gb_checks():
    reports, code = run_suite([CheckSpec.make(c) for c in GB_HEAVY], {"budget_pairs": 1})
    assert code == 0
    for r in reports:
        assert r.status == "skip"
        assert r.witnesses[0]["budget"] == "pairs"


def test_mutation_is_caught_with_witness():
    bad = corrupted_f()
    reports, code = run_suite([CheckSpec.make("n4-fgen", f=bad), CheckSpec.make("muir", n=3)])
    assert code == 1
    fgen = reports[0]
    assert fgen.status == "fail" and fgen.witnesses
    assert revalidate(fgen)
    colon = run_check(CheckSpec.make("n4-colon", f=bad))
    assert colon.status == "fail" and revalidate(colon)


def test_witnesses_revalidate_on_pass_data():
    r = run_check(CheckSpec.make("min-primes"))
    assert r.status == "pass"
    assert revalidate(r)


def test_conj_explore_is_quarantined():
    r = run_check(CheckSpec.make("conj-explore", n=3, budget_seconds=30))
    assert r.status == "inconclusive"
    assert r.witnesses[0]["equals_P"] is True
    r = run_check(CheckSpec.make("conj-explore", n=5, budget_seconds=1))
    assert r.status == "inconclusive" and "budget" in r.witnesses[0]


def test_strata_check():
    r = run_check(CheckSpec.make("strata", n=3, t=2, samples=10**6, seed=1))
    assert r.status == "pass" and r.field == "Fp:101"
    r = run_check(CheckSpec.make("strata", n=4, t=3, samples=100))
    assert r.status == "inconclusive"
    assert expected_codim(4, 2) == 6 and expected_codim(4, 3) == 4
    with pytest.raises(CheckError):
        run_check(CheckSpec.make("strata", n=6, t=2))


@pytest.mark.parametrize("name,params", [("p2-ci", {"n": 4}), ("p2-prime", {"n": 3}),
                                         ("q-codim", {"n": 3}), ("p2-normal", {"n": 3})])
def test_characteristic_sweep_verdicts(name, params):
    verdicts = {run_check(CheckSpec.make(name, field=f, **params)).status
                for f in ("Fp:2", "Fp:3", "Fp:5", "Fp:32003", "Q")}
    assert verdicts == {"pass"}


def test_parallel_suite_matches_sequential():
    specs = [CheckSpec.make("p2-ci", n=n) for n in (2, 3)] + [CheckSpec.make("witnesses", n=4)]
    a, _ = run_suite(specs)
    b, _ = run_suite(specs, jobs=2)
    assert suite_json(a) == suite_json(b)
    assert summary(a)["pass"] == 3

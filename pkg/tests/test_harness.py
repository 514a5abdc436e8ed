import random

import pytest

from helpers import P
from needlab.harness import (
    INCONCLUSIVE, NO, YES, ZOO, Agree, CorpusSpec, Counterexample, check_equivalences,
    check_observational, enumerate_contexts, generate_corpus, random_derivation, random_term,
    run_equivalences,
)
from needlab.syntax import Abs, App, Hole, Var, free_vars, parse
from needlab.typesys import validate


class TestCorpus:
    def test_zoo_only(self):
        assert generate_corpus(CorpusSpec(seed=1, count=0, include_zoo=True)) == list(ZOO.values())

    def test_deterministic(self):
        spec = CorpusSpec(seed=1, count=200)
        assert [str(t) for t in generate_corpus(spec)] == [str(t) for t in generate_corpus(spec)]

    def test_seed_matters(self):
        a = generate_corpus(CorpusSpec(seed=1, count=50, include_zoo=False))
        b = generate_corpus(CorpusSpec(seed=2, count=50, include_zoo=False))
        assert a != b

    def test_closed_and_bounded(self):
        out = generate_corpus(CorpusSpec(seed=1, max_size=5, count=300, closed_only=True, include_zoo=False))
        assert len(out) == 300
        assert all(not free_vars(t) and t.size <= 5 for t in out)

    def test_zoo_terms_are_closed(self):
        out = generate_corpus(CorpusSpec(seed=1, max_size=5, count=50, closed_only=True))
        assert all(not free_vars(t) for t in out)

    def test_random_term_size(self):
        rng = random.Random(4)
        for n in range(1, 15):
            assert random_term(rng, n).size == n

    def test_from_json(self):
        spec = CorpusSpec.from_json({"seed": 7, "count": 3, "unknown": 1})
        assert spec.seed == 7 and spec.count == 3 and spec.max_size == 14


class TestEquivalences:
    def test_kio(self):
        row = check_equivalences(P("K I Omega"), 100)
        assert set(row.verdicts().values()) == {YES} and row.mismatches == []

    def test_omega(self):
        row = check_equivalences(P("Omega"), 100)
        assert set(row.verdicts().values()) == {NO} and row.mismatches == []

    def test_lam_omega(self):
        row = check_equivalences(P("\\x. Omega"), 100)
        assert set(row.verdicts().values()) == {YES}

    def test_open_term(self):
        row = check_equivalences(P("x Omega"), 100)
        assert set(row.verdicts().values()) == {YES}

    def test_escalation_rescues_low_fuel(self):
        # name needs 2 steps, need needs more; escalation settles it
        row = check_equivalences(P("(\\x1. I (x1 I)) (\\y. I y)"), 1)
        assert row.mismatches == []

    def test_report(self):
        rep = run_equivalences([P("I"), P("Omega")], 50)
        assert rep["terms"] == 2 and rep["mismatch_count"] == 0
        assert set(rep["rows"][0]) == {"term", "typable", "wn_name", "wn_whnd", "wn_need", "mismatches"}

    def test_verdict_names(self):
        assert (YES, NO, INCONCLUSIVE) == ("yes", "no-within-fuel", "inconclusive")


class TestObservational:
    def test_contexts(self):
        ctxs = list(enumerate_contexts(1, pool=[parse("x")], binders=("x",)))
        assert [str(c) for c in ctxs] == ["□", "□ x", "x □", "\\x. □"]

    def test_alpha_equal(self):
        assert isinstance(check_observational(P("I"), parse("\\x. x"), 2, 50), Agree)

    def test_separated_by_hole(self):
        out = check_observational(P("I"), P("Omega"), 2, 50)
        assert isinstance(out, Counterexample) and out.context == Hole()

    def test_renamed_omega(self):
        omega2 = parse("(\\w. w w)(\\v. v v)")
        assert omega2 == P("Omega")
        out = check_observational(P("\\x. x Omega"), Abs("x", App(Var("x"), omega2)), 2, 60)
        assert isinstance(out, Agree) and out.contexts_checked == 157


@pytest.mark.parametrize("seed", range(10))
def test_random_derivations_validate(seed):
    d = random_derivation(random.Random(seed))
    validate(d)

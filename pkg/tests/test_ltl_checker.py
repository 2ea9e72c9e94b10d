import random
from fractions import Fraction

import pytest

from lhamc.core import ModelError
from lhamc.ltl import (
    Counterexample,
    CounterexampleStep,
    model_check,
    parse_formula,
    validate_counterexample,
)
from oracles import (
    counterexample_letters,
    eval_on_lasso,
    find_violating_lasso,
    make_kripke,
    random_branching_kripke,
    random_formula,
    random_functional_kripke,
)


def check(kripke, text: str):
    return model_check(kripke, parse_formula(text))


def assert_valid(kripke, text: str, ce) -> None:
    assert ce is not None
    f = parse_formula(text)
    assert validate_counterexample(kripke, f, ce)
    prefix, cycle = counterexample_letters(kripke, ce)
    assert not eval_on_lasso(f, prefix, cycle)


class TestHandBuiltStructures:
    def ring(self):
        return make_kripke(
            {0: [1], 1: [2], 2: [0]},
            {0: {"p"}, 1: {"p"}, 2: {"p", "q"}},
            props={"p", "q"},
        )

    def test_invariant_holds_on_ring(self):
        assert check(self.ring(), "[] p") is None

    def test_fairness_holds_on_ring(self):
        assert check(self.ring(), "[] <> q") is None

    def test_false_invariant_yields_witness(self):
        k = self.ring()
        ce = check(k, "[] q")
        assert_valid(k, "[] q", ce)

    def test_escapable_goal_has_avoiding_lasso(self):
        k = make_kripke({0: [0, 1], 1: [1]}, {0: set(), 1: {"p"}}, props={"p"})
        ce = check(k, "<> p")
        assert_valid(k, "<> p", ce)
        assert [s.text for s in ce.cycle] == ["s0"]

    def test_until_counterexample(self):
        k = make_kripke(
            {0: [1], 1: [2], 2: [2]},
            {0: {"p"}, 1: set(), 2: {"q"}},
            props={"p", "q"},
        )
        ce = check(k, "p U q")
        assert_valid(k, "p U q", ce)

    def test_next_operator(self):
        k = make_kripke({0: [1], 1: [0]}, {0: {"p"}, 1: set()}, props={"p"})
        assert check(k, "X ~ p") is None
        ce = check(k, "X p")
        assert_valid(k, "X p", ce)

    def test_branching_picks_some_bad_path(self):
        k = make_kripke(
            {0: [1, 2], 1: [1], 2: [2]},
            {0: set(), 1: {"good"}, 2: set()},
            props={"good"},
        )
        ce = check(k, "<> good")
        assert_valid(k, "<> good", ce)
        assert all(s.text != "s1" for s in ce.prefix + ce.cycle)

    def test_unknown_proposition_is_rejected(self):
        with pytest.raises(ModelError):
            check(self.ring(), "[] unheard-of")


class TestReservoirKripke:
    def test_one_down_is_eventually_inevitable(self, init2_kripke):
        assert check(init2_kripke, "[] <> one-down") is None

    def test_negation_produces_validating_counterexample(self, init2_kripke):
        ce = check(init2_kripke, "~ [] <> one-down")
        assert_valid(init2_kripke, "~ [] <> one-down", ce)

    def test_macondo_never_recurs_forever(self, init2_kripke):
        assert check(init2_kripke, "~ [] <> macondo") is None

    def test_eventually_one_down_holds(self, init2_kripke):
        assert check(init2_kripke, "<> one-down") is None

    def test_always_macondo_fails_immediately(self, init2_kripke):
        ce = check(init2_kripke, "[] macondo")
        assert_valid(init2_kripke, "[] macondo", ce)


def mk_step(text: str, label: str) -> CounterexampleStep:
    return CounterexampleStep(text=text, elapsed=Fraction(0), label=label)


class TestValidation:
    """Replay checking on a fixed structure with a hand-written lasso."""

    def structure(self):
        return make_kripke(
            {0: [1], 1: [2], 2: [1]},
            {0: {"p"}, 1: set(), 2: {"p"}},
            props={"p"},
        )

    def genuine(self) -> Counterexample:
        return Counterexample(
            prefix=[mk_step("s0", "e0-1")],
            cycle=[mk_step("s1", "e1-2"), mk_step("s2", "e2-1")],
        )

    def test_hand_written_lasso_validates(self):
        assert validate_counterexample(self.structure(), parse_formula("[] p"), self.genuine())

    def test_checker_output_validates(self):
        k = self.structure()
        ce = check(k, "[] p")
        assert_valid(k, "[] p", ce)

    def test_wrong_start_rejected(self):
        ce = Counterexample(prefix=[], cycle=self.genuine().cycle)
        assert not validate_counterexample(self.structure(), parse_formula("[] p"), ce)

    def test_wrong_label_rejected(self):
        ce = Counterexample(prefix=[mk_step("s0", "e0-2")], cycle=self.genuine().cycle)
        assert not validate_counterexample(self.structure(), parse_formula("[] p"), ce)

    def test_missing_wrap_edge_rejected(self):
        ce = Counterexample(prefix=[mk_step("s0", "e0-1")], cycle=[mk_step("s1", "e1-2")])
        assert not validate_counterexample(self.structure(), parse_formula("[] p"), ce)

    def test_unknown_state_rejected(self):
        ce = Counterexample(prefix=[], cycle=[mk_step("nowhere", "e0-1")])
        assert not validate_counterexample(self.structure(), parse_formula("[] p"), ce)

    def test_wrong_elapsed_rejected(self):
        off = CounterexampleStep(text="s0", elapsed=Fraction(1), label="e0-1")
        ce = Counterexample(prefix=[off], cycle=self.genuine().cycle)
        assert not validate_counterexample(self.structure(), parse_formula("[] p"), ce)

    def test_non_violating_trace_rejected(self):
        ce = self.genuine()
        assert not validate_counterexample(self.structure(), parse_formula("<> ~ p"), ce)

    def test_empty_cycle_rejected(self):
        ce = Counterexample(prefix=self.genuine().steps(), cycle=[])
        assert not validate_counterexample(self.structure(), parse_formula("[] p"), ce)

    def test_unknown_prop_in_validation_rejected(self):
        with pytest.raises(ModelError):
            validate_counterexample(self.structure(), parse_formula("[] zz"), self.genuine())


class TestAgainstOracles:
    def run_agreement(self, kripke, formula) -> None:
        ce = model_check(kripke, formula)
        if ce is None:
            assert find_violating_lasso(kripke, formula) is None
        else:
            assert validate_counterexample(kripke, formula, ce)
            prefix, cycle = counterexample_letters(kripke, ce)
            assert not eval_on_lasso(formula, prefix, cycle)

    def test_functional_kripkes(self):
        rng = random.Random(555)
        for _ in range(150):
            k = random_functional_kripke(rng, rng.randint(1, 6))
            f = random_formula(rng, temporal_budget=2)
            self.run_agreement(k, f)

    def test_branching_kripkes(self):
        rng = random.Random(556)
        for _ in range(100):
            k = random_branching_kripke(rng, rng.randint(2, 4))
            f = random_formula(rng, temporal_budget=2)
            self.run_agreement(k, f)

from fractions import Fraction

import pytest

from lhamc.core import ModelError
from lhamc.explore import STUTTER, TICK
from lhamc.ltl import (
    Counterexample,
    CounterexampleStep,
    model_check,
    parse_formula,
    validate_counterexample,
)
from lhamc.syncprod import (
    Component,
    abstract_reservoir,
    compatible,
    component_from_json,
    component_kripke,
    component_to_json,
    render_component_state,
    rt_sync_product,
    safe_prop,
    sync_product,
)


def reservoir_pair():
    return rt_sync_product(abstract_reservoir(1), abstract_reservoir(2))


class TestRendering:
    def test_flat_state(self):
        assert render_component_state("ok") == "ok"

    def test_pair(self):
        assert render_component_state(("ok", "below")) == "< ok,below >"

    def test_nested(self):
        assert render_component_state((("a", "b"), "c")) == "< < a,b >,c >"


class TestComponent:
    def test_abstract_reservoir_shape(self):
        r = abstract_reservoir(3)
        assert r.states == ("ok", "below")
        assert r.initial_state() == "ok"
        assert r.rules == (("fill3", "below", "ok"),)
        assert r.props == {"refill3?": frozenset({"below"})}
        assert r.ticks == (("ok", "below", Fraction(1)),)
        assert r.propositions() == frozenset({"refill3?"})

    def test_negative_index_rejected(self):
        with pytest.raises(ModelError):
            abstract_reservoir(-1)

    def test_discrete_successors_sorted(self):
        c = Component(
            states=("a", "b", "c"),
            initial="a",
            rules=(("z", "a", "b"), ("m", "a", "c"), ("m", "a", "b")),
            props={},
        )
        assert c.discrete_successors("a") == [("m", "b"), ("m", "c"), ("z", "b")]

    def test_timed_successor(self):
        r = abstract_reservoir(1)
        assert r.timed_successor("ok", Fraction(0)) == "ok"
        assert r.timed_successor("ok", Fraction(1)) == "below"
        assert r.timed_successor("ok", Fraction(2)) is None
        assert r.timed_successor("below", Fraction(1)) is None

    def test_prop_holds(self):
        r = abstract_reservoir(1)
        assert r.prop_holds("below", "refill1?")
        assert not r.prop_holds("ok", "refill1?")
        with pytest.raises(ModelError):
            r.prop_holds("ok", "refill9?")

    @pytest.mark.parametrize(
        "kwargs",
        [
            dict(states=(), initial="a", rules=(), props={}),
            dict(states=("a", "a"), initial="a", rules=(), props={}),
            dict(states=("a",), initial="b", rules=(), props={}),
            dict(states=("a",), initial="a", rules=(("r", "a", "b"),), props={}),
            dict(states=("a",), initial="a", rules=(), props={"p": ("b",)}),
            dict(states=("a",), initial="a", rules=(), props={"": ("a",)}),
            dict(states=("a", "b"), initial="a", rules=(), props={}, ticks=(("a", "c", Fraction(1)),)),
            dict(states=("a", "b"), initial="a", rules=(), props={}, ticks=(("a", "b", Fraction(0)),)),
            dict(
                states=("a", "b"),
                initial="a",
                rules=(),
                props={},
                ticks=(("a", "b", Fraction(1)), ("a", "a", Fraction(1))),
            ),
        ],
    )
    def test_validation_errors(self, kwargs):
        with pytest.raises(ModelError):
            Component(**kwargs)

    def test_tick_durations_deduplicated_in_order(self):
        c = Component(
            states=("a", "b"),
            initial="a",
            rules=(),
            props={},
            ticks=(("a", "b", Fraction(2)), ("b", "a", Fraction(1)), ("b", "b", Fraction(2))),
        )
        assert c.tick_durations() == [Fraction(2), Fraction(1)]


class TestCompatibility:
    def two_with_shared_prop(self):
        c1 = Component(("u", "v"), "u", (), props={"busy": ("v",)})
        c2 = Component(("x", "y"), "x", (), props={"busy": ("y",), "own": ("x",)})
        return c1, c2

    def test_compatible_agrees_on_shared(self):
        c1, c2 = self.two_with_shared_prop()
        assert compatible(c1, "u", c2, "x")
        assert compatible(c1, "v", c2, "y")
        assert not compatible(c1, "u", c2, "y")
        assert not compatible(c1, "v", c2, "x")

    def test_no_shared_props_always_compatible(self):
        r1, r2 = abstract_reservoir(1), abstract_reservoir(2)
        assert compatible(r1, "ok", r2, "below")

    def test_product_keeps_only_compatible_pairs(self):
        c1, c2 = self.two_with_shared_prop()
        p = sync_product(c1, c2)
        assert p.states == (("u", "x"), ("v", "y"))

    def test_incompatible_initials_rejected(self):
        c1 = Component(("u",), "u", (), props={"busy": ("u",)})
        c2 = Component(("x",), "x", (), props={"busy": ()})
        with pytest.raises(ModelError):
            sync_product(c1, c2)


class TestSyncProduct:
    def test_shared_labels_fire_jointly(self):
        c1 = Component(("a", "b"), "a", (("go", "a", "b"), ("solo1", "b", "a")), props={})
        c2 = Component(("x", "y"), "x", (("go", "x", "y"),), props={})
        p = sync_product(c1, c2)
        assert ("go", ("a", "x"), ("b", "y")) in p.rules
        assert all(not (label == "go" and (s[0], t[0]) == ("a", "a")) for label, s, t in p.rules)
        assert ("solo1", ("b", "x"), ("a", "x")) in p.rules
        assert ("solo1", ("b", "y"), ("a", "y")) in p.rules

    def test_interleaving_respects_compatibility(self):
        c1 = Component(("u", "v"), "u", (("hop", "u", "v"),), props={"busy": ("v",)})
        c2 = Component(("x", "y"), "x", (("mark", "x", "y"),), props={"busy": ("y",)})
        p = sync_product(c1, c2)
        assert p.states == (("u", "x"), ("v", "y"))
        assert p.rules == ()

    def test_prop_union_prefers_left_on_shared(self):
        c1 = Component(("u", "v"), "u", (), props={"busy": ("v",)})
        c2 = Component(("x", "y"), "x", (), props={"busy": ("y",), "own": ("x",)})
        p = sync_product(c1, c2)
        assert p.props["busy"] == frozenset({("v", "y")})
        assert p.props["own"] == frozenset({("u", "x")})

    def test_reservoir_product_structure(self):
        p = reservoir_pair()
        assert p.states == (
            ("ok", "ok"),
            ("ok", "below"),
            ("below", "ok"),
            ("below", "below"),
        )
        assert p.initial_state() == ("ok", "ok")
        assert set(p.rules) == {
            ("fill1", ("below", "ok"), ("ok", "ok")),
            ("fill1", ("below", "below"), ("ok", "below")),
            ("fill2", ("ok", "below"), ("ok", "ok")),
            ("fill2", ("below", "below"), ("below", "ok")),
        }
        assert p.ticks == ((("ok", "ok"), ("below", "below"), Fraction(1)),)

    def test_rt_product_requires_equal_durations(self):
        slow = Component(
            ("a", "b"), "a", (), props={}, ticks=(("a", "b", Fraction(2)),)
        )
        fast = Component(
            ("x", "y"), "x", (), props={}, ticks=(("x", "y", Fraction(1)),)
        )
        p = rt_sync_product(slow, fast)
        assert p.ticks == ()


class TestSafeProp:
    def test_safe_added(self):
        p = safe_prop(reservoir_pair())
        assert p.props["safe"] == frozenset(
            {("ok", "ok"), ("ok", "below"), ("below", "ok")}
        )

    def test_requires_refill_props(self):
        c = Component(("a",), "a", (), props={})
        with pytest.raises(ModelError):
            safe_prop(c)

    def test_rejects_existing_safe(self):
        r = abstract_reservoir(1)
        once = safe_prop(r)
        with pytest.raises(ModelError):
            safe_prop(once)


class TestComponentKripke:
    def test_reservoir_product_kripke(self):
        k = component_kripke(safe_prop(reservoir_pair()))
        assert k.texts == ["< ok,ok >", "< below,below >", "< ok,below >", "< below,ok >"]
        got = {(e.source, e.target, e.label, e.duration) for e in k.edges}
        assert got == {
            (0, 1, TICK, Fraction(1)),
            (1, 2, "fill1", Fraction(0)),
            (1, 3, "fill2", Fraction(0)),
            (2, 0, "fill2", Fraction(0)),
            (3, 0, "fill1", Fraction(0)),
        }
        assert k.labeling[0] == frozenset({"safe"})
        assert k.labeling[1] == frozenset({"refill1?", "refill2?"})
        assert k.labeling[2] == frozenset({"refill2?", "safe"})
        assert k.labeling[3] == frozenset({"refill1?", "safe"})

    def test_deadlock_gets_stutter(self):
        c = Component(("a", "b"), "a", (("go", "a", "b"),), props={"done": ("b",)})
        k = component_kripke(c)
        assert (1, 1, STUTTER) in {(e.source, e.target, e.label) for e in k.edges}

    def test_safety_fails_with_validating_counterexample(self):
        k = component_kripke(safe_prop(reservoir_pair()))
        f = parse_formula("[] safe")
        ce = model_check(k, f)
        assert ce is not None
        assert validate_counterexample(k, f, ce)

    def test_published_refill_lasso_validates(self):
        k = component_kripke(safe_prop(reservoir_pair()))
        f = parse_formula("[] safe")
        steps = [
            CounterexampleStep("< ok,ok >", Fraction(0), TICK),
            CounterexampleStep("< below,below >", Fraction(0), "fill2"),
            CounterexampleStep("< below,ok >", Fraction(0), "fill1"),
        ]
        assert validate_counterexample(k, f, Counterexample(prefix=[], cycle=steps))

    def test_unsafety_is_unavoidable(self):
        k = component_kripke(safe_prop(reservoir_pair()))
        assert model_check(k, parse_formula("<> ~ safe")) is None


class TestJson:
    def test_round_trip(self):
        r = abstract_reservoir(1)
        doc = component_to_json(r)
        assert doc["kind"] == "component"
        back = component_from_json(doc)
        assert back.states == r.states
        assert back.initial == r.initial
        assert back.rules == r.rules
        assert back.props == r.props
        assert back.ticks == r.ticks

    def test_missing_field_rejected(self):
        with pytest.raises(ModelError):
            component_from_json({"states": ["a"]})

    def test_bad_tick_rejected(self):
        doc = component_to_json(abstract_reservoir(1))
        doc["ticks"][0]["duration"] = "1/0"
        with pytest.raises(Exception):
            component_from_json(doc)

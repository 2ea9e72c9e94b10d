"""Synchronous products of labeled transition systems, with optional timing.

Components synchronize on shared rule labels; unshared rules interleave.
Every product state must be compatible: the two sides agree on all shared
propositions.  In the timed variant components also synchronize on ticks of
equal duration.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Any, Iterable, Optional

from .core import (
    ONE,
    ZERO,
    ModelError,
    TimedTransitionSystem,
    as_time,
    check_prop_name,
    parse_rational,
    rational_str,
)
from .explore import STUTTER, TICK, Kripke, KripkeEdge, TimedState

Rule = tuple[str, Any, Any]  # (label, source, target)
Tick = tuple[Any, Any, Fraction]  # (source, target, duration)


def render_component_state(state: Any) -> str:
    if isinstance(state, tuple):
        inner = ",".join(render_component_state(s) for s in state)
        return f"< {inner} >"
    return str(state)


class Component(TimedTransitionSystem):
    """Finite labeled transition system with propositions and optional ticks.

    ``ticks`` lists timed transitions (source, target, duration); at most one
    tick per (source, duration) pair so timed evolution stays deterministic.
    A component with no ticks is simply untimed.
    """

    def __init__(
        self,
        states: Iterable[Any],
        initial: Any,
        rules: Iterable[Rule],
        props: dict[str, Iterable[Any]],
        ticks: Iterable[Tick] = (),
    ):
        self.states = tuple(states)
        if not self.states:
            raise ModelError("a component needs at least one state")
        if len(set(self.states)) != len(self.states):
            raise ModelError("duplicate component states")
        member = set(self.states)
        if initial not in member:
            raise ModelError(f"initial state {initial!r} is not a component state")
        self.initial = initial
        self.rules = tuple((str(l), s, t) for l, s, t in rules)
        for label, s, t in self.rules:
            if s not in member or t not in member:
                raise ModelError(f"rule {label!r} uses unknown states")
        self.props: dict[str, frozenset] = {}
        for name, holds_at in props.items():
            check_prop_name(name)
            holds = frozenset(holds_at)
            if not holds <= member:
                raise ModelError(f"proposition {name!r} marks unknown states")
            self.props[name] = holds
        self.ticks = tuple((s, t, as_time(d)) for s, t, d in ticks)
        seen_ticks = set()
        for s, t, d in self.ticks:
            if s not in member or t not in member:
                raise ModelError("tick uses unknown states")
            if d == 0:
                raise ModelError("tick durations must be positive")
            if (s, d) in seen_ticks:
                raise ModelError(f"two ticks of duration {d} from state {s!r}")
            seen_ticks.add((s, d))

    # model contract

    def initial_state(self) -> Any:
        return self.initial

    def discrete_successors(self, state: Any) -> list[tuple[str, Any]]:
        out = [(label, t) for label, s, t in self.rules if s == state]
        out.sort(key=lambda lt: (lt[0], render_component_state(lt[1])))
        return out

    def timed_successor(self, state: Any, delta: Fraction) -> Any | None:
        delta = as_time(delta)
        if delta == 0:
            return state
        for s, t, d in self.ticks:
            if s == state and d == delta:
                return t
        return None

    def prop_holds(self, state: Any, prop: str) -> bool:
        try:
            return state in self.props[prop]
        except KeyError:
            raise ModelError(f"unknown proposition {prop!r}") from None

    def serialize(self, state: Any) -> str:
        return render_component_state(state)

    def propositions(self) -> frozenset[str]:
        return frozenset(self.props)

    def tick_durations(self) -> list[Fraction]:
        seen = []
        for _, _, d in self.ticks:
            if d not in seen:
                seen.append(d)
        return seen


def compatible(
    c1: Component, s1: Any, c2: Component, s2: Any, shared: Optional[Iterable[str]] = None
) -> bool:
    """Whether the two sides agree on every shared proposition."""
    if shared is None:
        shared = sorted(set(c1.props) & set(c2.props))
    return all(c1.prop_holds(s1, p) == c2.prop_holds(s2, p) for p in shared)


def _product_core(c1: Component, c2: Component) -> tuple[list, Any, list[Rule], dict]:
    shared_props = sorted(set(c1.props) & set(c2.props))
    states = [
        (s1, s2)
        for s1 in c1.states
        for s2 in c2.states
        if compatible(c1, s1, c2, s2, shared_props)
    ]
    initial = (c1.initial, c2.initial)
    if initial not in set(states):
        raise ModelError("the initial states disagree on a shared proposition")

    shared_labels = {l for l, _, _ in c1.rules} & {l for l, _, _ in c2.rules}
    member = set(states)
    rules: list[Rule] = []
    for label, s1, t1 in c1.rules:
        if label in shared_labels:
            for label2, s2, t2 in c2.rules:
                if label2 == label and (s1, s2) in member and (t1, t2) in member:
                    rules.append((label, (s1, s2), (t1, t2)))
        else:
            for s2 in c2.states:
                if (s1, s2) in member and (t1, s2) in member:
                    rules.append((label, (s1, s2), (t1, s2)))
    for label, s2, t2 in c2.rules:
        if label not in shared_labels:
            for s1 in c1.states:
                if (s1, s2) in member and (s1, t2) in member:
                    rules.append((label, (s1, s2), (s1, t2)))

    props: dict[str, list] = {}
    for name, holds in c1.props.items():
        props[name] = [(s1, s2) for s1, s2 in states if s1 in holds]
    for name, holds in c2.props.items():
        if name not in props:
            props[name] = [(s1, s2) for s1, s2 in states if s2 in holds]
    return states, initial, rules, props


def sync_product(c1: Component, c2: Component) -> Component:
    """Untimed synchronous product: joint steps on shared labels, interleaving
    on the rest, all target states compatibility-filtered."""
    states, initial, rules, props = _product_core(c1, c2)
    return Component(states, initial, rules, props)


def rt_sync_product(c1: Component, c2: Component) -> Component:
    """Timed synchronous product: like sync_product, plus joint ticks pairing
    equal durations with compatible endpoints."""
    states, initial, rules, props = _product_core(c1, c2)
    member = set(states)
    ticks: list[Tick] = []
    for s1, t1, d1 in c1.ticks:
        for s2, t2, d2 in c2.ticks:
            if d1 == d2 and (s1, s2) in member and (t1, t2) in member:
                ticks.append(((s1, s2), (t1, t2), d1))
    return Component(states, initial, rules, props, ticks)


def abstract_reservoir(i: int) -> Component:
    """Two-state reservoir abstraction: full enough ("ok") or not ("below").

    One time unit of neglect empties it below the threshold; the fill action
    restores it.  The refill proposition flags the "below" state.
    """
    if i < 0:
        raise ModelError("reservoir index must be nonnegative")
    return Component(
        states=("ok", "below"),
        initial="ok",
        rules=((f"fill{i}", "below", "ok"),),
        props={f"refill{i}?": ("below",)},
        ticks=(("ok", "below", ONE),),
    )


def safe_prop(component: Component) -> Component:
    """Add a derived "safe" proposition: not every refill flag raised."""
    refills = [p for p in component.props if p.startswith("refill") and p.endswith("?")]
    if not refills:
        raise ModelError("no refill propositions to derive safety from")
    if "safe" in component.props:
        raise ModelError("the component already has a proposition named 'safe'")
    refills.sort()
    safe_states = [
        s for s in component.states
        if not all(component.prop_holds(s, p) for p in refills)
    ]
    props: dict[str, Iterable[Any]] = {name: holds for name, holds in component.props.items()}
    props["safe"] = safe_states
    return Component(component.states, component.initial, component.rules, props, component.ticks)


def component_kripke(component: Component) -> Kripke:
    """Kripke structure over the component's reachable states.

    Unlike timed exploration, elapsed time is not part of state identity:
    ticks are ordinary edges annotated with their duration, so runs may loop
    through them.  Deadlocked states get a stutter self-loop.
    """
    initial = component.initial_state()
    order: list[Any] = [initial]
    index: dict[Any, int] = {initial: 0}
    edges: list[KripkeEdge] = []
    pos = 0
    while pos < len(order):
        state = order[pos]
        moves: list[tuple[str, Any, Fraction]] = [
            (label, target, ZERO) for label, target in component.discrete_successors(state)
        ]
        for d in component.tick_durations():
            target = component.timed_successor(state, d)
            if target is not None:
                moves.append((TICK, target, d))
        for label, target, duration in moves:
            j = index.get(target)
            if j is None:
                j = len(order)
                index[target] = j
                order.append(target)
            edges.append(KripkeEdge(pos, j, label, duration))
        pos += 1
    with_out = {e.source for e in edges}
    for i in range(len(order)):
        if i not in with_out:
            edges.append(KripkeEdge(i, i, STUTTER, ZERO))
    states = [TimedState(s, ZERO) for s in order]
    texts = [component.serialize(s) for s in order]
    props = component.propositions()
    labeling = [
        frozenset(p for p in props if component.prop_holds(s, p)) for s in order
    ]
    return Kripke(states, texts, edges, labeling, props)


def component_from_json(doc: dict) -> Component:
    try:
        states = [str(s) for s in doc["states"]]
        initial = str(doc["initial"])
        rules = [
            (str(r["label"]), str(r["source"]), str(r["target"])) for r in doc.get("rules", [])
        ]
        props = {str(name): [str(s) for s in holds] for name, holds in doc.get("props", {}).items()}
        ticks = [
            (str(t["source"]), str(t["target"]), parse_rational(t["duration"]))
            for t in doc.get("ticks", [])
        ]
    except KeyError as missing:
        raise ModelError(f"component document is missing {missing}") from None
    return Component(states, initial, rules, props, ticks)


def component_to_json(component: Component) -> dict:
    return {
        "kind": "component",
        "states": [render_component_state(s) for s in component.states],
        "initial": render_component_state(component.initial),
        "rules": [
            {
                "label": label,
                "source": render_component_state(s),
                "target": render_component_state(t),
            }
            for label, s, t in component.rules
        ],
        "props": {
            name: [render_component_state(s) for s in component.states if s in holds]
            for name, holds in component.props.items()
        },
        "ticks": [
            {
                "source": render_component_state(s),
                "target": render_component_state(t),
                "duration": rational_str(d),
            }
            for s, t, d in component.ticks
        ],
    }

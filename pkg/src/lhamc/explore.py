"""Breadth-first exploration of timed models and Kripke construction.

Time advances in fixed sampling increments and total elapsed time stays
strictly below the given bound.  Every visited configuration is a state
paired with its elapsed time; the canonical state text plus elapsed time is
the dedup key.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Optional

from .core import ZERO, ModelError, TimedTransitionSystem, as_time, rational_str
from .reservoir import NResState, Reservoir

TICK = "tick"
STUTTER = "stutter"

MAX_STATES = 1_000_000


@dataclass(frozen=True)
class TimedState:
    state: Any
    elapsed: Fraction


@dataclass(frozen=True)
class Step:
    label: str
    duration: Fraction
    text: str


@dataclass
class Solution:
    """A state matching the search pattern, with how it was reached."""

    state: Any
    elapsed: Fraction
    text: str
    bindings: dict[str, str]
    path: tuple[Step, ...]


@dataclass(frozen=True)
class ReservoirPattern:
    lower: Optional[Fraction] = None
    upper: Optional[Fraction] = None
    level: Optional[Fraction] = None
    leak: Optional[Fraction] = None

    def is_free(self) -> bool:
        return self.lower is None and self.upper is None and self.level is None and self.leak is None


@dataclass(frozen=True)
class SearchPattern:
    """What to look for: optional hose position, per-reservoir attribute pins.

    The empty pattern is the wildcard; it matches every state of every model.
    Any reservoir-specific content restricts matching to reservoir models.
    """

    hose: Optional[int] = None
    reservoirs: tuple[tuple[int, ReservoirPattern], ...] = ()

    def is_wildcard(self) -> bool:
        return self.hose is None and not self.reservoirs


def _unconstrained_text(tank: Reservoir, pat: ReservoirPattern) -> str:
    parts = []
    if pat.lower is None and pat.upper is None:
        parts.append(f"thr:({rational_str(tank.lower)},{rational_str(tank.upper)})")
    elif pat.lower is None:
        parts.append(f"thr_low: {rational_str(tank.lower)}")
    elif pat.upper is None:
        parts.append(f"thr_up: {rational_str(tank.upper)}")
    if pat.level is None:
        parts.append(f"hth: {rational_str(tank.level)}")
    if pat.leak is None:
        parts.append(f"rte: {rational_str(tank.leak)}")
    return ", ".join(parts)


def match(pattern: SearchPattern, state: Any) -> Optional[dict[str, str]]:
    """Bindings if ``state`` fits the pattern, else None.

    The wildcard matches anything with empty bindings.  A reservoir-specific
    pattern only applies to reservoir states; each listed reservoir binds
    "R<id>" to the text of the attributes the pattern left unconstrained.
    """
    if pattern.is_wildcard():
        return {}
    if not isinstance(state, NResState):
        raise ModelError("reservoir-specific patterns only apply to reservoir models")
    if pattern.hose is not None and state.hose.position != pattern.hose:
        return None
    bindings: dict[str, str] = {}
    for rid, pat in pattern.reservoirs:
        tank = state.reservoir(rid)
        if pat.lower is not None and tank.lower != pat.lower:
            return None
        if pat.upper is not None and tank.upper != pat.upper:
            return None
        if pat.level is not None and tank.level != pat.level:
            return None
        if pat.leak is not None and tank.leak != pat.leak:
            return None
        bindings[f"R{rid}"] = _unconstrained_text(tank, pat)
    return bindings


def validate_pattern(pattern: SearchPattern, system: TimedTransitionSystem) -> None:
    """Reject patterns that can never apply to this model."""
    if pattern.is_wildcard():
        return
    initial = system.initial_state()
    if not isinstance(initial, NResState):
        raise ModelError("reservoir-specific patterns only apply to reservoir models")
    known = {r.id for r in initial.reservoirs}
    if pattern.hose is not None and pattern.hose not in known:
        raise ModelError(f"pattern mentions unknown reservoir id {pattern.hose}")
    for rid, _ in pattern.reservoirs:
        if rid not in known:
            raise ModelError(f"pattern mentions unknown reservoir id {rid}")


@dataclass(frozen=True)
class KripkeEdge:
    source: int
    target: int
    label: str
    duration: Fraction


class Kripke:
    """Finite, total transition structure labeled with atomic propositions.

    States are indices in discovery order; state 0 is initial.  Deadlocked
    states get a zero-duration "stutter" self-loop so every state has at
    least one successor.
    """

    def __init__(
        self,
        states: list[TimedState],
        texts: list[str],
        edges: list[KripkeEdge],
        labeling: list[frozenset[str]],
        props: frozenset[str],
    ):
        self.states = states
        self.texts = texts
        self.edges = edges
        self.labeling = labeling
        self.props = props
        self.initial = 0
        self.adjacency: list[list[KripkeEdge]] = [[] for _ in states]
        for e in edges:
            self.adjacency[e.source].append(e)
        self._index: dict[tuple[str, Fraction], int] = {
            (texts[i], states[i].elapsed): i for i in range(len(states))
        }
        for out in self.adjacency:
            if not out:
                raise ModelError("every state must have a successor")

    def __len__(self) -> int:
        return len(self.states)

    def successors(self, i: int) -> list[KripkeEdge]:
        return self.adjacency[i]

    def index_of(self, text: str, elapsed: Fraction) -> Optional[int]:
        return self._index.get((text, elapsed))

    def has_edge(self, source: int, target: int, label: str) -> bool:
        return any(e.target == target and e.label == label for e in self.adjacency[source])


def _explore(
    system: TimedTransitionSystem,
    time_bound: Fraction,
    increment: Fraction,
    pattern: Optional[SearchPattern],
    max_states: int,
):
    """Shared BFS: returns (timed states, texts, edges, parent links, hits)."""
    time_bound = as_time(time_bound)
    increment = as_time(increment)
    if increment == 0:
        raise ModelError("the sampling increment must be positive")
    if pattern is not None:
        validate_pattern(pattern, system)

    initial = TimedState(system.initial_state(), ZERO)
    states: list[TimedState] = [initial]
    texts: list[str] = [system.serialize(initial.state)]
    index: dict[tuple[str, Fraction], int] = {(texts[0], ZERO): 0}
    edges: list[KripkeEdge] = []
    parents: list[Optional[tuple[int, str, Fraction]]] = [None]
    hits: list[tuple[int, dict[str, str]]] = []

    if pattern is not None:
        bindings = match(pattern, initial.state)
        if bindings is not None:
            hits.append((0, bindings))

    queue = deque([0])
    while queue:
        i = queue.popleft()
        current = states[i]
        moves: list[tuple[str, Any, Fraction]] = [
            (label, succ, current.elapsed)
            for label, succ in system.discrete_successors(current.state)
        ]
        if current.elapsed + increment < time_bound:
            after = system.timed_successor(current.state, increment)
            if after is not None:
                moves.append((TICK, after, current.elapsed + increment))
        for label, succ, elapsed in moves:
            text = system.serialize(succ)
            key = (text, elapsed)
            j = index.get(key)
            if j is None:
                j = len(states)
                if j >= max_states:
                    raise ModelError(f"state space exceeds {max_states} states")
                index[key] = j
                states.append(TimedState(succ, elapsed))
                texts.append(text)
                duration = elapsed - current.elapsed
                parents.append((i, label, duration))
                if pattern is not None:
                    bindings = match(pattern, succ)
                    if bindings is not None:
                        hits.append((j, bindings))
                queue.append(j)
            edges.append(KripkeEdge(i, j, label, elapsed - current.elapsed))
    return states, texts, edges, parents, hits


def _path_to(parents, texts, i: int) -> tuple[Step, ...]:
    steps = []
    while parents[i] is not None:
        parent, label, duration = parents[i]
        steps.append(Step(label, duration, texts[i]))
        i = parent
    steps.reverse()
    return tuple(steps)


def search(
    system: TimedTransitionSystem,
    pattern: SearchPattern,
    time_bound: Fraction,
    increment: Fraction = Fraction(1),
    max_states: int = MAX_STATES,
) -> list[Solution]:
    """All distinct reachable states matching ``pattern`` within the bound.

    Ordered by elapsed time, ties by discovery order.
    """
    states, texts, _, parents, hits = _explore(system, time_bound, increment, pattern, max_states)
    solutions = [
        Solution(states[i].state, states[i].elapsed, texts[i], bindings, _path_to(parents, texts, i))
        for i, bindings in hits
    ]
    solutions.sort(key=lambda s: s.elapsed)  # stable: discovery order within a time
    return solutions


def build_kripke(
    system: TimedTransitionSystem,
    time_bound: Fraction,
    increment: Fraction = Fraction(1),
    max_states: int = MAX_STATES,
) -> Kripke:
    """Reachable timed states as a total Kripke structure."""
    states, texts, edges, _, _ = _explore(system, time_bound, increment, None, max_states)
    with_out = {e.source for e in edges}
    for i in range(len(states)):
        if i not in with_out:
            edges.append(KripkeEdge(i, i, STUTTER, ZERO))
    props = system.propositions()
    labeling = [
        frozenset(p for p in props if system.prop_holds(ts.state, p)) for ts in states
    ]
    return Kripke(states, texts, edges, labeling, props)

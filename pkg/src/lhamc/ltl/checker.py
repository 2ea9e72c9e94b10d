"""LTL model checking over Kripke structures by nested depth-first search.

The property is negated, normalized, and compiled to a Buchi automaton; an
accepting lasso in the product with the Kripke structure is a counterexample.
The outer search runs in postorder, the inner search hunts for a cycle back
to the blue stack, both iterative.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from ..core import ModelError
from ..explore import Kripke
from .buchi import BuchiAutomaton, lasso_accepted, to_buchi
from .formula import Formula, negated_nnf, props_of


@dataclass(frozen=True)
class CounterexampleStep:
    """One position of the lasso plus the edge label leaving it."""

    text: str
    elapsed: Fraction
    label: str


@dataclass
class Counterexample:
    """A run of the model violating the property: prefix . cycle^omega."""

    prefix: list[CounterexampleStep]
    cycle: list[CounterexampleStep]

    def steps(self) -> list[CounterexampleStep]:
        return list(self.prefix) + list(self.cycle)


_ProductNode = tuple[int, int]  # (Kripke state, automaton state)


def _check_props(kripke: Kripke, formula: Formula) -> None:
    unknown = props_of(formula) - kripke.props
    if unknown:
        raise ModelError(f"formula mentions unknown propositions: {sorted(unknown)}")


def model_check(kripke: Kripke, formula: Formula) -> Optional[Counterexample]:
    """None if every run from the initial state satisfies the formula,
    otherwise a validated-shape counterexample lasso."""
    _check_props(kripke, formula)
    ba = to_buchi(negated_nnf(formula))
    init: _ProductNode = (kripke.initial, ba.initial)

    succ_cache: dict[_ProductNode, list[tuple[_ProductNode, str]]] = {}

    def succs(v: _ProductNode) -> list[tuple[_ProductNode, str]]:
        out = succ_cache.get(v)
        if out is None:
            s, q = v
            letter = kripke.labeling[s]
            out = []
            for e in kripke.successors(s):
                for t in ba.adjacency[q]:
                    if BuchiAutomaton.literals_hold(t.literals, letter):
                        out.append(((e.target, t.target), e.label))
            succ_cache[v] = out
        return out

    blue: set[_ProductNode] = {init}
    red: set[_ProductNode] = set()
    on_stack: set[_ProductNode] = {init}
    stack: list[list] = [[init, 0]]  # [node, next successor index]

    while stack:
        node, i = stack[-1]
        successors = succs(node)
        if i < len(successors):
            stack[-1][1] = i + 1
            child = successors[i][0]
            if child not in blue:
                blue.add(child)
                on_stack.add(child)
                stack.append([child, 0])
            continue
        # node fully explored: run the inner search if it is accepting
        if node[1] in ba.accepting:
            hit = _red_search(node, succs, red, on_stack)
            if hit is not None:
                blue_path = [entry[0] for entry in stack]
                return _extract(kripke, succs, blue_path, hit)
        stack.pop()
        on_stack.discard(node)
    return None


def _red_search(seed, succs, red, on_stack):
    """Path seed -> ... -> u for some u on the blue stack, or None.

    Nodes visited by failed searches accumulate in ``red`` and are never
    searched again.
    """
    parents: dict[_ProductNode, _ProductNode] = {}
    work = []
    for child, _ in succs(seed):
        if child not in red and child not in parents:
            parents[child] = seed
            work.append(child)
    work.reverse()  # visit in successor order
    while work:
        u = work.pop()
        if u in on_stack:
            path = [u]
            while True:
                p = parents[path[-1]]
                path.append(p)
                if p == seed:
                    break
            path.reverse()
            return path  # [seed, ..., u], possibly u == seed on a proper cycle
        for child, _ in succs(u):
            if child not in red and child not in parents:
                parents[child] = u
                work.append(child)
    red.update(parents)
    red.add(seed)
    return None


def _extract(kripke, succs, blue_path, red_path) -> Counterexample:
    """Assemble the lasso from the blue stack and the red return path."""
    u = red_path[-1]
    j = blue_path.index(u)
    cycle_nodes = blue_path[j:] + red_path[1:-1]  # u ... seed, then back toward u
    prefix_nodes = blue_path[:j]

    def label_between(v, w) -> str:
        for child, label in succs(v):
            if child == w:
                return label
        raise ModelError("internal error: lasso edge vanished")

    def step(v, w) -> CounterexampleStep:
        s = v[0]
        return CounterexampleStep(kripke.texts[s], kripke.states[s].elapsed, label_between(v, w))

    prefix = []
    for a, b in zip(prefix_nodes, prefix_nodes[1:] + cycle_nodes[:1]):
        prefix.append(step(a, b))
    cycle = []
    for a, b in zip(cycle_nodes, cycle_nodes[1:] + cycle_nodes[:1]):
        cycle.append(step(a, b))
    return Counterexample(prefix, cycle)


def validate_counterexample(kripke: Kripke, formula: Formula, ce: Counterexample) -> bool:
    """Structural and semantic replay of a counterexample.

    The lasso must start at the initial state, follow labeled edges of the
    structure (including the wrap back to the cycle start), and its induced
    trace must violate the formula.
    """
    _check_props(kripke, formula)
    if not ce.cycle:
        return False
    steps = ce.steps()
    indices = []
    for s in steps:
        i = kripke.index_of(s.text, s.elapsed)
        if i is None:
            return False
        indices.append(i)
    if indices[0] != kripke.initial:
        return False
    cycle_start = len(ce.prefix)
    for pos in range(len(steps)):
        nxt = pos + 1 if pos + 1 < len(steps) else cycle_start
        if not kripke.has_edge(indices[pos], indices[nxt], steps[pos].label):
            return False
    letters = [kripke.labeling[i] for i in indices]
    ba = to_buchi(negated_nnf(formula))
    return lasso_accepted(ba, letters[:cycle_start], letters[cycle_start:])

"""Formula to Buchi automaton via tableau expansion.

The expansion splits formulas into "now" obligations (literals) and "next"
obligations, yielding a generalized automaton with one fairness set per
until/eventually subformula; a round-robin counter then degeneralizes it.
A synthetic pre-initial state is added so every transition carries the
literal set that must hold in the state being read.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from ..core import ModelError
from .formula import (
    And,
    Always,
    Bottom,
    Eventually,
    Formula,
    Implies,
    Next,
    Not,
    Or,
    Prop,
    Release,
    Top,
    Until,
    render,
    to_nnf,
)

Literal = tuple[str, bool]


@dataclass(frozen=True)
class BuchiTransition:
    source: int
    literals: frozenset[Literal]
    target: int


class BuchiAutomaton:
    """Nondeterministic Buchi automaton with transition labels.

    Labels are consistent sets of literals: (name, True) requires the
    proposition, (name, False) forbids it.  State 0 is the unique initial
    state and has no incoming transitions.
    """

    def __init__(self, size: int, transitions: list[BuchiTransition], accepting: frozenset[int]):
        self.size = size
        self.initial = 0
        self.transitions = transitions
        self.accepting = accepting
        self.adjacency: list[list[BuchiTransition]] = [[] for _ in range(size)]
        for t in transitions:
            self.adjacency[t.source].append(t)

    @staticmethod
    def literals_hold(literals: frozenset[Literal], letter: frozenset[str]) -> bool:
        return all((name in letter) == positive for name, positive in literals)

    def successors(self, state: int, letter: frozenset[str]) -> list[int]:
        return [t.target for t in self.adjacency[state] if self.literals_hold(t.literals, letter)]


class _Node:
    __slots__ = ("id", "incoming", "new", "old", "next")

    def __init__(self, nid: int, incoming: set[int], new: list[Formula], old: set[Formula], nxt: set[Formula]):
        self.id = nid
        self.incoming = incoming
        self.new = new
        self.old = old
        self.next = nxt


_INIT = -1


def _eventualities(f: Formula) -> list[Formula]:
    """Until/eventually subformulas in first-occurrence order."""
    out: list[Formula] = []
    seen: set[Formula] = set()

    def walk(g: Formula) -> None:
        if isinstance(g, (Until, Eventually)) and g not in seen:
            seen.add(g)
            out.append(g)
        for attr in ("sub", "left", "right"):
            child = getattr(g, attr, None)
            if child is not None:
                walk(child)

    walk(f)
    return out


def _push_new(node: _Node, formulas: Iterable[Formula]) -> None:
    for g in formulas:
        if g not in node.old and g not in node.new:
            node.new.append(g)


def _copy(node: _Node, nid: int) -> _Node:
    return _Node(nid, set(node.incoming), list(node.new), set(node.old), set(node.next))


def _expand(f: Formula) -> list[_Node]:
    """All completed tableau nodes, in completion order."""
    fresh = iter(range(10**9)).__next__
    completed: list[_Node] = []
    by_shape: dict[tuple[frozenset[Formula], frozenset[Formula]], _Node] = {}
    stack = [_Node(fresh(), {_INIT}, [f], set(), set())]
    while stack:
        node = stack.pop()
        if not node.new:
            shape = (frozenset(node.old), frozenset(node.next))
            known = by_shape.get(shape)
            if known is not None:
                known.incoming |= node.incoming
                continue
            by_shape[shape] = node
            completed.append(node)
            successor = _Node(fresh(), {node.id}, sorted_new(node.next), set(), set())
            stack.append(successor)
            continue
        g = node.new.pop(0)
        if g in node.old:
            stack.append(node)
            continue
        match g:
            case Top():
                node.old.add(g)
                stack.append(node)
            case Bottom():
                pass  # contradiction, drop the node
            case Prop(name):
                if Not(Prop(name)) in node.old:
                    continue
                node.old.add(g)
                stack.append(node)
            case Not(Prop(name)):
                if Prop(name) in node.old:
                    continue
                node.old.add(g)
                stack.append(node)
            case Not(_):
                raise ModelError(f"negation is not atomic, normalize first: {g!r}")
            case And(a, b):
                node.old.add(g)
                _push_new(node, (a, b))
                stack.append(node)
            case Or(a, b):
                node.old.add(g)
                left = _copy(node, fresh())
                right = _copy(node, fresh())
                _push_new(left, (a,))
                _push_new(right, (b,))
                stack.append(right)
                stack.append(left)
            case Next(a):
                node.old.add(g)
                node.next.add(a)
                stack.append(node)
            case Always(a):
                node.old.add(g)
                node.next.add(g)
                _push_new(node, (a,))
                stack.append(node)
            case Eventually(a):
                node.old.add(g)
                now = _copy(node, fresh())
                later = _copy(node, fresh())
                _push_new(now, (a,))
                later.next.add(g)
                stack.append(later)
                stack.append(now)
            case Until(a, b):
                node.old.add(g)
                wait = _copy(node, fresh())
                done = _copy(node, fresh())
                _push_new(wait, (a,))
                wait.next.add(g)
                _push_new(done, (b,))
                stack.append(wait)
                stack.append(done)
            case Release(a, b):
                node.old.add(g)
                hold = _copy(node, fresh())
                settle = _copy(node, fresh())
                _push_new(hold, (b,))
                hold.next.add(g)
                _push_new(settle, (a, b))
                stack.append(hold)
                stack.append(settle)
            case Implies(_, _):
                raise ModelError(f"implication survived normalization: {g!r}")
            case _:
                raise ModelError(f"not a formula: {g!r}")
    return completed


def sorted_new(formulas: set[Formula]) -> list[Formula]:
    return sorted(formulas, key=render)


def _literals(old: set[Formula]) -> frozenset[Literal]:
    out = set()
    for g in old:
        if isinstance(g, Prop):
            out.add((g.name, True))
        elif isinstance(g, Not) and isinstance(g.sub, Prop):
            out.add((g.sub.name, False))
    return frozenset(out)


def to_buchi(f: Formula) -> BuchiAutomaton:
    """Buchi automaton accepting exactly the traces satisfying f.

    The input must be in negation normal form (see to_nnf).
    """
    f = to_nnf(f)  # idempotent; also expands implications defensively
    nodes = _expand(f)
    dense = {node.id: i for i, node in enumerate(nodes)}
    labels = [_literals(node.old) for node in nodes]

    # Generalized acceptance: one set per eventuality, satisfied where the
    # eventuality is absent or its payoff formula is already present.
    sets = []
    for ev in _eventualities(f):
        payoff = ev.right if isinstance(ev, Until) else ev.sub
        sets.append(frozenset(
            i for i, node in enumerate(nodes) if ev not in node.old or payoff in node.old
        ))
    k = len(sets)

    gba_edges: list[list[tuple[frozenset[Literal], int]]] = [[] for _ in nodes]
    initial_targets: list[int] = []
    for i, node in enumerate(nodes):
        for pid in sorted(node.incoming):
            if pid == _INIT:
                initial_targets.append(i)
            else:
                gba_edges[dense[pid]].append((labels[i], i))

    def advance(counter: int, target: int) -> int:
        if counter == k:
            counter = 0
        while counter < k and target in sets[counter]:
            counter += 1
        return counter

    # Counting degeneralization, lazily over reachable (node, counter) pairs.
    ids: dict[tuple[int, int], int] = {}
    order: list[tuple[int, int]] = []

    def intern(q: tuple[int, int]) -> int:
        known = ids.get(q)
        if known is None:
            known = len(order) + 1  # 0 is the pre-initial state
            ids[q] = known
            order.append(q)
        return known

    transitions: list[BuchiTransition] = []
    frontier = []
    seen = set()
    for i in initial_targets:
        q = (i, advance(0, i))
        transitions.append(BuchiTransition(0, labels[i], intern(q)))
        if q not in seen:
            seen.add(q)
            frontier.append(q)
    while frontier:
        next_frontier = []
        for q in frontier:
            node_i, counter = q
            source = ids[q]
            for lits, j in gba_edges[node_i]:
                q2 = (j, advance(counter, j))
                transitions.append(BuchiTransition(source, lits, intern(q2)))
                if q2 not in seen:
                    seen.add(q2)
                    next_frontier.append(q2)
        frontier = next_frontier

    accepting = frozenset(ids[q] for q in order if q[1] == k)
    return BuchiAutomaton(len(order) + 1, transitions, accepting)


def lasso_accepted(
    ba: BuchiAutomaton,
    prefix: list[frozenset[str]],
    cycle: list[frozenset[str]],
) -> bool:
    """Whether the ultimately periodic word prefix . cycle^omega is accepted."""
    if not cycle:
        raise ModelError("the cycle of a lasso must be nonempty")
    word = list(prefix) + list(cycle)
    loop_start = len(prefix)
    total = len(word)

    def next_pos(pos: int) -> int:
        return pos + 1 if pos + 1 < total else loop_start

    # Product of the automaton with the lasso, then look for a reachable
    # accepting product node that lies on a cycle.
    start = (ba.initial, 0)
    reached = {start}
    queue = [start]
    while queue:
        state, pos = queue.pop()
        for succ in ba.successors(state, word[pos]):
            nxt = (succ, next_pos(pos))
            if nxt not in reached:
                reached.add(nxt)
                queue.append(nxt)

    candidates = [v for v in reached if v[0] in ba.accepting and v[1] >= loop_start]
    for v in candidates:
        state0, pos0 = v
        work = [(succ, next_pos(pos0)) for succ in ba.successors(state0, word[pos0])]
        seen = set(work)
        while work:
            u = work.pop()
            if u == v:
                return True
            state, pos = u
            for succ in ba.successors(state, word[pos]):
                nxt = (succ, next_pos(pos))
                if nxt not in seen:
                    seen.add(nxt)
                    work.append(nxt)
    return False

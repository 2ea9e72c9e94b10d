"""Exact arithmetic, the time domain, and the contract every model implements.

All quantities in the engine are exact rationals (``fractions.Fraction``).
Durations ("time") are nonnegative rationals validated by :func:`as_time`;
atomic propositions are plain nonempty strings.  Floating point never enters
any semantic computation.
"""

from __future__ import annotations

import re
from abc import ABC, abstractmethod
from fractions import Fraction
from typing import Any, Iterable

Rat = Fraction

ZERO = Fraction(0)
ONE = Fraction(1)


class ModelError(ValueError):
    """A model, formula, pattern, or argument violates a structural constraint."""


class ModelWarning(UserWarning):
    """A model is suspicious but still usable (e.g. unbalanced flow rates)."""


_RATIONAL_RE = re.compile(r"^\s*(-?\d+)\s*(?:/\s*(\d+)\s*)?$")


def parse_rational(value: Any) -> Fraction:
    """Parse an exact rational from ``p``, ``-p``, or ``p/q`` text.

    Ints (but not bools or floats) pass through unchanged, so JSON numbers
    written without a fractional part are accepted.  Decimal notation is
    rejected on purpose: ``"1.5"`` is not exact input, ``"3/2"`` is.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise ModelError(f"not a rational: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        m = _RATIONAL_RE.match(value)
        if m:
            num = int(m.group(1))
            den = int(m.group(2)) if m.group(2) is not None else 1
            if den == 0:
                raise ModelError(f"zero denominator in rational: {value!r}")
            return Fraction(num, den)
    raise ModelError(f"not a rational: {value!r} (expected 'p' or 'p/q')")


def rational_str(value: Fraction) -> str:
    """Canonical text for a rational: lowest terms, ``p`` or ``p/q``."""
    return str(value)


def as_time(value: Any) -> Fraction:
    """Validate a duration: an exact rational that is >= 0."""
    t = parse_rational(value)
    if t < 0:
        raise ModelError(f"negative duration: {t}")
    return t


def monus(a: Fraction, b: Fraction) -> Fraction:
    """Saturating subtraction on nonnegative rationals: max(a - b, 0)."""
    if a < 0 or b < 0:
        raise ModelError(f"monus is defined on nonnegative rationals, got {a}, {b}")
    return a - b if a > b else ZERO


def check_prop_name(name: Any) -> str:
    if not isinstance(name, str) or not name:
        raise ModelError(f"proposition names are nonempty strings, got {name!r}")
    return name


class TimedTransitionSystem(ABC):
    """What the exploration engine needs from a model.

    States are opaque immutable values.  Implementations must be
    deterministic: the same state always yields the same successor list in
    the same order, and :meth:`serialize` is injective on semantically
    distinct states (it doubles as the dedup key during search).
    """

    @abstractmethod
    def initial_state(self) -> Any:
        """The unique start state."""

    @abstractmethod
    def discrete_successors(self, state: Any) -> list[tuple[str, Any]]:
        """All instantaneous steps from ``state`` as (rule label, successor) pairs.

        The list is deterministically ordered, by (label, serialized
        successor) unless the model documents a different total order.
        """

    @abstractmethod
    def timed_successor(self, state: Any, delta: Fraction) -> Any | None:
        """The state after letting ``delta`` time pass, or None if blocked.

        A zero duration always succeeds and returns ``state`` itself.
        """

    @abstractmethod
    def prop_holds(self, state: Any, prop: str) -> bool:
        """Whether atomic proposition ``prop`` holds in ``state``."""

    @abstractmethod
    def serialize(self, state: Any) -> str:
        """Canonical single-line text for ``state``."""

    def propositions(self) -> frozenset[str]:
        """The atomic propositions this model can evaluate."""
        return frozenset()

    def sort_successors(
        self, successors: Iterable[tuple[str, Any]]
    ) -> list[tuple[str, Any]]:
        """Default successor order: by rule label, then serialized state."""
        return sorted(successors, key=lambda ls: (ls[0], self.serialize(ls[1])))

"""Explicit-state simulation and LTL model checking for linear hybrid
automata under discrete time sampling, exact to the rational."""

__version__ = "0.1.0"

from .core import ModelError, ModelWarning, Rat, TimedTransitionSystem, as_time, monus, parse_rational, rational_str

__all__ = [
    "ModelError",
    "ModelWarning",
    "Rat",
    "TimedTransitionSystem",
    "as_time",
    "monus",
    "parse_rational",
    "rational_str",
    "__version__",
]

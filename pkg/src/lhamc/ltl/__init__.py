"""Linear temporal logic: parsing, automata, model checking."""

from .formula import (
    Always,
    And,
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
    negated_nnf,
    parse_formula,
    props_of,
    render,
    temporal_count,
    to_nnf,
)
from .buchi import BuchiAutomaton, BuchiTransition, lasso_accepted, to_buchi
from .checker import (
    Counterexample,
    CounterexampleStep,
    model_check,
    validate_counterexample,
)

__all__ = [
    "Always",
    "And",
    "Bottom",
    "BuchiAutomaton",
    "BuchiTransition",
    "Counterexample",
    "CounterexampleStep",
    "Eventually",
    "Formula",
    "Implies",
    "Next",
    "Not",
    "Or",
    "Prop",
    "Release",
    "Top",
    "Until",
    "lasso_accepted",
    "model_check",
    "negated_nnf",
    "parse_formula",
    "props_of",
    "render",
    "temporal_count",
    "to_buchi",
    "to_nnf",
    "validate_counterexample",
]

"""A typed parallel lambda calculus with multi-party channels."""

from .core import (
    BOT,
    TOP,
    App,
    Arrow,
    Atom,
    AxiomInstance,
    AxiomSchema,
    Bottom,
    Chan,
    Conj,
    Const,
    Efq,
    Hole,
    Lam,
    Nu,
    Pair,
    ParThreads,
    Polarity,
    Proj,
    TermError,
    Var,
    alpha_eq,
    free_vars,
    mk_tuple,
    substitute,
    type_of,
)
from .engine import (
    Deadlock,
    FuelExhausted,
    NormalForm,
    StrategyParams,
    cross_reduce,
    enumerate_steps,
    explain_cross,
    iterate,
    run,
    simplify,
)
from .prims import Registry, register_program_constants
from .syntax import ParseError, parse_formula, parse_program, parse_term, pretty, pretty_formula
from .topology import TopologyGraph, extract_axiom, schema_to_graph
from .typecheck import check_program, instantiate

__all__ = [
    "BOT", "TOP", "App", "Arrow", "Atom", "AxiomInstance", "AxiomSchema", "Bottom", "Chan",
    "Conj", "Const", "Efq", "Hole", "Lam", "Nu", "Pair", "ParThreads", "Polarity", "Proj",
    "TermError", "Var", "alpha_eq", "free_vars", "mk_tuple", "substitute", "type_of",
    "Deadlock", "FuelExhausted", "NormalForm", "StrategyParams", "cross_reduce",
    "enumerate_steps", "explain_cross", "iterate", "run", "simplify",
    "Registry", "register_program_constants",
    "ParseError", "parse_formula", "parse_program", "parse_term", "pretty", "pretty_formula",
    "TopologyGraph", "extract_axiom", "schema_to_graph",
    "check_program", "instantiate",
]

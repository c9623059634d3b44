"""Predicates over integer-vector parameters and their decision procedures."""
from .ast import (
    FALSE,
    TRUE,
    And,
    Atom,
    Const,
    Diff,
    Exists,
    FalseP,
    IfThenElse,
    Node,
    Not,
    Or,
    ScalarMul,
    Sum,
    TrueP,
    Var,
    atom,
    conj,
    disj,
    free_params,
)
from .domain import ENUMERATE, EXTERNAL, DomainSpec, SolverConfig
from .sexpr import parse_predicate, parse_term, to_sexpr
from .solver import SatResult, denotation, holds, is_sat, truth_table
from .transform import compact, exists_project, rename, reverse_predicate, shift, substitute

__all__ = [
    "FALSE", "TRUE", "And", "Atom", "Const", "Diff", "Exists", "FalseP", "IfThenElse", "Node",
    "Not", "Or", "ScalarMul", "Sum", "TrueP", "Var", "atom", "conj", "disj", "free_params",
    "ENUMERATE", "EXTERNAL", "DomainSpec", "SolverConfig",
    "parse_predicate", "parse_term", "to_sexpr",
    "SatResult", "denotation", "holds", "is_sat", "truth_table",
    "compact", "exists_project", "rename", "reverse_predicate", "shift", "substitute",
]

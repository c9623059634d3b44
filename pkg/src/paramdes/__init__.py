"""Opacity verification for automata with parameterized events."""
from .algebra import DomainSpec, SolverConfig, parse_predicate
from .errors import (
    ExplosionGuard,
    MalformedPredicate,
    ModelError,
    NonInjectiveMapping,
    ParamDesError,
    SolverError,
    SolverTimeout,
    SolverUnavailable,
    UnboundedDomain,
)
from .model import EpEfa, SymbolicTransition, make_ep_efa, reverse
from .observer import Observer, build_observer, estimate
from .opacity import OpacityQuery, Verdict, check, check_current_state, check_infinite_step, check_initial_state

__version__ = "0.1.0"

__all__ = [
    "DomainSpec", "SolverConfig", "parse_predicate",
    "ExplosionGuard", "MalformedPredicate", "ModelError", "NonInjectiveMapping", "ParamDesError",
    "SolverError", "SolverTimeout", "SolverUnavailable", "UnboundedDomain",
    "EpEfa", "SymbolicTransition", "make_ep_efa", "reverse",
    "Observer", "build_observer", "estimate",
    "OpacityQuery", "Verdict", "check", "check_current_state", "check_infinite_step", "check_initial_state",
]

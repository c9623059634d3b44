"""Automata with state parameters, their constructions and bounded reachability."""
from .automaton import Efa, EfaTransition, efa_run, efa_step, flat_language, initial_configs, validate_efa
from .reach import ReachResult, bounded_reach
from .transform import embed_ep_efa, flatten_step_length
from .twocm import TwoCounterProgram, encode_2cm, parse_program, run_2cm

__all__ = [
    "Efa", "EfaTransition", "efa_run", "efa_step", "flat_language", "initial_configs", "validate_efa",
    "ReachResult", "bounded_reach",
    "embed_ep_efa", "flatten_step_length",
    "TwoCounterProgram", "encode_2cm", "parse_program", "run_2cm",
]

"""Current-state, initial-state and infinite-step opacity verdicts."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional

from .algebra import Node, SolverConfig
from .errors import ModelError
from .model import EpEfa, Observation, reverse, reverse_observation, sorted_states
from .observer import Estimate, Observer, build_observer

CURRENT_STATE = "current_state"
INITIAL_STATE = "initial_state"
INFINITE_STEP = "infinite_step"

PROPERTY_ALIASES = {
    "cso": CURRENT_STATE,
    "current_state": CURRENT_STATE,
    "current-state": CURRENT_STATE,
    "iso": INITIAL_STATE,
    "initial_state": INITIAL_STATE,
    "initial-state": INITIAL_STATE,
    "inf": INFINITE_STEP,
    "infinite_step": INFINITE_STEP,
    "infinite-step": INFINITE_STEP,
}


@dataclass(frozen=True)
class OpacityQuery:
    property: str
    secret: frozenset[str]
    nonsecret: frozenset[str]
    theta: Node

    @classmethod
    def make(cls, prop: str, secret: Iterable[str], nonsecret: Iterable[str], theta: Node) -> "OpacityQuery":
        if prop not in PROPERTY_ALIASES:
            raise ModelError(f"unknown opacity property {prop!r}")
        return cls(PROPERTY_ALIASES[prop], frozenset(secret), frozenset(nonsecret), theta)


@dataclass(frozen=True)
class Witness:
    state: Estimate
    observation: Observation
    reverse_state: Optional[Estimate] = None
    future: Optional[Observation] = None

    def to_json(self) -> dict:
        out = {
            "state": sorted_states(self.state),
            "observation": [list(u) for u in self.observation],
        }
        if self.reverse_state is not None:
            out["reverse_state"] = sorted_states(self.reverse_state)
            out["future"] = [list(u) for u in self.future]
        return out


@dataclass(frozen=True)
class Verdict:
    opaque: bool
    witness: Optional[Witness] = None

    def to_json(self) -> dict:
        return {"opaque": self.opaque, "witness": self.witness.to_json() if self.witness else None}


def _check_sets(S: EpEfa, q: OpacityQuery, universe: frozenset[str], what: str) -> None:
    bad = sorted_states((q.secret | q.nonsecret) - universe)
    if bad:
        raise ModelError(f"secret/non-secret states {bad} are not {what}")


def _violates(est: Estimate, secret: frozenset[str], nonsecret: frozenset[str]) -> bool:
    return bool(est & secret) and not (est & nonsecret)


def _current_state(S: EpEfa, q: OpacityQuery, cfg, **obs_kw) -> tuple[Verdict, Observer]:
    bad: list[Estimate] = []

    def stop(est: Estimate) -> bool:
        if _violates(est, q.secret, q.nonsecret):
            bad.append(est)
            return True
        return False

    obs = build_observer(S, q.theta, cfg, stop=stop, **obs_kw)
    if not bad:
        return Verdict(True), obs
    return Verdict(False, Witness(bad[0], obs.path_to(bad[0]))), obs


def check_current_state(S: EpEfa, query: OpacityQuery, cfg: Optional[SolverConfig] = None, **obs_kw) -> Verdict:
    """Every reachable estimate meeting the secret set also meets the non-secret set.

    The observer is built breadth-first and abandoned at the first violation.
    """
    _check_sets(S, query, frozenset(S.states), "states of the model")
    if not query.secret:
        return Verdict(True)
    return _current_state(S, query, cfg, **obs_kw)[0]


def check_initial_state(S: EpEfa, query: OpacityQuery, cfg: Optional[SolverConfig] = None, **obs_kw) -> Verdict:
    """Current-state opacity of the reversed model; witness read forwards."""
    _check_sets(S, query, S.initial, "initial states")
    if not query.secret:
        return Verdict(True)
    v, _ = _current_state(reverse(S), query, cfg, **obs_kw)
    if v.opaque:
        return v
    return Verdict(False, Witness(v.witness.state, reverse_observation(v.witness.observation)))


def check_infinite_step(S: EpEfa, query: OpacityQuery, cfg: Optional[SolverConfig] = None, **obs_kw) -> Verdict:
    """Scan every pair of forward and reversed observer states.

    A pair whose intersection meets the secret set but misses the non-secret
    set is a violation: some observation prefix followed by some continuation
    pins the system to secret states at the split point.
    """
    _check_sets(S, query, frozenset(S.states), "states of the model")
    if not query.secret:
        return Verdict(True)
    fwd = build_observer(S, query.theta, cfg, **obs_kw)
    bwd = build_observer(reverse(S), query.theta, cfg, **obs_kw)
    for a in fwd.states:
        for b in bwd.states:
            both = a & b
            if _violates(both, query.secret, query.nonsecret):
                w = fwd.path_to(a)
                future = reverse_observation(bwd.path_to(b))
                return Verdict(False, Witness(a, w, b, future))
    return Verdict(True)


def check(S: EpEfa, query: OpacityQuery, cfg: Optional[SolverConfig] = None, **obs_kw) -> Verdict:
    fn = {
        CURRENT_STATE: check_current_state,
        INITIAL_STATE: check_initial_state,
        INFINITE_STEP: check_infinite_step,
    }[query.property]
    return fn(S, query, cfg, **obs_kw)

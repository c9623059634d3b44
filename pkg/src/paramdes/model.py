"""Event-parameter automata: data model, concrete semantics and observation."""
from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from typing import Iterable, Optional, Sequence, Union

from .algebra import TRUE, DomainSpec, Node, SolverConfig, conj, denotation, free_params, holds, is_sat
from .algebra.ast import TrueP, max_components
from .algebra.transform import reverse_predicate
from .errors import ExplosionGuard, ModelError, UnboundedDomain

EPSILON = "ε"

Value = Union[int, tuple]
Event = tuple  # (tag, tuple of values)
Observation = tuple  # tuple of nonempty units, each a tuple of values


def state_key(q: str):
    """Natural sort key: ``q2`` before ``q10``."""
    return [(0, int(p), "") if p.isdigit() else (1, 0, p) for p in re.split(r"(\d+)", q) if p]


def sorted_states(states: Iterable[str]) -> list[str]:
    return sorted(states, key=state_key)


@dataclass(frozen=True)
class SymbolicTransition:
    id: str
    source: str
    tag: str
    k: int
    guard: Node = TRUE
    target: str = ""

    @property
    def is_epsilon(self) -> bool:
        return self.k == 0


@dataclass(frozen=True)
class EpEfa:
    states: tuple[str, ...]
    domain: DomainSpec
    initial: frozenset[str]
    marked: frozenset[str]
    transitions: tuple[SymbolicTransition, ...]
    event_tags: frozenset[str] = field(default=frozenset())

    def __post_init__(self) -> None:
        if not self.event_tags:
            tags = frozenset(t.tag for t in self.transitions)
            object.__setattr__(self, "event_tags", tags)

    def outgoing(self, state: str) -> list[SymbolicTransition]:
        return [t for t in self.transitions if t.source == state]

    @property
    def max_step(self) -> int:
        return max((t.k for t in self.transitions), default=0)

    def with_domain(self, domain: DomainSpec) -> "EpEfa":
        return replace(self, domain=domain)

    def with_initial(self, initial: Iterable[str]) -> "EpEfa":
        return replace(self, initial=frozenset(initial))


def make_ep_efa(
    states: Sequence[str],
    transitions: Sequence[SymbolicTransition],
    initial: Iterable[str],
    marked: Iterable[str] = (),
    domain: Optional[DomainSpec] = None,
) -> EpEfa:
    return EpEfa(
        tuple(states),
        domain or DomainSpec(),
        frozenset(initial),
        frozenset(marked),
        tuple(transitions),
    )


# -- validation ---------------------------------------------------------------


def validate(S: EpEfa) -> list[str]:
    """Every structural problem found, as human-readable diagnostics."""
    diags: list[str] = []
    states = set(S.states)
    if len(states) != len(S.states):
        diags.append("duplicate state ids")
    for q in sorted_states(S.initial - states):
        diags.append(f"initial state {q!r} is not declared")
    for q in sorted_states(S.marked - states):
        diags.append(f"marked state {q!r} is not declared")
    seen: set[str] = set()
    for t in S.transitions:
        if t.id in seen:
            diags.append(f"duplicate transition id {t.id!r}")
        seen.add(t.id)
        for end, q in (("source", t.source), ("target", t.target)):
            if q not in states:
                diags.append(f"{t.id}: {end} {q!r} is not declared")
        if t.tag not in S.event_tags:
            diags.append(f"{t.id}: tag {t.tag!r} is not an event tag")
        if t.k < 0:
            diags.append(f"{t.id}: negative step length {t.k}")
        if t.k == 0 and not isinstance(t.guard, TrueP):
            diags.append(f"{t.id}: zero-step transition must have guard true")
        out = sorted(i for i in free_params(t.guard) if not 1 <= i <= t.k)
        if out:
            diags.append(f"{t.id}: guard mentions x{out[0]} but step length is {t.k}")
        if max_components(t.guard) > S.domain.width:
            diags.append(f"{t.id}: guard component index exceeds domain width {S.domain.width}")
    return diags


def check_valid(S: EpEfa) -> None:
    diags = validate(S)
    if diags:
        raise ModelError("; ".join(diags))


def is_deterministic(
    S: EpEfa, cfg: Optional[SolverConfig] = None
) -> tuple[bool, Optional[tuple[str, str]]]:
    """``(True, None)`` or ``(False, (id1, id2))`` for the first clashing pair."""
    ts = S.transitions
    for a in range(len(ts)):
        for b in range(a + 1, len(ts)):
            t, u = ts[a], ts[b]
            if (t.source, t.tag, t.k) != (u.source, u.tag, u.k):
                continue
            if t.k == 0 or is_sat(conj(t.guard, u.guard), S.domain, cfg, t.k):
                return False, (t.id, u.id)
    return True, None


# -- concrete semantics -------------------------------------------------------


def _bind(values: Sequence[Value]) -> dict[int, Value]:
    return {i: v for i, v in enumerate(values, start=1)}


def step(S: EpEfa, state: str, event: Event, cfg: Optional[SolverConfig] = None) -> set[str]:
    tag, values = event
    values = tuple(values)
    return {
        t.target
        for t in S.transitions
        if t.source == state
        and t.tag == tag
        and t.k == len(values)
        and all(S.domain.contains(v) for v in values)
        and holds(t.guard, _bind(values), S.domain, cfg)
    }


def run(S: EpEfa, start: Iterable[str], u: Sequence[Event], cfg: Optional[SolverConfig] = None) -> set[str]:
    current = set(start)
    for ev in u:
        current = set().union(*(step(S, q, ev, cfg) for q in current)) if current else set()
    return current


def transition_tuples(t: SymbolicTransition, domain: DomainSpec) -> list[tuple]:
    if t.k == 0:
        return [()]
    return denotation(t.guard, domain, t.k)


def enumerate_language(
    S: EpEfa,
    max_events: int,
    domain: Optional[DomainSpec] = None,
    start: Optional[Iterable[str]] = None,
    cap: int = 500_000,
) -> list[tuple[tuple[Event, ...], str]]:
    """Every run of at most ``max_events`` events, as ``(u, reached state)``.

    Zero-step moves count as events (tag ``ε``, empty tuple).
    """
    domain = domain or S.domain
    if not domain.is_bounded:
        raise UnboundedDomain("language enumeration needs a bounded domain")
    tuples = {t.id: transition_tuples(t, domain) for t in S.transitions}
    frontier = [((), q) for q in sorted_states(start if start is not None else S.initial)]
    out = list(frontier)
    for _ in range(max_events):
        nxt = []
        for u, q in frontier:
            for t in S.outgoing(q):
                for tup in tuples[t.id]:
                    nxt.append((u + ((t.tag, tup),), t.target))
            if len(out) + len(nxt) > cap:
                raise ExplosionGuard(f"more than {cap} runs")
        out.extend(nxt)
        frontier = nxt
    return out


def flat_language(
    S: EpEfa,
    max_len: int,
    marked_only: bool = True,
    domain: Optional[DomainSpec] = None,
    cap: int = 1_000_000,
) -> set[tuple]:
    """Flat data strings of at most ``max_len`` elements reaching (marked) states."""
    domain = domain or S.domain
    if not domain.is_bounded:
        raise UnboundedDomain("language enumeration needs a bounded domain")
    tuples = {t.id: transition_tuples(t, domain) for t in S.transitions}
    start = {(q, ()) for q in S.initial}
    seen = set(start)
    frontier = sorted(start)
    out: set[tuple] = set()
    while frontier:
        nxt = []
        for q, w in frontier:
            if not marked_only or q in S.marked:
                out.add(w)
            for t in S.outgoing(q):
                if len(w) + t.k > max_len:
                    continue
                for tup in tuples[t.id]:
                    c = (t.target, w + tuple(tup))
                    if c not in seen:
                        seen.add(c)
                        nxt.append(c)
        if len(seen) > cap:
            raise ExplosionGuard(f"more than {cap} configurations")
        frontier = nxt
    return out


def data_string(u: Sequence[Event]) -> tuple[tuple, ...]:
    """Strip tags; zero-length tuples disappear."""
    return tuple(tuple(vals) for _, vals in u if len(vals))


def flat_data(u: Sequence[Event]) -> tuple:
    return tuple(v for unit in data_string(u) for v in unit)


def observe(d: Sequence[Sequence[Value]], theta: Node, domain: Optional[DomainSpec] = None) -> Observation:
    """Keep elements satisfying ``theta``; units left empty are removed."""
    dom = domain or DomainSpec("integers", 1)
    out = []
    for unit in d:
        kept = tuple(v for v in unit if holds(theta, {1: v}, dom))
        if kept:
            out.append(kept)
    return tuple(out)


def reverse_events(u: Sequence[Event]) -> tuple[Event, ...]:
    """``u`` read backwards, each event's tuple reversed too."""
    return tuple((tag, tuple(reversed(vals))) for tag, vals in reversed(tuple(u)))


def reverse_observation(w: Observation) -> Observation:
    return tuple(tuple(reversed(unit)) for unit in reversed(tuple(w)))


def reverse(S: EpEfa) -> EpEfa:
    """All states initial and marked, edges flipped, guard slots reversed."""
    ts = tuple(
        replace(t, source=t.target, target=t.source, guard=reverse_predicate(t.guard, t.k))
        for t in S.transitions
    )
    return EpEfa(S.states, S.domain, frozenset(S.states), frozenset(S.states), ts, S.event_tags)

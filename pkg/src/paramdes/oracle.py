"""Brute-force reference semantics over bounded windows.

Nothing here touches the symbolic machinery: guards are evaluated by a small
pure-Python interpreter on explicit tuples, estimates are computed by concrete
subset construction, and opacity is checked against the definitions by
enumerating runs.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Iterable, Optional, Sequence

from .algebra.ast import (
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
)
from .algebra.domain import DomainSpec
from .errors import ExplosionGuard, UnboundedDomain
from .model import EpEfa, Observation, sorted_states

_REL = {
    "=": lambda a, b: a == b,
    "!=": lambda a, b: a != b,
    "<": lambda a, b: a < b,
    "<=": lambda a, b: a <= b,
    ">": lambda a, b: a > b,
    ">=": lambda a, b: a >= b,
}


def py_eval(node: Node, env: dict, elements: Sequence) -> object:
    """Direct interpretation; ``env`` maps slot -> element (int or tuple)."""
    if isinstance(node, Var):
        v = env[node.param]
        return v[node.comp - 1] if isinstance(v, tuple) else v
    if isinstance(node, Const):
        return node.value
    if isinstance(node, Sum):
        return py_eval(node.left, env, elements) + py_eval(node.right, env, elements)
    if isinstance(node, Diff):
        return py_eval(node.left, env, elements) - py_eval(node.right, env, elements)
    if isinstance(node, ScalarMul):
        return node.coef * py_eval(node.term, env, elements)
    if isinstance(node, IfThenElse):
        branch = node.then if py_eval(node.cond, env, elements) else node.orelse
        return py_eval(branch, env, elements)
    if isinstance(node, TrueP):
        return True
    if isinstance(node, FalseP):
        return False
    if isinstance(node, Atom):
        return _REL[node.rel](py_eval(node.left, env, elements), py_eval(node.right, env, elements))
    if isinstance(node, Not):
        return not py_eval(node.arg, env, elements)
    if isinstance(node, And):
        return py_eval(node.left, env, elements) and py_eval(node.right, env, elements)
    if isinstance(node, Or):
        return py_eval(node.left, env, elements) or py_eval(node.right, env, elements)
    if isinstance(node, Exists):
        return any(py_eval(node.body, {**env, node.param: e}, elements) for e in elements)
    raise TypeError(f"not a syntax node: {node!r}")


@dataclass(frozen=True)
class OracleWindow:
    domain: DomainSpec
    max_events: int = 3
    max_units: Optional[int] = None
    cap: int = 2_000_000

    def __post_init__(self) -> None:
        if not self.domain.is_bounded:
            raise UnboundedDomain("the oracle needs a bounded domain")
        if self.max_units is None:
            object.__setattr__(self, "max_units", self.max_events)

    def elements(self) -> list:
        comp = range(self.domain.lo, self.domain.hi + 1)
        if self.domain.width == 1:
            return list(comp)
        return list(product(comp, repeat=self.domain.width))


@dataclass
class ConcreteModel:
    """Explicit transition relation of a model over a bounded window."""

    model: EpEfa
    theta: Node
    window: OracleWindow
    moves: dict = field(default_factory=dict)  # state -> [(tag, tuple, unit, target)]
    by_unit: dict = field(default_factory=dict)  # (state, unit) -> targets
    _memo: dict = field(default_factory=dict, repr=False)

    def __post_init__(self) -> None:
        elems = self.window.elements()
        self.visible = {e: bool(py_eval(self.theta, {1: e}, elems)) for e in elems}
        visible = self.visible
        for t in self.model.transitions:
            for tup in product(elems, repeat=t.k):
                if py_eval(t.guard, dict(enumerate(tup, start=1)), elems):
                    unit = tuple(v for v in tup if visible[v])
                    self.moves.setdefault(t.source, []).append((t.tag, tup, unit, t.target))
                    self.by_unit.setdefault((t.source, unit), set()).add(t.target)

    def hidden_closure(self, states: Iterable[str]) -> frozenset[str]:
        seen = set(states)
        stack = list(seen)
        while stack:
            for _, _, unit, tgt in self.moves.get(stack.pop(), ()):
                if not unit and tgt not in seen:
                    seen.add(tgt)
                    stack.append(tgt)
        return frozenset(seen)

    def post(self, states: Iterable[str], unit: tuple) -> frozenset[str]:
        """States reached by exactly one visible unit, then any hidden moves."""
        states = frozenset(states)
        key = (states, unit)
        if key not in self._memo:
            hit = set().union(*(self.by_unit.get((q, unit), ()) for q in states))
            self._memo[key] = self.hidden_closure(hit)
        return self._memo[key]

    def estimate_from(self, start: Iterable[str], w: Observation) -> frozenset[str]:
        cur = self.hidden_closure(start)
        for unit in w:
            if not cur:
                break
            cur = self.post(cur, tuple(unit))
        return cur

    def units(self, max_len: int) -> list[tuple]:
        """Every unit of visible elements up to ``max_len`` long, canonically ordered."""
        vis = [e for e in self.window.elements() if self.visible[e]]
        return [u for n in range(1, max_len + 1) for u in product(vis, repeat=n)]

    def configurations(self, start: Iterable[str], max_events: int) -> dict:
        """Distinct ``(origin, state, observation)`` reachable in at most ``max_events`` moves.

        Each maps to the shortest run found, as ``(events, moves used)``.
        """
        out: dict = {}
        frontier = []
        for q in sorted_states(start):
            out[(q, q, ())] = ((), 0)
            frontier.append((q, q, ()))
        for depth in range(1, max_events + 1):
            nxt = []
            for key in frontier:
                origin, q, w = key
                u = out[key][0]
                for tag, tup, unit, tgt in self.moves.get(q, ()):
                    k2 = (origin, tgt, w + (unit,) if unit else w)
                    if k2 not in out:
                        out[k2] = (u + ((tag, tup),), depth)
                        nxt.append(k2)
            if len(out) > self.window.cap:
                raise ExplosionGuard(f"more than {self.window.cap} configurations in the oracle window")
            frontier = nxt
        return out


def oracle_estimates(S: EpEfa, theta: Node, window: OracleWindow) -> dict[Observation, frozenset[str]]:
    """Observation -> reached states, over all runs of at most ``max_events`` moves."""
    cm = ConcreteModel(S, theta, window)
    out: dict[Observation, set[str]] = {}
    for _, q, w in cm.configurations(S.initial, window.max_events):
        out.setdefault(w, set()).add(q)
    return {w: frozenset(qs) for w, qs in sorted(out.items(), key=lambda kv: (len(kv[0]), kv[0]))}


@dataclass(frozen=True)
class OracleVerdict:
    violation: bool
    run: tuple = ()
    observation: Observation = ()
    future: Observation = ()
    state: Optional[str] = None


def oracle_cso(S: EpEfa, secret, nonsecret, theta: Node, window: OracleWindow) -> OracleVerdict:
    """A secret-reaching run whose observation no non-secret-reaching run shares."""
    cm = ConcreteModel(S, theta, window)
    secret, nonsecret = frozenset(secret), frozenset(nonsecret)
    for (_, q, w), (u, _) in cm.configurations(S.initial, window.max_events).items():
        if q in secret and not (cm.estimate_from(S.initial, w) & nonsecret):
            return OracleVerdict(True, u, w, (), q)
    return OracleVerdict(False)


def oracle_iso(S: EpEfa, secret, nonsecret, theta: Node, window: OracleWindow) -> OracleVerdict:
    """A run from a secret initial state whose observation no non-secret start explains."""
    cm = ConcreteModel(S, theta, window)
    nonsecret = sorted_states(nonsecret)
    for (origin, _, w), (u, _) in cm.configurations(secret, window.max_events).items():
        if not any(cm.estimate_from([q], w) for q in nonsecret):
            return OracleVerdict(True, u, w, (), origin)
    return OracleVerdict(False)


def oracle_inf(S: EpEfa, secret, nonsecret, theta: Node, window: OracleWindow) -> OracleVerdict:
    """A run split at a secret state with no non-secret run matching both halves."""
    cm = ConcreteModel(S, theta, window)
    secret, nonsecret = frozenset(secret), frozenset(nonsecret)
    heads = cm.configurations(S.initial, window.max_events)
    tails_cache: dict = {}
    for (_, q, w), (u, used) in heads.items():
        if q not in secret:
            continue
        mid = sorted_states(cm.estimate_from(S.initial, w) & nonsecret)
        budget = window.max_events - used
        if (q, budget) not in tails_cache:
            tails_cache[(q, budget)] = cm.configurations([q], budget)
        for (_, _, fut), (u2, _) in tails_cache[(q, budget)].items():
            if not any(cm.estimate_from([p], fut) for p in mid):
                return OracleVerdict(True, u + u2, w, fut, q)
    return OracleVerdict(False)


# -- observer cross-check ------------------------------------------------------


@dataclass(frozen=True)
class Disagreement:
    observation: Observation
    observer: Optional[frozenset]
    oracle: frozenset


def compare_with_observer(S: EpEfa, theta: Node, obs, window: OracleWindow) -> list[Disagreement]:
    """Walk the observer and the concrete estimator in lockstep.

    Every sequence of at most ``window.max_units`` visible units is covered,
    including sequences that are not observations.  Both sides' futures depend only on their
    current estimate, so each pair of estimates is expanded once per depth.
    """
    cm = ConcreteModel(S, theta, window)
    units = cm.units(max((t.k for t in S.transitions), default=0))
    tables = _observer_tables(obs, units)
    start = (obs.initial, cm.hidden_closure(S.initial))
    problems: list[Disagreement] = []
    if start[0] != start[1]:
        problems.append(Disagreement((), start[0], start[1]))
    layer = {start: ()}
    seen_at: dict = {start: 0}
    for depth in range(1, window.max_units + 1):
        nxt: dict = {}
        for (oq, cq), w in layer.items():
            for unit in units:
                cn = cm.post(cq, unit) if cq else frozenset()
                on = tables.get((oq, unit)) if oq is not None else None
                w2 = w + (unit,)
                if (on or frozenset()) != cn:
                    problems.append(Disagreement(w2, on, cn))
                    continue
                if on is None:
                    continue
                key = (on, cn)
                if seen_at.get(key, depth + 1) <= depth:
                    continue
                seen_at[key] = depth
                nxt.setdefault(key, w2)
        layer = nxt
    return problems


def _observer_tables(obs, units: Sequence[tuple]) -> dict:
    """(estimate, unit) -> successor, by evaluating minterms on explicit tuples."""
    elems = list(range(obs.domain.lo, obs.domain.hi + 1)) if obs.domain.is_bounded else []
    if obs.domain.width > 1:
        elems = list(product(elems, repeat=obs.domain.width))
    table: dict = {}
    for e in obs.edges:
        for unit in units:
            if len(unit) != e.length:
                continue
            if py_eval(e.predicate, dict(enumerate(unit, start=1)), elems):
                prev = table.setdefault((e.source, unit), e.target)
                if prev != e.target:
                    raise AssertionError(f"observer is not deterministic at {sorted(e.source)} on {unit}")
    return table

"""Symbolic observers: deterministic automata over state estimates.

Each symbolic transition of the model contributes, for every number ``i`` of
parameters the intruder may see, one *observable transition* whose predicate
describes the visible ``i``-tuples.  The observer is then a subset
construction where the outgoing edges of an estimate, for one unit length, are
the satisfiable minterms of the observable-transition predicates leaving it.
"""
from __future__ import annotations

from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

from .algebra import (
    DomainSpec,
    Node,
    Not,
    SolverConfig,
    conj,
    disj,
    exists_project,
    holds,
    is_sat,
    to_sexpr,
    truth_table,
)
from .algebra.domain import ENUMERATE
from .algebra.transform import compact
from .errors import ExplosionGuard
from .model import EpEfa, Observation, sorted_states, state_key

DEFAULT_MAX_STATES = 10_000
DEFAULT_MAX_MINTERMS = 1 << 20

Estimate = frozenset


@dataclass(frozen=True)
class ObservableTransition:
    source: str
    target: str
    length: int
    predicate: Node
    origin: str

    @property
    def is_epsilon(self) -> bool:
        return self.length == 0


@dataclass(frozen=True)
class ObserverEdge:
    """One satisfiable minterm: the ``selected`` candidates hold, the rest fail."""

    source: Estimate
    length: int
    selected: tuple[int, ...]
    predicate: Node
    target: Estimate
    witness: tuple


@dataclass(frozen=True)
class MergedEdge:
    source: Estimate
    length: int
    target: Estimate
    predicate: Node
    minterms: tuple[ObserverEdge, ...]


@dataclass
class Observer:
    initial: Estimate
    states: list[Estimate]
    edges: list[ObserverEdge]
    domain: DomainSpec
    theta: Node
    candidates: dict = field(default_factory=dict)
    parent: dict = field(default_factory=dict)

    def out_edges(self, q: Estimate, length: Optional[int] = None) -> list[ObserverEdge]:
        return [e for e in self.edges if e.source == q and (length is None or e.length == length)]

    def merged_edges(self) -> list[MergedEdge]:
        """Minterms sharing source, unit length and target, joined by ``or``."""
        groups: dict = {}
        for e in self.edges:
            groups.setdefault((e.source, e.length, e.target), []).append(e)
        return [
            MergedEdge(src, k, tgt, disj(*(m.predicate for m in ms)), tuple(ms))
            for (src, k, tgt), ms in groups.items()
        ]

    def path_to(self, q: Estimate) -> Observation:
        """A concrete observation leading from the initial estimate to ``q``."""
        units = []
        while q != self.initial:
            edge = self.parent[q]
            units.append(tuple(edge.witness))
            q = edge.source
        return tuple(reversed(units))


# -- observable transitions ---------------------------------------------------


def observable_transitions(
    S: EpEfa, theta: Node, cfg: Optional[SolverConfig] = None
) -> list[ObservableTransition]:
    """Observable projections of every transition, canonically ordered.

    Ordering is by source state, then transition declaration order, then the
    number of visible parameters.
    """
    order = {t.id: n for n, t in enumerate(S.transitions)}
    out: list[ObservableTransition] = []
    for t in S.transitions:
        if t.k == 0:
            out.append(ObservableTransition(t.source, t.target, 0, t.guard, t.id))
            continue
        for i in range(t.k + 1):
            parts = [
                compact(exists_project(t.guard, t.k, idx, theta), idx)
                for idx in combinations(range(1, t.k + 1), i)
            ]
            pred = disj(*parts)
            if is_sat(pred, S.domain, cfg, i):
                out.append(ObservableTransition(t.source, t.target, i, pred, t.id))
    out.sort(key=lambda e: (state_key(e.source), order[e.origin], e.length))
    return out


def epsilon_closure(that: Sequence[ObservableTransition], states: Iterable[str]) -> frozenset[str]:
    eps: dict[str, set[str]] = {}
    for e in that:
        if e.length == 0:
            eps.setdefault(e.source, set()).add(e.target)
    seen = set(states)
    stack = list(seen)
    while stack:
        for nxt in eps.get(stack.pop(), ()):
            if nxt not in seen:
                seen.add(nxt)
                stack.append(nxt)
    return frozenset(seen)


# -- minterm search -----------------------------------------------------------


class _Budget:
    def __init__(self, cap: int):
        self.cap = cap
        self.used = 0

    def spend(self) -> None:
        self.used += 1
        if self.used > self.cap:
            raise ExplosionGuard(f"more than {self.cap} minterm evaluations")


def _minterms_tables(preds: Sequence[Node], k: int, domain: DomainSpec, cfg: SolverConfig, budget: _Budget):
    """Satisfiable sign patterns via boolean truth tables."""
    tables = []
    grid = None
    for p in preds:
        tab, grid = truth_table(p, domain, cfg, k)
        tables.append(np.asarray(tab))
    shape = tables[0].shape if tables else ()
    found = []

    def rec(i: int, mask: np.ndarray, chosen: tuple[int, ...]) -> None:
        if i == len(preds):
            if chosen:
                hit = np.argwhere(mask)[0]
                found.append((chosen, tuple(_grid_value(grid, hit, s) for s in range(1, k + 1))))
            return
        for take in (True, False):
            budget.spend()
            m = mask & tables[i] if take else mask & ~tables[i]
            if m.any():
                rec(i + 1, m, chosen + (i,) if take else chosen)

    rec(0, np.ones(shape, dtype=bool), ())
    return found


def _grid_value(grid, index, slot: int):
    pos = 0
    for s in sorted(grid):
        g = grid[s]
        if s == slot:
            comps = tuple(int(g.values[index[pos + c]]) for c in range(g.width))
            return comps[0] if g.width == 1 else comps
        pos += g.width
    raise KeyError(slot)


def _minterms_solver(preds: Sequence[Node], k: int, domain: DomainSpec, cfg: SolverConfig, budget: _Budget):
    """Satisfiable sign patterns by incremental satisfiability queries."""
    found = []

    def rec(i: int, lits: tuple[Node, ...], chosen: tuple[int, ...]) -> None:
        if i == len(preds):
            if chosen:
                res = is_sat(conj(*lits), domain, cfg, k)
                found.append((chosen, res.witness))
            return
        for take in (True, False):
            budget.spend()
            nl = lits + ((preds[i],) if take else (Not(preds[i]),))
            if is_sat(conj(*nl), domain, cfg, k):
                rec(i + 1, nl, chosen + (i,) if take else chosen)

    rec(0, (), ())
    return found


def minterm(preds: Sequence[Node], selected: Iterable[int]) -> Node:
    sel = set(selected)
    return conj(*(p if i in sel else Not(p) for i, p in enumerate(preds)))


# -- construction --------------------------------------------------------------


def _order_key(q: Estimate):
    return (len(q), [state_key(s) for s in sorted_states(q)])


def build_observer(
    S: EpEfa,
    theta: Node,
    cfg: Optional[SolverConfig] = None,
    *,
    max_states: int = DEFAULT_MAX_STATES,
    max_minterms: int = DEFAULT_MAX_MINTERMS,
    jobs: int = 1,
    stop: Optional[Callable[[Estimate], bool]] = None,
) -> Observer:
    """Breadth-first subset construction over satisfiable minterms.

    ``stop`` is called on each newly discovered estimate; returning true ends
    the construction early (the partial observer is returned).
    """
    cfg = cfg or SolverConfig()
    that = observable_transitions(S, theta, cfg)
    init = epsilon_closure(that, S.initial)
    obs = Observer(init, [init], [], S.domain, theta)
    budget = _Budget(max_minterms)
    search = _minterms_tables if cfg.backend == ENUMERATE else _minterms_solver

    def expand(q: Estimate) -> list[ObserverEdge]:
        edges = []
        lengths = sorted({e.length for e in that if e.source in q and e.length > 0})
        for k in lengths:
            cands = [e for e in that if e.source in q and e.length == k]
            obs.candidates[(q, k)] = cands
            preds = [e.predicate for e in cands]
            for chosen, wit in search(preds, k, S.domain, cfg, budget):
                target = epsilon_closure(that, (cands[i].target for i in chosen))
                edges.append(ObserverEdge(q, k, chosen, minterm(preds, chosen), target, wit))
        return edges

    seen = {init}
    if stop is not None and stop(init):
        return obs
    layer = [init]
    pool = ThreadPoolExecutor(jobs) if jobs > 1 else None
    try:
        while layer:
            results = list(pool.map(expand, layer)) if pool else [expand(q) for q in layer]
            fresh = []
            for edges in results:
                for e in edges:
                    obs.edges.append(e)
                    if e.target not in seen:
                        seen.add(e.target)
                        obs.parent[e.target] = e
                        fresh.append(e.target)
            fresh.sort(key=_order_key)
            for q in fresh:
                obs.states.append(q)
                if len(obs.states) > max_states:
                    raise ExplosionGuard(f"more than {max_states} observer states")
                if stop is not None and stop(q):
                    return obs
            layer = fresh
    finally:
        if pool:
            pool.shutdown()
    return obs


def estimate(obs: Observer, w: Observation, cfg: Optional[SolverConfig] = None) -> Optional[Estimate]:
    """State estimate after ``w``, or ``None`` when ``w`` cannot be observed."""
    q = obs.initial
    for unit in w:
        vals = {i: v for i, v in enumerate(unit, start=1)}
        nxt = None
        for e in obs.out_edges(q, len(unit)):
            if holds(e.predicate, vals, obs.domain, cfg):
                nxt = e.target
                break
        if nxt is None:
            return None
        q = nxt
    return q


# -- export --------------------------------------------------------------------


def state_label(q: Estimate) -> str:
    return "{" + ",".join(sorted_states(q)) + "}"


def to_dot(obs: Observer, merged: bool = True) -> str:
    ids = {q: f"s{n}" for n, q in enumerate(obs.states)}
    lines = ["digraph observer {", "  rankdir=LR;", '  __start [shape=point, label=""];']
    for q in obs.states:
        lines.append(f'  {ids[q]} [shape=box, label="{state_label(q)}"];')
    lines.append(f"  __start -> {ids[obs.initial]};")
    edges = obs.merged_edges() if merged else obs.edges
    for e in edges:
        label = f"{e.length}: {to_sexpr(e.predicate)}".replace("\\", "\\\\").replace('"', '\\"')
        lines.append(f'  {ids[e.source]} -> {ids[e.target]} [label="{label}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def to_json(obs: Observer) -> dict:
    ids = {q: n for n, q in enumerate(obs.states)}
    return {
        "domain": obs.domain.to_json(),
        "theta": to_sexpr(obs.theta),
        "states": [sorted_states(q) for q in obs.states],
        "initial": ids[obs.initial],
        "transitions": [
            {
                "source": ids[e.source],
                "k": e.length,
                "guard": to_sexpr(e.predicate),
                "target": ids[e.target],
                "minterms": len(e.minterms),
            }
            for e in obs.merged_edges()
        ],
    }

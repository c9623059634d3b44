"""Automata whose states carry integer-vector parameters."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

from ..algebra import TRUE, DomainSpec, Node, SolverConfig, free_params
from ..algebra.ast import max_components
from ..algebra.domain import INTEGERS
from ..algebra.evaluate import GridSlot, evaluate, evaluate_term
from ..errors import ExplosionGuard, ModelError, UnboundedDomain

DEFAULT_CONFIG = SolverConfig()

Config = tuple  # (state, y) with y a tuple of ints


@dataclass(frozen=True)
class EfaTransition:
    """Guard and update read slot 1 as the source state parameter and slots
    ``2..k+1`` as the event parameters.  ``update`` lists one term per
    component of the target parameter; ``None`` keeps the parameter as is."""

    id: str
    source: str
    tag: str
    k: int
    guard: Node = TRUE
    update: Optional[tuple[Node, ...]] = None
    target: str = ""


@dataclass(frozen=True)
class Efa:
    states: tuple[str, ...]
    event_domain: DomainSpec
    state_domain: DomainSpec
    initial: frozenset[str]
    marked: frozenset[str]
    y0: Node
    transitions: tuple[EfaTransition, ...]
    state_widths: Mapping[str, int] = field(default_factory=dict)

    def width(self, q: str) -> int:
        return self.state_widths.get(q, self.state_domain.width)

    def domain_of(self, q: str) -> DomainSpec:
        """Parameter domain of ``q``; widened helper states range over all integers."""
        if q in self.state_widths:
            return DomainSpec(INTEGERS, self.state_widths[q])
        return self.state_domain

    def outgoing(self, q: str) -> list[EfaTransition]:
        return [t for t in self.transitions if t.source == q]


def validate_efa(E: Efa) -> list[str]:
    diags: list[str] = []
    states = set(E.states)
    for q in sorted((E.initial | E.marked) - states):
        diags.append(f"state {q!r} is not declared")
    if max_components(E.y0) > E.state_domain.width or free_params(E.y0) - {1}:
        diags.append("initial-parameter predicate must only mention y")
    seen: set[str] = set()
    for t in E.transitions:
        if t.id in seen:
            diags.append(f"duplicate transition id {t.id!r}")
        seen.add(t.id)
        for end, q in (("source", t.source), ("target", t.target)):
            if q not in states:
                diags.append(f"{t.id}: {end} {q!r} is not declared")
        bad = sorted(i for i in free_params(t.guard) if not 1 <= i <= t.k + 1)
        if bad:
            diags.append(f"{t.id}: guard mentions slot {bad[0]} beyond step length {t.k}")
        if t.update is None:
            if E.width(t.source) != E.width(t.target):
                diags.append(f"{t.id}: identity update between parameters of different widths")
        elif len(t.update) != E.width(t.target):
            diags.append(f"{t.id}: update has {len(t.update)} terms, target width is {E.width(t.target)}")
    return diags


# -- concrete semantics -------------------------------------------------------


def _grid(dom: DomainSpec, cfg: SolverConfig) -> GridSlot:
    return GridSlot(dom.universe(cfg.enumeration_bound), dom.width)


def _unpack(vals, dom_width: int):
    return tuple(int(v) for v in vals) if dom_width > 1 else int(vals[0])


class Stepper:
    """Successor computation with per-(transition, parameter) memoisation.

    Event parameters range over the event domain, truncated to
    ``cfg.enumeration_bound`` when it is infinite.
    """

    def __init__(self, E: Efa, cfg: Optional[SolverConfig] = None):
        self.E = E
        self.cfg = cfg or DEFAULT_CONFIG
        self.xgrid = _grid(E.event_domain, self.cfg)
        self.exact = E.event_domain.is_bounded
        self._memo: dict = {}

    def moves(self, t: EfaTransition, y: tuple) -> list[tuple[tuple, tuple]]:
        """All ``(event tuple, next parameter)`` for firing ``t`` at ``y``."""
        key = (t.id, y)
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        slots: dict = {1: y}
        for i in range(2, t.k + 2):
            slots[i] = self.xgrid
        mask = evaluate(t.guard, slots, self.xgrid, max_cells=self.cfg.max_grid_cells)
        wx = self.xgrid.width
        out = []
        if t.k == 0:
            if bool(mask):
                ny = y if t.update is None else tuple(int(evaluate_term(u, slots)) for u in t.update)
                out.append(((), ny))
        else:
            idx = np.argwhere(mask)
            if len(idx):
                nxt = None
                if t.update is not None:
                    nxt = [np.broadcast_to(evaluate_term(u, slots), mask.shape) for u in t.update]
                vals = self.xgrid.values
                for row in idx:
                    tup = tuple(
                        _unpack(vals[row[i * wx:(i + 1) * wx]], wx) for i in range(t.k)
                    )
                    ny = y if nxt is None else tuple(int(col[tuple(row)]) for col in nxt)
                    out.append((tup, ny))
        if len(self._memo) > 200_000:
            self._memo.clear()
        self._memo[key] = out
        return out


def _as_tuple(b) -> tuple:
    return b if isinstance(b, tuple) else (b,)


def efa_step(E: Efa, config: Config, event, cfg: Optional[SolverConfig] = None) -> set[Config]:
    """Successor configurations for one concrete event ``(tag, values)``."""
    state, y = config
    y = _as_tuple(y)
    tag, values = event
    values = tuple(values)
    out = set()
    for t in E.outgoing(state):
        if t.tag != tag or t.k != len(values):
            continue
        slots = {1: y}
        slots.update({i: _as_tuple(v) for i, v in enumerate(values, start=2)})
        if bool(evaluate(t.guard, slots, _grid(E.event_domain, cfg or DEFAULT_CONFIG))):
            ny = y if t.update is None else tuple(int(evaluate_term(u, slots)) for u in t.update)
            out.add((t.target, ny))
    return out


def efa_run(E: Efa, configs: Iterable[Config], u: Sequence, cfg: Optional[SolverConfig] = None) -> set[Config]:
    cur = {(q, _as_tuple(y)) for q, y in configs}
    for ev in u:
        cur = set().union(*(efa_step(E, c, ev, cfg) for c in cur)) if cur else set()
    return cur


def initial_configs(E: Efa, cfg: Optional[SolverConfig] = None) -> list[Config]:
    """Initial states paired with every initial parameter (truncated if infinite)."""
    cfg = cfg or DEFAULT_CONFIG
    ydom = E.state_domain
    grid = _grid(ydom, cfg)
    mask = evaluate(E.y0, {1: grid}, _grid(E.event_domain, cfg), max_cells=cfg.max_grid_cells)
    ys = [tuple(int(grid.values[i]) for i in row) for row in np.argwhere(mask)]
    return [(q, y) for q in sorted(E.initial) for y in ys]


def flat_language(
    E: Efa,
    max_len: int,
    marked_only: bool = True,
    cfg: Optional[SolverConfig] = None,
    cap: int = 1_000_000,
) -> set[tuple]:
    """Flat data strings of at most ``max_len`` elements.

    Explores configurations ``(state, parameter, flat prefix)`` breadth first;
    zero-step moves are followed until no new configuration appears.
    """
    cfg = cfg or DEFAULT_CONFIG
    if not (E.event_domain.is_bounded and E.state_domain.is_bounded):
        raise UnboundedDomain("flat language enumeration needs bounded domains")
    st = Stepper(E, cfg)
    start = [(q, y, ()) for q, y in initial_configs(E, cfg)]
    seen = set(start)
    frontier = list(start)
    out: set[tuple] = set()
    while frontier:
        nxt = []
        for q, y, w in frontier:
            if not marked_only or q in E.marked:
                out.add(w)
            for t in E.outgoing(q):
                if len(w) + t.k > max_len:
                    continue
                for tup, ny in st.moves(t, y):
                    c = (t.target, ny, w + tup)
                    if c not in seen:
                        seen.add(c)
                        nxt.append(c)
        if len(seen) > cap:
            raise ExplosionGuard(f"more than {cap} configurations")
        frontier = nxt
    return out


def ensure_valid(E: Efa) -> None:
    diags = validate_efa(E)
    if diags:
        raise ModelError("; ".join(diags))

"""Satisfiability and denotation of predicates.

Two backends answer the same questions.  ``enumerate`` evaluates the predicate
over the whole universe with numpy and is exact on bounded domains; on
unbounded domains it works over the truncated universe and says so through
``SatResult.exact``.  ``external`` sends SMT-LIB 2 text to a solver process
and is exact everywhere it answers.
"""
from __future__ import annotations

import threading
from dataclasses import dataclass
from typing import Mapping, Optional

import numpy as np

from ..errors import MalformedPredicate, UnboundedDomain
from .ast import Atom, Const, Node, Var, conj, free_params, has_quantifier
from .domain import ENUMERATE, DomainSpec, SolverConfig
from .evaluate import GridSlot, evaluate
from .smtlib import SmtSession, render_query, solver_command

DEFAULT_CONFIG = SolverConfig()

# per-layout subformula tables are dropped wholesale past this many entries
_CACHE_LIMIT = 8192


@dataclass(frozen=True)
class SatResult:
    sat: bool
    exact: bool
    witness: Optional[tuple] = None

    def __bool__(self) -> bool:
        return self.sat


class _ThreadState(threading.local):
    def __init__(self) -> None:
        self.caches: dict = {}
        self.sessions: dict = {}


_state = _ThreadState()


def _session(cfg: SolverConfig) -> SmtSession:
    cmd = tuple(solver_command(cfg.solver_command))
    key = (cmd, cfg.timeout_ms)
    sess = _state.sessions.get(key)
    if sess is None:
        sess = _state.sessions[key] = SmtSession(cmd, cfg.timeout_ms)
    return sess


def close_sessions() -> None:
    """Terminate this thread's solver processes."""
    for sess in _state.sessions.values():
        sess.close()
    _state.sessions.clear()


def _resolve_slots(phi: Node, domain: DomainSpec, arity: Optional[int], slot_domains) -> dict[int, DomainSpec]:
    free = free_params(phi)
    if arity is None:
        arity = max(free, default=0)
    bad = sorted(i for i in free if not 1 <= i <= arity)
    if bad:
        raise MalformedPredicate(f"free parameter slots {bad} outside arity {arity}")
    slots = {i: domain for i in range(1, arity + 1)}
    if slot_domains:
        slots.update({i: d for i, d in slot_domains.items() if i in slots})
    return slots


def _universe(dom: DomainSpec, cfg: SolverConfig) -> GridSlot:
    return GridSlot(dom.universe(cfg.enumeration_bound), dom.width)


def _layout_cache(key) -> dict:
    cache = _state.caches.get(key)
    if cache is None or len(cache) > _CACHE_LIMIT:
        if len(_state.caches) > 64:
            _state.caches.clear()
        cache = _state.caches[key] = {}
    return cache


def truth_table(
    phi: Node,
    domain: DomainSpec,
    cfg: Optional[SolverConfig] = None,
    arity: Optional[int] = None,
    slot_domains: Optional[Mapping[int, DomainSpec]] = None,
) -> tuple[np.ndarray, dict[int, GridSlot]]:
    """Boolean grid of ``phi`` with one axis per free slot component."""
    cfg = cfg or DEFAULT_CONFIG
    doms = _resolve_slots(phi, domain, arity, slot_domains)
    grid = {i: _universe(d, cfg) for i, d in doms.items()}
    quant = _universe(domain, cfg)
    key = (tuple(sorted(doms.items())), domain, cfg.enumeration_bound)
    table = evaluate(phi, grid, quant, cache=_layout_cache(key), max_cells=cfg.max_grid_cells)
    return table, grid


def _unflatten(index, grid: Mapping[int, GridSlot]) -> tuple:
    out, pos = [], 0
    for slot in sorted(grid):
        g = grid[slot]
        comps = tuple(int(g.values[index[pos + c]]) for c in range(g.width))
        pos += g.width
        out.append(comps[0] if g.width == 1 else comps)
    return tuple(out)


def is_sat(
    phi: Node,
    domain: DomainSpec,
    cfg: Optional[SolverConfig] = None,
    arity: Optional[int] = None,
    slot_domains: Optional[Mapping[int, DomainSpec]] = None,
) -> SatResult:
    """Is the denotation of ``phi`` nonempty?

    ``domain`` is the domain of every slot and of quantified parameters;
    ``slot_domains`` overrides it for individual free slots.  The witness holds
    one value per slot ``1..arity`` (an int, or a tuple for vector domains).
    """
    cfg = cfg or DEFAULT_CONFIG
    doms = _resolve_slots(phi, domain, arity, slot_domains)
    if cfg.backend == ENUMERATE:
        exact = all(d.is_bounded for d in doms.values())
        if has_quantifier(phi):
            exact = exact and domain.is_bounded
        table, grid = truth_table(phi, domain, cfg, len(doms), slot_domains)
        if not table.ndim:
            return SatResult(bool(table), exact, () if table else None)
        hits = np.argwhere(table)
        if not len(hits):
            return SatResult(False, exact)
        return SatResult(True, exact, _unflatten(hits[0], grid))
    script, names = render_query(phi, doms, domain, cfg.timeout_ms)
    status, values = _session(cfg).check(script, names)
    if status == "unsat":
        return SatResult(False, True)
    witness = []
    for slot in sorted(doms):
        comps = tuple(values[f"x{slot}_{c}"] for c in range(1, doms[slot].width + 1))
        witness.append(comps[0] if len(comps) == 1 else comps)
    return SatResult(True, True, tuple(witness))


def denotation(
    phi: Node,
    domain: DomainSpec,
    arity: Optional[int] = None,
    cfg: Optional[SolverConfig] = None,
    slot_domains: Optional[Mapping[int, DomainSpec]] = None,
) -> list[tuple]:
    """All satisfying tuples over a bounded domain, in lexicographic order."""
    doms = _resolve_slots(phi, domain, arity, slot_domains)
    if not domain.is_bounded or not all(d.is_bounded for d in doms.values()):
        raise UnboundedDomain("denotation needs a bounded domain")
    table, grid = truth_table(phi, domain, cfg, len(doms), slot_domains)
    if not table.ndim:
        return [()] if table else []
    return [_unflatten(ix, grid) for ix in np.argwhere(table)]


def _pin(values: Mapping[int, object]) -> Node:
    eqs = []
    for slot, v in sorted(values.items()):
        comps = v if isinstance(v, tuple) else (v,)
        for c, val in enumerate(comps, start=1):
            eqs.append(Atom(Var(slot, c), "=", Const(int(val))))
    return conj(*eqs)


def holds(
    phi: Node,
    values: Mapping[int, object],
    domain: DomainSpec,
    cfg: Optional[SolverConfig] = None,
) -> bool:
    """Truth of ``phi`` at one concrete point.

    Quantifier-free predicates are evaluated directly.  Quantified ones range
    over ``domain`` (truncated for the enumerate backend on infinite domains).
    """
    cfg = cfg or DEFAULT_CONFIG
    slots = {s: (v if isinstance(v, tuple) else (v,)) for s, v in values.items()}
    if not has_quantifier(phi):
        return bool(evaluate(phi, slots))
    if cfg.backend == ENUMERATE or domain.is_bounded:
        return bool(evaluate(phi, slots, _universe(domain, cfg), max_cells=cfg.max_grid_cells))
    doms = {s: DomainSpec("integers", len(v)) for s, v in slots.items()}
    return bool(is_sat(conj(_pin(values), phi), domain, cfg, max(slots, default=0), doms))

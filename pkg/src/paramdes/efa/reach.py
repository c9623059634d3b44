"""Bounded reachability by unrolling transition sequences."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional

from ..algebra import Atom, Node, SolverConfig, conj, is_sat
from ..algebra.ast import Var
from ..algebra.domain import ENUMERATE
from ..algebra.transform import substitute
from ..errors import ExplosionGuard
from .automaton import DEFAULT_CONFIG, Efa, EfaTransition, Stepper, initial_configs


@dataclass
class ReachResult:
    reachable: bool
    depth: int
    exact: bool
    sequence: tuple[str, ...] = ()
    events: tuple = ()
    parameters: tuple = ()
    sequences_checked: int = 0
    details: dict = field(default_factory=dict)

    def data_string(self) -> tuple:
        return tuple(vals for _, vals in self.events if len(vals))


def bounded_reach(
    E: Efa,
    target: Iterable[str],
    depth: int,
    cfg: Optional[SolverConfig] = None,
    max_sequences: int = 200_000,
) -> ReachResult:
    """Is some ``target`` state reachable using at most ``depth`` transitions?

    Transition sequences are explored depth first from the initial states.
    With the enumerate backend each prefix carries the set of concrete
    parameters it can end in; with the external backend each prefix is one
    path constraint handed to the solver.  Unsatisfiable prefixes are pruned.
    Answers are complete only up to ``depth``.
    """
    cfg = cfg or DEFAULT_CONFIG
    target = frozenset(target)
    if cfg.backend == ENUMERATE:
        return _reach_enumerate(E, target, depth, cfg, max_sequences)
    return _reach_symbolic(E, target, depth, cfg, max_sequences)


def _reach_enumerate(E: Efa, target, depth: int, cfg: SolverConfig, cap: int) -> ReachResult:
    st = Stepper(E, cfg)
    exact = E.event_domain.is_bounded and E.state_domain.is_bounded
    # a frame maps each reachable parameter to (previous parameter, event tuple)
    counter = [0]
    by_state: dict[str, dict] = {}
    for q, y in initial_configs(E, cfg):
        by_state.setdefault(q, {})[y] = None

    def found(q: str, frames: list, seq: list) -> ReachResult:
        y = next(iter(frames[-1]))
        params, events = [y], []
        for frame, t in zip(reversed(frames[1:]), reversed(seq)):
            prev, tup = frame[y]
            events.append((t.tag, tup))
            params.append(prev)
            y = prev
        return ReachResult(
            True,
            depth,
            exact,
            tuple(t.id for t in seq),
            tuple(reversed(events)),
            tuple(reversed(params)),
            counter[0],
        )

    def dfs(q: str, frames: list, seq: list) -> Optional[ReachResult]:
        counter[0] += 1
        if counter[0] > cap:
            raise ExplosionGuard(f"more than {cap} transition sequences")
        if q in target:
            return found(q, frames, seq)
        if len(seq) == depth:
            return None
        for t in E.outgoing(q):
            frame: dict = {}
            for y in frames[-1]:
                for tup, ny in st.moves(t, y):
                    frame.setdefault(ny, (y, tup))
            if frame:
                hit = dfs(t.target, frames + [frame], seq + [t])
                if hit:
                    return hit
        return None

    for q in sorted(by_state):
        hit = dfs(q, [by_state[q]], [])
        if hit:
            return hit
    return ReachResult(False, depth, exact, sequences_checked=counter[0])


def _reach_symbolic(E: Efa, target, depth: int, cfg: SolverConfig, cap: int) -> ReachResult:
    counter = [0]

    class Path:
        """Slot bookkeeping for one unrolled prefix."""

        def __init__(self):
            self.doms: dict = {}
            self.next_slot = 1
            self.parts: list[Node] = []
            self.y_slots: list[int] = []
            self.x_slots: list[list[int]] = []

        def fresh(self, dom) -> int:
            s = self.next_slot
            self.next_slot += 1
            self.doms[s] = dom
            return s

        def copy(self) -> "Path":
            p = Path()
            p.doms = dict(self.doms)
            p.next_slot = self.next_slot
            p.parts = list(self.parts)
            p.y_slots = list(self.y_slots)
            p.x_slots = [list(x) for x in self.x_slots]
            return p

    def extend(p: Path, t: EfaTransition) -> Path:
        p = p.copy()
        ys = p.y_slots[-1]
        xs = [p.fresh(E.event_domain) for _ in range(t.k)]
        ny = p.fresh(E.domain_of(t.target))
        mapping = {1: ys, **{i + 2: s for i, s in enumerate(xs)}}
        ren = lambda n: substitute(n, lambda v: Var(mapping[v.param], v.comp) if v.param in mapping else None)  # noqa: E731
        p.parts.append(ren(t.guard))
        width = E.width(t.target)
        for c in range(1, width + 1):
            rhs = Var(ys, c) if t.update is None else ren(t.update[c - 1])
            p.parts.append(Atom(Var(ny, c), "=", rhs))
        p.y_slots.append(ny)
        p.x_slots.append(xs)
        return p

    def solve(p: Path):
        phi = conj(*p.parts)
        return is_sat(phi, E.event_domain, cfg, p.next_slot - 1, p.doms)

    def dfs(q: str, p: Path, seq: list) -> Optional[ReachResult]:
        counter[0] += 1
        if counter[0] > cap:
            raise ExplosionGuard(f"more than {cap} transition sequences")
        res = solve(p)
        if not res:
            return None
        if q in target:
            wit = res.witness
            events = tuple(
                (t.tag, tuple(wit[s - 1] for s in xs)) for t, xs in zip(seq, p.x_slots)
            )
            params = tuple(wit[s - 1] for s in p.y_slots)
            return ReachResult(True, depth, True, tuple(t.id for t in seq), events, params, counter[0])
        if len(seq) == depth:
            return None
        for t in E.outgoing(q):
            hit = dfs(t.target, extend(p, t), seq + [t])
            if hit:
                return hit
        return None

    for q in sorted(E.initial):
        p = Path()
        y0 = p.fresh(E.state_domain)
        p.y_slots.append(y0)
        p.parts.append(substitute(E.y0, lambda v: Var(y0, v.comp) if v.param == 1 else None))
        hit = dfs(q, p, [])
        if hit:
            return hit
    return ReachResult(False, depth, True, sequences_checked=counter[0])

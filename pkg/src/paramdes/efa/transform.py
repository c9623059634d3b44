"""Structure-changing constructions on parameterized automata."""
from __future__ import annotations

from ..algebra import TRUE, DomainSpec, Node, Var
from ..algebra.transform import shift, substitute
from ..model import EpEfa
from .automaton import Efa, EfaTransition


def embed_ep_efa(S: EpEfa) -> Efa:
    """The same automaton with a constant, ignored state parameter."""
    ts = tuple(
        EfaTransition(t.id, t.source, t.tag, t.k, shift(t.guard, 1), None, t.target)
        for t in S.transitions
    )
    return Efa(S.states, S.domain, DomainSpec.bounded(0, 0), S.initial, S.marked, TRUE, ts)


def _fold(node: Node, k: int, wy: int, wx: int) -> Node:
    """Rewrite a ``k``-step guard or term for the last link of a chain.

    Event parameters ``1..k-1`` now live in the state parameter after the
    original ``wy`` components; event parameter ``k`` becomes the single event
    parameter of the last link.
    """

    def fn(v: Var):
        if v.param == 1:
            return None
        i = v.param - 1
        if i < k:
            return Var(1, wy + (i - 1) * wx + v.comp)
        return Var(2, v.comp)

    return substitute(node, fn)


def flatten_step_length(E: Efa) -> Efa:
    """Replace every ``k > 1`` transition by a chain of ``k`` one-step links.

    The first ``k - 1`` links accept anything and append the consumed event
    parameter to the state parameter of a fresh intermediate state; the last
    link checks the original guard and computes the original update.
    """
    wx = E.event_domain.width
    states = list(E.states)
    widths = dict(E.state_widths)
    out: list[EfaTransition] = []
    for t in E.transitions:
        if t.k <= 1:
            out.append(t)
            continue
        wy = E.width(t.source)
        prev = t.source
        for j in range(1, t.k):
            fresh = f"{t.id}#{j}"
            states.append(fresh)
            widths[fresh] = wy + j * wx
            keep = tuple(Var(1, c) for c in range(1, wy + (j - 1) * wx + 1))
            grab = tuple(Var(2, c) for c in range(1, wx + 1))
            out.append(EfaTransition(f"{t.id}#{j}", prev, f"{t.tag}#{j}", 1, TRUE, keep + grab, fresh))
            prev = fresh
        guard = _fold(t.guard, t.k, wy, wx)
        if t.update is None:
            update = tuple(Var(1, c) for c in range(1, E.width(t.target) + 1))
        else:
            update = tuple(_fold(u, t.k, wy, wx) for u in t.update)
        out.append(EfaTransition(f"{t.id}#{t.k}", prev, f"{t.tag}#{t.k}", 1, guard, update, t.target))
    return Efa(
        tuple(states),
        E.event_domain,
        E.state_domain,
        E.initial,
        E.marked,
        E.y0,
        tuple(out),
        widths,
    )

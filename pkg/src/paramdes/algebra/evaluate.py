"""Vectorised evaluation of predicates over finite universes.

Every free parameter component is either pinned to a concrete integer or laid
out along its own numpy axis; each quantifier nesting level gets fresh axes
that are reduced with ``any``.  One evaluation therefore yields the truth value
of the predicate at every point of the grid at once.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, MutableMapping, Optional, Union

import numpy as np

from ..errors import ExplosionGuard, MalformedPredicate
from .ast import (
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
    quantifier_depth,
)


@dataclass(frozen=True)
class GridSlot:
    """A slot enumerated over ``values`` in each of its ``width`` components."""

    values: np.ndarray
    width: int = 1

    def __hash__(self) -> int:
        return hash((self.values.tobytes(), self.width))

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, GridSlot)
            and self.width == other.width
            and np.array_equal(self.values, other.values)
        )


SlotBinding = Union[GridSlot, tuple]

_CMP = {
    "=": np.equal,
    "!=": np.not_equal,
    "<": np.less,
    "<=": np.less_equal,
    ">": np.greater,
    ">=": np.greater_equal,
}


class _Evaluator:
    def __init__(self, quant_values: np.ndarray, quant_width: int, ndim: int, base: int, cache):
        self.quant_values = quant_values
        self.quant_width = quant_width
        self.ndim = ndim
        self.base = base
        self.cache = cache

    def term(self, t: Node, env) -> np.ndarray:
        if isinstance(t, Var):
            comps = env.get(t.param)
            if comps is None:
                raise MalformedPredicate(f"unbound parameter x{t.param}")
            if not 1 <= t.comp <= len(comps):
                raise MalformedPredicate(f"component {t.comp} out of range for x{t.param}")
            return comps[t.comp - 1]
        if isinstance(t, Const):
            return np.int64(t.value)
        if isinstance(t, Sum):
            return self.term(t.left, env) + self.term(t.right, env)
        if isinstance(t, Diff):
            return self.term(t.left, env) - self.term(t.right, env)
        if isinstance(t, ScalarMul):
            return np.int64(t.coef) * self.term(t.term, env)
        if isinstance(t, IfThenElse):
            return np.where(self.pred(t.cond, env, 1), self.term(t.then, env), self.term(t.orelse, env))
        raise MalformedPredicate(f"not a term: {t!r}")

    def pred(self, p: Node, env, depth: int) -> np.ndarray:
        cacheable = depth == 0 and self.cache is not None
        if cacheable:
            # tables keep singleton quantifier axes, so ndim is part of the key
            hit = self.cache.get((p, self.ndim))
            if hit is not None:
                return hit
        out = self._pred(p, env, depth)
        if cacheable:
            self.cache[(p, self.ndim)] = out
        return out

    def _pred(self, p: Node, env, depth: int) -> np.ndarray:
        if isinstance(p, TrueP):
            return np.bool_(True)
        if isinstance(p, FalseP):
            return np.bool_(False)
        if isinstance(p, Atom):
            return _CMP[p.rel](self.term(p.left, env), self.term(p.right, env))
        if isinstance(p, Not):
            return np.logical_not(self.pred(p.arg, env, depth))
        if isinstance(p, And):
            left = self.pred(p.left, env, depth)
            if left.ndim == 0 and not left:
                return left
            return np.logical_and(left, self.pred(p.right, env, depth))
        if isinstance(p, Or):
            left = self.pred(p.left, env, depth)
            if left.ndim == 0 and left:
                return left
            return np.logical_or(left, self.pred(p.right, env, depth))
        if isinstance(p, Exists):
            first = self.base + depth * self.quant_width
            axes = tuple(range(first, first + self.quant_width))
            comps = []
            for ax in axes:
                shape = [1] * self.ndim
                shape[ax] = len(self.quant_values)
                comps.append(self.quant_values.reshape(shape))
            inner = dict(env)
            inner[p.param] = comps
            body = self.pred(p.body, inner, depth + 1)
            if body.ndim == 0:
                return body if len(self.quant_values) else np.bool_(False)
            return body.any(axis=axes, keepdims=True)
        raise MalformedPredicate(f"not a predicate: {p!r}")


def _layout(depth: int, slots: Mapping[int, SlotBinding], quant: Optional[GridSlot], cache, max_cells: int):
    grid_shape: list[int] = []
    env: dict[int, list] = {}
    grid_slots = sorted(s for s, b in slots.items() if isinstance(b, GridSlot))
    n_grid = sum(slots[s].width for s in grid_slots)
    qwidth = quant.width if quant is not None else 1
    ndim = n_grid + depth * qwidth
    if depth and quant is None:
        raise MalformedPredicate("quantified predicate evaluated without a quantifier universe")
    cells = 1
    for s in grid_slots:
        cells *= len(slots[s].values) ** slots[s].width
    if depth:
        cells *= len(quant.values) ** (depth * qwidth)
    if cells > max_cells:
        raise ExplosionGuard(f"evaluation grid of {cells} cells exceeds cap {max_cells}")

    axis = 0
    for s in grid_slots:
        b = slots[s]
        comps = []
        for _ in range(b.width):
            shape = [1] * ndim
            shape[axis] = len(b.values)
            comps.append(b.values.reshape(shape))
            grid_shape.append(len(b.values))
            axis += 1
        env[s] = comps
    for s, b in slots.items():
        if not isinstance(b, GridSlot):
            vec = b if isinstance(b, tuple) else (b,)
            env[s] = [np.int64(v) for v in vec]

    ev = _Evaluator(
        quant.values if quant is not None else np.zeros(0, dtype=np.int64),
        qwidth,
        ndim,
        n_grid,
        cache,
    )
    return ev, env, tuple(grid_shape), n_grid


def evaluate(
    phi: Node,
    slots: Mapping[int, SlotBinding],
    quant: Optional[GridSlot] = None,
    cache: Optional[MutableMapping] = None,
    max_cells: int = 50_000_000,
) -> np.ndarray:
    """Truth table of ``phi`` over the grid described by ``slots``.

    ``slots`` maps each free slot either to a :class:`GridSlot` or to a tuple
    of concrete component values.  Grid slots contribute axes in ascending slot
    then component order; the result has exactly those axes.  ``quant`` is the
    universe for quantified parameters.  ``cache`` memoises unquantified-context
    subformula tables and must only be shared between calls with the same
    ``slots`` layout.
    """
    ev, env, grid_shape, n_grid = _layout(quantifier_depth(phi), slots, quant, cache, max_cells)
    res = np.asarray(ev.pred(phi, env, 0))
    if res.ndim:
        # quantifier axes have been reduced to length 1
        res = res.reshape(res.shape[:n_grid])
    return np.broadcast_to(res, grid_shape)


def evaluate_term(
    term: Node,
    slots: Mapping[int, SlotBinding],
    quant: Optional[GridSlot] = None,
    max_cells: int = 50_000_000,
) -> np.ndarray:
    """Value table of an integer term over the same grids as :func:`evaluate`."""
    ev, env, grid_shape, n_grid = _layout(quantifier_depth(term), slots, quant, None, max_cells)
    res = np.asarray(ev.term(term, env))
    if res.ndim:
        res = res.reshape(res.shape[:n_grid])
    return np.broadcast_to(res, grid_shape)


def holds(phi: Node, values: Mapping[int, object], quant: Optional[GridSlot] = None) -> bool:
    """Truth of ``phi`` at one point; ``values`` maps slot -> int or tuple."""
    slots = {s: (v if isinstance(v, tuple) else (v,)) for s, v in values.items()}
    return bool(evaluate(phi, slots, quant))

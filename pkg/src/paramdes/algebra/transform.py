"""Syntactic operations: capture-avoiding substitution, renaming, reversal,
and existential projection onto observable parameter positions."""
from __future__ import annotations

from typing import Callable, Iterable, Mapping, Optional, Sequence

from ..errors import MalformedPredicate, NonInjectiveMapping
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
    all_params,
    children,
    conj,
    free_params,
)

VarMap = Callable[[Var], Optional[Node]]


def substitute(node: Node, fn: VarMap) -> Node:
    """Replace free variables by ``fn(var)`` (``None`` keeps the variable).

    Bound parameters are renamed apart whenever a replacement would otherwise
    be captured.
    """
    if isinstance(node, Var):
        out = fn(node)
        return node if out is None else out
    if isinstance(node, (Const, TrueP, FalseP)):
        return node
    if isinstance(node, Sum):
        return Sum(substitute(node.left, fn), substitute(node.right, fn))
    if isinstance(node, Diff):
        return Diff(substitute(node.left, fn), substitute(node.right, fn))
    if isinstance(node, ScalarMul):
        return ScalarMul(node.coef, substitute(node.term, fn))
    if isinstance(node, IfThenElse):
        return IfThenElse(substitute(node.cond, fn), substitute(node.then, fn), substitute(node.orelse, fn))
    if isinstance(node, Atom):
        return Atom(substitute(node.left, fn), node.rel, substitute(node.right, fn))
    if isinstance(node, Not):
        return Not(substitute(node.arg, fn))
    if isinstance(node, And):
        return And(substitute(node.left, fn), substitute(node.right, fn))
    if isinstance(node, Or):
        return Or(substitute(node.left, fn), substitute(node.right, fn))
    if isinstance(node, Exists):
        j = node.param
        images: set[int] = set()
        for v in _free_vars(node.body):
            if v.param == j:
                continue
            img = fn(v)
            images |= all_params(img if img is not None else v)
        if j in images:
            fresh = max(images | all_params(node) | {j}) + 1
            body = substitute(node.body, lambda v: Var(fresh, v.comp) if v.param == j else None)
            j = fresh
        else:
            body = node.body

        def inner(v: Var, _j=j) -> Optional[Node]:
            return None if v.param == _j else fn(v)

        return Exists(j, substitute(body, inner))
    raise MalformedPredicate(f"not a syntax node: {node!r}")


def _free_vars(node: Node, bound: frozenset[int] = frozenset()) -> set[Var]:
    if isinstance(node, Var):
        return set() if node.param in bound else {node}
    if isinstance(node, Exists):
        return _free_vars(node.body, bound | {node.param})
    out: set[Var] = set()
    for c in children(node):
        out |= _free_vars(c, bound)
    return out


def rename(phi: Node, mapping: Mapping[int, int]) -> Node:
    """Rename free parameter slots; unmapped slots are left in place."""
    free = free_params(phi)
    total = {i: mapping.get(i, i) for i in free}
    if len(set(total.values())) != len(total):
        raise NonInjectiveMapping(f"mapping {dict(mapping)} is not injective on free slots {sorted(free)}")
    if all(i == t for i, t in total.items()):
        return phi
    return substitute(phi, lambda v: Var(total[v.param], v.comp) if v.param in total else None)


def reverse_predicate(phi: Node, arity: int) -> Node:
    """Reverse parameter order: slot ``i`` becomes ``arity + 1 - i``."""
    if arity <= 1:
        return phi
    return rename(phi, {i: arity + 1 - i for i in range(1, arity + 1)})


def shift(phi: Node, offset: int) -> Node:
    return rename(phi, {i: i + offset for i in free_params(phi)})


def instantiate(theta: Node, slot: int) -> Node:
    """The one-place condition ``theta(x1)`` applied to slot ``slot``."""
    return rename(theta, {1: slot})


def exists_project(phi: Node, arity: int, observable: Sequence[int], theta: Node) -> Node:
    """Observable-position projection of ``phi``.

    Returns ``(and theta(x_i) for i in observable)`` conjoined with ``phi``
    under a joint existential over every hidden position ``j``, each hidden
    value additionally required to fail ``theta``.  Free slots of the result
    are exactly ``observable``, in their original positions.
    """
    idx = list(observable)
    if len(set(idx)) != len(idx) or any(not 1 <= i <= arity for i in idx):
        raise MalformedPredicate(f"bad observable index set {idx} for arity {arity}")
    hidden = [j for j in range(1, arity + 1) if j not in idx]
    shown = [instantiate(theta, i) for i in sorted(idx)]
    body = conj(*(Not(instantiate(theta, j)) for j in hidden), phi) if hidden else phi
    for j in reversed(hidden):
        body = Exists(j, body)
    return conj(*shown, body)


def compact(phi: Node, observable: Iterable[int]) -> Node:
    """Rename the observable slots to ``1..n`` preserving their order."""
    return rename(phi, {i: n for n, i in enumerate(sorted(observable), start=1)})

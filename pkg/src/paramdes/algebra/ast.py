"""Predicate and term syntax trees over indexed integer-vector parameters.

Parameter slots are 1-based.  ``Var(i, j)`` is component ``j`` of slot ``i``;
for unit-width domains ``j`` is always 1.  Nodes are immutable and hashable,
so they can be shared freely and used as cache keys.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Union

RELATIONS = ("=", "!=", "<", "<=", ">", ">=")


@dataclass(frozen=True)
class Node:
    _hash: int = field(init=False, repr=False, compare=False, default=0)

    def __post_init__(self) -> None:
        values = tuple(getattr(self, f) for f in self.__dataclass_fields__ if f != "_hash")
        object.__setattr__(self, "_hash", hash((type(self).__name__,) + values))

    def __hash__(self) -> int:
        return self._hash


# -- terms -------------------------------------------------------------------


@dataclass(frozen=True, eq=True)
class Var(Node):
    param: int
    comp: int = 1

    def __hash__(self) -> int:
        return self._hash


@dataclass(frozen=True, eq=True)
class Const(Node):
    value: int

    def __hash__(self) -> int:
        return self._hash


@dataclass(frozen=True, eq=True)
class Sum(Node):
    left: "Term"
    right: "Term"

    def __hash__(self) -> int:
        return self._hash


@dataclass(frozen=True, eq=True)
class Diff(Node):
    left: "Term"
    right: "Term"

    def __hash__(self) -> int:
        return self._hash


@dataclass(frozen=True, eq=True)
class ScalarMul(Node):
    coef: int
    term: "Term"

    def __hash__(self) -> int:
        return self._hash


@dataclass(frozen=True, eq=True)
class IfThenElse(Node):
    cond: "Predicate"
    then: "Term"
    orelse: "Term"

    def __hash__(self) -> int:
        return self._hash


Term = Union[Var, Const, Sum, Diff, ScalarMul, IfThenElse]


# -- predicates --------------------------------------------------------------


@dataclass(frozen=True, eq=True)
class Atom(Node):
    left: Term
    rel: str
    right: Term

    def __post_init__(self) -> None:
        if self.rel not in RELATIONS:
            raise ValueError(f"unknown relation {self.rel!r}")
        super().__post_init__()

    def __hash__(self) -> int:
        return self._hash


@dataclass(frozen=True, eq=True)
class TrueP(Node):
    def __hash__(self) -> int:
        return self._hash


@dataclass(frozen=True, eq=True)
class FalseP(Node):
    def __hash__(self) -> int:
        return self._hash


@dataclass(frozen=True, eq=True)
class Not(Node):
    arg: "Predicate"

    def __hash__(self) -> int:
        return self._hash


@dataclass(frozen=True, eq=True)
class And(Node):
    left: "Predicate"
    right: "Predicate"

    def __hash__(self) -> int:
        return self._hash


@dataclass(frozen=True, eq=True)
class Or(Node):
    left: "Predicate"
    right: "Predicate"

    def __hash__(self) -> int:
        return self._hash


@dataclass(frozen=True, eq=True)
class Exists(Node):
    param: int
    body: "Predicate"

    def __hash__(self) -> int:
        return self._hash


Predicate = Union[Atom, TrueP, FalseP, Not, And, Or, Exists]

TRUE = TrueP()
FALSE = FalseP()


def conj(*preds: Predicate) -> Predicate:
    """Right-nested conjunction; the empty conjunction is ``TRUE``."""
    if not preds:
        return TRUE
    out = preds[-1]
    for p in reversed(preds[:-1]):
        out = And(p, out)
    return out


def disj(*preds: Predicate) -> Predicate:
    if not preds:
        return FALSE
    out = preds[-1]
    for p in reversed(preds[:-1]):
        out = Or(p, out)
    return out


def atom(left: Term | int, rel: str, right: Term | int) -> Atom:
    if isinstance(left, int):
        left = Const(left)
    if isinstance(right, int):
        right = Const(right)
    return Atom(left, rel, right)


def flatten_and(p: Predicate) -> list[Predicate]:
    if isinstance(p, And):
        return flatten_and(p.left) + flatten_and(p.right)
    return [p]


def flatten_or(p: Predicate) -> list[Predicate]:
    if isinstance(p, Or):
        return flatten_or(p.left) + flatten_or(p.right)
    return [p]


# -- traversal ---------------------------------------------------------------


def children(node: Node) -> Iterator[Node]:
    if isinstance(node, (Sum, Diff)):
        yield node.left
        yield node.right
    elif isinstance(node, ScalarMul):
        yield node.term
    elif isinstance(node, IfThenElse):
        yield node.cond
        yield node.then
        yield node.orelse
    elif isinstance(node, Atom):
        yield node.left
        yield node.right
    elif isinstance(node, Not):
        yield node.arg
    elif isinstance(node, (And, Or)):
        yield node.left
        yield node.right
    elif isinstance(node, Exists):
        yield node.body


def free_params(node: Node) -> frozenset[int]:
    """Parameter slots occurring free in ``node``."""
    if isinstance(node, Var):
        return frozenset((node.param,))
    if isinstance(node, Exists):
        return free_params(node.body) - {node.param}
    out: frozenset[int] = frozenset()
    for c in children(node):
        out |= free_params(c)
    return out


def all_params(node: Node) -> frozenset[int]:
    """Every slot index mentioned, free or bound."""
    if isinstance(node, Var):
        return frozenset((node.param,))
    out: frozenset[int] = frozenset((node.param,)) if isinstance(node, Exists) else frozenset()
    for c in children(node):
        out |= all_params(c)
    return out


def max_components(node: Node) -> int:
    if isinstance(node, Var):
        return node.comp
    return max((max_components(c) for c in children(node)), default=0)


def quantifier_depth(node: Node) -> int:
    inner = max((quantifier_depth(c) for c in children(node)), default=0)
    return inner + 1 if isinstance(node, Exists) else inner


def has_quantifier(node: Node) -> bool:
    return quantifier_depth(node) > 0


def size(node: Node) -> int:
    return 1 + sum(size(c) for c in children(node))

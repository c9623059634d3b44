"""S-expression concrete syntax for predicates and terms.

Examples::

    (and (>= x1 5) (= x2 (+ x1 1)))
    (exists x2 (and (< x2 5) (> (+ x1 x2) 9)))
    (= x1.3 (ite (= y2 0) 4 (+ y3 1)))        ; efa mode

In the default mode ``x<i>`` is parameter slot ``i``.  In ``efa`` mode slot 1
is the state parameter, written ``y``/``y<j>`` (component ``j``), and event
parameter ``x<i>`` is slot ``i + 1``.  ``x<i>.<j>`` selects component ``j``.
"""
from __future__ import annotations

import re

from ..errors import MalformedPredicate
from .ast import (
    FALSE,
    TRUE,
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
    conj,
    disj,
)

_TOKEN = re.compile(r"\s*(?:(;[^\n]*)|(\()|(\))|([^\s()]+))")
_XVAR = re.compile(r"^x(\d+)(?:\.(\d+))?$")
_YVAR = re.compile(r"^y(\d*)$")
_INT = re.compile(r"^-?\d+$")

_REL_ALIASES = {"=": "=", "==": "=", "!=": "!=", "distinct": "!=", "<": "<", "<=": "<=", ">": ">", ">=": ">="}


def _tokenize(text: str) -> list[str]:
    pos, out = 0, []
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise MalformedPredicate(f"cannot tokenize near {text[pos:pos + 20]!r}")
        pos = m.end()
        if m.group(1):
            continue
        out.append(m.group(2) or m.group(3) or m.group(4))
    return out


def _read(tokens: list[str], i: int):
    if i >= len(tokens):
        raise MalformedPredicate("unexpected end of input")
    tok = tokens[i]
    if tok == "(":
        items, i = [], i + 1
        while i < len(tokens) and tokens[i] != ")":
            item, i = _read(tokens, i)
            items.append(item)
        if i >= len(tokens):
            raise MalformedPredicate("missing ')'")
        return items, i + 1
    if tok == ")":
        raise MalformedPredicate("unexpected ')'")
    return tok, i + 1


def read_sexpr(text: str):
    tokens = _tokenize(text)
    tree, end = _read(tokens, 0)
    if end != len(tokens):
        raise MalformedPredicate(f"trailing input after expression: {' '.join(tokens[end:])}")
    return tree


class _Parser:
    def __init__(self, efa: bool):
        self.efa = efa

    def var(self, name: str) -> Var:
        m = _XVAR.match(name)
        if m:
            slot = int(m.group(1))
            if slot < 1:
                raise MalformedPredicate(f"parameter index must be >= 1: {name}")
            comp = int(m.group(2) or 1)
            return Var(slot + 1 if self.efa else slot, comp)
        m = _YVAR.match(name)
        if m and self.efa:
            return Var(1, int(m.group(1) or 1))
        raise MalformedPredicate(f"unknown variable {name!r}")

    def slot_of(self, name: str) -> int:
        v = self.var(name)
        if v.comp != 1 and "." in name:
            raise MalformedPredicate("quantify a whole parameter, not a component")
        return v.param

    def term(self, tree) -> Node:
        if isinstance(tree, str):
            if _INT.match(tree):
                return Const(int(tree))
            return self.var(tree)
        if not tree:
            raise MalformedPredicate("empty term")
        head, args = tree[0], tree[1:]
        if head == "+":
            if not args:
                return Const(0)
            out = self.term(args[0])
            for a in args[1:]:
                out = Sum(out, self.term(a))
            return out
        if head == "-":
            if len(args) == 1:
                inner = self.term(args[0])
                if isinstance(inner, Const):
                    return Const(-inner.value)
                return ScalarMul(-1, inner)
            if len(args) == 2:
                return Diff(self.term(args[0]), self.term(args[1]))
            raise MalformedPredicate("'-' takes one or two arguments")
        if head == "*":
            if len(args) != 2:
                raise MalformedPredicate("'*' takes two arguments")
            a, b = self.term(args[0]), self.term(args[1])
            if isinstance(a, Const):
                return ScalarMul(a.value, b)
            if isinstance(b, Const):
                return ScalarMul(b.value, a)
            raise MalformedPredicate("nonlinear multiplication is not supported")
        if head == "ite":
            if len(args) != 3:
                raise MalformedPredicate("'ite' takes three arguments")
            return IfThenElse(self.pred(args[0]), self.term(args[1]), self.term(args[2]))
        raise MalformedPredicate(f"unknown term operator {head!r}")

    def pred(self, tree) -> Node:
        if isinstance(tree, str):
            if tree == "true":
                return TRUE
            if tree == "false":
                return FALSE
            raise MalformedPredicate(f"expected a predicate, got {tree!r}")
        if not tree:
            raise MalformedPredicate("empty predicate")
        head, args = tree[0], tree[1:]
        if not isinstance(head, str):
            raise MalformedPredicate("operator must be a symbol")
        if head in _REL_ALIASES:
            if len(args) != 2:
                raise MalformedPredicate(f"relation {head} takes two arguments")
            return Atom(self.term(args[0]), _REL_ALIASES[head], self.term(args[1]))
        if head == "not":
            if len(args) != 1:
                raise MalformedPredicate("'not' takes one argument")
            return Not(self.pred(args[0]))
        if head == "and":
            return conj(*(self.pred(a) for a in args))
        if head == "or":
            return disj(*(self.pred(a) for a in args))
        if head in ("=>", "implies"):
            if len(args) != 2:
                raise MalformedPredicate("'=>' takes two arguments")
            return Or(Not(self.pred(args[0])), self.pred(args[1]))
        if head == "exists":
            if len(args) != 2:
                raise MalformedPredicate("'exists' takes a variable (or list) and a body")
            names = args[0] if isinstance(args[0], list) else [args[0]]
            body = self.pred(args[1])
            for name in reversed(names):
                if not isinstance(name, str):
                    raise MalformedPredicate("bad quantified variable")
                body = Exists(self.slot_of(name), body)
            return body
        raise MalformedPredicate(f"unknown predicate operator {head!r}")


def parse_predicate(text: str, efa: bool = False):
    return _Parser(efa).pred(read_sexpr(text))


def parse_term(text: str, efa: bool = False):
    return _Parser(efa).term(read_sexpr(text))


def _var_name(v: Var, efa: bool) -> str:
    if efa:
        if v.param == 1:
            return f"y{v.comp}"
        base = f"x{v.param - 1}"
    else:
        base = f"x{v.param}"
    return base if v.comp == 1 else f"{base}.{v.comp}"


def _slot_name(slot: int, efa: bool) -> str:
    if efa:
        return "y" if slot == 1 else f"x{slot - 1}"
    return f"x{slot}"


def to_sexpr(node: Node, efa: bool = False) -> str:
    """Render a term or predicate; ``parse`` of the result denotes the same set."""
    s = lambda n: to_sexpr(n, efa)  # noqa: E731
    if isinstance(node, Var):
        return _var_name(node, efa)
    if isinstance(node, Const):
        return str(node.value)
    if isinstance(node, Sum):
        # the reader nests n-ary sums to the left, so only that spine is flattened
        parts = []
        while isinstance(node, Sum):
            parts.append(s(node.right))
            node = node.left
        parts.append(s(node))
        return "(+ " + " ".join(reversed(parts)) + ")"
    if isinstance(node, Diff):
        return f"(- {s(node.left)} {s(node.right)})"
    if isinstance(node, ScalarMul):
        return f"(* {node.coef} {s(node.term)})"
    if isinstance(node, IfThenElse):
        return f"(ite {s(node.cond)} {s(node.then)} {s(node.orelse)})"
    if isinstance(node, TrueP):
        return "true"
    if isinstance(node, FalseP):
        return "false"
    if isinstance(node, Atom):
        rel = "distinct" if node.rel == "!=" else node.rel
        return f"({rel} {s(node.left)} {s(node.right)})"
    if isinstance(node, Not):
        return f"(not {s(node.arg)})"
    if isinstance(node, (And, Or)):
        # n-ary connectives read back right-nested; flatten that spine only
        kind, parts = type(node), []
        while isinstance(node, kind):
            parts.append(s(node.left))
            node = node.right
        parts.append(s(node))
        return ("(and " if kind is And else "(or ") + " ".join(parts) + ")"
    if isinstance(node, Exists):
        return f"(exists {_slot_name(node.param, efa)} {s(node.body)})"
    raise TypeError(f"not a syntax node: {node!r}")

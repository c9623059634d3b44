"""Seeded random models for property tests and the CLI self-test."""
from __future__ import annotations

import random
from typing import Optional

from .algebra import TRUE, DomainSpec, Node, atom, conj, disj
from .algebra.ast import Const, Not, Sum, Var
from .model import EPSILON, EpEfa, SymbolicTransition

RELS = ("=", "!=", "<", "<=", ">", ">=")


def random_atom(rng: random.Random, k: int, hi: int) -> Node:
    i = rng.randint(1, k)
    others = [j for j in range(1, k + 1) if j != i]
    if others and rng.random() < 0.5:
        right = Var(rng.choice(others))
        if rng.random() < 0.4:
            right = Sum(right, Const(rng.randint(1, 3)))
    else:
        right = Const(rng.randint(0, hi))
    return atom(Var(i), rng.choice(RELS), right)


def random_guard(rng: random.Random, k: int, hi: int, depth: int = 2) -> Node:
    if k == 0:
        return TRUE
    if depth == 0 or rng.random() < 0.45:
        return TRUE if rng.random() < 0.08 else random_atom(rng, k, hi)
    op = rng.random()
    a = random_guard(rng, k, hi, depth - 1)
    if op < 0.15:
        return Not(a)
    b = random_guard(rng, k, hi, depth - 1)
    return conj(a, b) if op < 0.6 else disj(a, b)


def random_theta(rng: random.Random, hi: int) -> Node:
    c = rng.randint(2, max(2, hi - 2))
    options = [
        atom(Var(1), ">=", c),
        atom(Var(1), "<", c),
        atom(Var(1), "!=", c),
        disj(atom(Var(1), "<", c), atom(Var(1), ">", min(hi, c + 2))),
        TRUE,
        atom(Var(1), ">=", c),
    ]
    return rng.choice(options)


def random_ep_efa(
    seed: int,
    max_states: int = 4,
    max_transitions: int = 6,
    max_k: int = 2,
    domain: Optional[DomainSpec] = None,
) -> EpEfa:
    """A small random model; the same seed always gives the same model."""
    rng = random.Random(seed)
    domain = domain or DomainSpec.bounded(0, 7)
    n = rng.randint(min(2, max_states), max_states)
    states = [f"q{i}" for i in range(n)]
    ts = []
    count = rng.randint(min(max(3, n - 1), max_transitions), max_transitions)
    for i in range(count):
        k = rng.choices(range(max_k + 1), weights=[1] + [5] * max_k)[0]
        tag = EPSILON if k == 0 else f"sigma{rng.randint(1, 3)}"
        guard = random_guard(rng, k, domain.hi if domain.is_bounded else 7)
        if i < n - 1:
            # spanning tree first, so most states are reachable from q0
            src, dst = rng.choice(states[: i + 1]), states[i + 1]
        else:
            src = rng.choice(states)
            dst = rng.choice([q for q in states if q != src] if k == 0 and n > 1 else states)
        ts.append(SymbolicTransition(f"t{i + 1}", src, tag, k, guard, dst))
    initial = ["q0"] + rng.sample(states[1:], 1 if n > 1 and rng.random() < 0.25 else 0)
    marked = rng.sample(states, rng.randint(0, n))
    return EpEfa(tuple(states), domain, frozenset(initial), frozenset(marked), tuple(ts))


def random_case(seed: int) -> tuple[EpEfa, Node]:
    """A random model together with a random observability condition."""
    S = random_ep_efa(seed)
    rng = random.Random(seed * 7919 + 1)
    return S, random_theta(rng, S.domain.hi)

"""Two-counter machines: a small interpreter and their encoding as an EFA."""
from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence, Union

from ..algebra import DomainSpec, Node, Var, atom, conj, disj
from ..algebra.ast import Const, Diff, IfThenElse, Not, Sum
from ..errors import ModelError
from .automaton import Efa, EfaTransition

INC, DEC, JZ = "INC", "DEC", "JZ"

HALTED, RUNNING, BLOCKED = "halted", "running", "blocked"

Config2CM = tuple  # (r1, r2, c)


@dataclass(frozen=True)
class Instruction:
    op: str
    reg: int
    target: Optional[int] = None

    def __str__(self) -> str:
        tail = f" {self.target}" if self.op == JZ else ""
        return f"{self.op} r{self.reg}{tail}"


@dataclass(frozen=True)
class TwoCounterProgram:
    instructions: tuple[Instruction, ...]

    def __post_init__(self) -> None:
        if not self.instructions:
            raise ModelError("a two-counter program needs at least one instruction")
        last = len(self.instructions) + 1
        for n, ins in enumerate(self.instructions, start=1):
            if ins.op not in (INC, DEC, JZ) or ins.reg not in (1, 2):
                raise ModelError(f"line {n}: bad instruction {ins}")
            if ins.op == JZ and not (ins.target is not None and 1 <= ins.target <= last):
                raise ModelError(f"line {n}: jump target must lie in [1:{last}]")

    def __len__(self) -> int:
        return len(self.instructions)

    def __str__(self) -> str:
        return "\n".join(map(str, self.instructions)) + "\n"


_LINE = re.compile(r"^(INC|DEC|JZ)\s+r([12])(?:\s+(\d+))?$", re.IGNORECASE)


def parse_program(text: str) -> TwoCounterProgram:
    """One instruction per line: ``INC r1``, ``DEC r2``, ``JZ r1 5``; ``#`` starts a comment."""
    out = []
    for n, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = _LINE.match(line)
        if not m:
            raise ModelError(f"line {n}: cannot parse {raw.strip()!r}")
        op, reg, tgt = m.group(1).upper(), int(m.group(2)), m.group(3)
        if (op == JZ) != (tgt is not None):
            raise ModelError(f"line {n}: only JZ takes a jump target")
        out.append(Instruction(op, reg, int(tgt) if tgt else None))
    return TwoCounterProgram(tuple(out))


def load_program(path: Union[str, Path]) -> TwoCounterProgram:
    return parse_program(Path(path).read_text())


def program(*instructions: Sequence) -> TwoCounterProgram:
    """Build a program from tuples like ``("INC", 1)`` or ``("JZ", 1, 3)``."""
    return TwoCounterProgram(tuple(Instruction(*ins) for ins in instructions))


# -- interpreter --------------------------------------------------------------


@dataclass(frozen=True)
class Run2CM:
    status: str
    steps: int
    trace: tuple[Config2CM, ...]

    @property
    def final(self) -> Config2CM:
        return self.trace[-1]

    @property
    def halted(self) -> bool:
        return self.status == HALTED


def run_2cm(P: TwoCounterProgram, initial: Config2CM = (0, 0, 1), max_steps: int = 1000) -> Run2CM:
    """Execute ``P``; halting means the counter left ``[1:|P|]``.

    A decrement of a zero register has no successor and ends the run as
    ``blocked``, which is not halting.
    """
    r1, r2, c = initial
    trace = [(r1, r2, c)]
    for step in range(max_steps + 1):
        if not 1 <= c <= len(P):
            return Run2CM(HALTED, step, tuple(trace))
        if step == max_steps:
            break
        ins = P.instructions[c - 1]
        regs = [r1, r2]
        val = regs[ins.reg - 1]
        if ins.op == INC:
            regs[ins.reg - 1] = val + 1
            c += 1
        elif ins.op == DEC:
            if val == 0:
                return Run2CM(BLOCKED, step, tuple(trace))
            regs[ins.reg - 1] = val - 1
            c += 1
        else:
            c = ins.target if val == 0 else c + 1
        r1, r2 = regs
        trace.append((r1, r2, c))
    return Run2CM(RUNNING, max_steps, tuple(trace))


# -- encoding -----------------------------------------------------------------

Y = lambda c: Var(1, c)  # noqa: E731
X = lambda c: Var(2, c)  # noqa: E731


def initial_predicate(start: Config2CM = (0, 0, 1), slot: int = 2) -> Node:
    return conj(*(atom(Var(slot, c), "=", v) for c, v in enumerate(start, start=1)))


def final_predicate(P: TwoCounterProgram, slot: int = 2) -> Node:
    """Counter at ``|P| + 1``, registers unconstrained."""
    return atom(Var(slot, 3), "=", len(P) + 1)


def equal_configs() -> Node:
    return conj(*(atom(X(c), "=", Y(c)) for c in (1, 2, 3)))


def instruction_predicate(i: int, ins: Instruction) -> Node:
    """Relates the stored configuration ``y`` to its successor ``x`` under instruction ``i``."""
    j, other = ins.reg, 3 - ins.reg
    keep = atom(X(other), "=", Y(other))
    at = atom(Y(3), "=", i)
    if ins.op == INC:
        return conj(atom(X(j), "=", Sum(Y(j), Const(1))), keep, at, atom(X(3), "=", i + 1))
    if ins.op == DEC:
        return conj(atom(X(j), "=", Diff(Y(j), Const(1))), keep, at, atom(X(3), "=", i + 1))
    jump = IfThenElse(atom(Y(j), "=", 0), Const(ins.target), Const(i + 1))
    return conj(atom(X(j), "=", Y(j)), keep, at, atom(X(3), "=", jump))


def step_predicate(P: TwoCounterProgram) -> Node:
    return disj(*(instruction_predicate(i, ins) for i, ins in enumerate(P.instructions, start=1)))


def encode_2cm(
    P: TwoCounterProgram,
    final: Optional[Node] = None,
    start: Config2CM = (0, 0, 1),
    domain: Optional[DomainSpec] = None,
) -> Efa:
    """Four-state EFA that reaches ``q3`` iff ``P`` halts from ``start``.

    A run alternates between proposing a configuration (``q1 -> q2``, checked
    against the stored one by the step relation) and confirming it
    (``q2 -> q1`` or ``q2 -> q3``, which must repeat the proposal).  ``final``
    is a predicate over ``x`` in EFA syntax; it defaults to the counter
    having left the program.
    """
    domain = domain or DomainSpec(width=3)
    fin = final if final is not None else final_predicate(P)
    store = tuple(X(c) for c in (1, 2, 3))
    eq = equal_configs()
    ts = (
        EfaTransition("t1", "q0", "sigma1", 1, initial_predicate(start), store, "q1"),
        EfaTransition("t2", "q1", "sigma2", 1, step_predicate(P), store, "q2"),
        EfaTransition("t3", "q2", "sigma3", 1, conj(Not(fin), eq), store, "q1"),
        EfaTransition("t4", "q2", "sigma3", 1, conj(fin, eq), None, "q3"),
    )
    return Efa(
        ("q0", "q1", "q2", "q3"),
        domain,
        domain,
        frozenset({"q0"}),
        frozenset({"q3"}),
        initial_predicate(start, slot=1),
        ts,
    )


def trace_bound(run: Run2CM, P: TwoCounterProgram) -> int:
    """Enumeration bound large enough for every configuration of ``run``."""
    top = max(max(cfg) for cfg in run.trace)
    return max(top + 1, len(P) + 2)

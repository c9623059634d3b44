"""SMT-LIB 2 rendering of predicates and a pipe-connected solver session."""
from __future__ import annotations

import os
import selectors
import shlex
import subprocess
from typing import Mapping, Optional, Sequence

from ..errors import MalformedPredicate, SolverError, SolverTimeout, SolverUnavailable
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
    flatten_and,
    flatten_or,
    has_quantifier,
)
from .domain import BOUNDED, NATURALS, DomainSpec

SOLVER_ENV = "PARAMDES_SOLVER"

_REL = {"=": "=", "<": "<", "<=": "<=", ">": ">", ">=": ">="}


def _int(v: int) -> str:
    return str(v) if v >= 0 else f"(- {-v})"


def _range(name: str, dom: DomainSpec) -> Optional[str]:
    if dom.kind == NATURALS:
        return f"(>= {name} 0)"
    if dom.kind == BOUNDED:
        return f"(and (>= {name} {_int(dom.lo)}) (<= {name} {_int(dom.hi)}))"
    return None


class _Writer:
    def __init__(self, quant_domain: DomainSpec):
        self.quant_domain = quant_domain
        self.counter = 0

    def term(self, t: Node, env: Mapping[int, Sequence[str]]) -> str:
        if isinstance(t, Var):
            names = env.get(t.param)
            if names is None or not 1 <= t.comp <= len(names):
                raise MalformedPredicate(f"unbound parameter x{t.param}.{t.comp}")
            return names[t.comp - 1]
        if isinstance(t, Const):
            return _int(t.value)
        if isinstance(t, Sum):
            return f"(+ {self.term(t.left, env)} {self.term(t.right, env)})"
        if isinstance(t, Diff):
            return f"(- {self.term(t.left, env)} {self.term(t.right, env)})"
        if isinstance(t, ScalarMul):
            return f"(* {_int(t.coef)} {self.term(t.term, env)})"
        if isinstance(t, IfThenElse):
            return f"(ite {self.pred(t.cond, env)} {self.term(t.then, env)} {self.term(t.orelse, env)})"
        raise MalformedPredicate(f"not a term: {t!r}")

    def pred(self, p: Node, env: Mapping[int, Sequence[str]]) -> str:
        if isinstance(p, TrueP):
            return "true"
        if isinstance(p, FalseP):
            return "false"
        if isinstance(p, Atom):
            l, r = self.term(p.left, env), self.term(p.right, env)
            if p.rel == "!=":
                return f"(not (= {l} {r}))"
            return f"({_REL[p.rel]} {l} {r})"
        if isinstance(p, Not):
            return f"(not {self.pred(p.arg, env)})"
        if isinstance(p, And):
            return "(and " + " ".join(self.pred(q, env) for q in flatten_and(p)) + ")"
        if isinstance(p, Or):
            return "(or " + " ".join(self.pred(q, env) for q in flatten_or(p)) + ")"
        if isinstance(p, Exists):
            self.counter += 1
            names = [f"q{self.counter}_{c}" for c in range(1, self.quant_domain.width + 1)]
            inner = dict(env)
            inner[p.param] = names
            decls = " ".join(f"({n} Int)" for n in names)
            guards = [g for g in (_range(n, self.quant_domain) for n in names) if g]
            body = self.pred(p.body, inner)
            if guards:
                body = "(and " + " ".join(guards) + " " + body + ")"
            return f"(exists ({decls}) {body})"
        raise MalformedPredicate(f"not a predicate: {p!r}")


def free_names(slot_domains: Mapping[int, DomainSpec]) -> dict[int, list[str]]:
    return {s: [f"x{s}_{c}" for c in range(1, d.width + 1)] for s, d in slot_domains.items()}


def render_query(
    phi: Node,
    slot_domains: Mapping[int, DomainSpec],
    quant_domain: DomainSpec,
    timeout_ms: Optional[int] = None,
    extra: Sequence[str] = (),
) -> tuple[str, list[str]]:
    """Complete SMT-LIB script for ``phi``; returns text and free constant names.

    ``extra`` holds additional already-rendered assertions over the free names.
    """
    env = free_names(slot_domains)
    w = _Writer(quant_domain)
    body = w.pred(phi, env)
    logic = "LIA" if has_quantifier(phi) else "QF_LIA"
    lines = ["(set-option :produce-models true)"]
    if timeout_ms:
        lines.append(f"(set-option :timeout {int(timeout_ms)})")
    lines.append(f"(set-logic {logic})")
    names: list[str] = []
    for s in sorted(env):
        for n in env[s]:
            names.append(n)
            lines.append(f"(declare-fun {n} () Int)")
            g = _range(n, slot_domains[s])
            if g:
                lines.append(f"(assert {g})")
    lines.append(f"(assert {body})")
    for e in extra:
        lines.append(f"(assert {e})")
    lines.append("(check-sat)")
    return "\n".join(lines) + "\n", names


def solver_command(cmd: Optional[Sequence[str]] = None) -> list[str]:
    """An explicit command wins over the environment, which wins over ``z3 -in``."""
    if cmd:
        return list(cmd)
    env = os.environ.get(SOLVER_ENV)
    return shlex.split(env) if env else ["z3", "-in"]


class SmtSession:
    """A long-lived solver child process spoken to over stdin/stdout.

    Each query is preceded by ``(reset)`` so queries are independent.  One
    session must not be shared between threads.
    """

    def __init__(self, command: Sequence[str], timeout_ms: int = 10_000):
        self.command = list(command)
        self.timeout_ms = timeout_ms
        self.proc: Optional[subprocess.Popen] = None
        self._buf = b""

    def _start(self) -> None:
        try:
            self.proc = subprocess.Popen(
                self.command,
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
                stderr=subprocess.DEVNULL,
            )
        except OSError as exc:
            raise SolverUnavailable(f"cannot start solver {self.command!r}: {exc}") from exc
        self._buf = b""

    def close(self) -> None:
        if self.proc is not None:
            try:
                self.proc.stdin.write(b"(exit)\n")
                self.proc.stdin.flush()
            except OSError:
                pass
            self.proc.kill()
            self.proc.wait()
            self.proc = None

    def __del__(self) -> None:  # pragma: no cover - interpreter teardown
        try:
            self.close()
        except Exception:
            pass

    def _send(self, text: str) -> None:
        if self.proc is None or self.proc.poll() is not None:
            self._start()
        try:
            self.proc.stdin.write(text.encode())
            self.proc.stdin.flush()
        except OSError as exc:
            self.proc = None
            raise SolverUnavailable(f"solver pipe closed: {exc}") from exc

    def _read_response(self) -> str:
        """One balanced s-expression or bare token from the solver."""
        deadline_s = self.timeout_ms / 1000 * 2 + 5
        sel = selectors.DefaultSelector()
        sel.register(self.proc.stdout, selectors.EVENT_READ)
        try:
            while True:
                text = self._buf.decode(errors="replace")
                resp, rest = _split_response(text)
                if resp is not None:
                    self._buf = rest.encode()
                    return resp
                if not sel.select(timeout=deadline_s):
                    self.close()
                    raise SolverTimeout("solver did not answer in time")
                chunk = os.read(self.proc.stdout.fileno(), 65536)
                if not chunk:
                    self.proc = None
                    raise SolverUnavailable("solver exited unexpectedly")
                self._buf += chunk
        finally:
            sel.close()

    def check(self, script: str, names: Sequence[str]) -> tuple[str, dict[str, int]]:
        self._send("(reset)\n" + script)
        status = self._read_response()
        if status.startswith("(error"):
            raise SolverError(f"solver error: {status}")
        if status == "unknown":
            raise SolverTimeout("solver answered unknown (timeout or incomplete theory)")
        if status not in ("sat", "unsat"):
            raise SolverError(f"unexpected solver answer {status!r}")
        values: dict[str, int] = {}
        if status == "sat" and names:
            self._send("(get-value (" + " ".join(names) + "))\n")
            values = _parse_values(self._read_response())
        return status, values


def _split_response(text: str) -> tuple[Optional[str], str]:
    i = 0
    while i < len(text) and text[i].isspace():
        i += 1
    if i == len(text):
        return None, text
    if text[i] != "(":
        j = text.find("\n", i)
        if j < 0:
            return None, text
        return text[i:j].strip(), text[j + 1:]
    depth = 0
    in_str = False
    for k in range(i, len(text)):
        ch = text[k]
        if ch == '"':
            in_str = not in_str
        elif not in_str:
            if ch == "(":
                depth += 1
            elif ch == ")":
                depth -= 1
                if depth == 0:
                    return text[i:k + 1], text[k + 1:]
    return None, text


def _parse_values(resp: str) -> dict[str, int]:
    from .sexpr import read_sexpr

    tree = read_sexpr(resp)
    out: dict[str, int] = {}
    for pair in tree:
        name, val = pair
        out[name] = _eval_int(val)
    return out


def _eval_int(tree) -> int:
    if isinstance(tree, str):
        return int(tree)
    if tree[0] == "-" and len(tree) == 2:
        return -_eval_int(tree[1])
    raise SolverError(f"cannot read solver value {tree!r}")

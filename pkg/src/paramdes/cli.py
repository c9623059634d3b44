"""Command-line front end.

Exit status is 2 on any error.  Otherwise ``check`` exits 0 when opaque and 1
when not, ``oracle`` exits 1 when it finds a violation or a disagreement,
``reach`` exits 1 when the target is unreachable and ``simulate`` exits 1 when
no state survives the events.
"""
from __future__ import annotations

import argparse
import json
import re
import shlex
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import __version__
from .algebra import DomainSpec, SolverConfig, parse_predicate
from .algebra.solver import close_sessions
from .efa import (
    bounded_reach,
    efa_run,
    embed_ep_efa,
    encode_2cm,
    flatten_step_length,
    initial_configs,
)
from .efa.automaton import ensure_valid
from .efa.twocm import load_program
from .errors import ParamDesError
from .io import (
    dumps,
    efa_from_json,
    efa_to_json,
    ep_efa_from_json,
    ep_efa_to_json,
    load_theta,
)
from .model import EpEfa, check_valid, reverse, run, sorted_states
from .observer import build_observer, state_label, to_dot
from .observer import to_json as observer_json
from .opacity import OpacityQuery, check
from .oracle import OracleWindow, compare_with_observer, oracle_cso, oracle_inf, oracle_iso
from .randomized import random_case

OPAQUE, NOT_OPAQUE, ERROR = 0, 1, 2


# -- helpers -------------------------------------------------------------------


def _states(text: Optional[str]) -> list[str]:
    if not text:
        return []
    return [s for s in re.split(r"[,\s]+", text.strip()) if s]


def _read_json(path: str) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ParamDesError(f"{path}: invalid JSON: {exc}") from exc
    except OSError as exc:
        raise ParamDesError(f"{path}: {exc.strerror}") from exc


def _is_efa(obj: dict) -> bool:
    return "state_domain" in obj or "y0" in obj


def _model(path: str, initial: Optional[str] = None) -> EpEfa:
    obj = _read_json(path)
    if _is_efa(obj):
        raise ParamDesError(f"{path}: expected a model without state parameters")
    S = ep_efa_from_json(obj)
    if initial:
        S = S.with_initial(_states(initial))
    check_valid(S)
    return S


def _efa(path: str):
    obj = _read_json(path)
    E = efa_from_json(obj) if _is_efa(obj) else embed_ep_efa(_valid(ep_efa_from_json(obj)))
    ensure_valid(E)
    return E


def _valid(S: EpEfa) -> EpEfa:
    check_valid(S)
    return S


def _theta(args) -> object:
    if args.theta is None:
        raise ParamDesError("--theta is required")
    return load_theta(args.theta)


def _config(args) -> SolverConfig:
    cmd = tuple(shlex.split(args.solver_cmd)) if args.solver_cmd else None
    return SolverConfig(
        backend=args.backend,
        enumeration_bound=args.bound,
        solver_command=cmd,
        timeout_ms=args.timeout_ms,
    )


def _obs_kw(args) -> dict:
    return {"max_states": args.max_states, "jobs": args.jobs}


def _window(args, S: EpEfa) -> OracleWindow:
    if args.window:
        lo, _, hi = args.window.partition(":")
        dom = DomainSpec.bounded(int(lo), int(hi), S.domain.width)
    elif S.domain.is_bounded:
        dom = S.domain
    else:
        dom = DomainSpec.bounded(0, 7, S.domain.width)
    return OracleWindow(dom, args.max_events)


def _value(v) -> str:
    return "(" + ",".join(map(str, v)) + ")" if isinstance(v, (tuple, list)) else str(v)


def fmt_observation(w) -> str:
    if not w:
        return "(empty)"
    return " ".join("<" + ",".join(_value(v) for v in unit) + ">" for unit in w)


def fmt_event(ev) -> str:
    tag, vals = ev
    return f"{tag}(" + ",".join(_value(v) for v in vals) + ")"


def _jsonable(x):
    if isinstance(x, (tuple, list)):
        return [_jsonable(v) for v in x]
    return x


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


_EVENT = re.compile(r"([^\s()]+)(?:\(([^()]*)\))?")


def parse_events(text: str) -> list[tuple]:
    """``"sigma2(6,5) sigma4(3)"``; vector values are written ``[1,2,3]``."""
    out = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        if text[pos].isspace():
            pos += 1
            continue
        m = _EVENT.match(text, pos)
        if not m or m.end() == pos:
            raise ParamDesError(f"cannot parse events at {text[pos:]!r}")
        args = m.group(2) or ""
        try:
            vals = json.loads(f"[{args}]")
        except json.JSONDecodeError as exc:
            raise ParamDesError(f"bad event arguments {args!r}") from exc
        out.append((m.group(1), tuple(tuple(v) if isinstance(v, list) else v for v in vals)))
        pos = m.end()
    return out


# -- commands --------------------------------------------------------------------


def cmd_check(args) -> int:
    S = _model(args.model, args.initial)
    query = OpacityQuery.make(args.property, _states(args.secret), _states(args.nonsecret), _theta(args))
    verdict = check(S, query, _config(args), **_obs_kw(args))
    if args.format == "json":
        report = {"property": query.property, **verdict.to_json()}
        sys.stdout.write(dumps(report))
    else:
        print(("opaque" if verdict.opaque else "not opaque") + f" ({query.property.replace('_', '-')})")
        w = verdict.witness
        if w is not None:
            print(f"witness estimate: {state_label(w.state)}")
            print(f"observation: {fmt_observation(w.observation)}")
            if w.reverse_state is not None:
                print(f"reverse estimate: {state_label(w.reverse_state)}")
                print(f"continuation: {fmt_observation(w.future)}")
    return OPAQUE if verdict.opaque else NOT_OPAQUE


def cmd_observer(args) -> int:
    S = _model(args.model, args.initial)
    if args.reverse:
        S = reverse(S)
    obs = build_observer(S, _theta(args), _config(args), **_obs_kw(args))
    text = to_dot(obs, merged=not args.minterms) if args.emit == "dot" else dumps(observer_json(obs))
    _emit(text, args.output)
    return 0


def _oracle_report(name: str, v, window: OracleWindow) -> dict:
    return {
        "property": name,
        "violation": v.violation,
        "window": {"domain": window.domain.to_json(), "max_events": window.max_events},
        "run": [[tag, _jsonable(vals)] for tag, vals in v.run],
        "observation": _jsonable(v.observation),
        "future": _jsonable(v.future),
        "state": v.state,
    }


def cmd_oracle_check(args) -> int:
    S = _model(args.model, args.initial)
    query = OpacityQuery.make(args.property, _states(args.secret), _states(args.nonsecret), _theta(args))
    window = _window(args, S)
    fn = {"current_state": oracle_cso, "initial_state": oracle_iso, "infinite_step": oracle_inf}[query.property]
    v = fn(S.with_domain(window.domain), query.secret, query.nonsecret, query.theta, window)
    if args.format == "json":
        sys.stdout.write(dumps(_oracle_report(query.property, v, window)))
    elif v.violation:
        print(f"violation within window (state {v.state})")
        print("run: " + " ".join(fmt_event(e) for e in v.run))
        print(f"observation: {fmt_observation(v.observation)}")
        if v.future:
            print(f"continuation: {fmt_observation(v.future)}")
    else:
        print("no violation within window")
    return NOT_OPAQUE if v.violation else OPAQUE


def cmd_oracle_selftest(args) -> int:
    cfg = _config(args)
    failed = 0
    for seed in range(args.seed, args.seed + args.count):
        S, theta = random_case(seed)
        obs = build_observer(S, theta, cfg)
        window = OracleWindow(S.domain, args.max_events)
        problems = compare_with_observer(S, theta, obs, window)
        if problems:
            failed += 1
            p = problems[0]
            got = "none" if p.observer is None else state_label(p.observer)
            print(f"seed {seed}: disagree at {fmt_observation(p.observation)}: observer {got}, oracle {state_label(p.oracle)}")
        else:
            print(f"seed {seed}: agree ({len(obs.states)} observer states)")
    return 1 if failed else 0


def cmd_encode_2cm(args) -> int:
    P = load_program(args.program)
    final = parse_predicate(args.final, efa=True) if args.final else None
    start = tuple(int(v) for v in args.start.split(","))
    if len(start) != 3:
        raise ParamDesError("--start takes three numbers r1,r2,c")
    _emit(dumps(efa_to_json(encode_2cm(P, final, start))), args.output)
    return 0


def cmd_reach(args) -> int:
    E = _efa(args.model)
    res = bounded_reach(E, _states(args.target), args.depth, _config(args), args.max_sequences)
    if args.format == "json":
        report = {
            "reachable": res.reachable,
            "depth": res.depth,
            "exact": res.exact,
            "sequence": list(res.sequence),
            "data_string": _jsonable(res.data_string()),
            "parameters": _jsonable(res.parameters),
        }
        sys.stdout.write(dumps(report))
    elif res.reachable:
        print(f"reachable within depth {res.depth}")
        print("transitions: " + " ".join(res.sequence))
        print("data string: " + (" ".join(fmt_event(e) for e in res.events) or "(empty)"))
    else:
        print(f"unreachable within depth {res.depth}")
    return 0 if res.reachable else 1


def cmd_simulate(args) -> int:
    events = parse_events(args.events)
    obj = _read_json(args.model)
    cfg = _config(args)
    if _is_efa(obj):
        E = efa_from_json(obj)
        ensure_valid(E)
        cur = set(initial_configs(E, cfg))
        show = lambda c: "{" + ", ".join(f"{q}:{_value(y[0] if len(y) == 1 else y)}" for q, y in sorted(c)) + "}"  # noqa: E731
        print(f"start: {show(cur)}")
        for ev in events:
            cur = efa_run(E, cur, [ev], cfg)
            print(f"{fmt_event(ev)}: {show(cur)}")
    else:
        S = _model(args.model, args.initial)
        cur = set(S.initial)
        print(f"start: {state_label(cur)}")
        for ev in events:
            cur = run(S, cur, [ev], cfg)
            print(f"{fmt_event(ev)}: {state_label(cur)}")
    return 0 if cur else 1


def cmd_flatten(args) -> int:
    _emit(dumps(efa_to_json(flatten_step_length(_efa(args.model)))), args.output)
    return 0


def cmd_embed(args) -> int:
    _emit(dumps(efa_to_json(embed_ep_efa(_model(args.model)))), args.output)
    return 0


def cmd_reverse(args) -> int:
    _emit(dumps(ep_efa_to_json(reverse(_model(args.model)))), args.output)
    return 0


# -- parser ----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    solver = argparse.ArgumentParser(add_help=False)
    g = solver.add_argument_group("solver")
    g.add_argument("--backend", choices=("enumerate", "external"), default="enumerate")
    g.add_argument("--bound", type=int, default=32, help="enumeration bound for infinite domains")
    g.add_argument("--solver-cmd", help="external solver command (default: $PARAMDES_SOLVER or 'z3 -in')")
    g.add_argument("--timeout-ms", type=int, default=10_000)
    g.add_argument("--max-states", type=int, default=10_000, help="observer state cap")
    g.add_argument("--jobs", type=int, default=1)

    query = argparse.ArgumentParser(add_help=False)
    query.add_argument("model")
    query.add_argument("--property", required=True, help="cso, iso or inf")
    query.add_argument("--secret", default="")
    query.add_argument("--nonsecret", default="")
    query.add_argument("--theta", default="true", help="s-expression or observation spec file")
    query.add_argument("--initial", help="override the initial states")
    query.add_argument("--format", choices=("text", "json"), default="text")

    p = argparse.ArgumentParser(prog="paramdes", description="Opacity of parameterized automata.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", parents=[query, solver], help="verify an opacity property")
    c.set_defaults(fn=cmd_check)

    c = sub.add_parser("observer", parents=[solver], help="build and export the observer")
    c.add_argument("model")
    c.add_argument("--theta", default="true")
    c.add_argument("--initial")
    c.add_argument("--reverse", action="store_true", help="observe the reversed model")
    c.add_argument("--emit", choices=("dot", "json"), default="dot")
    c.add_argument("--minterms", action="store_true", help="one edge per minterm instead of merged edges")
    c.add_argument("-o", "--output")
    c.set_defaults(fn=cmd_observer)

    oracle = sub.add_parser("oracle", help="brute-force reference checks")
    osub = oracle.add_subparsers(dest="oracle_command", required=True)
    window = argparse.ArgumentParser(add_help=False)
    window.add_argument("--window", help="LO:HI component range (default: model domain or 0:7)")
    window.add_argument("--max-events", type=int, default=3)
    c = osub.add_parser("check", parents=[query, window, solver], help="search runs for a violation")
    c.set_defaults(fn=cmd_oracle_check)
    c = osub.add_parser("selftest", parents=[window, solver], help="observer versus oracle on random models")
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--count", type=int, default=1)
    c.set_defaults(fn=cmd_oracle_selftest)

    c = sub.add_parser("encode-2cm", help="encode a two-counter program as an EFA")
    c.add_argument("program")
    c.add_argument("--final", help="final-configuration predicate over x1 (EFA syntax)")
    c.add_argument("--start", default="0,0,1")
    c.add_argument("-o", "--output")
    c.set_defaults(fn=cmd_encode_2cm)

    c = sub.add_parser("reach", parents=[solver], help="bounded reachability")
    c.add_argument("model")
    c.add_argument("--target", required=True)
    c.add_argument("--depth", type=int, required=True)
    c.add_argument("--max-sequences", type=int, default=200_000)
    c.add_argument("--format", choices=("text", "json"), default="text")
    c.set_defaults(fn=cmd_reach)

    c = sub.add_parser("simulate", parents=[solver], help="run concrete events")
    c.add_argument("model")
    c.add_argument("--events", required=True)
    c.add_argument("--initial")
    c.set_defaults(fn=cmd_simulate)

    for name, fn, what in (
        ("flatten", cmd_flatten, "rewrite into one-parameter steps"),
        ("embed", cmd_embed, "lift a model into an EFA"),
        ("reverse", cmd_reverse, "reverse a model"),
    ):
        c = sub.add_parser(name, help=what)
        c.add_argument("model")
        c.add_argument("-o", "--output")
        c.set_defaults(fn=fn)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "reach" and args.depth < 0:
        parser.error("--depth must be >= 0")
    try:
        return args.fn(args)
    except (ParamDesError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return ERROR
    finally:
        close_sessions()


if __name__ == "__main__":
    sys.exit(main())

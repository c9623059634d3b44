"""JSON model files and observation specs."""
from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Union

from .algebra import TRUE, DomainSpec, parse_predicate, parse_term, to_sexpr
from .errors import MalformedPredicate, ModelError
from .model import EpEfa, SymbolicTransition

PathLike = Union[str, Path]


def _load(source) -> dict:
    if isinstance(source, dict):
        return source
    try:
        return json.loads(Path(source).read_text())
    except json.JSONDecodeError as exc:
        raise ModelError(f"{source}: invalid JSON: {exc}") from exc


def _guard(text, efa: bool = False):
    if text is None:
        return TRUE
    return parse_predicate(text, efa=efa)


def ep_efa_from_json(obj: dict) -> EpEfa:
    try:
        domain = DomainSpec.from_json(obj.get("domain", {}))
        ts = []
        for i, t in enumerate(obj.get("transitions", []), start=1):
            k = int(t.get("k", 1))
            ts.append(
                SymbolicTransition(
                    str(t.get("id", f"t{i}")),
                    t["source"],
                    t.get("tag", "ε" if k == 0 else "sigma"),
                    k,
                    _guard(t.get("guard")),
                    t["target"],
                )
            )
        tags = frozenset(obj.get("event_tags", ())) | {t.tag for t in ts}
        return EpEfa(
            tuple(obj["states"]),
            domain,
            frozenset(obj.get("initial", ())),
            frozenset(obj.get("marked", ())),
            tuple(ts),
            tags,
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ModelError(f"bad model: {exc!r}") from exc


def ep_efa_to_json(S: EpEfa) -> dict:
    return {
        "domain": S.domain.to_json(),
        "states": list(S.states),
        "initial": [q for q in S.states if q in S.initial],
        "marked": [q for q in S.states if q in S.marked],
        "transitions": [
            {
                "id": t.id,
                "source": t.source,
                "tag": t.tag,
                "k": t.k,
                "guard": to_sexpr(t.guard),
                "target": t.target,
            }
            for t in S.transitions
        ],
    }


def load_model(source) -> EpEfa:
    return ep_efa_from_json(_load(source))


def load_theta(source) -> Any:
    """An observation spec file (``{"theta": ...}``) or an s-expression string."""
    if isinstance(source, str) and source.lstrip().startswith("("):
        return parse_predicate(source)
    if isinstance(source, str) and source.strip() in ("true", "false"):
        return parse_predicate(source)
    obj = _load(source)
    if "theta" not in obj:
        raise ModelError("observation spec needs a 'theta' field")
    return parse_predicate(obj["theta"])


def efa_from_json(obj: dict):
    from .efa.automaton import Efa, EfaTransition

    try:
        xdom = DomainSpec.from_json(obj.get("domain", {}))
        ydom = DomainSpec.from_json(obj.get("state_domain", {}))
        ts = []
        for i, t in enumerate(obj.get("transitions", []), start=1):
            update = t.get("update")
            ts.append(
                EfaTransition(
                    str(t.get("id", f"t{i}")),
                    t["source"],
                    t.get("tag", "sigma"),
                    int(t.get("k", 1)),
                    _guard(t.get("guard"), efa=True),
                    None if update is None else tuple(parse_term(u, efa=True) for u in update),
                    t["target"],
                )
            )
        return Efa(
            tuple(obj["states"]),
            xdom,
            ydom,
            frozenset(obj.get("initial", ())),
            frozenset(obj.get("marked", ())),
            _guard(obj.get("y0"), efa=True),
            tuple(ts),
            {str(q): int(w) for q, w in obj.get("state_widths", {}).items()},
        )
    except (KeyError, TypeError, ValueError, MalformedPredicate) as exc:
        raise ModelError(f"bad EFA model: {exc}") from exc


def efa_to_json(E) -> dict:
    out = {
        "domain": E.event_domain.to_json(),
        "state_domain": E.state_domain.to_json(),
        "states": list(E.states),
        "initial": [q for q in E.states if q in E.initial],
        "marked": [q for q in E.states if q in E.marked],
        "y0": to_sexpr(E.y0, efa=True),
        "transitions": [],
    }
    if E.state_widths:
        out["state_widths"] = dict(E.state_widths)
    for t in E.transitions:
        entry = {
            "id": t.id,
            "source": t.source,
            "tag": t.tag,
            "k": t.k,
            "guard": to_sexpr(t.guard, efa=True),
            "target": t.target,
        }
        if t.update is not None:
            entry["update"] = [to_sexpr(u, efa=True) for u in t.update]
        out["transitions"].append(entry)
    return out


def load_efa(source):
    return efa_from_json(_load(source))


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=False) + "\n"


"""Small reference models used by the tests, the docs and the CLI self-test."""
from __future__ import annotations

from .algebra import DomainSpec, parse_predicate
from .model import EpEfa, SymbolicTransition, make_ep_efa

GE5 = "(>= x1 5)"


def _t(tid: str, src: str, tag: str, k: int, guard: str, dst: str) -> SymbolicTransition:
    return SymbolicTransition(tid, src, tag, k, parse_predicate(guard), dst)


def five_state_example(domain: DomainSpec | None = None) -> EpEfa:
    """Five states, mixed step lengths, secret candidate ``q2``."""
    ts = [
        _t("t1", "q0", "sigma1", 1, "(< x1 4)", "q1"),
        _t("t2", "q0", "sigma2", 2, "(> (+ x1 x2) 9)", "q3"),
        _t("t3", "q1", "sigma3", 2, "(and (= x2 (+ x1 1)) (> x1 3))", "q2"),
        _t("t4", "q3", "sigma4", 1, "(< x1 7)", "q4"),
        _t("t5", "q2", "sigma5", 1, "true", "q2"),
        _t("t6", "q4", "sigma6", 1, "true", "q4"),
    ]
    return make_ep_efa(["q0", "q1", "q2", "q3", "q4"], ts, ["q0"], [], domain or DomainSpec())


def registration_ep_efa(domain: DomainSpec | None = None) -> EpEfa:
    """Nickname plus password typed twice, as one 3-parameter event."""
    ts = [
        _t("t1", "q0", "sigma", 3, "(= x2 x3)", "q1"),
        _t("t2", "q0", "sigma", 3, "(distinct x2 x3)", "q0"),
    ]
    return make_ep_efa(["q0", "q1"], ts, ["q0"], ["q1"], domain or DomainSpec.bounded(0, 3))


def registration_efa(domain: DomainSpec | None = None):
    """The same process with one parameter per event and the password stored in the state."""
    from .efa.automaton import Efa, EfaTransition
    from .algebra import parse_term

    dom = domain or DomainSpec.bounded(0, 3)
    p = lambda s: parse_predicate(s, efa=True)  # noqa: E731
    ts = (
        EfaTransition("t1", "q0", "sigma1", 1, p("true"), None, "q1"),
        EfaTransition("t2", "q1", "sigma2", 1, p("true"), (parse_term("x1", efa=True),), "q2"),
        EfaTransition("t3", "q2", "sigma3", 1, p("(= y x1)"), None, "q3"),
        EfaTransition("t4", "q2", "sigma3", 1, p("(distinct y x1)"), None, "q0"),
    )
    return Efa(("q0", "q1", "q2", "q3"), dom, dom, frozenset({"q0"}), frozenset({"q3"}), p("true"), ts)


def increasing_pairs_efa(domain: DomainSpec | None = None):
    """Accepts an even number of strictly increasing naturals."""
    from .efa.automaton import Efa, EfaTransition
    from .algebra import parse_term

    dom = domain or DomainSpec()
    p = lambda s: parse_predicate(s, efa=True)  # noqa: E731
    store = (parse_term("x1", efa=True),)
    ts = (
        EfaTransition("t1", "q0", "sigma1", 1, p("true"), store, "q1"),
        EfaTransition("t2", "q1", "sigma2", 1, p("(< y x1)"), store, "q2"),
        EfaTransition("t3", "q2", "sigma3", 1, p("(< y x1)"), store, "q1"),
    )
    return Efa(("q0", "q1", "q2"), dom, dom, frozenset({"q0"}), frozenset({"q2"}), p("true"), ts)

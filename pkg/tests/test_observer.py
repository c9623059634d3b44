from itertools import combinations

import pytest

from conftest import CORPUS_SEEDS
from paramdes.algebra import FALSE, And, DomainSpec, SolverConfig, denotation, disj, is_sat, parse_predicate
from paramdes.errors import ExplosionGuard
from paramdes.model import EPSILON, SymbolicTransition, make_ep_efa, reverse
from paramdes.observer import (
    build_observer,
    epsilon_closure,
    estimate,
    observable_transitions,
    to_dot,
    to_json,
)
from paramdes.randomized import random_case

P = parse_predicate
WINDOW = DomainSpec.bounded(0, 40)

Q01 = frozenset({"q0", "q1"})
Q2 = frozenset({"q2"})
Q34 = frozenset({"q3", "q4"})
Q234 = frozenset({"q2", "q3", "q4"})
Q4 = frozenset({"q4"})
Q24 = frozenset({"q2", "q4"})
ALL = frozenset({"q0", "q1", "q2", "q3", "q4"})
Q0234 = frozenset({"q0", "q2", "q3", "q4"})
Q0 = frozenset({"q0"})

SUCC = "(and (>= x1 5) (>= x2 5) (= x2 (+ x1 1)))"
NOT_SUCC = "(and (>= x1 5) (>= x2 5) (distinct x2 (+ x1 1)))"
PRED = "(and (>= x1 5) (>= x2 5) (= x1 (+ x2 1)))"
NOT_PRED = "(and (>= x1 5) (>= x2 5) (distinct x1 (+ x2 1)))"

# edge labels as printed for the forward observer
FORWARD_EDGES = {
    (Q01, 1, Q2): "(= x1 5)",
    (Q01, 1, Q34): "(> x1 5)",
    (Q01, 2, Q234): SUCC,
    (Q01, 2, Q34): NOT_SUCC,
    (Q34, 1, Q4): "(>= x1 5)",
    (Q234, 1, Q24): "(>= x1 5)",
    (Q2, 1, Q2): "(>= x1 5)",
    (Q4, 1, Q4): "(>= x1 5)",
    (Q24, 1, Q24): "(>= x1 5)",
}

# edge labels as printed for the observer of the reversed model
REVERSE_EDGES = {
    (ALL, 2, Q01): PRED,
    (ALL, 2, Q0): NOT_PRED,
    (ALL, 1, ALL): "(= x1 5)",
    (ALL, 1, Q0234): "(>= x1 6)",
    (Q0234, 1, Q0234): "(>= x1 6)",
    (Q0234, 1, ALL): "(= x1 5)",
    (Q0234, 2, Q01): PRED,
    (Q0234, 2, Q0): NOT_PRED,
}


def merged_denotations(obs):
    return {(e.source, e.length, e.target): denotation(e.predicate, WINDOW, e.length) for e in obs.merged_edges()}


def expected_denotations(table):
    return {key: denotation(P(text), WINDOW, key[1]) for key, text in table.items()}


# -- observable transitions ------------------------------------------------------------


def by_origin(that, tid):
    return [(e.source, e.length, e.target, e.predicate) for e in that if e.origin == tid]


def test_hidden_only_guard_becomes_silent(five_state, ge5):
    that = observable_transitions(five_state, ge5)
    assert [(s, k, t) for s, k, t, _ in by_origin(that, "t1")] == [("q0", 0, "q1")]


def test_successor_guard_projections(five_state, ge5):
    edges = by_origin(observable_transitions(five_state, ge5), "t3")
    assert [(s, k, t) for s, k, t, _ in edges] == [("q1", 1, "q2"), ("q1", 2, "q2")]
    assert denotation(edges[0][3], WINDOW, 1) == [(5,)]
    assert denotation(edges[1][3], WINDOW, 2) == denotation(P("(and (>= x1 5) (= x2 (+ x1 1)))"), WINDOW, 2)


def test_sum_guard_projections(five_state, ge5):
    edges = by_origin(observable_transitions(five_state, ge5), "t2")
    assert [k for _, k, _, _ in edges] == [1, 2]
    assert denotation(edges[0][3], WINDOW, 1) == [(v,) for v in range(6, 41)]
    assert denotation(edges[1][3], WINDOW, 2) == denotation(P("(and (>= x1 5) (>= x2 5))"), WINDOW, 2)


def test_zero_step_transition_is_silent(ge5):
    S = make_ep_efa(["a", "b"], [SymbolicTransition("t", "a", EPSILON, 0, P("true"), "b")], ["a"])
    that = observable_transitions(S, ge5)
    assert [(e.source, e.length, e.target) for e in that] == [("a", 0, "b")]


def test_closure_examples(five_state, ge5):
    that = observable_transitions(five_state, ge5)
    assert epsilon_closure(that, {"q0"}) == Q01
    assert epsilon_closure(that, {"q3"}) == Q34
    assert epsilon_closure(that, Q234) == Q234


# -- observer shape ------------------------------------------------------------------------


def test_forward_observer_states(five_state, ge5):
    obs = build_observer(five_state, ge5)
    assert set(obs.states) == {Q01, Q2, Q34, Q234, Q4, Q24}
    assert obs.initial == Q01


def test_forward_observer_edges_match_printed_labels(five_state, ge5):
    obs = build_observer(five_state, ge5)
    assert merged_denotations(obs) == expected_denotations(FORWARD_EDGES)


def test_reverse_observer_edges_match_printed_labels(five_state, ge5):
    obs = build_observer(reverse(five_state), ge5)
    assert set(obs.states) == {ALL, Q0234, Q01, Q0}
    assert merged_denotations(obs) == expected_denotations(REVERSE_EDGES)


def test_unobservable_model_collapses_to_one_state(five_state):
    obs = build_observer(five_state, FALSE)
    assert obs.states == [ALL] and obs.edges == []


def test_discovery_order_is_by_size_then_members(five_state, ge5):
    obs = build_observer(five_state, ge5)
    assert obs.states == [Q01, Q2, Q34, Q234, Q4, Q24]


def test_exports_are_deterministic(five_state, ge5):
    a = build_observer(five_state, ge5)
    b = build_observer(five_state, ge5, jobs=4)
    assert to_dot(a) == to_dot(b)
    assert to_json(a) == to_json(b)
    assert to_dot(a).count("shape=box") == 6


def test_state_cap_raises(five_state, ge5):
    with pytest.raises(ExplosionGuard):
        build_observer(five_state, ge5, max_states=3)


def test_minterm_budget_raises(five_state, ge5):
    with pytest.raises(ExplosionGuard):
        build_observer(five_state, ge5, max_minterms=2)


# -- estimates -------------------------------------------------------------------------------


def test_estimate_examples(five_state, ge5):
    obs = build_observer(five_state, ge5)
    assert estimate(obs, ((5,),)) == Q2
    assert estimate(obs, ()) == Q01
    assert estimate(obs, ((6, 7),)) == Q234
    assert estimate(obs, ((3,),)) is None


def test_witness_paths_replay_to_their_states(five_state, ge5):
    obs = build_observer(five_state, ge5)
    for q in obs.states:
        assert estimate(obs, obs.path_to(q)) == q


# -- minterm structure over the corpus ---------------------------------------------------------


@pytest.mark.parametrize("seed", list(CORPUS_SEEDS)[:50])
def test_minterms_are_disjoint_and_cover_candidates(seed):
    S, theta = random_case(seed)
    obs = build_observer(S, theta)
    for (q, k), cands in obs.candidates.items():
        mts = [e.predicate for e in obs.out_edges(q, k)]
        for a, b in combinations(mts, 2):
            assert not is_sat(And(a, b), S.domain, arity=k)
        union = denotation(disj(*mts), S.domain, k)
        assert union == denotation(disj(*(c.predicate for c in cands)), S.domain, k)


def test_external_solver_builds_the_same_observer(five_state, ge5):
    pytest.importorskip("shutil").which("z3") or pytest.skip("z3 not on PATH")
    from paramdes.algebra.solver import close_sessions

    try:
        obs = build_observer(five_state, ge5, SolverConfig(backend="external"))
    finally:
        close_sessions()
    assert obs.states == [Q01, Q2, Q34, Q234, Q4, Q24]
    assert merged_denotations(obs) == expected_denotations(FORWARD_EDGES)

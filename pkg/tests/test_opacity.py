import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import CORPUS_SEEDS, MODELS
from paramdes.algebra import DomainSpec
from paramdes.errors import ModelError
from paramdes.io import load_model
from paramdes.model import reverse, run
from paramdes.observer import build_observer, estimate
from paramdes.opacity import (
    INFINITE_STEP,
    OpacityQuery,
    check,
    check_current_state,
    check_infinite_step,
    check_initial_state,
)
from paramdes.oracle import OracleWindow, oracle_cso, oracle_inf, oracle_iso
from paramdes.randomized import random_case

REST = ["q0", "q1", "q3", "q4"]


def query(prop, secret, nonsecret, theta):
    return OpacityQuery.make(prop, secret, nonsecret, theta)


# -- reference verdicts ---------------------------------------------------------------


def test_current_state_violation_at_singleton(five_state, ge5):
    v = check_current_state(five_state, query("cso", ["q2"], REST, ge5))
    assert not v.opaque
    assert v.witness.state == frozenset({"q2"})
    assert v.witness.observation == ((5,),)
    assert v.to_json() == {"opaque": False, "witness": {"state": ["q2"], "observation": [[5]]}}


def test_current_state_hidden_by_companion(five_state, ge5):
    assert check_current_state(five_state, query("cso", ["q3"], ["q4"], ge5)).opaque


def test_initial_state_with_three_initial_states(ge5):
    S = load_model(MODELS / "five_state_iso.json")
    assert check_initial_state(S, query("iso", ["q2"], ["q0", "q1"], ge5)).opaque


def test_initial_state_violation_without_cover(ge5):
    S = load_model(MODELS / "five_state_iso.json")
    v = check_initial_state(S, query("iso", ["q2"], [], ge5))
    assert not v.opaque and "q2" in v.witness.state


def test_infinite_step_reference_is_opaque(five_state, ge5):
    assert check_infinite_step(five_state, query("inf", ["q3"], ["q4"], ge5)).opaque


def test_infinite_step_pair_violation(five_state, ge5):
    v = check_infinite_step(five_state, query("inf", ["q2"], ["q3"], ge5))
    assert not v.opaque
    w = v.witness
    assert "q2" in w.state & w.reverse_state
    assert not (w.state & w.reverse_state & {"q3"})
    fwd = build_observer(five_state, ge5)
    bwd = build_observer(reverse(five_state), ge5)
    assert estimate(fwd, w.observation) == w.state
    assert estimate(bwd, tuple(reversed(w.future))) == w.reverse_state


@pytest.mark.parametrize("prop", ["cso", "iso", "inf"])
def test_empty_secret_is_opaque(five_state, ge5, prop):
    v = check(five_state, query(prop, [], [], ge5))
    assert v.opaque and v.witness is None


def test_overlapping_secret_and_nonsecret(five_state, ge5):
    assert check_current_state(five_state, query("cso", ["q2"], ["q2"], ge5)).opaque


def test_unknown_states_are_rejected(five_state, ge5):
    with pytest.raises(ModelError):
        check_current_state(five_state, query("cso", ["q9"], [], ge5))
    with pytest.raises(ModelError):
        check_initial_state(five_state, query("iso", ["q2"], [], ge5))


def test_unknown_property_is_rejected(ge5):
    with pytest.raises(ModelError):
        query("bogus", [], [], ge5)


def test_property_aliases():
    assert OpacityQuery.make("infinite-step", [], [], None).property == INFINITE_STEP


def test_witness_observation_reaches_a_secret_state(five_state, ge5):
    v = check_current_state(five_state, query("cso", ["q2"], REST, ge5))
    fwd = build_observer(five_state, ge5)
    assert estimate(fwd, v.witness.observation) == v.witness.state


# -- structural properties over the corpus -------------------------------------------------

seeds = st.sampled_from(list(CORPUS_SEEDS))


def pick(states, mask):
    return [q for q, b in zip(states, mask) if b]


@given(seeds, st.lists(st.booleans(), min_size=4, max_size=4), st.lists(st.booleans(), min_size=4, max_size=4))
def test_growing_nonsecret_never_breaks_opacity(seed, m1, m2):
    S, theta = random_case(seed)
    sec, ns = pick(S.states, m1), pick(S.states, m2)
    bigger = sorted(set(ns) | {S.states[-1]})
    for prop in ("cso", "inf"):
        if check(S, query(prop, sec, ns, theta)).opaque:
            assert check(S, query(prop, sec, bigger, theta)).opaque


@given(seeds, st.lists(st.booleans(), min_size=4, max_size=4), st.lists(st.booleans(), min_size=4, max_size=4))
def test_shrinking_secret_never_breaks_opacity(seed, m1, m2):
    S, theta = random_case(seed)
    sec, ns = pick(S.states, m1), pick(S.states, m2)
    for prop in ("cso", "inf"):
        if check(S, query(prop, sec, ns, theta)).opaque:
            assert check(S, query(prop, sec[1:], ns, theta)).opaque


@given(seeds, st.lists(st.booleans(), min_size=4, max_size=4), st.lists(st.booleans(), min_size=4, max_size=4))
def test_infinite_step_implies_current_state(seed, m1, m2):
    S, theta = random_case(seed)
    sec, ns = pick(S.states, m1), pick(S.states, m2)
    if check_infinite_step(S, query("inf", sec, ns, theta)).opaque:
        assert check_current_state(S, query("cso", sec, ns, theta)).opaque


@pytest.mark.parametrize("seed", list(CORPUS_SEEDS)[:60])
def test_initial_state_is_current_state_of_reverse(seed):
    S, theta = random_case(seed)
    init = sorted(S.initial)
    q = query("iso", init[:1], init[1:], theta)
    a = check_initial_state(S, q)
    b = check_current_state(reverse(S), q)
    assert a.opaque == b.opaque


# -- agreement with the literal definitions ---------------------------------------------------


def is_acyclic(S):
    succ = {}
    for t in S.transitions:
        succ.setdefault(t.source, set()).add(t.target)
    state = {}

    def dfs(q):
        state[q] = 1
        for n in succ.get(q, ()):
            if state.get(n) == 1 or (n not in state and not dfs(n)):
                return False
        state[q] = 2
        return True

    return all(dfs(q) for q in S.states if q not in state)


WINDOW = OracleWindow(DomainSpec.bounded(0, 7), max_events=3)


@pytest.mark.parametrize("seed", list(CORPUS_SEEDS)[:80])
def test_oracle_violations_refute_opacity(seed):
    S, theta = random_case(seed)
    sec, ns = [S.states[-1]], [S.states[0]]
    if oracle_cso(S, sec, ns, theta, WINDOW).violation:
        assert not check_current_state(S, query("cso", sec, ns, theta)).opaque
    if oracle_inf(S, sec, ns, theta, WINDOW).violation:
        assert not check_infinite_step(S, query("inf", sec, ns, theta)).opaque
    init = sorted(S.initial)
    if oracle_iso(S, init[:1], init[1:], theta, WINDOW).violation:
        assert not check_initial_state(S, query("iso", init[:1], init[1:], theta)).opaque


ACYCLIC = [s for s in CORPUS_SEEDS if is_acyclic(random_case(s)[0])]


@pytest.mark.parametrize("seed", ACYCLIC)
def test_full_agreement_on_exhaustive_windows(seed):
    S, theta = random_case(seed)
    for sec, ns in zip(S.states, S.states[1:] + S.states[:1]):
        got = check_current_state(S, query("cso", [sec], [ns], theta)).opaque
        assert got == (not oracle_cso(S, [sec], [ns], theta, WINDOW).violation)
        got = check_infinite_step(S, query("inf", [sec], [ns], theta)).opaque
        assert got == (not oracle_inf(S, [sec], [ns], theta, WINDOW).violation)


def test_some_corpus_models_are_acyclic():
    assert len(ACYCLIC) >= 10


def test_reference_runs_for_witness(five_state):
    assert run(five_state, {"q0"}, [("sigma1", (2,)), ("sigma3", (4, 5))]) == {"q2"}

import pytest

from conftest import CORPUS_SEEDS
from paramdes.algebra import DomainSpec
from paramdes.errors import ExplosionGuard, UnboundedDomain
from paramdes.model import EpEfa, reverse, reverse_observation, run
from paramdes.observer import build_observer
from paramdes.oracle import (
    ConcreteModel,
    OracleWindow,
    compare_with_observer,
    oracle_cso,
    oracle_estimates,
    oracle_inf,
    oracle_iso,
)
from paramdes.randomized import random_case

W09 = DomainSpec.bounded(0, 9)


def window(events, dom=W09):
    return OracleWindow(dom, max_events=events)


def test_silent_start_is_estimated(five_state, ge5):
    est = oracle_estimates(five_state, ge5, window(1))
    assert {"q0", "q1"} <= est[()]


def test_threshold_observation_pins_the_middle_state(five_state, ge5):
    assert oracle_estimates(five_state, ge5, window(2))[((5,),)] == {"q2"}


def test_model_without_transitions_estimates_its_initial_states(ge5):
    S = EpEfa(("a", "b"), W09, frozenset({"a", "b"}), frozenset(), ())
    assert oracle_estimates(S, ge5, window(3)) == {(): frozenset({"a", "b"})}


def test_oracle_refuses_unbounded_domains():
    with pytest.raises(UnboundedDomain):
        OracleWindow(DomainSpec(), max_events=2)


def test_configuration_cap_is_enforced(five_state, ge5):
    with pytest.raises(ExplosionGuard):
        oracle_estimates(five_state, ge5, OracleWindow(W09, max_events=3, cap=50))


# -- literal opacity checks ------------------------------------------------------------


def test_current_state_violation_run(five_state, ge5):
    v = oracle_cso(five_state, ["q2"], ["q0", "q1", "q3", "q4"], ge5, window(2))
    assert v.violation
    assert [tag for tag, _ in v.run] == ["sigma1", "sigma3"]
    assert v.observation == ((5,),)
    assert run(five_state, five_state.initial, v.run) == {"q2"}


def test_empty_secret_never_violates(five_state, ge5):
    for fn in (oracle_cso, oracle_iso, oracle_inf):
        assert not fn(five_state, [], ["q0"], ge5, window(2)).violation


def test_infinite_step_reference_has_no_violation(five_state, ge5):
    assert not oracle_inf(five_state, ["q3"], ["q4"], ge5, window(3)).violation


def test_infinite_step_violation_splits_at_secret(five_state, ge5):
    v = oracle_inf(five_state, ["q2"], ["q3"], ge5, window(3))
    assert v.violation and v.state == "q2"


def test_initial_state_violation_needs_secret_start(five_state, ge5):
    S = five_state.with_initial(["q0", "q1", "q2"])
    assert not oracle_iso(S, ["q2"], ["q0", "q1"], ge5, window(2)).violation
    assert oracle_iso(S, ["q2"], [], ge5, window(2)).violation


# -- string reversal --------------------------------------------------------------------------


def origins_by_observation(S, theta, win):
    cm = ConcreteModel(S, theta, win)
    out = {}
    for origin, _, w in cm.configurations(S.states, win.max_events):
        out.setdefault(w, set()).add(origin)
    return out


@pytest.mark.parametrize("seed", list(CORPUS_SEEDS)[:40])
def test_reverse_estimates_are_forward_origins(seed):
    S, theta = random_case(seed)
    win = OracleWindow(DomainSpec.bounded(0, 3), max_events=2)
    rev = oracle_estimates(reverse(S), theta, win)
    fwd = origins_by_observation(S, theta, win)
    assert {reverse_observation(w): qs for w, qs in rev.items()} == fwd


# -- observer cross-check -----------------------------------------------------------------------


def test_reference_observer_agrees(five_state, ge5):
    S = five_state.with_domain(W09)
    obs = build_observer(S, ge5)
    assert compare_with_observer(S, ge5, obs, OracleWindow(W09, max_events=3)) == []


@pytest.mark.parametrize("seed", list(CORPUS_SEEDS)[:50])
def test_corpus_observers_agree(seed):
    S, theta = random_case(seed)
    obs = build_observer(S, theta)
    assert compare_with_observer(S, theta, obs, OracleWindow(S.domain, max_events=3)) == []


def test_cross_check_detects_a_wrong_observer(five_state, ge5):
    S = five_state.with_domain(W09)
    obs = build_observer(S, ge5)
    obs.edges = [e for e in obs.edges if e.target != frozenset({"q2"})]
    problems = compare_with_observer(S, ge5, obs, OracleWindow(W09, max_events=3))
    assert any(p.observation == ((5,),) for p in problems)

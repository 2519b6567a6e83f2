import math
import random
from fractions import Fraction as F

import pytest
from reference import grid_distances

from tpd.checks import check_trace
from tpd.engine import (
    ARRIVAL,
    CAPTURE,
    LOSS,
    RELEASE,
    InputInstance,
    Policy,
    PolicyDecision,
    competitive_ratio,
    count_outcome,
    random_instance,
    random_instances,
    simulate,
)
from tpd.errors import PolicyContractError, ValidationError
from tpd.policies import HoldPolicy, ScriptedPolicy, SweepingPolicy, make_policy
from tpd.tree import Environment, Location

ENV = Environment(2, 2, 1)


def test_head_on_capture():
    trace = simulate(ENV, F(1, 4), InputInstance.of((0, 3)), ScriptedPolicy([(3, 0)]))
    caps = trace.of_kind(CAPTURE)
    assert [(e.time, e.intruder_id) for e in caps] == [(F(8, 5), 0)]
    assert count_outcome(trace) == (1, 0)


def test_empty_instance():
    for policy in (HoldPolicy(), SweepingPolicy(ENV)):
        assert count_outcome(simulate(ENV, F(1, 4), InputInstance(), policy)) == (0, 0)


def test_hold_at_root_loses_both():
    trace = simulate(ENV, F(1, 3), InputInstance.of((2, 3), (2, 5)), HoldPolicy())
    assert count_outcome(trace) == (0, 2)
    assert [e.time for e in trace.of_kind(LOSS)] == [5, 5]


def test_competitive_ratio_conventions():
    assert competitive_ratio(2, 1) == 2
    assert competitive_ratio(0, 0) == 1
    assert competitive_ratio(5, 0) == math.inf


def test_tie_at_loss_instant_goes_to_defender():
    # defender parked on the perimeter vertex captures exactly at the loss time
    trace = simulate(ENV, F(1, 2), InputInstance.of((0, 3)), HoldPolicy(1))
    assert count_outcome(trace) == (1, 0)
    assert trace.of_kind(CAPTURE)[0].time == 2


def test_burst_counts_each_intruder():
    trace = simulate(ENV, F(1, 4), InputInstance.of((0, 3, 3)), ScriptedPolicy([(3, 0)]))
    assert count_outcome(trace) == (3, 0)


def test_same_time_event_order():
    # release at a leaf the defender already occupies: release precedes capture
    trace = simulate(ENV, F(1, 4), InputInstance.of((2, 3)), ScriptedPolicy([(3, 0)]))
    kinds = [e.kind for e in trace.events if e.time == 2 and e.kind != "PolicyDecision"]
    assert kinds == [RELEASE, CAPTURE, ARRIVAL]


def test_bad_release_leaf_rejected():
    with pytest.raises(ValidationError):
        simulate(ENV, F(1, 4), InputInstance.of((0, 1)), HoldPolicy())
    with pytest.raises(ValidationError):
        InputInstance.of((-1, 3))


class BadSpeed(Policy):
    def decide(self, obs):
        return PolicyDecision(2, 1)


class BadGoal(Policy):
    def decide(self, obs):
        return PolicyDecision(1, 99)


@pytest.mark.parametrize("policy", [BadSpeed(), BadGoal()])
def test_policy_contract(policy):
    with pytest.raises(PolicyContractError):
        simulate(ENV, F(1, 4), InputInstance.of((0, 3)), policy)


def test_observation_is_present_only():
    seen = []

    class Spy(Policy):
        def decide(self, obs):
            seen.append((obs.time, [i for i, _ in obs.intruders]))
            return PolicyDecision(0)

    simulate(ENV, F(1, 4), InputInstance.of((1, 3), (3, 4)), Spy())
    for t, ids in seen:
        if t < 1:
            assert ids == []
        elif t < 3:
            assert ids == [0]


def test_random_instances_are_seeded():
    a = list(random_instances(ENV, 7, 5))
    b = list(random_instances(ENV, 7, 5))
    assert a == b
    inst = random_instance(ENV, random.Random(1), max_intruders=4, max_distinct=2)
    assert inst.n_released <= 4 and len(inst) <= 2


def test_realized_releases_round_trip():
    inst = InputInstance.of((0, 3, 2), (F(1, 2), 6))
    trace = simulate(ENV, F(1, 4), inst, HoldPolicy())
    assert trace.releases() == inst


@pytest.mark.parametrize("params,v", [((2, 2, 1), F(1, 3)), ((3, 2, 1), F(1, 5)), ((3, 2, 2), F(1, 2))])
@pytest.mark.parametrize("name", ["sweeping", "sap", "cass", "hold"])
def test_conservation_and_witnesses(params, v, name):
    env = Environment(*params)
    for inst in random_instances(env, 11, 15, max_intruders=6, t_max=20):
        trace = simulate(env, v, inst, make_policy(name, env, v, check_regime=False))
        assert check_trace(trace) == []
        captured, lost = count_outcome(trace)
        assert captured + lost + len(trace.active) == inst.n_released


@pytest.mark.parametrize("name", ["sweeping", "cass", "sap"])
def test_against_time_stepped_reference(name):
    """Replay the engine's path on a 1/64 time grid and compare outcomes."""
    env, v, step = Environment(3, 2, 1), F(1, 3), F(1, 64)
    slack = (1 + v) * step / 2
    for inst in random_instances(env, 5, 8, max_intruders=5, t_max=12, denominator=2):
        trace = simulate(env, v, inst, make_policy(name, env, v, check_regime=False))
        grid = grid_distances(trace, step)
        captured = {e.intruder_id: e.time for e in trace.of_kind(CAPTURE)}
        for iid, rows in grid.items():
            if iid in captured:
                t_c = captured[iid]
                near = min(rows, key=lambda r: abs(r[0] - t_c))
                assert near[1] <= slack
            for t, dist in rows:
                if dist == 0:
                    assert iid in captured and captured[iid] <= t


def test_defender_path_of_sweep_on_empty_instance():
    trace = simulate(ENV, F(1, 4), InputInstance(), SweepingPolicy(ENV), horizon=24)
    arrivals = [e.location.vertex for e in trace.of_kind(ARRIVAL)]
    walk = [1, 3, 1, 4, 1, 0, 2, 5, 2, 6, 2, 0]
    assert arrivals == walk * 2
    assert trace.defender_at(F(1, 2)) == Location(1, F(1, 2))

from fractions import Fraction as F

import pytest

from tpd.adversarial import Thm1Adversary
from tpd.checks import check_cass, check_sap, check_trace
from tpd.engine import ARRIVAL, DECISION, InputInstance, competitive_ratio, count_outcome, random_instances, simulate
from tpd.errors import ValidationError
from tpd.limits import sap_ratio, sweep_bound
from tpd.oracle import optimal_offline
from tpd.policies import (
    CassPolicy,
    SapPolicy,
    SweepingPolicy,
    cass_capture_region_counts,
    make_policy,
    sap_region_counts,
)
from tpd.tree import ROOT, Environment, Location, branch_entrances


@pytest.mark.parametrize("params", [(2, 2, 1), (3, 2, 1), (2, 3, 1)])
def test_sweeping_loses_nothing_at_its_bound(params):
    env = Environment(*params)
    v = sweep_bound(*params)
    for inst in random_instances(env, 3, 150, max_intruders=10, t_max=100):
        assert count_outcome(simulate(env, v, inst, SweepingPolicy(env), record_decisions=False))[1] == 0


def test_sweeping_loses_above_its_bound():
    env, v = Environment(2, 2, 1), F(1, 2)
    adv = Thm1Adversary(env, F(2, 3), 4)
    trace = simulate(env, F(2, 3), adv, SweepingPolicy(env))
    assert count_outcome(trace)[1] > 0
    # a plain stream on one leaf also beats the sweep at v = 1/2
    inst = InputInstance.of(*[(4 * k + 1, 5) for k in range(4)])
    assert count_outcome(simulate(env, v, inst, SweepingPolicy(env)))[1] > 0


def test_sap_region_bands():
    env, v = Environment(3, 2, 1), F(1, 4)
    assert sap_region_counts(env, v, []) == [(0, 0, 0), (0, 0, 0)]
    below_p1 = env.point_at_depth(7, 1 + F(6, 5))
    assert sap_region_counts(env, v, [below_p1]) == [(0, 0, 1), (0, 0, 0)]
    on_edge = env.point_at_depth(7, 1 + F(1, 2))
    assert sap_region_counts(env, v, [on_edge]) == [(0, 1, 0), (0, 0, 0)]
    just_below = env.point_at_depth(7, 1 + F(1, 4))
    assert sap_region_counts(env, v, [just_below]) == [(1, 0, 0), (0, 0, 0)]
    beyond = env.point_at_depth(7, 3)
    assert sap_region_counts(env, v, [beyond]) == [(0, 0, 0), (0, 0, 0)]


def test_sap_band_edge_goes_to_lower_band():
    # with 2 rho v = 1/2 the value 1/2 opens band 2 and closes band 1
    env, v = Environment(3, 2, 1), F(1, 4)
    at_edge = env.point_at_depth(7, 1 + F(1, 2))
    counts = sap_region_counts(env, v, [at_edge])
    assert counts[0][0] == 0 and counts[0][1] == 1


def test_sap_regime_guard():
    env = Environment(3, 2, 1)
    SapPolicy(env, F(1, 3))
    with pytest.raises(ValidationError):
        SapPolicy(env, F(1, 2))


def test_sap_empty_instance_parks_at_first_perimeter_vertex():
    env, v = Environment(3, 2, 1), F(1, 4)
    trace = simulate(env, v, InputInstance(), SapPolicy(env, v), horizon=20)
    assert trace.defender_at(20) == Location.at(1)
    assert count_outcome(trace) == (0, 0)
    assert check_sap(trace) == []


def test_sap_holds_left_subtree():
    env, v = Environment(3, 2, 1), F(1, 4)
    left = branch_entrances(env, 1)
    inst = InputInstance.of(*[(t, left[t % 4]) for t in range(0, 40, 3)])
    trace = simulate(env, v, inst, SapPolicy(env, v))
    # everything released after the initial phase is captured
    late = [i for i in trace.intruders.values() if i.release_time >= 6]
    assert all(i.id in trace.captured for i in late)
    assert check_sap(trace) == [] and check_trace(trace) == []


def test_sap_alternating_bursts_within_ratio():
    env, v = Environment(3, 2, 1), F(1, 4)
    a, b = branch_entrances(env, 1)[0], branch_entrances(env, 2)[0]
    inst = InputInstance.of((6, a, 2), (F(13, 2), b, 2), (7, a, 2), (F(15, 2), b, 2))
    trace = simulate(env, v, inst, SapPolicy(env, v))
    ratio = competitive_ratio(optimal_offline(env, v, inst).captures, count_outcome(trace)[0])
    assert ratio <= sap_ratio(2, 1)
    assert check_sap(trace) == []


def test_sap_epoch_lengths():
    env, v = Environment(3, 2, 1), F(1, 4)
    inst = InputInstance.of((0, 7), (3, 14), (8, 11), (9, 13))
    trace = simulate(env, v, inst, SapPolicy(env, v), horizon=30)
    notes = [e.payload for e in trace.of_kind(DECISION) if e.payload.get("epoch")]
    assert notes[0]["start"] == 2 and notes[1]["start"] == 6
    assert {n["length"] for n in notes[1:]} <= {F(1, 2), F(1)}
    assert check_sap(trace) == []


def test_cass_region_counts():
    env = Environment(5, 2, 1)
    assert cass_capture_region_counts(env, 1, []) == [0, 0]
    leaf = branch_entrances(env, 1)[0]
    assert cass_capture_region_counts(env, 1, [Location.at(leaf)]) == [1, 0]
    shallow = env.point_at_depth(leaf, 2)
    assert cass_capture_region_counts(env, 1, [shallow]) == [0, 0]
    edge = env.point_at_depth(leaf, 3)
    assert cass_capture_region_counts(env, 1, [edge]) == [1, 0]


def test_cass_parameter_and_regime_guards():
    env = Environment(5, 2, 1)
    CassPolicy(env, F(1, 32), 1)
    with pytest.raises(ValidationError):
        CassPolicy(env, F(1, 31), 1)
    with pytest.raises(ValidationError):
        CassPolicy(env, F(1, 40), 2)
    with pytest.raises(ValidationError):
        CassPolicy(env, F(1, 40), 0)


def test_cass_empty_instance_never_leaves_root():
    env, v = Environment(5, 2, 1), F(1, 40)
    trace = simulate(env, v, InputInstance(), CassPolicy(env, v, 1), horizon=200)
    assert trace.of_kind(ARRIVAL) == []
    assert trace.defender_at(200) == Location.at(ROOT)


def test_cass_epoch_length_and_guarantees_in_trace():
    env, v = Environment(5, 2, 1), F(3, 128)
    left, right = branch_entrances(env, 1), branch_entrances(env, 2)
    inst = InputInstance.of((0, left[0]), (5, left[9]), (70, right[3]), (80, right[15]), (100, left[2]))
    trace = simulate(env, v, inst, CassPolicy(env, v, 1))
    starts = [e.payload["start"] for e in trace.of_kind(DECISION) if "a_star" in (e.payload or {})]
    assert starts[0] == 62
    assert all(b - a == 62 for a, b in zip(starts, starts[1:]))
    assert check_cass(trace, 1) == []
    assert count_outcome(trace)[1] == 0


def test_cass_catches_other_branch_next_epoch():
    env, v = Environment(5, 2, 1), F(1, 40)
    left, right = branch_entrances(env, 1), branch_entrances(env, 2)
    # the first epoch (from t = 62) sweeps the left branch; the right-branch
    # intruders released during it must be caught in the following epoch
    inst = InputInstance.of((0, left[0]), (70, right[5]), (90, right[6]))
    trace = simulate(env, v, inst, CassPolicy(env, v, 1))
    notes = [e.payload for e in trace.of_kind(DECISION) if "a_star" in (e.payload or {})]
    assert notes[0]["a_star"] == 1 and notes[1]["a_star"] == 2
    caught = {e.intruder_id: e.time for e in trace.of_kind("Capture")}
    assert set(caught) == {0, 1, 2}
    assert all(124 <= caught[i] <= 186 for i in (1, 2))
    assert check_cass(trace, 1) == []


def test_make_policy_names():
    env = Environment(3, 2, 1)
    for name in ("sweeping", "sap", "cass", "hold"):
        assert make_policy(name, env, F(1, 20)).name == name
    with pytest.raises(ValidationError):
        make_policy("teleport", env, F(1, 20))

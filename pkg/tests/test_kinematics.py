from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from reference import brute_intercept

from tpd.errors import ValidationError
from tpd.kinematics import (
    INFEASIBLE,
    LOST,
    NOT_YET_RELEASED,
    Intruder,
    MotionSegment,
    as_speed,
    coincide_in_window,
    geodesic_legs,
    intercept_time,
    intruder_position,
)
from tpd.tree import ROOT, Environment, Location, dist_locations

ENV = Environment(2, 2, 1)


def test_intruder_positions():
    intr = Intruder(0, 3, F(0))
    v = F(1, 4)
    assert intruder_position(ENV, intr, v, 0) == Location.at(3)
    assert intruder_position(ENV, intr, v, 2) == Location(3, F(1, 2))
    assert intruder_position(ENV, intr, v, 4) == Location.at(1)
    assert intruder_position(ENV, intr, v, F(41, 10)) is LOST
    assert intruder_position(ENV, Intruder(0, 3, F(1)), v, 0) is NOT_YET_RELEASED


def test_speed_validation():
    for bad in (0, 1, F(3, 2), -F(1, 2)):
        with pytest.raises(ValidationError):
            as_speed(bad)
    with pytest.raises(ValidationError):
        as_speed(0.5)
    assert as_speed("1/3") == F(1, 3)


def test_head_on_intercept_from_root():
    t, loc = intercept_time(ENV, Location.at(ROOT), 0, Intruder(0, 3, F(0)), F(1, 4))
    assert t == F(8, 5)
    assert ENV.point_depth(loc) == F(8, 5)
    assert loc == Location(3, F(3, 5))


def test_zero_distance_intercept():
    assert intercept_time(ENV, Location.at(3), 2, Intruder(0, 3, F(2)), F(1, 3)) == (2, Location.at(3))


def test_mirror_intercept_times():
    intr = Intruder(0, 3, F(2))
    v = F(1, 3)
    # from the opposite leaf the defender reaches vertex 1 exactly at the loss instant
    assert intercept_time(ENV, Location.at(5), 2, intr, v) == (5, Location.at(1))
    # from vertex 2 it is one edge closer and meets the intruder inside edge (1,3)
    t, loc = intercept_time(ENV, Location.at(2), 2, intr, v)
    assert t == F(17, 4)
    assert loc == Location(3, F(1, 4))
    assert intercept_time(ENV, Location.at(6), F(5, 2), intr, v) is INFEASIBLE


def test_geodesic_legs_cover_distance():
    start, goal = Location(3, F(1, 3)), Location(6, F(1, 2))
    legs = geodesic_legs(ENV, start, goal, 1)
    assert legs[0].t_a == 1
    assert legs[-1].t_b - 1 == dist_locations(ENV, start, goal)
    assert legs[-1].position(ENV, legs[-1].t_b) == goal


def test_coincide_in_window_examples():
    still = MotionSegment(F(1), F(3), Location(4, F(1, 2)), Location(4, F(1, 2)), F(0))
    other = MotionSegment(F(2), F(5), Location(4, F(1, 2)), Location(4, F(1, 2)), F(0))
    assert coincide_in_window(ENV, still, other) == 2
    down = MotionSegment(F(1), F(2), Location.at(1), Location.at(3), F(1))
    up = MotionSegment(F(0), F(4), Location.at(3), Location.at(1), F(1, 4))
    assert coincide_in_window(ENV, down, up) == F(8, 5)
    far = MotionSegment(F(0), F(4), Location.at(6), Location(6, F(1, 2)), F(0))
    assert coincide_in_window(ENV, far, up) is None


envs = st.sampled_from([(2, 2, 1), (3, 2, 1), (3, 2, 2), (3, 3, 1), (4, 2, 2)])


@settings(max_examples=300, deadline=None)
@given(envs, st.data())
def test_intercept_matches_interval_scan(params, data):
    env = Environment(*params)
    v = data.draw(st.fractions(F(1, 20), F(19, 20), max_denominator=20))
    c = data.draw(st.integers(0, env.n_vertices - 1))
    off = F(1) if c == ROOT else data.draw(st.fractions(F(1, 8), 1, max_denominator=8))
    loc = env.location(c, off)
    leaf = data.draw(st.integers(env.first_id(env.d), env.n_vertices - 1))
    release = data.draw(st.fractions(0, 10, max_denominator=4))
    t0 = data.draw(st.fractions(0, 12, max_denominator=4))
    got = intercept_time(env, loc, t0, Intruder(0, leaf, release), v)
    h = brute_intercept(env, loc, t0, leaf, release, v)
    if h is None:
        assert got is INFEASIBLE
    else:
        assert got == (release + (env.d - h) / v, env.point_at_depth(leaf, h))
        # and the defender really can be there in time
        assert dist_locations(env, loc, got[1]) <= got[0] - t0

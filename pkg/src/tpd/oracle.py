"""Offline optimum: the most captures any defender could make knowing the input.

Intruders released at the same leaf and time are indistinguishable, so they
form one group captured together.  A schedule is an ordered list of groups;
from the current point the defender always takes the earliest possible
intercept of the next group, which never hurts later captures (anything
reachable from a later state is reachable from an earlier one at the same
place).  The search is best-first branch and bound over these orders.
"""
from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import count

from .engine import InputInstance
from .errors import OracleBudgetExceeded, OracleCapExceeded
from .kinematics import INFEASIBLE, Intruder, as_speed, intercept_time
from .tree import ROOT, Environment, Location

DEFAULT_BUDGET = 200_000
DEFAULT_CAP = 8


@dataclass(frozen=True)
class ScheduledCapture:
    intruder_ids: tuple[int, ...]
    time: Fraction
    location: Location


@dataclass
class CaptureSchedule:
    captures: list[ScheduledCapture] = field(default_factory=list)

    @property
    def value(self) -> int:
        return sum(len(c.intruder_ids) for c in self.captures)

    def points(self) -> list[tuple[Fraction, Location]]:
        return [(c.time, c.location) for c in self.captures]


@dataclass(frozen=True)
class OracleResult:
    captures: int
    schedule: CaptureSchedule
    exact: bool
    nodes: int = 0


@dataclass(frozen=True)
class _Group:
    rep: Intruder
    ids: tuple[int, ...]


def _groups(inst: InputInstance) -> list[_Group]:
    by_key: dict[tuple, list[Intruder]] = {}
    for intr in inst.intruders():
        by_key.setdefault((intr.release_time, intr.entry), []).append(intr)
    return [_Group(members[0], tuple(i.id for i in members)) for members in by_key.values()]


def _intercepts(env, v, groups, loc, t, skip):
    out = {}
    for g, grp in enumerate(groups):
        if g in skip:
            continue
        hit = intercept_time(env, loc, t, grp.rep, v)
        if hit is not INFEASIBLE:
            out[g] = hit
    return out


def _schedule(groups, path) -> CaptureSchedule:
    return CaptureSchedule([ScheduledCapture(groups[g].ids, t, loc) for g, t, loc in path])


def greedy_schedule(env: Environment, v, inst: InputInstance) -> CaptureSchedule:
    """Repeatedly intercept the group that will be lost first."""
    v = as_speed(v)
    groups = _groups(inst.validate(env))
    loc, t, done, path = Location.at(ROOT), Fraction(0), set(), []
    while True:
        options = _intercepts(env, v, groups, loc, t, done)
        if not options:
            return _schedule(groups, path)
        g = min(options, key=lambda k: (groups[k].rep.release_time, k))
        t, loc = options[g]
        done.add(g)
        path.append((g, t, loc))


def greedy_offline(env: Environment, v, inst: InputInstance) -> int:
    return greedy_schedule(env, v, inst).value


def optimal_offline(
    env: Environment,
    v,
    inst: InputInstance,
    budget: int = DEFAULT_BUDGET,
    max_groups: int = DEFAULT_CAP,
) -> OracleResult:
    """Exact offline optimum with a witness schedule.

    Raises OracleCapExceeded when the instance has more than ``max_groups``
    distinct (leaf, time) groups and OracleBudgetExceeded, carrying the
    best schedule found so far, after ``budget`` node expansions.
    """
    v = as_speed(v)
    groups = _groups(inst.validate(env))
    if len(groups) > max_groups:
        raise OracleCapExceeded(f"{len(groups)} distinct release groups exceed the cap of {max_groups}")
    mult = [len(g.ids) for g in groups]

    best_path: tuple = ()
    best_value = 0
    greedy = greedy_schedule(env, v, inst)
    if greedy.value:
        index = {grp.ids: g for g, grp in enumerate(groups)}
        best_path = tuple((index[c.intruder_ids], c.time, c.location) for c in greedy.captures)
        best_value = greedy.value

    total = sum(mult)
    tie = count()
    heap = [(-total, 0, next(tie), Location.at(ROOT), Fraction(0), frozenset(), None, ())]
    earliest: dict[tuple, Fraction] = {}
    nodes = 0
    while heap:
        neg_ub, neg_val, _, loc, t, done, last, path = heapq.heappop(heap)
        if -neg_ub <= best_value:
            break
        nodes += 1
        if nodes > budget:
            raise OracleBudgetExceeded(best_value, _schedule(groups, best_path))
        options = _intercepts(env, v, groups, loc, t, done)
        ub = -neg_val + sum(mult[g] for g in options)
        if ub <= best_value:
            continue
        for g, (tg, lg) in options.items():
            value = -neg_val + mult[g]
            child_done = done | {g}
            key = (child_done, g)
            if key in earliest and earliest[key] <= tg:
                continue
            earliest[key] = tg
            child_path = path + ((g, tg, lg),)
            if value > best_value:
                best_value, best_path = value, child_path
            heapq.heappush(heap, (-ub, -value, next(tie), lg, tg, child_done, g, child_path))
    return OracleResult(best_value, _schedule(groups, best_path), True, nodes)


def offline_value(env: Environment, v, inst: InputInstance, budget: int = DEFAULT_BUDGET, max_groups: int = DEFAULT_CAP) -> OracleResult:
    """Optimum when the exact search is affordable, otherwise a greedy lower bound.

    The result's ``exact`` flag records which one was returned.
    """
    try:
        return optimal_offline(env, v, inst, budget=budget, max_groups=max_groups)
    except OracleCapExceeded:
        sched = greedy_schedule(env, v, inst)
        return OracleResult(sched.value, sched, False)
    except OracleBudgetExceeded as exc:
        return OracleResult(exc.best, exc.schedule, False, budget)

"""Adversarial inputs behind the three lower bounds.

* :class:`Thm1Adversary` streams single intruders at one branch and, the
  first time the defender steps on that branch's perimeter vertex, drops a
  burst of ``c + 1`` intruders on a branch ``2 rho`` away.
* :func:`thm2_instances` builds two mirror-image two-intruder inputs that no
  single online defender can both answer optimally.
* :func:`thm3_instance` builds the three-intruder input whose only full
  capture orders are A, B, C and its reverse.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations

from .engine import InputInstance, Release
from .errors import ValidationError
from .kinematics import INFEASIBLE, as_speed, intercept_time
from .limits import eq2_holds, epsilon, thm1_bound, thm2_bound, thm3_lower
from .oracle import CaptureSchedule, ScheduledCapture
from .tree import ROOT, Environment, Location, branch_entrances


def separated_perimeter_vertices(env: Environment, n: int) -> list[int]:
    """``n`` perimeter vertices pairwise ``2 rho`` apart (one per root child)."""
    if n > env.delta:
        raise ValidationError(f"need delta >= {n} for {n} perimeter vertices pairwise 2*rho apart")
    return [env.ancestor_at(branch_entrances(env, c)[0], env.rho) for c in range(1, n + 1)]


def _pick_leaves(env, vertices, rng):
    out = []
    for p in vertices:
        leaves = branch_entrances(env, p)
        out.append(rng.choice(leaves) if rng is not None else leaves[0])
    return out


class Thm1Adversary:
    """Adaptive release source for the unbounded-ratio construction.

    Pass it to :func:`tpd.engine.simulate` in place of an input instance.
    Intruders are released at leaf ``leaf_i`` at ``d, 3d, 5d, ...`` (at most
    ``stream_count`` of them) until the defender first reaches ``p_i``; at
    that moment ``c + 1`` intruders appear at ``leaf_j`` and the stream
    stops.  An instance can be used for one simulation only.
    """

    def __init__(self, env: Environment, v, c: int, stream_count: int | None = None, seed: int | None = None, check_regime: bool = True):
        self.env = env
        self.v = as_speed(v)
        if check_regime and self.v <= thm1_bound(env.d, env.rho):
            raise ValidationError(f"the construction needs v > (d-rho)/(2 rho) = {thm1_bound(env.d, env.rho)}")
        if not isinstance(c, int) or c < 1:
            raise ValidationError("c must be a positive integer")
        self.c = c
        self.stream_count = c + 1 if stream_count is None else stream_count
        self.p_i, self.p_j = separated_perimeter_vertices(env, 2)
        rng = random.Random(seed) if seed is not None else None
        self.leaf_i, self.leaf_j = _pick_leaves(env, (self.p_i, self.p_j), rng)
        self.period = 2 * env.d
        self.first = Fraction(env.d)
        self.stream_end = self.first + self.period * (self.stream_count - 1)
        self.burst_time: Fraction | None = None
        self.watch = frozenset({self.p_i})

    def _stream_times(self):
        t = self.first
        while t <= self.stream_end:
            yield t
            t += self.period

    def next_time(self, after):
        for t in self._stream_times():
            if t > after:
                return t
        return None

    def releases_at(self, t) -> list[Release]:
        out = []
        if t >= self.first and t <= self.stream_end and (t - self.first) % self.period == 0:
            out.append(Release(Fraction(t), self.leaf_i, 1))
        if self.burst_time is not None and t == self.burst_time:
            out.append(Release(Fraction(t), self.leaf_j, self.c + 1))
        return out

    def on_watch(self, t, vertex):
        if self.burst_time is None and vertex == self.p_i:
            self.burst_time = Fraction(t)
            self.stream_end = min(self.stream_end, self.burst_time)

    @property
    def final_time(self):
        return self.stream_end

    @property
    def burst_fired(self) -> bool:
        return self.burst_time is not None


def thm2_instances(env: Environment, v, seed: int | None = None, check_regime: bool = True) -> tuple[InputInstance, InputInstance]:
    """The mirror pair: first intruder at ``d`` on one branch, second on the other."""
    v = as_speed(v)
    if check_regime and v < thm2_bound(env.d, env.rho):
        raise ValidationError(f"the construction needs v >= (d-rho)/(d+rho) = {thm2_bound(env.d, env.rho)}")
    p_i, p_j = separated_perimeter_vertices(env, 2)
    rng = random.Random(seed) if seed is not None else None
    leaf_i, leaf_j = _pick_leaves(env, (p_i, p_j), rng)
    return _thm2_pair(env, v, leaf_i, leaf_j)


def _thm2_pair(env, v, leaf_i, leaf_j):
    d, rho = env.d, env.rho
    t2 = 2 * d + rho - (d - rho) / v
    a = InputInstance.of((d, leaf_i), (t2, leaf_j))
    b = InputInstance.of((d, leaf_j), (t2, leaf_i))
    return a, b


def thm2_family(env: Environment, v, check_regime: bool = True) -> list[InputInstance]:
    """The mirror pair plus a second pair using the second leaf of each branch.

    When ``v`` sits exactly on the threshold the two releases coincide in
    time and the mirror instances are equal; the extra pair keeps the
    family informative there.
    """
    first = thm2_instances(env, v, check_regime=check_regime)
    p_i, p_j = separated_perimeter_vertices(env, 2)
    li, lj = branch_entrances(env, p_i), branch_entrances(env, p_j)
    second = _thm2_pair(env, as_speed(v), li[min(1, len(li) - 1)], lj[0])
    return [*first, *second]


@dataclass(frozen=True)
class Abc3Spec:
    d: int
    rho: int
    v: Fraction
    epsilon: Fraction
    perimeter: tuple[int, int, int]
    leaves: tuple[int, int, int]
    times: tuple[Fraction, Fraction, Fraction]
    ids: dict


def thm3_instance(env: Environment, v, check_regime: bool = True) -> tuple[Abc3Spec, InputInstance]:
    """Intruders A, B, C on three branches pairwise ``2 rho`` apart.

    A arrives at ``d + 3 rho``, B at ``d + rho + eps`` and C at
    ``d + 3 rho + eps`` (release times), with ``eps = d + 3 rho - (d - rho)/v``.
    """
    v = as_speed(v)
    d, rho = env.d, env.rho
    if env.delta < 3:
        raise ValidationError("three perimeter vertices pairwise 2*rho apart need delta >= 3")
    if check_regime:
        if not thm3_lower(d, rho) <= v < thm2_bound(d, rho):
            raise ValidationError(f"v must lie in [{thm3_lower(d, rho)}, {thm2_bound(d, rho)})")
        if not eq2_holds(d, rho, v):
            raise ValidationError("the three-intruder condition fails at this speed")
    eps = epsilon(d, rho, v)
    perim = separated_perimeter_vertices(env, 3)
    leaves = tuple(branch_entrances(env, p)[0] for p in perim)
    times = (Fraction(d + 3 * rho), d + rho + eps, d + 3 * rho + eps)
    inst = InputInstance.of(*zip(times, leaves))
    ids = {}
    for name, t, leaf in zip("ABC", times, leaves):
        ids[name] = next(i.id for i in inst.intruders() if i.release_time == t and i.entry == leaf)
    return Abc3Spec(d, rho, v, eps, tuple(perim), leaves, times, ids), inst


@dataclass(frozen=True)
class FeasibilityResult:
    feasible: bool
    schedule: CaptureSchedule
    failed_id: int | None = None


def capture_order_feasible(env: Environment, v, inst: InputInstance, order) -> FeasibilityResult:
    """Can one defender starting at the root at time 0 capture ``order`` in turn?

    Each capture uses the earliest intercept from the previous capture
    point, which is optimal for every later capture.
    """
    v = as_speed(v)
    by_id = {i.id: i for i in inst.intruders()}
    loc, t, caps = Location.at(ROOT), Fraction(0), []
    for iid in order:
        hit = intercept_time(env, loc, t, by_id[iid], v)
        if hit is INFEASIBLE:
            return FeasibilityResult(False, CaptureSchedule(caps), iid)
        t, loc = hit
        caps.append(ScheduledCapture((iid,), t, loc))
    return FeasibilityResult(True, CaptureSchedule(caps))


def feasible_full_orders(env: Environment, v, inst: InputInstance) -> list[tuple[int, ...]]:
    ids = [i.id for i in inst.intruders()]
    return [p for p in permutations(ids) if capture_order_feasible(env, v, inst, p).feasible]

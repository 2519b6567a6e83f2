"""Event-driven simulation of one defender against one input instance.

Between events everything moves linearly, so the next capture, loss,
arrival or release time is computed exactly and the clock jumps straight to
it.  Events sharing a time stamp are handled in the fixed order
release -> capture -> loss -> arrival -> wake-up, after which the policy is
consulted once.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

from .errors import PolicyContractError, ValidationError
from .kinematics import Intruder, Leg, MotionSegment, as_speed, geodesic_legs, intruder_position, leg_coincidence
from .tree import ROOT, Environment, Location

INFINITE = math.inf

RELEASE = "Release"
CAPTURE = "Capture"
LOSS = "Loss"
ARRIVAL = "Arrival"
DECISION = "PolicyDecision"
WAKEUP = "Wakeup"
START = "Start"


@dataclass(frozen=True, order=True)
class Release:
    t: Fraction
    leaf: int
    count: int = 1


@dataclass(frozen=True)
class InputInstance:
    """Timed releases ``(t, leaf, count)``, kept sorted by time then leaf."""

    releases: tuple[Release, ...] = ()

    def __post_init__(self):
        rel = []
        for r in self.releases:
            if not isinstance(r, Release):
                r = Release(*r)
            t = Fraction(r.t)
            if t < 0:
                raise ValidationError("release times must be >= 0")
            if not isinstance(r.count, int) or r.count < 1:
                raise ValidationError("release counts must be positive integers")
            rel.append(Release(t, r.leaf, r.count))
        object.__setattr__(self, "releases", tuple(sorted(rel)))

    @classmethod
    def of(cls, *releases) -> InputInstance:
        """``InputInstance.of((t, leaf), (t, leaf, count), ...)``."""
        return cls(tuple(Release(Fraction(r[0]), *r[1:]) for r in releases))

    def validate(self, env: Environment) -> InputInstance:
        for r in self.releases:
            if not env.is_vertex(r.leaf) or not env.is_leaf(r.leaf):
                raise ValidationError(f"release leaf {r.leaf} is not a leaf of the environment")
        return self

    @property
    def n_released(self) -> int:
        return sum(r.count for r in self.releases)

    @property
    def final_time(self) -> Fraction:
        return self.releases[-1].t if self.releases else Fraction(0)

    def intruders(self) -> list[Intruder]:
        out = []
        for r in self.releases:
            for _ in range(r.count):
                out.append(Intruder(len(out), r.leaf, r.t))
        return out

    def __len__(self):
        return len(self.releases)


@dataclass(frozen=True)
class Observation:
    """What a policy may see: the present only."""

    time: Fraction
    defender: Location
    intruders: tuple[tuple[int, Location], ...]
    events: tuple[str, ...]


@dataclass(frozen=True)
class PolicyDecision:
    speed: int
    goal: int | None = None
    next_wakeup: Fraction | None = None
    note: dict | None = None


class Policy:
    """Base class for online defender policies.

    Subclasses implement :meth:`decide`; :meth:`reset` is called once at
    the start of every simulation.
    """

    name = "policy"

    def reset(self):
        pass

    def decide(self, obs: Observation) -> PolicyDecision:
        raise NotImplementedError


@dataclass(frozen=True)
class TraceEvent:
    time: Fraction
    kind: str
    intruder_id: int | None = None
    location: Location | None = None
    payload: dict | None = None


@dataclass
class Trace:
    env: Environment
    v: Fraction
    events: list[TraceEvent] = field(default_factory=list)
    segments: list[MotionSegment] = field(default_factory=list)
    intruders: dict[int, Intruder] = field(default_factory=dict)
    captured: list[int] = field(default_factory=list)
    lost: list[int] = field(default_factory=list)
    end_time: Fraction = Fraction(0)

    @property
    def released(self) -> int:
        return len(self.intruders)

    @property
    def active(self) -> list[int]:
        done = set(self.captured) | set(self.lost)
        return [i for i in self.intruders if i not in done]

    def releases(self) -> InputInstance:
        """The realized input, e.g. after an adaptive adversary has run."""
        groups: dict[tuple, int] = {}
        for intr in self.intruders.values():
            key = (intr.release_time, intr.entry)
            groups[key] = groups.get(key, 0) + 1
        return InputInstance(tuple(Release(t, leaf, n) for (t, leaf), n in groups.items()))

    def of_kind(self, kind: str) -> list[TraceEvent]:
        return [e for e in self.events if e.kind == kind]

    def defender_at(self, t) -> Location:
        """Defender location at time ``t`` reconstructed from the path."""
        for seg in self.segments:
            if seg.t_start <= t <= seg.t_end:
                if seg.speed == 0 or t == seg.t_start:
                    return seg.from_loc
                for leg in geodesic_legs(self.env, seg.from_loc, seg.to_loc, seg.t_start):
                    if leg.t_a <= t <= leg.t_b:
                        return leg.position(self.env, t)
                return seg.to_loc
        return self.segments[-1].to_loc if self.segments else Location.at(ROOT)


class StaticSource:
    """Release schedule fixed in advance."""

    watch: frozenset = frozenset()

    def __init__(self, instance: InputInstance):
        self.instance = instance
        self._times = sorted({r.t for r in instance.releases})

    def next_time(self, after):
        for t in self._times:
            if t > after:
                return t
        return None

    def releases_at(self, t) -> list[Release]:
        return [r for r in self.instance.releases if r.t == t]

    def on_watch(self, t, vertex):
        pass

    @property
    def final_time(self):
        return self.instance.final_time


def _as_source(inst):
    if isinstance(inst, InputInstance):
        return StaticSource(inst)
    if hasattr(inst, "releases_at"):
        return inst
    return StaticSource(InputInstance(tuple(inst)))


class _Simulation:
    def __init__(self, env, v, source, policy, horizon, record_decisions):
        self.env = env
        self.v = v
        self.source = source
        self.policy = policy
        self.horizon_override = None if horizon is None else Fraction(horizon)
        self.record_decisions = record_decisions
        self.trace = Trace(env, v)
        self.t = Fraction(0)
        self.loc = Location.at(ROOT)
        self.active: dict[int, Intruder] = {}
        self.goal = None
        self.moving = False
        self.wake = None
        self.legs: list[Leg] = []
        self.plan_start = (self.t, self.loc)
        self.crossing = (env.d - env.rho) / v

    # -- plan ---------------------------------------------------------

    def _plan(self, decision: PolicyDecision):
        env = self.env
        if decision.speed not in (0, 1):
            raise PolicyContractError(f"speed must be 0 or 1, got {decision.speed!r}")
        if (decision.speed == 1 or decision.goal is not None) and not env.is_vertex(decision.goal):
            raise PolicyContractError(f"goal {decision.goal!r} is not a vertex")
        w = decision.next_wakeup
        self.wake = Fraction(w) if w is not None and w > self.t else None
        self.goal = decision.goal
        self.plan_start = (self.t, self.loc)
        target = Location.at(decision.goal) if decision.goal is not None else None
        if decision.speed == 1 and target != self.loc:
            self.legs = geodesic_legs(env, self.loc, target, self.t)
            end = self.legs[-1].t_b
            self.legs.append(Leg(end, None, target.edge_child, Fraction(env.depth(target.edge_child)), 0))
            self.moving = True
        else:
            self.legs = [Leg(self.t, None, self.loc.edge_child, env.point_depth(self.loc), 0)]
            self.moving = False

    def _position(self, t) -> Location:
        for leg in self.legs:
            if leg.t_b is None or t <= leg.t_b:
                return leg.position(self.env, t)
        raise AssertionError("plan does not cover time")

    def _watch_time(self, limit):
        watch = self.source.watch
        if not watch:
            return None
        env, best = self.env, None
        for leg in self.legs:
            if leg.t_a > limit:
                break
            for w in watch:
                dw = env.depth(w)
                on_edge = w == leg.c or (leg.c != ROOT and w == env.parent(leg.c))
                if not on_edge:
                    continue
                if leg.slope == 0:
                    t = leg.t_a if leg.depth_a == dw else None
                else:
                    t = leg.t_a + (dw - leg.depth_a) / leg.slope
                    if t < leg.t_a or t > leg.t_b:
                        t = None
                if t is not None and t > self.t and (best is None or t < best):
                    best = t
        return best

    # -- main loop ----------------------------------------------------

    def horizon(self):
        if self.horizon_override is not None:
            return self.horizon_override
        return Fraction(self.source.final_time) + self.env.d + self.crossing

    def run(self) -> Trace:
        self.policy.reset()
        self._process((START,))
        while True:
            horizon = self.horizon()
            if self.t >= horizon:
                break
            limit = horizon
            t_next = self.source.next_time(self.t)
            if t_next is not None and t_next < limit:
                limit = t_next
            if self.moving and self.legs[-1].t_a < limit:
                limit = self.legs[-1].t_a
            if self.wake is not None and self.wake < limit:
                limit = self.wake
            for intr in self.active.values():
                lt = intr.release_time + self.crossing
                if lt < limit:
                    limit = lt
            tw = self._watch_time(limit)
            if tw is not None and tw < limit:
                limit = tw
            for leg in self.legs:
                if leg.t_a > limit:
                    break
                for intr in self.active.values():
                    tc = leg_coincidence(self.env, leg, intr, self.v, self.t, limit)
                    if tc is not None and tc < limit:
                        limit = tc
            self._advance(limit)
            self._process(())
        self.trace.end_time = self.t
        return self.trace

    def _advance(self, t):
        new_loc = self._position(t)
        t0, loc0 = self.plan_start
        if t > t0:
            speed = Fraction(1) if self.moving else Fraction(0)
            self.trace.segments.append(MotionSegment(t0, t, loc0, new_loc, speed))
        self.t = t
        self.loc = new_loc
        self.plan_start = (t, new_loc)

    def _process(self, kinds):
        env, t, tr = self.env, self.t, self.trace
        kinds = list(kinds)
        if self.source.watch and self.loc.vertex in self.source.watch:
            self.source.on_watch(t, self.loc.vertex)
        for rel in self.source.releases_at(t):
            if not env.is_vertex(rel.leaf) or not env.is_leaf(rel.leaf):
                raise ValidationError(f"release leaf {rel.leaf} is not a leaf of the environment")
            for _ in range(rel.count):
                intr = Intruder(len(tr.intruders), rel.leaf, Fraction(rel.t))
                tr.intruders[intr.id] = intr
                self.active[intr.id] = intr
                tr.events.append(TraceEvent(t, RELEASE, intr.id, Location.at(rel.leaf)))
            kinds.append(RELEASE)
        for iid in sorted(self.active):
            intr = self.active[iid]
            if intruder_position(env, intr, self.v, t) == self.loc:
                del self.active[iid]
                tr.captured.append(iid)
                tr.events.append(TraceEvent(t, CAPTURE, iid, self.loc))
                kinds.append(CAPTURE)
        for iid in sorted(self.active):
            intr = self.active[iid]
            if intr.release_time + self.crossing == t:
                del self.active[iid]
                tr.lost.append(iid)
                tr.events.append(TraceEvent(t, LOSS, iid, Location.at(intr.target(env))))
                kinds.append(LOSS)
        if self.moving and self.loc == Location.at(self.goal):
            self.moving = False
            tr.events.append(TraceEvent(t, ARRIVAL, None, self.loc))
            kinds.append(ARRIVAL)
        if self.wake is not None and self.wake == t:
            kinds.append(WAKEUP)
        obs = Observation(
            t,
            self.loc,
            tuple((iid, intruder_position(env, intr, self.v, t)) for iid, intr in sorted(self.active.items())),
            tuple(dict.fromkeys(kinds)),
        )
        decision = self.policy.decide(obs)
        if decision is None:
            raise PolicyContractError("policy returned no decision")
        if self.record_decisions or decision.note:
            payload = {"speed": decision.speed, "goal": decision.goal}
            if decision.note:
                payload.update(decision.note)
            tr.events.append(TraceEvent(t, DECISION, None, self.loc, payload))
        self._plan(decision)


def simulate(env: Environment, v, inst, policy: Policy, horizon=None, record_decisions=True) -> Trace:
    """Run ``policy`` against ``inst`` (an InputInstance or adaptive source)."""
    v = as_speed(v)
    if isinstance(inst, InputInstance):
        inst.validate(env)
    return _Simulation(env, v, _as_source(inst), policy, horizon, record_decisions).run()


def count_outcome(trace: Trace) -> tuple[int, int]:
    captured = sum(1 for e in trace.events if e.kind == CAPTURE)
    lost = sum(1 for e in trace.events if e.kind == LOSS)
    return captured, lost


def competitive_ratio(offline_captures: int, online_captures: int):
    """``offline / online``; 1 when both are zero, infinite when only online is."""
    if online_captures == 0:
        return Fraction(1) if offline_captures == 0 else INFINITE
    return Fraction(offline_captures, online_captures)


def random_instance(
    env: Environment,
    rng: random.Random,
    max_intruders: int = 10,
    t_max=100,
    max_distinct: int | None = None,
    denominator: int = 4,
    burst_prob: float = 0.15,
) -> InputInstance:
    """Random releases on a ``1/denominator`` time grid over ``[0, t_max]``."""
    leaves = range(env.first_id(env.d), env.n_vertices)
    budget = rng.randint(1, max_intruders)
    cap = budget if max_distinct is None else min(budget, max_distinct)
    releases = {}
    total = 0
    while total < budget and len(releases) < cap:
        key = (Fraction(rng.randint(0, int(t_max * denominator)), denominator), rng.choice(leaves))
        n = 1
        if rng.random() < burst_prob:
            n = rng.randint(2, 3)
        n = min(n, budget - total)
        releases[key] = releases.get(key, 0) + n
        total += n
    return InputInstance(tuple(Release(t, leaf, n) for (t, leaf), n in releases.items()))


def random_instances(env: Environment, seed: int, count: int, **kwargs) -> Iterable[InputInstance]:
    rng = random.Random(seed)
    for _ in range(count):
        yield random_instance(env, rng, **kwargs)

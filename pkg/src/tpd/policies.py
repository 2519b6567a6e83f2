"""Online defender policies.

Each policy is a small state machine driven by the engine's observations.
Policies never see the input instance, only the intruders currently on the
tree, so the online-information rule holds by construction.
"""
from __future__ import annotations

from fractions import Fraction

from .engine import RELEASE, Observation, Policy, PolicyDecision
from .errors import ValidationError
from .kinematics import as_speed, geodesic_legs
from .limits import cass_bound, cass_epoch_length, sap_bound
from .tree import ROOT, Environment, Location, perimeter_vertices, sweep_walk


def _argmax(values) -> int:
    """Index of the largest value, ties to the lowest index."""
    best = 0
    for k, x in enumerate(values):
        if x > values[best]:
            best = k
    return best


def _locations(q):
    if isinstance(q, Observation):
        return [loc for _, loc in q.intruders]
    return list(q)


class HoldPolicy(Policy):
    """Go to ``vertex`` and stay there."""

    name = "hold"

    def __init__(self, vertex: int = ROOT):
        self.vertex = vertex

    def decide(self, obs):
        if obs.defender == Location.at(self.vertex):
            return PolicyDecision(0, self.vertex)
        return PolicyDecision(1, self.vertex)


class ScriptedPolicy(Policy):
    """Visit ``(vertex, depart_at)`` steps in order, then hold.

    Step ``i`` waits until ``depart_at`` and then heads for ``vertex``.
    """

    name = "script"

    def __init__(self, steps):
        self.steps = [(g, Fraction(t)) for g, t in steps]

    def reset(self):
        self.idx = 0

    def decide(self, obs):
        while self.idx < len(self.steps):
            goal, depart = self.steps[self.idx]
            if obs.time < depart:
                return PolicyDecision(0, None, next_wakeup=depart)
            if obs.defender == Location.at(goal):
                self.idx += 1
                continue
            return PolicyDecision(1, goal)
        return PolicyDecision(0)


class SweepingPolicy(Policy):
    """Repeat the left-most depth-first closed walk from the root forever."""

    name = "sweeping"

    def __init__(self, env: Environment):
        self.walk = sweep_walk(env)[:-1]

    def reset(self):
        self.idx = 1

    def decide(self, obs):
        if obs.defender == Location.at(self.walk[self.idx]):
            self.idx = (self.idx + 1) % len(self.walk)
        return PolicyDecision(1, self.walk[self.idx])


def sap_region_counts(env: Environment, v, q) -> list[tuple[int, int, int]]:
    """Per perimeter subtree, intruders in the three distance-to-go bands.

    Bands are ``[0, b)``, ``[b, 2b)`` and ``[2b, 3b]`` with ``b = 2 rho v``;
    intruders further out are not counted.
    """
    v = Fraction(v)
    band = 2 * env.rho * v
    first = env.first_id(env.rho)
    counts = [[0, 0, 0] for _ in range(env.delta**env.rho)]
    for loc in _locations(q):
        togo = env.point_depth(loc) - env.rho
        if togo < band:
            h = 0
        elif togo < 2 * band:
            h = 1
        elif togo <= 3 * band:
            h = 2
        else:
            continue
        k = env.ancestor_at(loc.edge_child, env.rho) - first
        counts[k][h] += 1
    return [tuple(c) for c in counts]


class SapPolicy(Policy):
    """Stay at Perimeter.

    Waits at the root until ``2 rho``, commits to the busiest perimeter
    subtree until ``6 rho``, then runs epochs of ``2 rho v`` (stay) or
    ``4 rho v`` (move).  It moves only when the best subtree differs from
    the current one and that subtree's second band holds at least as many
    intruders as the current first band.
    """

    name = "sap"

    def __init__(self, env: Environment, v, check_regime: bool = True):
        self.env = env
        self.v = as_speed(v)
        if check_regime and self.v > sap_bound(env.d, env.rho):
            raise ValidationError(
                f"sap requires v <= (d-rho)/(6 rho) = {sap_bound(env.d, env.rho)}, got {self.v}"
            )
        self.perimeter = perimeter_vertices(env)
        self.stay = 2 * env.rho * self.v
        self.move = 4 * env.rho * self.v

    def reset(self):
        self.current = None
        self.boundary = Fraction(2 * self.env.rho)

    def _eta(self, counts, current):
        return [sum(c) if k == current else c[1] + c[2] for k, c in enumerate(counts)]

    def _go(self, obs, note=None):
        p = self.perimeter[self.current]
        speed = 0 if obs.defender == Location.at(p) else 1
        return PolicyDecision(speed, p, next_wakeup=self.boundary, note=note)

    def decide(self, obs):
        t, rho = obs.time, self.env.rho
        if self.current is None:
            if t < 2 * rho:
                return PolicyDecision(0, ROOT, next_wakeup=self.boundary)
            # at the root no subtree is "current", so every k uses S2 + S3
            counts = sap_region_counts(self.env, self.v, obs)
            self.current = _argmax(self._eta(counts, None))
            self.boundary = Fraction(6 * rho)
            return self._go(obs, {"epoch": "initial", "start": t, "k": self.current + 1})
        if t < self.boundary:
            return self._go(obs)
        counts = sap_region_counts(self.env, self.v, obs)
        best = _argmax(self._eta(counts, self.current))
        if best != self.current and counts[best][1] >= counts[self.current][0]:
            self.current = best
            kind, length = "move", self.move
        else:
            kind, length = "stay", self.stay
        self.boundary = t + length
        return self._go(obs, {"epoch": kind, "start": t, "length": length, "k": self.current + 1})


def cass_capture_region_counts(env: Environment, s: int, q) -> list[int]:
    """Intruders at least ``(d - rho)/2`` below the perimeter, per depth-``s`` branch."""
    threshold = env.rho + Fraction(env.d - env.rho, 2)
    first = env.first_id(s)
    counts = [0] * env.delta**s
    for loc in _locations(q):
        if env.point_depth(loc) >= threshold:
            counts[env.ancestor_at(loc.edge_child, s) - first] += 1
    return counts


def check_cass_params(env: Environment, s) -> int:
    if not isinstance(s, int) or isinstance(s, bool) or not 1 <= s <= env.rho:
        raise ValidationError(f"sweeping depth s must satisfy 1 <= s <= rho = {env.rho}, got {s!r}")
    return s


class CassPolicy(Policy):
    """Compare and Subtree Sweep with sweeping depth ``s``.

    After the first release the defender waits at the root for one epoch,
    then each epoch sweeps the depth-``s`` branch whose capture region holds
    the most intruders (ties to the left-most) and returns to the root.
    """

    name = "cass"

    def __init__(self, env: Environment, v, s: int, check_regime: bool = True):
        self.env = env
        self.v = as_speed(v)
        self.s = check_cass_params(env, s)
        bound = cass_bound(env.d, env.delta, env.rho, s)
        if check_regime and self.v > bound:
            raise ValidationError(f"cass with s={s} requires v <= {bound}, got {self.v}")
        self.epoch_length = cass_epoch_length(env.d, env.delta, s)
        self.branch_roots = list(range(env.first_id(s), env.first_id(s + 1)))

    def reset(self):
        self.start = None
        self.route: list[int] = []
        self.idx = 0
        self.epoch = 0

    def _new_epoch(self, obs):
        env = self.env
        counts = cass_capture_region_counts(env, self.s, obs)
        k = _argmax(counts)
        a = self.branch_roots[k]
        self.route = env.vertex_path(ROOT, a)[1:] + sweep_walk(env, a)[1:] + env.vertex_path(a, ROOT)[1:]
        self.idx = 0
        self.epoch += 1
        return {"epoch": self.epoch, "start": obs.time, "a_star": a, "counts": counts}

    def decide(self, obs):
        if self.start is None:
            if RELEASE in obs.events:
                self.start = obs.time + self.epoch_length
            return PolicyDecision(0, ROOT, next_wakeup=self.start)
        if obs.time < self.start:
            return PolicyDecision(0, ROOT, next_wakeup=self.start)
        note = None
        while self.idx < len(self.route) and obs.defender == Location.at(self.route[self.idx]):
            self.idx += 1
        if self.idx == len(self.route):
            note = self._new_epoch(obs)
        return PolicyDecision(1, self.route[self.idx], note=note)


class ScheduleReplayPolicy(Policy):
    """Drive to scheduled ``(time, location)`` capture points and wait there.

    Used to replay offline witness schedules; points may lie inside edges,
    in which case the defender is stopped there by a wake-up.
    """

    name = "replay"

    def __init__(self, env: Environment, points):
        self.env = env
        self.points = [(Fraction(t), loc) for t, loc in points]

    def reset(self):
        self.idx = 0

    def decide(self, obs):
        while self.idx < len(self.points):
            t_c, x = self.points[self.idx]
            if obs.defender == x:
                if obs.time >= t_c:
                    self.idx += 1
                    continue
                return PolicyDecision(0, None, next_wakeup=t_c)
            legs = geodesic_legs(self.env, obs.defender, x, obs.time)
            if x.is_vertex:
                return PolicyDecision(1, x.vertex)
            last = legs[-1]
            goal = last.c if last.slope > 0 else self.env.parent(last.c)
            return PolicyDecision(1, goal, next_wakeup=last.t_b)
        return PolicyDecision(0)


def make_policy(name: str, env: Environment, v, s: int | None = None, check_regime: bool = True) -> Policy:
    """Build a policy by CLI name: sweeping | sap | cass | hold."""
    if name == "sweeping":
        return SweepingPolicy(env)
    if name == "sap":
        return SapPolicy(env, v, check_regime=check_regime)
    if name == "cass":
        return CassPolicy(env, v, 1 if s is None else s, check_regime=check_regime)
    if name == "hold":
        return HoldPolicy(ROOT)
    raise ValidationError(f"unknown policy {name!r}")


POLICY_NAMES = ("sweeping", "sap", "cass", "hold")

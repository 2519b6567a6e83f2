"""Exact motion of intruders and the defender.

Every intruder climbs the vertical line from its leaf towards its perimeter
ancestor, so its depth is the linear function ``d - v (t - release)``.  The
defender's motion is cut into :class:`Leg` pieces, each confined to one edge
(or parked at one point) with depth linear in time.  Coincidence of a leg
with an intruder is then a single linear equation solved in exact rationals.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import ValidationError
from .tree import ROOT, Environment, Location, _exits, dist_vertices, nearest_perimeter_vertex


class _Marker:
    def __init__(self, name):
        self.name = name

    def __repr__(self):
        return self.name


LOST = _Marker("LOST")
NOT_YET_RELEASED = _Marker("NOT_YET_RELEASED")
INFEASIBLE = _Marker("INFEASIBLE")


def as_speed(v) -> Fraction:
    """Parse an intruder speed; must be an exact rational in (0, 1)."""
    if isinstance(v, float):
        raise ValidationError("speeds must be exact rationals, not floats")
    try:
        v = Fraction(v)
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise ValidationError(f"cannot parse speed {v!r}") from exc
    if not 0 < v < 1:
        raise ValidationError("v must satisfy 0 < v < 1")
    return v


@dataclass(frozen=True)
class Intruder:
    id: int
    entry: int
    release_time: Fraction

    def loss_time(self, env: Environment, v: Fraction) -> Fraction:
        return self.release_time + (env.d - env.rho) / v

    def depth_at(self, env: Environment, v: Fraction, t) -> Fraction:
        return env.d - v * (t - self.release_time)

    def target(self, env: Environment) -> int:
        return nearest_perimeter_vertex(env, self.entry)


def intruder_position(env: Environment, intr: Intruder, v, t):
    """Location of ``intr`` at time ``t``, or LOST / NOT_YET_RELEASED.

    Reaching the perimeter vertex exactly still returns that vertex: the
    loss only happens strictly afterwards.
    """
    t = Fraction(t)
    if t < intr.release_time:
        return NOT_YET_RELEASED
    travelled = v * (t - intr.release_time)
    if travelled > env.d - env.rho:
        return LOST
    return env.point_at_depth(intr.entry, env.d - travelled)


@dataclass(frozen=True)
class Leg:
    """Defender motion confined to edge ``c`` (or the point ``c``).

    Over ``[t_a, t_b]`` the depth is ``depth_a + slope * (t - t_a)``;
    ``slope`` is -1, 0 or +1 and ``t_b`` is None for an open-ended stop.
    """

    t_a: Fraction
    t_b: Fraction | None
    c: int
    depth_a: Fraction
    slope: int

    def depth_at(self, t) -> Fraction:
        return self.depth_a + self.slope * (t - self.t_a)

    def position(self, env: Environment, t) -> Location:
        depth = self.depth_at(t)
        k = env.depth(self.c)
        if depth == k:
            return Location(self.c, Fraction(1))
        if depth == k - 1:
            return Location(env.parent(self.c), Fraction(1))
        return Location(self.c, depth - (k - 1))


@dataclass(frozen=True)
class MotionSegment:
    t_start: Fraction
    t_end: Fraction
    from_loc: Location
    to_loc: Location
    speed: Fraction


def _vertex_legs(env: Environment, path: list[int], t: Fraction, legs: list[Leg]) -> Fraction:
    for a, b in zip(path, path[1:]):
        if a != ROOT and b == env.parent(a):
            legs.append(Leg(t, t + 1, a, Fraction(env.depth(a)), -1))
        else:
            legs.append(Leg(t, t + 1, b, Fraction(env.depth(a)), 1))
        t += 1
    return t


def geodesic_legs(env: Environment, start: Location, goal: Location, t0) -> list[Leg]:
    """Unit-speed legs along the shortest path from ``start`` to ``goal``."""
    t0 = Fraction(t0)
    if start == goal:
        return []
    depth = env.point_depth
    if (start.offset != 1 and goal.offset != 1 and start.edge_child == goal.edge_child):
        slope = 1 if goal.offset > start.offset else -1
        return [Leg(t0, t0 + abs(goal.offset - start.offset), start.edge_child, depth(start), slope)]
    best = None
    for x, dx in _exits(env, start):
        for y, dy in _exits(env, goal):
            total = dx + dist_vertices(env, x, y) + dy
            if best is None or total < best[0]:
                best = (total, x, dx, y, dy)
    _, x, dx, y, dy = best
    legs: list[Leg] = []
    t = t0
    if dx:
        c = start.edge_child
        legs.append(Leg(t, t + dx, c, depth(start), -1 if x != c else 1))
        t += dx
    t = _vertex_legs(env, env.vertex_path(x, y), t, legs)
    if dy:
        c = goal.edge_child
        legs.append(Leg(t, t + dy, c, Fraction(env.depth(y)), 1 if y != c else -1))
    return legs


def _meet_on_line(env: Environment, leg: Leg, entry: int, release, v, lo, hi):
    """Earliest t in [lo, hi] at which the leg holds the point occupied by a
    climber that left ``entry`` at time ``release`` with speed ``v``."""
    lo = max(lo, leg.t_a)
    if leg.t_b is not None and leg.t_b < hi:
        hi = leg.t_b
    if lo > hi:
        return None
    d, s = env.d, leg.slope
    if env.is_ancestor(leg.c, entry):
        # depth_a + s (t - t_a) = d - v (t - release); s + v is never zero
        t = (d + v * release - leg.depth_a + s * leg.t_a) / (s + v)
        return t if lo <= t <= hi else None
    # off the climber's line: only the leg's upper endpoint can touch it
    if leg.c == ROOT or not env.is_ancestor(env.parent(leg.c), entry):
        return None
    top = env.depth(leg.c) - 1
    if s == 0:
        if leg.depth_a != top:
            return None
        t = release + (d - top) / v
    else:
        t = leg.t_a + (top - leg.depth_a) / s
        if d - v * (t - release) != top:
            return None
    return t if lo <= t <= hi else None


def leg_coincidence(env: Environment, leg: Leg, intr: Intruder, v, t_lo, t_hi):
    """Earliest time in ``[t_lo, t_hi]`` at which ``leg`` meets ``intr``.

    The window is clipped to the intruder's lifetime ``[release, loss]``,
    closed on the right because ties go to the defender.
    """
    lo = max(t_lo, intr.release_time)
    hi = intr.loss_time(env, v)
    if t_hi is not None and t_hi < hi:
        hi = t_hi
    return _meet_on_line(env, leg, intr.entry, intr.release_time, v, lo, hi)


def _line_projection(env: Environment, loc: Location, leaf: int):
    """(off-line distance, depth of projection) of ``loc`` onto leaf's root line."""
    c = loc.edge_child
    if env.is_ancestor(c, leaf):
        return Fraction(0), env.point_depth(loc)
    anchor = env.parent(c) if loc.offset != 1 else c
    w = env.lca(anchor, leaf)
    return env.point_depth(loc) - env.depth(w), Fraction(env.depth(w))


def intercept_time(env: Environment, defender_loc: Location, t0, intr: Intruder, v):
    """Earliest capture of ``intr`` by a unit-speed defender at ``defender_loc`` at ``t0``.

    Returns ``(t_star, location)`` or INFEASIBLE.  A capture at depth ``h``
    on the intruder's path happens at ``release + (d - h)/v`` and is
    reachable iff the defender can get there no later; the slack of that
    condition is strictly decreasing in ``h``, so the deepest reachable
    point is the unique root of a two-piece linear function.
    """
    t0 = Fraction(t0)
    d, rho, r = env.d, env.rho, intr.release_time
    off, hq = _line_projection(env, defender_loc, intr.entry)
    inv = 1 / v

    def slack(h):
        return r + (d - h) * inv - t0 - off - abs(hq - h)

    if slack(d) >= 0:
        h = Fraction(d)
    elif slack(rho) < 0:
        return INFEASIBLE
    elif rho <= hq <= d and slack(hq) < 0:
        h = (r + d * inv - t0 - off - hq) / (inv - 1)
    else:
        h = (r + d * inv - t0 - off + hq) / (inv + 1)
    t_star = r + (d - h) * inv
    return t_star, env.point_at_depth(intr.entry, h)


def _leaf_below(env: Environment, loc: Location) -> int:
    c = loc.edge_child
    while not env.is_leaf(c):
        c = c * env.delta + 1
    return c


def segment_legs(env: Environment, seg: MotionSegment) -> list[Leg]:
    if seg.from_loc == seg.to_loc:
        return [Leg(seg.t_start, seg.t_end, seg.from_loc.edge_child, env.point_depth(seg.from_loc), 0)]
    return geodesic_legs(env, seg.from_loc, seg.to_loc, seg.t_start)


def _on_edge(env: Environment, p: Location, c: int) -> bool:
    if p.offset != 1:
        return p.edge_child == c
    return p.edge_child == c or (c != ROOT and p.edge_child == env.parent(c))


def coincide_in_window(env: Environment, seg_defender: MotionSegment, seg_intruder: MotionSegment):
    """Earliest common time at which the two segments occupy the same point."""
    lo = max(seg_defender.t_start, seg_intruder.t_start)
    hi = min(seg_defender.t_end, seg_intruder.t_end)
    if lo > hi:
        return None
    v = Fraction(seg_intruder.speed)
    best = None
    if v == 0:
        p = seg_intruder.from_loc
        for leg in segment_legs(env, seg_defender):
            a, b = max(lo, leg.t_a), min(hi, leg.t_b)
            if a > b or not _on_edge(env, p, leg.c):
                continue
            if leg.slope == 0:
                t = a if leg.position(env, a) == p else None
            else:
                t = leg.t_a + (env.point_depth(p) - leg.depth_a) / leg.slope
            if t is not None and a <= t <= b and (best is None or t < best):
                best = t
        return best
    # a climbing intruder follows the vertical line above some leaf
    leaf = _leaf_below(env, seg_intruder.from_loc)
    release = seg_intruder.t_start - (env.d - env.point_depth(seg_intruder.from_loc)) / v
    for leg in segment_legs(env, seg_defender):
        t = _meet_on_line(env, leg, leaf, release, v, lo, hi)
        if t is not None and (best is None or t < best):
            best = t
    return best

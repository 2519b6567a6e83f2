"""Trace-level invariant checks.

Each checker returns a list of human-readable problems (empty when the
trace is clean); :func:`assert_clean` turns a non-empty list into an
:class:`InvariantViolation`.
"""
from __future__ import annotations

from fractions import Fraction

from .engine import CAPTURE, DECISION, LOSS, RELEASE, Trace
from .errors import InvariantViolation
from .kinematics import intruder_position
from .limits import cass_epoch_length
from .tree import dist_locations


def assert_clean(problems: list[str]) -> None:
    if problems:
        raise InvariantViolation("; ".join(problems[:5]) + (f" (+{len(problems) - 5} more)" if len(problems) > 5 else ""))


def _fate(trace: Trace) -> dict[int, tuple[str, Fraction]]:
    out = {}
    for e in trace.events:
        if e.kind in (CAPTURE, LOSS):
            out[e.intruder_id] = (e.kind, e.time)
    return out


def check_trace(trace: Trace) -> list[str]:
    """Engine invariants: ordering, conservation, witnesses and motion."""
    env, v, problems = trace.env, trace.v, []
    times = [e.time for e in trace.events]
    if times != sorted(times):
        problems.append("events are not in time order")
    fate = _fate(trace)
    releases = len(trace.of_kind(RELEASE))
    caps, losses = len(trace.of_kind(CAPTURE)), len(trace.of_kind(LOSS))
    if caps + losses + len(trace.active) != releases:
        problems.append(f"conservation: {caps} + {losses} + {len(trace.active)} != {releases}")
    if len(fate) != caps + losses:
        problems.append("an intruder was resolved twice")
    for e in trace.of_kind(CAPTURE):
        pos = intruder_position(env, trace.intruders[e.intruder_id], v, e.time)
        if pos != e.location or trace.defender_at(e.time) != e.location:
            problems.append(f"capture of {e.intruder_id} at {e.time} has no coincidence witness")
    for e in trace.of_kind(LOSS):
        intr = trace.intruders[e.intruder_id]
        if e.time != intr.loss_time(env, v):
            problems.append(f"loss of {e.intruder_id} at {e.time}, expected {intr.loss_time(env, v)}")
        if trace.defender_at(e.time) == e.location:
            problems.append(f"loss of {e.intruder_id} while the defender sits on its perimeter vertex")
    prev = None
    for seg in trace.segments:
        if prev is not None and (prev.t_end != seg.t_start or prev.to_loc != seg.from_loc):
            problems.append(f"path discontinuity at {seg.t_start}")
        dt = seg.t_end - seg.t_start
        if dist_locations(env, seg.from_loc, seg.to_loc) > dt:
            problems.append(f"speed above 1 on [{seg.t_start}, {seg.t_end}]")
        if seg.speed == 0 and seg.from_loc != seg.to_loc:
            problems.append(f"stationary segment moves on [{seg.t_start}, {seg.t_end}]")
        prev = seg
    return problems


def _notes(trace: Trace, key: str = "epoch"):
    return [e for e in trace.of_kind(DECISION) if e.payload and key in e.payload and "start" in e.payload]


def check_sap(trace: Trace) -> list[str]:
    """Epoch timing and the perimeter-occupancy guarantee of Stay at Perimeter."""
    env, v, problems = trace.env, trace.v, []
    rho = env.rho
    notes = _notes(trace)
    if not notes:
        return problems
    if notes[0].payload["epoch"] != "initial" or notes[0].time != 2 * rho:
        problems.append(f"initial selection at {notes[0].time}, expected {2 * rho}")
    epochs = notes[1:]
    if epochs and epochs[0].time != 6 * rho:
        problems.append(f"first epoch starts at {epochs[0].time}, expected {6 * rho}")
    lengths = {"stay": 2 * rho * v, "move": 4 * rho * v}
    for a, b in zip(epochs, epochs[1:]):
        expected = lengths.get(a.payload["epoch"])
        if a.payload.get("length") != expected or b.time - a.time != expected:
            problems.append(f"epoch at {a.time} lasted {b.time - a.time}, expected {expected}")
    # no loss at p_k if the defender has held p_k since the intruder entered band 1
    for e in trace.of_kind(LOSS):
        window_start = e.time - 2 * rho
        held = True
        for seg in trace.segments:
            if seg.t_end <= window_start or seg.t_start >= e.time:
                continue
            if seg.from_loc != e.location or seg.to_loc != e.location:
                held = False
                break
        covered = trace.segments and trace.segments[0].t_start <= window_start and trace.end_time >= e.time
        if held and covered:
            problems.append(f"intruder {e.intruder_id} lost at occupied perimeter vertex {e.location}")
    return problems


def check_cass(trace: Trace, s: int) -> list[str]:
    """Both capture guarantees for every complete CaSS epoch in the trace."""
    env, v, problems = trace.env, trace.v, []
    length = cass_epoch_length(env.d, env.delta, s)
    notes = _notes(trace, "a_star")
    threshold = env.rho + Fraction(env.d - env.rho, 2)
    fate = _fate(trace)
    starts = [n.time for n in notes]
    for a, b in zip(starts, starts[1:]):
        if b - a != length:
            problems.append(f"epoch at {a} lasted {b - a}, expected {length}")

    def alive(intr, t):
        kind, when = fate.get(intr.id, (None, None))
        return intr.release_time <= t and (when is None or when > t)

    def captured_by(intr, t):
        kind, when = fate.get(intr.id, (None, None))
        return kind == CAPTURE and when <= t

    def in_region(intr, t, root=None):
        loc = intruder_position(env, intr, v, t)
        if env.point_depth(loc) < threshold:
            return False
        return root is None or env.ancestor_at(loc.edge_child, s) == root

    for n in notes:
        t0, t1, a = n.time, n.time + length, n.payload["a_star"]
        if t1 > trace.end_time:
            continue
        for intr in trace.intruders.values():
            if alive(intr, t0) and in_region(intr, t0, a) and not captured_by(intr, t1):
                problems.append(f"intruder {intr.id} in the chosen region at {t0} escaped the epoch")
            if t0 <= intr.release_time < t1 and not captured_by(intr, t1):
                if not (alive(intr, t1) and in_region(intr, t1)):
                    problems.append(f"intruder {intr.id} released at {intr.release_time} neither captured nor in a region at {t1}")
    return problems

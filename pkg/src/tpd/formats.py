"""On-disk formats: instance JSON, trace CSV, summary JSON and report CSVs.

Every CSV starts with a ``#format=1`` line so downstream readers can refuse
files written by an incompatible version.  Rationals are written as
``p/q`` strings (``p`` for integers) to stay exact.
"""
from __future__ import annotations

import csv
import io
import json
import math
from fractions import Fraction
from pathlib import Path

from .engine import InputInstance, Release, Trace, count_outcome
from .errors import ValidationError
from .kinematics import as_speed
from .limits import RegimeRow
from .oracle import CaptureSchedule
from .tree import Environment

FORMAT_LINE = "#format=1"
TRACE_HEADER = ["time", "kind", "intruder_id", "vertex_or_edge", "offset"]
REGIME_HEADER = [
    "d", "delta", "rho", "rho_over_d", "thm1", "thm2", "thm3_lo", "thm3_applies",
    "sweep_bound", "sap_bound", "sap_ratio", "cass_s", "cass_bound", "cass_ratio",
]
REGIME_DECIMALS = ["rho_over_d", "thm1", "thm2", "thm3_lo", "sweep_bound", "sap_bound", "sap_ratio", "cass_bound"]
COMPETE_HEADER = ["index", "d", "delta", "rho", "v", "policy", "online", "offline", "exact", "ratio"]
WITNESS_HEADER = ["order", "intruder_id", "time", "location"]


def q(x) -> str:
    """Render an exact number; infinity becomes ``inf``."""
    if isinstance(x, float) and math.isinf(x):
        return "inf"
    return str(Fraction(x))


def parse_q(text) -> Fraction:
    if isinstance(text, float):
        raise ValidationError("rationals must be given as 'p/q' strings or integers, not floats")
    try:
        return Fraction(text) if isinstance(text, int) else Fraction(str(text).strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ValidationError(f"cannot parse rational {text!r}") from exc


def decimal(x, digits: int = 12) -> str:
    if isinstance(x, float) and math.isinf(x):
        return "inf"
    return f"{float(x):.{digits}g}"


# -- instances -----------------------------------------------------------


def instance_to_dict(env: Environment, v, inst: InputInstance) -> dict:
    return {
        "d": env.d,
        "delta": env.delta,
        "rho": env.rho,
        "v": q(v),
        "releases": [{"t": q(r.t), "leaf": r.leaf, "count": r.count} for r in inst.releases],
    }


def instance_from_dict(data: dict) -> tuple[Environment, Fraction, InputInstance]:
    try:
        env = Environment(data["d"], data["delta"], data["rho"])
        v = as_speed(parse_q(data["v"]))
        rel = tuple(Release(parse_q(r["t"]), r["leaf"], r.get("count", 1)) for r in data.get("releases", []))
    except KeyError as exc:
        raise ValidationError(f"instance file is missing key {exc.args[0]!r}") from exc
    except TypeError as exc:
        raise ValidationError(f"malformed instance file: {exc}") from exc
    return env, v, InputInstance(rel).validate(env)


def dump_instance(env: Environment, v, inst: InputInstance) -> str:
    return json.dumps(instance_to_dict(env, v, inst), indent=2, sort_keys=True) + "\n"


def load_instance(path) -> tuple[Environment, Fraction, InputInstance]:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: invalid JSON ({exc.msg})") from exc
    except OSError as exc:
        raise ValidationError(f"{path}: {exc.strerror}") from exc
    return instance_from_dict(data)


# -- traces and reports --------------------------------------------------


def _csv(header, rows) -> str:
    buf = io.StringIO()
    buf.write(FORMAT_LINE + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def trace_csv(trace: Trace) -> str:
    rows = []
    for e in trace.events:
        loc = e.location
        rows.append([
            q(e.time),
            e.kind,
            "" if e.intruder_id is None else e.intruder_id,
            "" if loc is None else loc.edge_child,
            "" if loc is None else q(loc.offset),
        ])
    return _csv(TRACE_HEADER, rows)


def summary_dict(trace: Trace, policy: str, extra: dict | None = None) -> dict:
    captured, lost = count_outcome(trace)
    out = {
        "d": trace.env.d,
        "delta": trace.env.delta,
        "rho": trace.env.rho,
        "v": q(trace.v),
        "policy": policy,
        "released": trace.released,
        "captured": captured,
        "lost": lost,
        "active_at_end": len(trace.active),
        "end_time": q(trace.end_time),
    }
    if extra:
        out.update(extra)
    return out


def dump_json(data: dict) -> str:
    return json.dumps(data, indent=2, sort_keys=True) + "\n"


def regime_csv(rows: list[RegimeRow]) -> str:
    """One base row per rho plus one row per sweeping depth s, with decimal columns appended."""
    header = REGIME_HEADER + [f"{c}_f" for c in REGIME_DECIMALS]
    out = []
    for r in rows:
        base = [r.d, r.delta, r.rho, q(r.rho_over_d), q(r.thm1), q(r.thm2), q(r.thm3_lo),
                str(r.thm3_applies).lower(), q(r.sweep_bound), q(r.sap_bound), q(r.sap_ratio)]
        dec = [decimal(getattr(r, c)) for c in REGIME_DECIMALS if c != "cass_bound"]
        out.append(base + ["", "", ""] + dec + [""])
        for s, bound, ratio in r.cass_bounds:
            out.append(base + [s, q(bound), ratio] + dec + [decimal(bound)])
    return _csv(header, out)


def witness_csv(schedule: CaptureSchedule) -> str:
    rows, order = [], 0
    for cap in schedule.captures:
        for iid in cap.intruder_ids:
            order += 1
            rows.append([order, iid, q(cap.time), str(cap.location)])
    return _csv(WITNESS_HEADER, rows)


def compete_csv(rows) -> str:
    return _csv(COMPETE_HEADER, rows)


def read_csv(text: str) -> list[dict]:
    lines = text.splitlines()
    if not lines or lines[0] != FORMAT_LINE:
        raise ValidationError(f"expected a '{FORMAT_LINE}' first line")
    return list(csv.DictReader(lines[1:]))

"""Command-line interface: ``tpd <subcommand>`` or ``python -m tpd``.

Exit codes: 0 success, 2 validation error, 3 oracle budget exceeded,
4 invariant violation.  Errors are reported as one line on stderr of the
form ``error=<kind> message=<text>``.
"""
from __future__ import annotations

import argparse
import os
import sys
from collections import defaultdict
from fractions import Fraction
from pathlib import Path

from . import formats
from .adversarial import Thm1Adversary, feasible_full_orders, thm2_family, thm3_instance
from .checks import assert_clean, check_cass, check_sap, check_trace
from .engine import InputInstance, competitive_ratio, count_outcome, random_instances, simulate
from .errors import InvariantViolation, OracleBudgetExceeded, ValidationError
from .kinematics import as_speed
from .limits import regime_table
from .oracle import DEFAULT_BUDGET, DEFAULT_CAP, offline_value, optimal_offline
from .policies import POLICY_NAMES, make_policy
from .tree import Environment

EXIT_OK, EXIT_VALIDATION, EXIT_BUDGET, EXIT_INVARIANT = 0, 2, 3, 4


def _default_seed() -> int:
    raw = os.environ.get("TPD_SEED", "0")
    try:
        return int(raw)
    except ValueError as exc:
        raise ValidationError(f"TPD_SEED must be an integer, got {raw!r}") from exc


def _write(path, text: str) -> None:
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _env_args(p, required=True):
    p.add_argument("--d", type=int, required=required)
    p.add_argument("--delta", type=int, required=required)
    p.add_argument("--rho", type=int, required=required)
    p.add_argument("--v", type=str, required=required, help="intruder speed as 'p/q'")


def _policy_args(p):
    p.add_argument("--policy", choices=POLICY_NAMES, required=True)
    p.add_argument("--s", type=int, default=None, help="sweeping depth for cass")
    p.add_argument("--no-regime-check", action="store_true", help="run a policy outside its proven speed regime")


def _oracle_args(p):
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    p.add_argument("--cap", type=int, default=DEFAULT_CAP)


def _resolve(args):
    """Environment, speed and instance from --instance and/or explicit flags."""
    inst = InputInstance()
    env = v = None
    if getattr(args, "instance", None):
        env, v, inst = formats.load_instance(args.instance)
    if args.d is not None or env is None:
        if None in (args.d, args.delta, args.rho):
            raise ValidationError("give --d, --delta and --rho or an --instance file")
        env = Environment(args.d, args.delta, args.rho)
    if args.v is not None:
        v = as_speed(formats.parse_q(args.v))
    if v is None:
        raise ValidationError("give --v or an --instance file")
    return env, v, inst.validate(env)


def _policy(args, env, v):
    return make_policy(args.policy, env, v, s=args.s, check_regime=not args.no_regime_check)


def _check(trace, args):
    problems = check_trace(trace)
    if args.policy == "sap":
        problems += check_sap(trace)
    if args.policy == "cass":
        problems += check_cass(trace, args.s or 1)
    assert_clean(problems)


def cmd_simulate(args) -> int:
    env, v, inst = _resolve(args)
    policy = _policy(args, env, v)
    trace = simulate(env, v, inst, policy, horizon=None if args.horizon is None else formats.parse_q(args.horizon))
    if args.check:
        _check(trace, args)
    extra = {}
    if args.with_oracle:
        res = offline_value(env, v, inst, budget=args.budget, max_groups=args.cap)
        extra = {"offline": res.captures, "offline_exact": res.exact,
                 "ratio": formats.q(competitive_ratio(res.captures, count_outcome(trace)[0]))}
    if args.trace_out:
        _write(args.trace_out, formats.trace_csv(trace))
    _write(args.summary_out, formats.dump_json(formats.summary_dict(trace, args.policy, extra)))
    return EXIT_OK


def _family(args, env, v):
    if args.family == "random":
        kw = {"max_intruders": args.max_intruders, "t_max": args.t_max}
        if args.max_distinct is not None:
            kw["max_distinct"] = args.max_distinct
        return list(random_instances(env, args.seed, args.count, **kw))
    if args.family == "thm2":
        return thm2_family(env, v, check_regime=not args.no_regime_check)
    if args.family == "thm3":
        return [thm3_instance(env, v, check_regime=not args.no_regime_check)[1]]
    if args.family == "none":
        return []
    raise ValidationError(f"unknown family {args.family!r}")


def cmd_compete(args) -> int:
    env, v, _ = _resolve(args)
    rows, sup, any_inexact = [], Fraction(0), False
    for k, inst in enumerate(_family(args, env, v)):
        trace = simulate(env, v, inst, _policy(args, env, v), record_decisions=False)
        if args.check:
            _check(trace, args)
        online = count_outcome(trace)[0]
        res = offline_value(env, v, inst, budget=args.budget, max_groups=args.cap)
        ratio = competitive_ratio(res.captures, online)
        any_inexact |= not res.exact
        sup = max(sup, ratio)
        rows.append([k, env.d, env.delta, env.rho, formats.q(v), args.policy, online, res.captures,
                     str(res.exact).lower(), formats.q(ratio)])
    _write(args.out, formats.compete_csv(rows))
    note = " (lower bound: some offline values inexact)" if any_inexact else ""
    print(f"instances={len(rows)} sup_ratio={formats.q(sup) if rows else 'none'}{note}", file=sys.stderr)
    return EXIT_OK


def cmd_oracle(args) -> int:
    env, v, inst = _resolve(args)
    res = optimal_offline(env, v, inst, budget=args.budget, max_groups=args.cap)
    print(f"max_captures={res.captures}", file=sys.stderr)
    _write(args.out, formats.witness_csv(res.schedule))
    return EXIT_OK


def cmd_adversary(args) -> int:
    env, v, _ = _resolve(args)
    check = not args.no_regime_check
    if args.theorem == 1:
        adv = Thm1Adversary(env, v, args.c, check_regime=check)
        trace = simulate(env, v, adv, _policy(args, env, v))
        runs = [(trace.releases(), trace)]
    else:
        if args.theorem == 2:
            instances = thm2_family(env, v, check_regime=check)[:2]
        else:
            instances = [thm3_instance(env, v, check_regime=check)[1]]
        runs = [(inst, simulate(env, v, inst, _policy(args, env, v))) for inst in instances]
    results = []
    for k, (inst, trace) in enumerate(runs):
        online = count_outcome(trace)[0]
        res = offline_value(env, v, inst, budget=args.budget, max_groups=args.cap)
        results.append({"instance": k, "online": online, "offline": res.captures,
                        "offline_exact": res.exact, "ratio": formats.q(competitive_ratio(res.captures, online))})
        if args.out_prefix:
            Path(f"{args.out_prefix}{k}.json").write_text(formats.dump_instance(env, v, inst))
    summary = {"theorem": args.theorem, "policy": args.policy, "d": env.d, "delta": env.delta,
               "rho": env.rho, "v": formats.q(v), "results": results}
    if args.theorem == 3:
        abc, inst = thm3_instance(env, v, check_regime=check)
        names = {iid: name for name, iid in abc.ids.items()}
        summary["feasible_orders"] = ["".join(names[i] for i in order) for order in feasible_full_orders(env, v, inst)]
    _write(args.out, formats.dump_json(summary))
    return EXIT_OK


def cmd_regimes(args) -> int:
    _write(args.out, formats.regime_csv(regime_table(args.d, args.delta)))
    return EXIT_OK


def cmd_validate(args) -> int:
    env, v, inst = formats.load_instance(args.instance)
    print(f"ok d={env.d} delta={env.delta} rho={env.rho} v={formats.q(v)} releases={inst.n_released}")
    return EXIT_OK


def cmd_plotdata(args) -> int:
    """Join regime rows with the supremum ratio of each compete CSV per (d, delta, rho, policy, v)."""
    regimes = {(r["d"], r["delta"], r["rho"]): r for r in formats.read_csv(Path(args.regimes).read_text())
               if r["cass_s"] == ""}
    groups = defaultdict(list)
    for path in args.compete:
        for r in formats.read_csv(Path(path).read_text()):
            groups[(r["d"], r["delta"], r["rho"], r["policy"], r["v"])].append(r)
    header = ["d", "delta", "rho", "rho_over_d", "policy", "v", "v_f", "instances", "sup_ratio", "exact",
              "thm1", "thm2", "thm3_lo", "sweep_bound", "sap_bound"]
    rows = []
    for key in sorted(groups, key=lambda k: (int(k[0]), int(k[1]), int(k[2]), k[3], Fraction(k[4]))):
        d, delta, rho, policy, v = key
        reg = regimes.get((d, delta, rho))
        if reg is None:
            raise ValidationError(f"no regime row for d={d} delta={delta} rho={rho}")
        items = groups[key]
        ratios = [float("inf") if r["ratio"] == "inf" else Fraction(r["ratio"]) for r in items]
        rows.append([d, delta, rho, reg["rho_over_d"], policy, v, formats.decimal(Fraction(v)), len(items),
                     formats.q(max(ratios)), str(all(r["exact"] == "true" for r in items)).lower(),
                     reg["thm1"], reg["thm2"], reg["thm3_lo"], reg["sweep_bound"], reg["sap_bound"]])
    _write(args.out, formats._csv(header, rows))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tpd", description="Perimeter defense on full trees, in exact arithmetic.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run one policy on one instance")
    _env_args(p, required=False)
    _policy_args(p)
    _oracle_args(p)
    p.add_argument("--instance", help="instance JSON file")
    p.add_argument("--horizon", default=None)
    p.add_argument("--trace-out", default=None)
    p.add_argument("--summary-out", default="-")
    p.add_argument("--with-oracle", action="store_true")
    p.add_argument("--check", action="store_true", help="verify trace invariants (exit 4 on failure)")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("compete", help="empirical competitive ratio over an instance family")
    _env_args(p)
    _policy_args(p)
    _oracle_args(p)
    p.add_argument("--family", choices=("random", "thm2", "thm3", "none"), default="random")
    p.add_argument("--count", type=int, default=50)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--max-intruders", type=int, default=10)
    p.add_argument("--max-distinct", type=int, default=None)
    p.add_argument("--t-max", type=int, default=100)
    p.add_argument("--out", default="-")
    p.add_argument("--check", action="store_true")
    p.set_defaults(func=cmd_compete)

    p = sub.add_parser("oracle", help="optimal offline captures and a witness schedule")
    _env_args(p, required=False)
    _oracle_args(p)
    p.add_argument("--instance", required=True)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("adversary", help="run a lower-bound construction against a policy")
    _env_args(p)
    _policy_args(p)
    _oracle_args(p)
    p.add_argument("--theorem", type=int, choices=(1, 2, 3), required=True)
    p.add_argument("--c", type=int, default=4)
    p.add_argument("--out", default="-")
    p.add_argument("--out-prefix", default=None, help="write realized instances to <prefix><k>.json")
    p.set_defaults(func=cmd_adversary)

    p = sub.add_parser("regimes", help="closed-form thresholds per rho as CSV")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--delta", type=int, required=True)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_regimes)

    p = sub.add_parser("validate", help="check an instance file")
    p.add_argument("instance")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("plotdata", help="merge regime and compete CSVs for plotting")
    p.add_argument("--regimes", required=True)
    p.add_argument("--compete", nargs="+", required=True)
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_plotdata)
    return parser


def _fail(kind: str, exc: Exception, code: int) -> int:
    msg = " ".join(str(exc).split())
    print(f"error={kind} message={msg}", file=sys.stderr)
    return code


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if getattr(args, "seed", "absent") is None:
            args.seed = _default_seed()
        return args.func(args)
    except OracleBudgetExceeded as exc:
        return _fail("oracle_budget", exc, EXIT_BUDGET)
    except InvariantViolation as exc:
        return _fail("invariant", exc, EXIT_INVARIANT)
    except ValidationError as exc:
        return _fail("validation", exc, EXIT_VALIDATION)


if __name__ == "__main__":
    sys.exit(main())

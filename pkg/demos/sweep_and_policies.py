"""Walk through one random instance with every policy and compare to the oracle.

Run with ``python demos/sweep_and_policies.py``.
"""
import random
from fractions import Fraction

from tpd import Environment, count_outcome, make_policy, optimal_offline, random_instance, simulate
from tpd.limits import sap_bound, sweep_bound, sweep_length

env = Environment(3, 2, 1)
print(f"tree depth={env.d} branching={env.delta} perimeter depth={env.rho}")
print(f"full sweep walk: {sweep_length(env.d, env.delta)} edges")
print(f"sweeping never loses below v = {sweep_bound(env.d, env.delta, env.rho)}")
print(f"stay-at-perimeter guarantee holds up to v = {sap_bound(env.d, env.rho)}")

v = Fraction(1, 4)
instance = random_instance(env, random.Random(11), max_intruders=8, t_max=40)
print(f"\n{sum(r.count for r in instance.releases)} intruders at v = {v}")
best = optimal_offline(env, v, instance).captures
print(f"offline optimum: {best}")
for name in ("sweeping", "sap", "cass", "hold"):
    trace = simulate(env, v, instance, make_policy(name, env, v, check_regime=False))
    captured, lost = count_outcome(trace)
    print(f"  {name:<9} captured={captured} lost={lost}")

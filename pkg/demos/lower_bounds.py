"""Show the adversarial constructions defeating online policies.

Run with ``python demos/lower_bounds.py``.
"""
from fractions import Fraction
from itertools import permutations

from tpd import Environment, competitive_ratio, count_outcome, make_policy, optimal_offline, simulate
from tpd.adversarial import Thm1Adversary, capture_order_feasible, thm2_instances, thm3_instance

env, v = Environment(2, 2, 1), Fraction(2, 3)
print(f"adaptive stream and burst, v = {v}, c = 4")
for name in ("sweeping", "sap", "cass", "hold"):
    trace = simulate(env, v, Thm1Adversary(env, v, 4), make_policy(name, env, v, check_regime=False))
    online = count_outcome(trace)[0]
    offline = optimal_offline(env, v, trace.releases()).captures
    print(f"  {name:<9} online={online} offline={offline} ratio={competitive_ratio(offline, online)}")

v = Fraction(1, 2)
print(f"\nmirrored intruder pair, v = {v}")
for k, inst in enumerate(thm2_instances(env, v)):
    online = count_outcome(simulate(env, v, inst, make_policy("sweeping", env, v)))[0]
    print(f"  instance {k}: sweeping={online} offline={optimal_offline(env, v, inst).captures}")

env3 = Environment(5, 3, 1)
abc, inst = thm3_instance(env3, v)
print("\nthree intruders on a ternary tree: capture orders that catch everyone")
for order in permutations("ABC"):
    res = capture_order_feasible(env3, v, inst, [abc.ids[x] for x in order])
    if res.feasible:
        print("  " + "".join(order) + " at times " + ", ".join(str(c.time) for c in res.schedule.captures))

"""Print the speed regimes for a depth-20 ternary tree as a small table.

Run with ``python demos/regime_table.py``.
"""
from tpd.limits import regime_table

# Columns: speed above which no online policy has a finite ratio, speed from
# which every policy has ratio at least 2, largest speed for the
# stay-at-perimeter guarantee, and whether the three-intruder bound applies.
print(f"{'rho':>3} {'unbounded':>10} {'ratio>=2':>10} {'sap ok':>10} {'3-intruder':>10}")
for row in regime_table(20, 3):
    flag = "yes" if row.thm3_applies else "no"
    print(f"{row.rho:>3} {float(row.thm1):>10.4f} {float(row.thm2):>10.4f} {float(row.sap_bound):>10.4f} {flag:>10}")

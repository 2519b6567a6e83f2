from fractions import Fraction as F

import pytest
import sympy

from tpd.errors import ValidationError
from tpd.limits import (
    cass_bound,
    eq2_holds,
    regime_table,
    sweep_bound,
    sweep_length,
    thm2_bound,
    thm3_lower,
    thresholds,
)
from tpd.tree import Environment, sweep_walk


def test_spot_values():
    row = thresholds(20, 3, 10)
    assert (row.thm1, row.thm2, row.sap_bound) == (F(1, 2), F(1, 3), F(1, 6))
    assert row.sap_ratio == F(3 * 3**10 - 1, 2)
    assert cass_bound(5, 2, 1, 1) == F(1, 32)
    assert thresholds(5, 2, 1).cass_bounds[0] == (1, F(1, 32), 2)
    assert sweep_bound(2, 2, 1) == F(1, 11)


def test_eq2():
    assert eq2_holds(5, 1, F(1, 2))
    assert not eq2_holds(20, 10, F(1, 5))
    with pytest.raises(ValidationError):
        eq2_holds(5, 1, F(1, 3))


def test_eq2_against_symbolic_form():
    d, rho, v = sympy.symbols("d rho v", positive=True)
    eps = d + 3 * rho - (d - rho) / v
    lhs = d + rho + 2 * (d - rho) * (1 - v) / (1 + v) - 2 * eps * v / (1 + v) - (d - rho) / v
    for dd in range(2, 12):
        for rr in range(1, dd):
            lo, hi = thm3_lower(dd, rr), thm2_bound(dd, rr)
            for vv in (lo, (lo + hi) / 2):
                val = sympy.Rational(lhs.subs({d: dd, rho: rr, v: sympy.Rational(vv.numerator, vv.denominator)}))
                assert eq2_holds(dd, rr, vv) == (val > 0)


def test_threshold_ordering_chain():
    for d in range(2, 31):
        for rho in range(1, d):
            row = thresholds(d, 2, rho)
            assert row.thm3_lo <= row.thm2 <= row.thm1
            assert row.sweep_bound <= row.thm1


def test_sweep_bound_decreases_in_depth_and_branching():
    for rho in (1, 2):
        for delta in (2, 3):
            vals = [sweep_bound(d, delta, rho) for d in range(rho + 1, 9)]
            assert all(a > b for a, b in zip(vals, vals[1:]))
        for d in range(rho + 1, 7):
            assert sweep_bound(d, 2, rho) > sweep_bound(d, 3, rho) > sweep_bound(d, 4, rho)


@pytest.mark.parametrize("d", range(2, 7))
@pytest.mark.parametrize("delta", range(2, 5))
def test_sweep_length_matches_walk(d, delta):
    assert len(sweep_walk(Environment(d, delta, 1))) - 1 == sweep_length(d, delta)


def test_regime_tables():
    rows = regime_table(20, 3)
    assert len(rows) == 19
    for r in rows:
        if r.thm3_applies:
            assert r.rho_over_d < F(1, 2) and eq2_holds(20, r.rho, r.thm3_lo)
    assert any(r.thm3_applies for r in rows)
    assert len(regime_table(2, 2)) == 1
    assert len(regime_table(5, 2)) == 4
    with pytest.raises(ValidationError):
        regime_table(1, 2)


def test_thm3_needs_three_branches():
    assert not any(r.thm3_applies for r in regime_table(20, 2))

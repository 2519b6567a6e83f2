"""Closed-form speed thresholds and competitive ratios.

All values are exact ``Fraction`` objects.  Policies read their regime
conditions from here so that each bound has one definition.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import ValidationError
from .tree import Environment


def thm1_bound(d: int, rho: int) -> Fraction:
    """Above this speed no online algorithm is c-competitive for any finite c."""
    return Fraction(d - rho, 2 * rho)


def thm2_bound(d: int, rho: int) -> Fraction:
    """At or above this speed every online algorithm is at best 2-competitive."""
    return Fraction(d - rho, d + rho)


def thm3_lower(d: int, rho: int) -> Fraction:
    return Fraction(d - rho, d + 3 * rho)


def n_vertices(d: int, delta: int) -> int:
    return (delta ** (d + 1) - 1) // (delta - 1)


def sweep_length(d: int, delta: int) -> int:
    """Edges walked in one closed depth-first sweep of a depth-``d`` tree."""
    return 2 * (n_vertices(d, delta) - 1)


def sweep_bound(d: int, delta: int, rho: int) -> Fraction:
    return Fraction(d - rho, sweep_length(d, delta) - (d - rho))


def sap_bound(d: int, rho: int) -> Fraction:
    return Fraction(d - rho, 6 * rho)


def sap_ratio(delta: int, rho: int) -> Fraction:
    return Fraction(3 * delta**rho - 1, 2)


def cass_epoch_length(d: int, delta: int, s: int) -> int:
    """Round trip root -> a_k -> sweep of its branch -> root."""
    return 2 * (s + (delta ** (d - s + 1) - 1) // (delta - 1) - 1)


def cass_bound(d: int, delta: int, rho: int, s: int) -> Fraction:
    # stated form uses delta^(d-s+1)/(delta-1), not the epoch's (delta^(d-s+1)-1)/(delta-1)
    return Fraction(d - rho) / (4 * (s + Fraction(delta ** (d - s + 1), delta - 1) - 1))


def cass_ratio(delta: int, s: int) -> int:
    return delta**s


def epsilon(d: int, rho: int, v) -> Fraction:
    return d + 3 * rho - (d - rho) / Fraction(v)


def eq2_sides(d: int, rho: int, v) -> tuple[Fraction, Fraction]:
    """Both sides of the three-intruder condition, as exact rationals.

    ``v`` must lie in ``[thm3_lower, thm2_bound)``, i.e. epsilon >= 0.
    """
    v = Fraction(v)
    eps = epsilon(d, rho, v)
    if eps < 0:
        raise ValidationError("epsilon < 0: v is below the three-intruder range")
    if v >= thm2_bound(d, rho):
        raise ValidationError("v is at or above the two-intruder threshold")
    lhs = d + rho + 2 * (d - rho) * (1 - v) / (1 + v) - 2 * eps * v / (1 + v)
    return lhs, (d - rho) / v


def eq2_holds(d: int, rho: int, v) -> bool:
    lhs, rhs = eq2_sides(d, rho, v)
    return lhs > rhs


@dataclass(frozen=True)
class RegimeRow:
    d: int
    delta: int
    rho: int
    rho_over_d: Fraction
    thm1: Fraction
    thm2: Fraction
    thm3_lo: Fraction
    thm3_applies: bool
    sweep_bound: Fraction
    sap_bound: Fraction
    sap_ratio: Fraction
    cass_bounds: tuple[tuple[int, Fraction, int], ...]


def thresholds(d: int, delta: int, rho: int) -> RegimeRow:
    Environment(d, delta, rho)  # validates
    lo = thm3_lower(d, rho)
    return RegimeRow(
        d=d,
        delta=delta,
        rho=rho,
        rho_over_d=Fraction(rho, d),
        thm1=thm1_bound(d, rho),
        thm2=thm2_bound(d, rho),
        thm3_lo=lo,
        # three perimeter vertices pairwise 2*rho apart need delta >= 3
        thm3_applies=delta >= 3 and eq2_holds(d, rho, lo),
        sweep_bound=sweep_bound(d, delta, rho),
        sap_bound=sap_bound(d, rho),
        sap_ratio=sap_ratio(delta, rho),
        cass_bounds=tuple((s, cass_bound(d, delta, rho, s), cass_ratio(delta, s)) for s in range(1, rho + 1)),
    )


def regime_table(d: int, delta: int) -> list[RegimeRow]:
    if d < 2:
        raise ValidationError("d must satisfy d >= 2")
    return [thresholds(d, delta, rho) for rho in range(1, d)]

"""Exact-arithmetic simulator for perimeter defense on full trees.

One unit-speed defender starts at the root of a full ``delta``-ary tree of
depth ``d``; intruders appear at leaves and climb at speed ``v < 1`` towards
the perimeter at depth ``rho``.  The package provides the tree geometry,
exact motion, an event-driven engine, online policies, an optimal offline
oracle, adversarial instance generators and closed-form regime limits.
"""
from .engine import (
    InputInstance,
    Observation,
    Policy,
    PolicyDecision,
    Release,
    Trace,
    competitive_ratio,
    count_outcome,
    random_instance,
    random_instances,
    simulate,
)
from .errors import (
    InvariantViolation,
    OracleBudgetExceeded,
    OracleCapExceeded,
    PolicyContractError,
    ValidationError,
)
from .kinematics import INFEASIBLE, LOST, NOT_YET_RELEASED, Intruder, intercept_time, intruder_position
from .oracle import greedy_offline, offline_value, optimal_offline
from .policies import CassPolicy, HoldPolicy, SapPolicy, ScriptedPolicy, SweepingPolicy, make_policy
from .tree import ROOT, Environment, Location, build_environment

__all__ = [
    "CassPolicy", "Environment", "HoldPolicy", "INFEASIBLE", "InputInstance", "Intruder",
    "InvariantViolation", "LOST", "Location", "NOT_YET_RELEASED", "Observation", "OracleBudgetExceeded",
    "OracleCapExceeded", "Policy", "PolicyContractError", "PolicyDecision", "ROOT", "Release", "SapPolicy",
    "ScriptedPolicy", "SweepingPolicy", "Trace", "ValidationError", "build_environment", "competitive_ratio",
    "count_outcome", "greedy_offline", "intercept_time", "intruder_position", "make_policy", "offline_value",
    "optimal_offline", "random_instance", "random_instances", "simulate",
]

"""Exception types shared across the package."""


class ValidationError(ValueError):
    """Invalid environment, speed, instance or configuration."""


class PolicyContractError(RuntimeError):
    """A policy returned a decision the engine cannot execute."""


class OracleCapExceeded(ValueError):
    """Too many distinct trajectories for the exact offline search."""


class OracleBudgetExceeded(RuntimeError):
    """The offline search ran out of node expansions.

    ``best`` holds the best capture count found so far (a lower bound) and
    ``schedule`` its witness.
    """

    def __init__(self, best, schedule):
        super().__init__(f"oracle budget exceeded; best lower bound {best}")
        self.best = best
        self.schedule = schedule


class InvariantViolation(AssertionError):
    """A trace failed one of the engine or policy invariants."""

"""Exception hierarchy shared by the planner modules."""


class PlannerError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(PlannerError, ValueError):
    """An input lies outside the physical domain of a formula."""


class AsymptoteError(PlannerError):
    """Drift orbit precesses at (nearly) the target rate: no finite drift
    duration exists."""


class InfeasibleError(PlannerError):
    """No admissible drift orbit satisfies the duration/altitude limits."""


class GuardViolation(PlannerError):
    """A linearization interval crosses the guarded asymptote band."""


class InfeasibleModel(PlannerError):
    """The path model cannot have any integer-feasible solution."""


class NumericalFailure(PlannerError):
    """The LP solver lost feasibility/optimality certification."""


class DecodeError(PlannerError):
    """An integer solution does not encode a single open path."""


class InfeasibleMission(PlannerError):
    """No mission satisfying the duration limit exists for the request."""


class CatalogError(PlannerError):
    """A catalog file is malformed; the message names file, line and field."""


class ConfigError(PlannerError):
    """A run-configuration file is malformed or inconsistent."""

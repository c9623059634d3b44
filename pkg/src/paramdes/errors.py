"""Exception hierarchy shared by every module."""


class ParamDesError(Exception):
    """Base class for all library errors."""


class MalformedPredicate(ParamDesError):
    """A predicate refers to a parameter slot outside its arity, or failed to parse."""


class NonInjectiveMapping(ParamDesError):
    pass


class UnboundedDomain(ParamDesError):
    """Exhaustive enumeration was requested on an infinite domain."""


class SolverError(ParamDesError):
    pass


class SolverUnavailable(SolverError):
    """The external solver process could not be started or died."""


class SolverTimeout(SolverError):
    pass


class ExplosionGuard(ParamDesError):
    """A configured size cap was exceeded (states, minterms, runs, grid cells)."""


class ModelError(ParamDesError):
    """A model file or query is structurally invalid."""

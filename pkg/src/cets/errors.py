"""Exception types shared across the package."""


class ResourceLimitError(RuntimeError):
    """Requested problem size exceeds a documented cap."""


class TopologyError(ValueError):
    """The Hamiltonian does not fit the structure a planner requires."""


class ConsistencyError(RuntimeError):
    """An internal numerical invariant was violated (e.g. a non-normalized column)."""


class PreconditionError(RuntimeError):
    """A gate was applied to a state that does not satisfy its preconditions."""

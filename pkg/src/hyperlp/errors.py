"""Exception hierarchy shared by all modules."""


class HyperLPError(Exception):
    """Base class for library errors."""


class InvalidArgumentError(HyperLPError, ValueError):
    pass


class ResourceLimitError(HyperLPError):
    """A configured memory / size budget would be exceeded."""

    def __init__(self, what, size, budget):
        self.what = what
        self.size = size
        self.budget = budget
        super().__init__(f"{what}: size {size} exceeds budget {budget}")


class WalkExtinctionError(HyperLPError):
    """The walk ran out of mass (e.g. the seed has no incident edges)."""

    def __init__(self, step):
        self.step = step
        super().__init__(f"walk mass vanished at step {step}")


class SingularMatrixError(HyperLPError):
    pass


class SingularParameterError(HyperLPError, ValueError):
    pass


class SolverError(HyperLPError):
    def __init__(self, message, residual):
        self.residual = residual
        super().__init__(f"{message} (residual {residual:.3e})")


class InvalidStateError(HyperLPError):
    pass

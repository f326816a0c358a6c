class DimensionMismatch(ValueError):
    """A vector does not live in the space it is used with."""

    def __init__(self, expected, got):
        super().__init__(f"Expected a vector of dimension {expected}, got {got}.")
        self.expected = expected
        self.got = got


class PreconditionViolation(ValueError):
    """An operation was called outside its contract."""


class InfeasibleConstruction(RuntimeError):
    """A witness search found no parameter satisfying its inequality."""

    def __init__(self, inequality, detail=''):
        message = f"No feasible parameter for {inequality}"
        if detail:
            message = f"{message}: {detail}"
        super().__init__(message)
        self.inequality = inequality
        self.detail = detail

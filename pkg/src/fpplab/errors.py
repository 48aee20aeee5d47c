class FPPLabError(Exception):
    """Base class for library errors."""


class DegenerateDistributionError(FPPLabError, ValueError):
    pass


class OutOfScopeError(FPPLabError, ValueError):
    """Input lies outside the regime the asymptotic laws cover (e.g. d_min < 3)."""


class ParityError(FPPLabError, ValueError):
    pass


class RejectionError(FPPLabError, RuntimeError):
    """No simple graph was drawn within the attempt budget."""

    def __init__(self, attempts):
        super().__init__(f"no simple graph after {attempts} attempts")
        self.attempts = attempts


class DisconnectedGraphError(FPPLabError, RuntimeError):
    def __init__(self, vertex, source=None):
        where = "" if source is None else f" from {source}"
        super().__init__(f"vertex {vertex} is unreachable{where}")
        self.vertex = vertex
        self.source = source


class RegularityError(FPPLabError, ValueError):
    pass


class ConfigError(FPPLabError, ValueError):
    pass

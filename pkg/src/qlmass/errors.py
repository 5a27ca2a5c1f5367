"""Exception hierarchy shared by all modules."""


class QLMassError(Exception):
    """Base class for domain errors (CLI exit code 1)."""


class OutOfDomain(QLMassError):
    pass


class InvalidParams(QLMassError):
    pass


class NonMonotoneBridge(InvalidParams):
    pass


class NotAsymptoticallyFlat(QLMassError):
    pass


class NoHorizon(QLMassError):
    pass


class FlowObstruction(QLMassError):
    def __init__(self, message, radius=None):
        super().__init__(message)
        self.radius = radius


class BoundaryNotMeanConvex(QLMassError):
    pass


class ConfigError(Exception):
    """Base class for configuration problems (CLI exit code 2)."""


class ParseError(ConfigError):
    pass


class ValidationError(ConfigError):
    def __init__(self, key, constraint):
        super().__init__(f"{key}: {constraint}")
        self.key = key
        self.constraint = constraint

"""Exception hierarchy shared by all modules."""


class GeometryError(Exception):
    """Base class for every failure raised by this package."""


class JetError(GeometryError, ArithmeticError):
    pass


class SingularDivisionError(JetError):
    pass


class JetDomainError(JetError, ValueError):
    pass


class ParseError(GeometryError, ValueError):
    def __init__(self, message, pos):
        super().__init__(f"{message} at offset {pos}")
        self.pos = pos


class DomainError(GeometryError, ValueError):
    """A (u, v) point left the patch domain."""


class RegularityError(GeometryError):
    """|x_u x x_v| vanished at an evaluated point."""


class CurvatureDegeneracyError(GeometryError):
    def __init__(self, message, stations=()):
        super().__init__(message)
        self.stations = list(stations)


class EndpointConditionError(GeometryError, ValueError):
    def __init__(self, message, failed):
        super().__init__(message)
        self.failed = list(failed)


class HypothesisViolation(GeometryError):
    def __init__(self, message, sup_norm):
        super().__init__(message)
        self.sup_norm = sup_norm


class BracketError(GeometryError):
    """Constrained length root could not be bracketed."""


class ConvergenceError(GeometryError):
    pass


class ConfigError(GeometryError, ValueError):
    pass

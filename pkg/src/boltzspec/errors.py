"""Exception types raised by the solvers."""


class BoltzspecError(Exception):
    """Base class for all errors raised by this package."""


class GridMismatch(BoltzspecError, ValueError):
    pass


class NonFiniteOutput(BoltzspecError, FloatingPointError):
    pass


class NonFiniteState(BoltzspecError, FloatingPointError):
    pass


class ImaginaryResidueExceeded(BoltzspecError, ValueError):
    """Inverse transform produced a non-negligible imaginary part."""


class ConvergenceFailure(BoltzspecError, RuntimeError):
    pass


class UnsupportedOrder(BoltzspecError, ValueError):
    pass


class NonpositiveDensity(BoltzspecError, ValueError):
    pass


class DivisionUnderflow(BoltzspecError, FloatingPointError):
    pass


class DegenerateFlux(BoltzspecError, ValueError):
    """Outgoing wall flux is not positive, so no wall density balances it."""


class NonConvergence(BoltzspecError, RuntimeError):
    """Newton iteration hit its cap. The partial report is attached."""

    def __init__(self, message, report=None, solution=None):
        super().__init__(message)
        self.report = report
        self.solution = solution


class ConfigError(BoltzspecError, ValueError):
    pass

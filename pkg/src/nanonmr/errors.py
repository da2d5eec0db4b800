"""Exception and warning types raised across the package."""


class NanoNMRError(Exception):
    """Base class for all package errors."""


class InvalidCoherence(NanoNMRError, ValueError):
    pass


class DegenerateRadial(NanoNMRError, ValueError):
    """Radial Bures term is singular: r is 1 but dr/dw is not negligible."""


class NotDensityMatrix(NanoNMRError, ValueError):
    pass


class DimensionMismatch(NanoNMRError, ValueError):
    pass


class NotAProbabilityVector(NanoNMRError, ValueError):
    pass


class InformationSingular(NanoNMRError, ArithmeticError):
    """An outcome with vanishing probability still carries a finite derivative."""


class BranchOverflow(NanoNMRError, ValueError):
    """|2 g tau| reached pi/2, where the single-spin phase becomes ambiguous."""


class DimensionTooLarge(NanoNMRError, ValueError):
    pass


class BadIndex(NanoNMRError, ValueError):
    pass


class IndexOutOfRange(NanoNMRError, ValueError):
    pass


class NoClosedForm(NanoNMRError, ValueError):
    pass


class CutoffRequired(NanoNMRError, ValueError):
    pass


class MissingVolume(NanoNMRError, ValueError):
    pass


class BoxTooSmall(NanoNMRError, ValueError):
    pass


class StrategyInfeasible(NanoNMRError, ValueError):
    pass


class NonIntegrableSpectrum(NanoNMRError, ValueError):
    pass


class IoError(NanoNMRError, OSError):
    """Result files could not be written."""


class ConfigError(NanoNMRError):
    """Base for configuration problems (CLI exit code 2)."""


class ParseError(ConfigError, ValueError):
    def __init__(self, message, line=None, column=None, key=None):
        self.line = line
        self.column = column
        self.key = key
        where = []
        if line is not None:
            where.append(f"line {line}, column {column}")
        if key is not None:
            where.append(f"key {key!r}")
        super().__init__(f"{message} ({'; '.join(where)})" if where else message)


class ValidationError(ConfigError, ValueError):
    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("invalid configuration:\n  " + "\n  ".join(self.violations))


class ExpansionInvalid(UserWarning):
    """The second-moment truncation is not justified (B_rms >= |<B>|)."""

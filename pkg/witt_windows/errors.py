"""Exceptions raised by witt-windows."""


class WittWindowsError(Exception):
    """Base class for every error raised by this package."""


class SpecMismatch(WittWindowsError, ValueError):
    """Operands live in different rings, or a target ring is not a quotient."""


class NotDivisible(WittWindowsError, ArithmeticError):
    """No exact quotient exists."""


class NotAUnit(WittWindowsError, ArithmeticError):
    """The residue of the element vanishes."""


class NotInvertible(WittWindowsError, ArithmeticError):
    """The residue matrix is singular."""


class PrecisionExhausted(WittWindowsError, ArithmeticError):
    """Tracked p-adic precision or Witt length is too small for the request."""


class NotInIdeal(WittWindowsError, ValueError):
    """An element was expected to lie in an ideal but does not."""


class IdealNotSquareZero(WittWindowsError, ValueError):
    """The ideal handed to the logarithm is not square-zero."""


class BadEisenstein(WittWindowsError, ValueError):
    """The distinguished polynomial violates the Eisenstein-type constraints."""


class BadPrime(WittWindowsError, ValueError):
    """The prime is not prime, or not allowed for the requested frame."""


class RuleInconsistent(WittWindowsError, ValueError):
    """An f1 extension rule disagrees with f1 on the intersection with I."""


class BudgetExhausted(WittWindowsError, ArithmeticError):
    """A fixpoint was not reached within its certified iteration bound."""


class RankMismatch(WittWindowsError, ValueError):
    """Ranks or matrix shapes do not fit together."""


class NotASummandLift(WittWindowsError, ValueError):
    """A proposed Hodge lift does not reduce to the Hodge filtration."""


class RingNotFinite(WittWindowsError, ValueError):
    """Enumeration was requested over a ring that is too large to enumerate."""


class ConfigError(WittWindowsError, ValueError):
    """Invalid job configuration."""


class UnknownVariable(WittWindowsError, ValueError):
    """An expression names a variable the ring does not have."""


class ExponentOverflow(WittWindowsError, ValueError):
    """An exponent in an expression is larger than the parser accepts."""


class ExpressionSyntaxError(WittWindowsError, ValueError):
    """Malformed expression, with a 1-based line and column."""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


class CertificateViolation(WittWindowsError, ValueError):
    """A kernel filtration does not satisfy the square-zero step conditions."""

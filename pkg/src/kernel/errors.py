"""
Exception hierarchy for the nested-sum engine
"""
from typing import Any, Optional


class NestsumError(Exception):
    """Base class for all engine errors"""

    def __init__(self, message: str, term: Optional[Any] = None):
        super().__init__(message)
        self.term = term


class SubstituteIntoBoundIndex(NestsumError):
    """Raised when a bound summation index is replaced by something other than a shift"""
    pass


class SingularArgument(NestsumError):
    """Raised when den, Gamma or fac is evaluated at one of its poles"""
    pass


class BoundaryMismatch(NestsumError):
    """Raised when S-sums with different upper boundaries are multiplied"""
    pass


class SymbolicOffset(NestsumError):
    """Raised when two boundaries do not differ by a known integer"""
    pass


class ResidualDivergence(NestsumError):
    """Raised when the regularization symbol sinf survives in a result expected to be finite"""
    pass


class PoleAtZero(NestsumError):
    """Raised when expanding 1/(a+b*ep) with a identically zero"""
    pass


class InsufficientOrder(NestsumError):
    """Raised when a coefficient beyond the truncation order is requested"""
    pass


class UnsupportedShape(NestsumError):
    """Raised when a summand matches none of the summation algorithms"""
    pass


class InfiniteConjugation(NestsumError):
    """Raised when a binomial conjugation sum runs to infinity"""
    pass


class InfiniteFlip(NestsumError):
    """Raised when reversing a sum with an infinite upper limit"""
    pass


class NegativePower(NestsumError):
    """Raised when sumPosPow receives a denominator power"""
    pass


class UnsupportedKind(NestsumError):
    """Raised for an unknown hypergeometric specification kind"""
    pass


class DivergentEvaluation(NestsumError):
    """Raised when the oracle is asked to evaluate a divergent quantity"""
    pass


class UnassignedSymbol(NestsumError):
    """Raised when the oracle meets an index or symbol without a value"""
    pass


class TableFormatError(NestsumError):
    """Raised for malformed lines in an MZV table file"""
    pass


class ParseError(NestsumError):
    """Base class for script parse errors, carrying a position"""

    def __init__(self, message: str, line: int = 0, column: int = 0):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


class DSLSyntaxError(ParseError):
    """Malformed script text"""
    pass


class UnknownKeyword(ParseError):
    """Call of a function that is not part of the keyword table"""
    pass


class ArityError(ParseError):
    """Keyword called with the wrong number of arguments"""
    pass

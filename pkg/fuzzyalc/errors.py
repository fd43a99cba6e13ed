"""
Exception hierarchy for the fuzzy ALC toolkit
"""

from typing import List, Optional, Sequence


class FuzzyAlcError(Exception):
    """Base class for every error raised by the toolkit"""


class DegreeError(FuzzyAlcError, ValueError):
    """A truth degree is malformed or lies outside [0, 1]"""


class UnsupportedOperationError(FuzzyAlcError):
    """The operation is not defined for the given number system or model"""


class UnsupportedFamilyError(FuzzyAlcError):
    """The construction is not available for the requested operator family"""


class KnowledgeBaseError(FuzzyAlcError):
    """An ABox/TBox shape invariant was violated"""


class InterpretationError(FuzzyAlcError):
    """A finite interpretation is malformed or does not cover what is evaluated"""


class GadgetError(FuzzyAlcError):
    """Threshold gadget synthesis or verification received invalid input"""


class ModelSearchError(FuzzyAlcError):
    """Search bounds are invalid or a found model failed re-verification"""


class CanonicalModelError(FuzzyAlcError):
    """A concept refers to something the canonical model does not interpret"""


class TransformPreconditionError(FuzzyAlcError):
    """A transformation was applied to a knowledge base outside its domain"""

    def __init__(self, message: str, violations: Optional[Sequence] = None):
        super().__init__(message)
        self.violations: List = list(violations or [])


class KbIoError(FuzzyAlcError):
    """Reading or writing a knowledge base / interpretation file failed"""


class KbSyntaxError(KbIoError):
    """Text did not match the file grammar; always carries a source span"""

    def __init__(self, message: str, span, expected: Optional[Sequence[str]] = None):
        self.span = span
        self.expected = sorted(set(expected or []))
        detail = f"{message} at line {span.line}, column {span.column}"
        if self.expected:
            detail += f" (expected one of: {', '.join(self.expected)})"
        super().__init__(detail)
        self.reason = message

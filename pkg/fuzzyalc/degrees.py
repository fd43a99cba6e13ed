"""
Exact truth-degree arithmetic for the four fuzzy operator families

Degrees are ``fractions.Fraction`` values in [0, 1]. Every operator of the
Zadeh, Lukasiewicz, Product and Goedel families maps rationals to rationals,
so nothing here ever rounds. The log-dyadic type holds values of the form
2^r (r rational, r <= 0) and exact zero, which is what the Product
counterexample model needs.
"""

import logging
import re
from dataclasses import dataclass
from decimal import Decimal, localcontext
from enum import Enum
from fractions import Fraction
from functools import total_ordering
from typing import Optional, Union

from fuzzyalc import config
from fuzzyalc.errors import DegreeError, UnsupportedOperationError

logger = logging.getLogger(__name__)

Degree = Fraction

ZERO = Fraction(0)
ONE = Fraction(1)

_DEGREE_PATTERN = re.compile(r'^(?:\d+/\d+|\d+(?:\.\d*)?|\.\d+)$')


class OperatorFamily(Enum):
    """Selects the t-norm, t-conorm, negation and implication of a family"""

    ZADEH = "zadeh"
    LUKASIEWICZ = "lukasiewicz"
    PRODUCT = "product"
    GOEDEL = "goedel"

    @classmethod
    def from_name(cls, name: str) -> "OperatorFamily":
        """Resolve a family from its name or a short alias (luk, prod, godel, ...)"""
        key = name.strip().lower()
        if key in _FAMILY_ALIASES:
            return _FAMILY_ALIASES[key]
        raise ValueError(f"Unknown operator family: {name!r}")

    @property
    def is_residuated(self) -> bool:
        return self is not OperatorFamily.ZADEH


_FAMILY_ALIASES = {
    "zadeh": OperatorFamily.ZADEH,
    "z": OperatorFamily.ZADEH,
    "lukasiewicz": OperatorFamily.LUKASIEWICZ,
    "luk": OperatorFamily.LUKASIEWICZ,
    "l": OperatorFamily.LUKASIEWICZ,
    "product": OperatorFamily.PRODUCT,
    "prod": OperatorFamily.PRODUCT,
    "p": OperatorFamily.PRODUCT,
    "goedel": OperatorFamily.GOEDEL,
    "godel": OperatorFamily.GOEDEL,
    "gödel": OperatorFamily.GOEDEL,
    "g": OperatorFamily.GOEDEL,
}


def make_degree(value: Union[Fraction, int, str]) -> Fraction:
    """
    Build a validated degree.

    Accepts a Fraction, an int, or the text forms "p/q" and terminating
    decimals. Raises DegreeError for anything outside [0, 1].
    """
    if isinstance(value, str):
        return parse_degree(value)
    if isinstance(value, float):
        raise DegreeError(f"Floating point degree {value!r} is not exact; use p/q or a decimal string")
    degree = Fraction(value)
    if degree < 0 or degree > 1:
        raise DegreeError(f"Degree {format_degree(degree)} is outside [0, 1]")
    return degree


def parse_degree(text: str) -> Fraction:
    """Parse "p/q" or a terminating decimal exactly"""
    cleaned = text.strip()
    if not _DEGREE_PATTERN.match(cleaned):
        raise DegreeError(f"Malformed degree: {text!r}")
    if "/" in cleaned:
        _, denominator = cleaned.split("/")
        if int(denominator) == 0:
            raise DegreeError(f"Malformed degree: {text!r} has a zero denominator")
    degree = Fraction(cleaned)
    if degree > 1:
        raise DegreeError(f"Degree {text.strip()} is outside [0, 1]")
    return degree


def format_degree(degree: Fraction) -> str:
    """Render as "p/q", or as an integer when the denominator is 1"""
    if degree.denominator == 1:
        return str(degree.numerator)
    return f"{degree.numerator}/{degree.denominator}"


def tnorm(family: OperatorFamily, a: Fraction, b: Fraction) -> Fraction:
    if family is OperatorFamily.LUKASIEWICZ:
        return max(a + b - 1, ZERO)
    if family is OperatorFamily.PRODUCT:
        return a * b
    return min(a, b)


def tconorm(family: OperatorFamily, a: Fraction, b: Fraction) -> Fraction:
    if family is OperatorFamily.LUKASIEWICZ:
        return min(a + b, ONE)
    if family is OperatorFamily.PRODUCT:
        return a + b - a * b
    return max(a, b)


def negation(family: OperatorFamily, a: Fraction) -> Fraction:
    if family in (OperatorFamily.ZADEH, OperatorFamily.LUKASIEWICZ):
        return ONE - a
    # strict negation (Product, Goedel)
    return ONE if a == 0 else ZERO


def implication(family: OperatorFamily, a: Fraction, b: Fraction) -> Fraction:
    """Implication column of the operator table (Kleene-Dienes for Zadeh, residua otherwise)"""
    if family is OperatorFamily.ZADEH:
        return max(ONE - a, b)
    if family is OperatorFamily.LUKASIEWICZ:
        return min(ONE - a + b, ONE)
    if a <= b:
        # includes a == 0: the sup over the empty constraint
        return ONE
    if family is OperatorFamily.PRODUCT:
        return b / a
    return b


def residuum(family: OperatorFamily, a: Fraction, b: Fraction) -> Fraction:
    """
    R-implication of the family's t-norm: sup{c | tnorm(a, c) <= b}.

    Coincides with implication() except for Zadeh, whose min t-norm has the
    Goedel residuum rather than the Kleene-Dienes implication.
    """
    if family is OperatorFamily.ZADEH:
        return implication(OperatorFamily.GOEDEL, a, b)
    return implication(family, a, b)


@total_ordering
@dataclass(frozen=True)
class LogDyadicDegree:
    """
    Exact value 2^exponent (exponent rational, <= 0), or exact zero.

    ``exponent is None`` encodes zero; Pow2(0) is exactly 1.
    """

    exponent: Optional[Fraction] = None

    def __post_init__(self):
        if self.exponent is not None:
            exponent = Fraction(self.exponent)
            if exponent > 0:
                raise DegreeError(f"Log-dyadic exponent {exponent} must be <= 0")
            object.__setattr__(self, "exponent", exponent)

    @classmethod
    def zero(cls) -> "LogDyadicDegree":
        return cls(None)

    @classmethod
    def pow2(cls, exponent: Union[Fraction, int]) -> "LogDyadicDegree":
        return cls(Fraction(exponent))

    @property
    def is_zero(self) -> bool:
        return self.exponent is None

    @property
    def is_one(self) -> bool:
        return self.exponent == 0

    def __lt__(self, other: "LogDyadicDegree") -> bool:
        if not isinstance(other, LogDyadicDegree):
            return NotImplemented
        if self.is_zero:
            return not other.is_zero
        if other.is_zero:
            return False
        return self.exponent < other.exponent

    def approximate(self, digits: int = config.APPROXIMATION_DIGITS) -> Decimal:
        """Decimal approximation with ``digits`` significant digits"""
        if self.is_zero:
            return Decimal(0)
        with localcontext() as ctx:
            ctx.prec = digits
            exponent = Decimal(self.exponent.numerator) / Decimal(self.exponent.denominator)
            return Decimal(2) ** exponent

    def to_degree(self) -> Fraction:
        """Exact rational value; only zero and integer exponents are rational"""
        if self.is_zero:
            return ZERO
        if self.exponent.denominator != 1:
            raise UnsupportedOperationError(f"2^({self.exponent}) is irrational")
        return Fraction(1, 2 ** (-self.exponent.numerator))

    def __str__(self) -> str:
        if self.is_zero:
            return "0"
        if self.is_one:
            return "1"
        return f"2^({self.exponent.numerator}/{self.exponent.denominator})" \
            if self.exponent.denominator != 1 else f"2^({self.exponent.numerator})"


LD_ZERO = LogDyadicDegree.zero()
LD_ONE = LogDyadicDegree.pow2(0)


def ld_tnorm(a: LogDyadicDegree, b: LogDyadicDegree) -> LogDyadicDegree:
    """Product t-norm in the exponent domain: 2^r * 2^s = 2^(r+s)"""
    if a.is_zero or b.is_zero:
        return LD_ZERO
    return LogDyadicDegree.pow2(a.exponent + b.exponent)


def ld_implication(a: LogDyadicDegree, b: LogDyadicDegree) -> LogDyadicDegree:
    """Product implication lifted to exponents: 1 if a <= b, else b / a"""
    if a <= b:
        return LD_ONE
    if b.is_zero:
        return LD_ZERO
    return LogDyadicDegree.pow2(b.exponent - a.exponent)


def ld_negation(a: LogDyadicDegree) -> LogDyadicDegree:
    """Strict negation: zero maps to one, everything positive maps to zero"""
    return LD_ONE if a.is_zero else LD_ZERO


def ld_tconorm(a: LogDyadicDegree, b: LogDyadicDegree) -> LogDyadicDegree:
    """a + b - ab leaves the 2^r form, so it is not available on this type"""
    raise UnsupportedOperationError("Product t-conorm is not closed on log-dyadic degrees")

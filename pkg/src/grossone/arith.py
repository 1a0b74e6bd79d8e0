"""Exact arithmetic for gross-numbers.

A gross-number is a finite signed series ``sum_p c_p * G^p`` built on the
infinite unit G (grossone): G is larger than every finite number, ``G^0 = 1``,
and ``G^-1`` is a positive infinitesimal with ``G * G^-1 = 1``.  Grosspowers
``p`` are integers; grossdigits ``c_p`` are exact rationals (or floats in the
optional floating mode).  A value is finite when its only grosspower is 0,
infinite when a positive grosspower appears, and infinitesimal when every
grosspower is negative.

Addition, subtraction and multiplication are exact.  Division inverts the
divisor through a truncated geometric series: writing the divisor as
``b = beta * G^q * (1 + r)``, where ``beta * G^q`` is the leading term and
``r`` collects the trailing terms divided by it,

    a / b  =  a * (1/beta) * G^-q * sum_{i < K} (-r)^i

truncated to K series levels below the quotient's leading grosspower.  The
residual ``a - (a/b)*b`` has leading grosspower at most ``leading(a) - K``,
and the quotient is exact whenever ``b`` is a single term.  ``K`` is
``ArithConfig.truncation_order``.

Ordering is total: a nonzero gross-number takes the sign of its
highest-grosspower digit, and ``a < b`` means ``sign(a - b) < 0``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Tuple, Union

__all__ = [
    "ArithConfig",
    "DEFAULT_CONFIG",
    "GrossNumber",
    "ParseError",
    "ZERO",
    "ONE",
    "GROSSONE",
    "GROSSONE_INVERSE",
    "add",
    "as_gross",
    "coefficient",
    "compare",
    "div",
    "evaluate_at",
    "finite_part",
    "make",
    "mul",
    "parse",
    "sign",
    "to_text",
]

Digit = Union[Fraction, float]
Scalar = Union[int, Fraction, float, "GrossNumber"]


class ParseError(ValueError):
    """Malformed gross-number or expression text; carries the position."""

    def __init__(self, message: str, text: str, pos: int):
        snippet = text[pos:pos + 12] or "<end of input>"
        super().__init__(f"{message} at position {pos}: {snippet!r}")
        self.text = text
        self.pos = pos


@dataclass(frozen=True)
class ArithConfig:
    """Knobs for the one inexact operation (division).

    truncation_order: number K of geometric-series terms kept when inverting
        a multi-term divisor; must be >= 1.
    digit_mode: "rational" keeps grossdigits exact; "float" converts division
        results to floats.
    float_zero_tol: digits with magnitude <= tol are dropped from division
        results in float mode; must be 0 in rational mode.
    """

    truncation_order: int = 8
    digit_mode: str = "rational"
    float_zero_tol: float = 0.0

    def __post_init__(self) -> None:
        if self.truncation_order < 1:
            raise ValueError("truncation_order must be >= 1")
        if self.digit_mode not in ("rational", "float"):
            raise ValueError(f"unknown digit_mode {self.digit_mode!r}")
        if self.float_zero_tol < 0:
            raise ValueError("float_zero_tol must be nonnegative")
        if self.digit_mode == "rational" and self.float_zero_tol != 0:
            raise ValueError("float_zero_tol must be 0 in rational mode")


DEFAULT_CONFIG = ArithConfig()


def _coerce_digit(value) -> Digit:
    if isinstance(value, bool):
        raise TypeError("grossdigit must be a number, not bool")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, (Fraction, float)):
        return value
    raise TypeError(f"grossdigit must be rational or float, got {type(value).__name__}")


class GrossNumber:
    """Immutable gross-number: terms sorted by strictly descending grosspower.

    Construction normalizes: duplicate grosspowers are merged, zero digits
    dropped.  Zero is the empty term list.
    """

    __slots__ = ("_terms",)

    def __init__(self, terms: Iterable[Tuple[int, object]] = ()):
        acc: dict[int, Digit] = {}
        for power, digit in terms:
            if isinstance(power, bool) or not isinstance(power, int):
                raise TypeError(f"grosspower must be a finite integer, got {power!r}")
            d = _coerce_digit(digit)
            if power in acc:
                acc[power] = acc[power] + d
            else:
                acc[power] = d
        self._terms = tuple(
            (p, acc[p]) for p in sorted(acc, reverse=True) if acc[p] != 0
        )

    # -- construction helpers -------------------------------------------------

    @classmethod
    def from_rational(cls, value) -> "GrossNumber":
        return cls([(0, value)])

    # -- structure ------------------------------------------------------------

    @property
    def terms(self) -> Tuple[Tuple[int, Digit], ...]:
        return self._terms

    def is_zero(self) -> bool:
        return not self._terms

    @property
    def leading_power(self):
        """Highest grosspower, or None for zero."""
        return self._terms[0][0] if self._terms else None

    @property
    def leading_digit(self):
        return self._terms[0][1] if self._terms else None

    def sign(self) -> int:
        if not self._terms:
            return 0
        lead = self._terms[0][1]
        return 1 if lead > 0 else -1

    def finite_part(self) -> Digit:
        """Grossdigit at grosspower 0 (0 if absent)."""
        return self.coefficient(0)

    def coefficient(self, power: int) -> Digit:
        for p, d in self._terms:
            if p == power:
                return d
            if p < power:
                break
        return Fraction(0)

    def evaluate_at(self, point) -> Digit:
        """Substitute a positive finite value for G; exact for rational digits."""
        t = Fraction(point) if not isinstance(point, float) else point
        if t <= 0:
            raise ValueError("substitution point must be positive")
        total: Digit = Fraction(0)
        for p, d in self._terms:
            total = total + d * t ** p
        return total

    # -- arithmetic -----------------------------------------------------------

    def __add__(self, other) -> "GrossNumber":
        other = _coerce_operand(other)
        if other is NotImplemented:
            return NotImplemented
        return GrossNumber(self._terms + other._terms)

    __radd__ = __add__

    def __neg__(self) -> "GrossNumber":
        return GrossNumber((p, -d) for p, d in self._terms)

    def __sub__(self, other) -> "GrossNumber":
        other = _coerce_operand(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "GrossNumber":
        other = _coerce_operand(other)
        if other is NotImplemented:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other) -> "GrossNumber":
        other = _coerce_operand(other)
        if other is NotImplemented:
            return NotImplemented
        products = [
            (pa + pb, da * db)
            for pa, da in self._terms
            for pb, db in other._terms
        ]
        return GrossNumber(products)

    __rmul__ = __mul__

    def divide(self, other, config: ArithConfig = DEFAULT_CONFIG) -> "GrossNumber":
        """Truncated-series division.

        Exact (zero residual) when the divisor has a single term.  Otherwise
        the quotient keeps K = config.truncation_order series levels below
        its leading grosspower — every retained coefficient above the cutoff
        equals the infinite-series quotient's — and the residual
        ``a - (a/b)*b`` has leading grosspower at most ``leading(a) - K``.
        """
        other = as_gross(other)
        if other.is_zero():
            raise ZeroDivisionError("gross-number division by zero")
        q, beta = other._terms[0]
        lead_reciprocal = GrossNumber([(-q, _reciprocal(beta))])
        # r = other / (beta * G^q) - 1: strictly negative relative grosspowers.
        tail = GrossNumber((p - q, d * _reciprocal(beta)) for p, d in other._terms[1:])
        geometric = ONE
        acc = ONE
        for _ in range(config.truncation_order - 1):
            if tail.is_zero():
                break
            acc = acc * (-tail)
            if acc.is_zero():
                break
            geometric = geometric + acc
        result = self * lead_reciprocal * geometric
        if not tail.is_zero() and not result.is_zero():
            # Terms below leading - K carry no exact information; dropping
            # them contributes to the residual only at order leading(a)-K-1.
            cutoff = result.leading_power - config.truncation_order
            result = GrossNumber((p, d) for p, d in result._terms if p >= cutoff)
        if config.digit_mode == "float":
            result = GrossNumber(
                (p, float(d))
                for p, d in result._terms
                if abs(d) > config.float_zero_tol
            )
        return result

    def __truediv__(self, other) -> "GrossNumber":
        other = _coerce_operand(other)
        if other is NotImplemented:
            return NotImplemented
        return self.divide(other)

    def __rtruediv__(self, other) -> "GrossNumber":
        other = _coerce_operand(other)
        if other is NotImplemented:
            return NotImplemented
        return other.divide(self)

    def power(self, exponent: int, config: ArithConfig = DEFAULT_CONFIG) -> "GrossNumber":
        """Integer power by repeated multiplication; G^0 = 1 by the n = 0 case."""
        if isinstance(exponent, bool) or not isinstance(exponent, int):
            raise TypeError("exponent must be an integer")
        if exponent < 0:
            return ONE.divide(self.power(-exponent), config)
        result = ONE
        for _ in range(exponent):
            result = result * self
        return result

    def __pow__(self, exponent: int) -> "GrossNumber":
        return self.power(exponent)

    # -- ordering -------------------------------------------------------------

    def __eq__(self, other) -> bool:
        other = _coerce_operand(other)
        if other is NotImplemented:
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        return hash(self._terms)

    def __lt__(self, other) -> bool:
        other = _coerce_operand(other)
        if other is NotImplemented:
            return NotImplemented
        return (self - other).sign() < 0

    def __le__(self, other) -> bool:
        other = _coerce_operand(other)
        if other is NotImplemented:
            return NotImplemented
        return (self - other).sign() <= 0

    def __gt__(self, other) -> bool:
        other = _coerce_operand(other)
        if other is NotImplemented:
            return NotImplemented
        return (self - other).sign() > 0

    def __ge__(self, other) -> bool:
        other = _coerce_operand(other)
        if other is NotImplemented:
            return NotImplemented
        return (self - other).sign() >= 0

    def __bool__(self) -> bool:
        return bool(self._terms)

    # -- text -----------------------------------------------------------------

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for idx, (p, d) in enumerate(self._terms):
            negative = d < 0
            body = _format_term(p, -d if negative else d)
            if idx == 0:
                parts.append("-" + body if negative else body)
            else:
                parts.append((" - " if negative else " + ") + body)
        return "".join(parts)

    def __repr__(self) -> str:
        return f"GrossNumber({str(self)!r})"

    @classmethod
    def parse(cls, text: str) -> "GrossNumber":
        """Parse canonical text, e.g. "3G + 1", "1/4 - 1/16G^-1", "-2G^3"."""
        return _TextReader(text).read_number()


def _reciprocal(digit: Digit) -> Digit:
    if isinstance(digit, float):
        return 1.0 / digit
    return Fraction(1) / digit


def _coerce_operand(value):
    if isinstance(value, GrossNumber):
        return value
    if isinstance(value, bool):
        return NotImplemented
    if isinstance(value, (int, Fraction, float)):
        return GrossNumber([(0, value)])
    return NotImplemented


def _format_digit(d: Digit) -> str:
    return repr(d) if isinstance(d, float) else str(d)


def _format_term(power: int, magnitude: Digit) -> str:
    if power == 0:
        return _format_digit(magnitude)
    suffix = "G" if power == 1 else f"G^{power}"
    if magnitude == 1:
        return suffix
    return _format_digit(magnitude) + suffix


class _TextReader:
    """Recursive-descent reader for the canonical gross-number grammar.

    number := term (('+'|'-') term)*
    term   := [sign] (rational ['G' ['^' int]] | 'G' ['^' int])
    rational := int ['/' uint]

    A bare 'G' carries digit 1; a missing 'G' means grosspower 0.
    """

    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def error(self, message: str) -> ParseError:
        return ParseError(message, self.text, self.pos)

    def skip_ws(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def read_uint(self) -> int:
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        if self.pos == start:
            raise self.error("expected an unsigned integer")
        return int(self.text[start:self.pos])

    def read_int(self) -> int:
        sign = 1
        if self.peek() in ("+", "-"):
            if self.text[self.pos] == "-":
                sign = -1
            self.pos += 1
        return sign * self.read_uint()

    def read_rational(self) -> Fraction:
        numerator = self.read_uint()
        if self.peek() == "/":
            self.pos += 1
            mark = self.pos
            denominator = self.read_uint()
            if denominator == 0:
                self.pos = mark
                raise self.error("zero denominator")
            return Fraction(numerator, denominator)
        return Fraction(numerator)

    def read_term(self) -> Tuple[int, Fraction]:
        sign = 1
        if self.peek() in ("+", "-"):
            if self.text[self.pos] == "-":
                sign = -1
            self.pos += 1
            self.skip_ws()
        if self.peek() == "G":
            digit = Fraction(1)
        elif self.peek().isdigit():
            digit = self.read_rational()
        else:
            raise self.error("expected a term")
        power = 0
        if self.peek() == "G":
            self.pos += 1
            power = 1
            if self.peek() == "^":
                self.pos += 1
                power = self.read_int()
        return power, sign * digit

    def read_number(self) -> GrossNumber:
        self.skip_ws()
        terms = [self.read_term()]
        while True:
            self.skip_ws()
            if self.pos >= len(self.text):
                break
            separator = self.peek()
            if separator not in ("+", "-"):
                raise self.error("expected '+' or '-'")
            self.pos += 1
            self.skip_ws()
            power, digit = self.read_term()
            terms.append((power, -digit if separator == "-" else digit))
        return GrossNumber(terms)


ZERO = GrossNumber()
ONE = GrossNumber([(0, 1)])
GROSSONE = GrossNumber([(1, 1)])
GROSSONE_INVERSE = GrossNumber([(-1, 1)])


# -- operation-style module interface ------------------------------------------


def as_gross(value: Scalar) -> GrossNumber:
    """Coerce an int, Fraction, float or GrossNumber to a GrossNumber."""
    coerced = _coerce_operand(value)
    if coerced is NotImplemented:
        raise TypeError(f"cannot interpret {type(value).__name__} as a gross-number")
    return coerced


def make(terms: Iterable[Tuple[int, object]]) -> GrossNumber:
    """Build a normalized gross-number from (grosspower, grossdigit) pairs."""
    return GrossNumber(terms)


def add(a: Scalar, b: Scalar) -> GrossNumber:
    return as_gross(a) + as_gross(b)


def mul(a: Scalar, b: Scalar) -> GrossNumber:
    return as_gross(a) * as_gross(b)


def div(a: Scalar, b: Scalar, config: ArithConfig = DEFAULT_CONFIG) -> GrossNumber:
    return as_gross(a).divide(b, config)


def compare(a: Scalar, b: Scalar) -> int:
    """-1, 0 or 1 as a < b, a == b or a > b."""
    return (as_gross(a) - as_gross(b)).sign()


def sign(a: Scalar) -> int:
    return as_gross(a).sign()


def finite_part(a: Scalar) -> Digit:
    return as_gross(a).finite_part()


def coefficient(a: Scalar, power: int) -> Digit:
    return as_gross(a).coefficient(power)


def evaluate_at(a: Scalar, point) -> Digit:
    return as_gross(a).evaluate_at(point)


def parse(text: str) -> GrossNumber:
    return GrossNumber.parse(text)


def to_text(a: Scalar) -> str:
    """Canonical text form, the inverse of parse()."""
    return str(as_gross(a))

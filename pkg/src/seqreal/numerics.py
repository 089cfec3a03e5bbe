"""Exact dyadic and rational arithmetic.

Rationals are plain :class:`fractions.Fraction` values.  Dyadics are
``mantissa * 2**exponent`` with an odd (or zero) mantissa, which makes
equality structural and lets every ``|r - x| <= 2**-n`` contract be checked
without rounding.

Arithmetic performed while a :func:`metered` block is active is charged to
the block's meter; the oracle-machine runtime uses this for its cost model.
"""

from __future__ import annotations

import contextlib
import contextvars
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Union

__all__ = [
    "Dyadic",
    "Meter",
    "metered",
    "round_to",
    "rat_approx",
    "alpha",
    "exp2_neg",
    "isqrt_approx",
    "parse_number",
    "parse_dyadic",
    "to_fraction",
    "render_decimal",
]

RationalLike = Union[int, Fraction, "Dyadic"]


class Meter:
    """Accumulates the bit-weighted cost of arithmetic operations."""

    __slots__ = ("ops", "cost")

    def __init__(self) -> None:
        self.ops = 0
        self.cost = 0

    def charge(self, bits: int) -> None:
        self.ops += 1
        self.cost += bits + 1


_meter: contextvars.ContextVar[Meter | None] = contextvars.ContextVar("seqreal_meter", default=None)


@contextlib.contextmanager
def metered() -> Iterator[Meter]:
    """Charge all arithmetic in the ``with`` body to a fresh :class:`Meter`."""
    meter = Meter()
    token = _meter.set(meter)
    try:
        yield meter
    finally:
        _meter.reset(token)


def _charge(bits: int) -> None:
    meter = _meter.get()
    if meter is not None:
        meter.charge(bits)


@dataclass(frozen=True, slots=True)
class Dyadic:
    """The exact binary rational ``mantissa * 2**exponent``.

    Instances are always canonical: the mantissa is odd, or the value is zero
    and stored as ``Dyadic(0, 0)``.

    >>> Dyadic(12, -4)
    Dyadic(3, -2)
    >>> Dyadic(3, -2) + Dyadic(1, -2)
    Dyadic(1, 0)
    """

    mantissa: int
    exponent: int = 0

    def __post_init__(self) -> None:
        m, e = self.mantissa, self.exponent
        if not isinstance(m, int) or not isinstance(e, int):
            raise TypeError("Dyadic mantissa and exponent must be integers")
        if m == 0:
            e = 0
        else:
            tz = (m & -m).bit_length() - 1
            if tz:
                m >>= tz
                e += tz
        object.__setattr__(self, "mantissa", m)
        object.__setattr__(self, "exponent", e)

    # -- construction -------------------------------------------------

    @classmethod
    def from_fraction(cls, q: RationalLike) -> "Dyadic":
        """Exact conversion; raises ``ValueError`` when the denominator is not a power of two."""
        if isinstance(q, Dyadic):
            return q
        q = Fraction(q)
        den = q.denominator
        if den & (den - 1):
            raise ValueError(f"{q} is not a dyadic rational")
        return cls(q.numerator, -(den.bit_length() - 1))

    # -- views ----------------------------------------------------------

    @property
    def numerator(self) -> int:
        return self.mantissa << self.exponent if self.exponent >= 0 else self.mantissa

    @property
    def denominator(self) -> int:
        return 1 if self.exponent >= 0 else 1 << -self.exponent

    def to_fraction(self) -> Fraction:
        return Fraction(self.numerator, self.denominator)

    def bit_length(self) -> int:
        return abs(self.mantissa).bit_length()

    def is_zero(self) -> bool:
        return self.mantissa == 0

    def sign(self) -> int:
        return (self.mantissa > 0) - (self.mantissa < 0)

    def shift(self, k: int) -> "Dyadic":
        """Multiply by ``2**k``; exact and free of charge."""
        if self.mantissa == 0:
            return self
        return Dyadic(self.mantissa, self.exponent + k)

    # -- arithmetic -----------------------------------------------------

    def _align(self, other: "Dyadic") -> tuple[int, int, int]:
        e = min(self.exponent, other.exponent)
        return self.mantissa << (self.exponent - e), other.mantissa << (other.exponent - e), e

    def __add__(self, other: object) -> "Dyadic":
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        _charge(max(self.bit_length(), other.bit_length()))
        a, b, e = self._align(other)
        return Dyadic(a + b, e)

    __radd__ = __add__

    def __sub__(self, other: object) -> "Dyadic":
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        _charge(max(self.bit_length(), other.bit_length()))
        a, b, e = self._align(other)
        return Dyadic(a - b, e)

    def __rsub__(self, other: object) -> "Dyadic":
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other - self

    def __mul__(self, other: object) -> "Dyadic":
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        _charge(self.bit_length() + other.bit_length())
        return Dyadic(self.mantissa * other.mantissa, self.exponent + other.exponent)

    __rmul__ = __mul__

    def __neg__(self) -> "Dyadic":
        return Dyadic(-self.mantissa, self.exponent)

    def __abs__(self) -> "Dyadic":
        return self if self.mantissa >= 0 else Dyadic(-self.mantissa, self.exponent)

    # -- comparison -----------------------------------------------------

    def compare(self, other: RationalLike) -> int:
        """Return -1, 0 or 1 as ``self`` is below, equal to, or above ``other``."""
        if isinstance(other, Dyadic):
            a, b, _ = self._align(other)
        else:
            q = Fraction(other)
            a, b = self.numerator * q.denominator, q.numerator * self.denominator
        return (a > b) - (a < b)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, Dyadic):
            return self.mantissa == other.mantissa and self.exponent == other.exponent
        if isinstance(other, (int, Fraction)):
            return self.compare(other) == 0
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.to_fraction())

    def __lt__(self, other: RationalLike) -> bool:
        return self.compare(other) < 0

    def __le__(self, other: RationalLike) -> bool:
        return self.compare(other) <= 0

    def __gt__(self, other: RationalLike) -> bool:
        return self.compare(other) > 0

    def __ge__(self, other: RationalLike) -> bool:
        return self.compare(other) >= 0

    def __bool__(self) -> bool:
        return self.mantissa != 0

    # -- rendering ------------------------------------------------------

    def __str__(self) -> str:
        return f"{self.mantissa}*2^{self.exponent}"

    def __repr__(self) -> str:
        return f"Dyadic({self.mantissa}, {self.exponent})"


ZERO = Dyadic(0)
ONE = Dyadic(1)


def _coerce(x: object) -> "Dyadic":
    if isinstance(x, Dyadic):
        return x
    if isinstance(x, int):
        return Dyadic(x)
    return NotImplemented  # type: ignore[return-value]


def to_fraction(x: RationalLike) -> Fraction:
    if isinstance(x, Dyadic):
        return x.to_fraction()
    return Fraction(x)


def round_to(d: Dyadic, n: int) -> Dyadic:
    """Round ``d`` to the nearest multiple of ``2**-n``, ties to the even multiple.

    >>> round_to(Dyadic(5, -3), 1)
    Dyadic(1, -1)
    >>> round_to(Dyadic(3, -2), 1)
    Dyadic(1, 0)
    """
    if n < 0:
        raise ValueError("precision must be non-negative")
    if d.exponent >= -n:
        return d
    _charge(d.bit_length())
    shift = -n - d.exponent
    q, r = divmod(d.mantissa, 1 << shift)
    half = 1 << (shift - 1)
    if r > half or (r == half and q & 1):
        q += 1
    return Dyadic(q, -n)


def rat_approx(q: RationalLike, n: int) -> Dyadic:
    """A multiple of ``2**-n`` within ``2**-n`` of ``q``.

    The rule is truncation of ``q * 2**n`` toward zero, which already meets
    the bound strictly, so no correction step is ever taken.
    """
    if n < 0:
        raise ValueError("precision must be non-negative")
    if isinstance(q, Dyadic):
        if q.exponent >= -n:
            return q
        q = q.to_fraction()
    q = Fraction(q)
    _charge(max(q.numerator.bit_length(), q.denominator.bit_length()) + n)
    scaled = q.numerator << n
    t = abs(scaled) // q.denominator
    return Dyadic(t if scaled >= 0 else -t, -n)


def alpha(q: RationalLike) -> Fraction:
    """The bounded transform ``|q| / (1 + |q|)``, valued in ``[0, 1)``."""
    q = abs(to_fraction(q))
    _charge(max(q.numerator.bit_length(), q.denominator.bit_length()))
    return q / (1 + q)


def isqrt_approx(d: Dyadic, n: int) -> Dyadic:
    """``floor(sqrt(d) * 2**n) / 2**n`` for ``d >= 0``; error below ``2**-n``."""
    if d < 0:
        raise ValueError("square root of a negative dyadic")
    # sqrt(m * 2^e) * 2^n = sqrt(m * 2^(e + 2n))
    shift = d.exponent + 2 * n
    _charge(d.bit_length() + 2 * n)
    if shift >= 0:
        radicand = d.mantissa << shift
    else:
        radicand = d.mantissa >> -shift  # floor; sqrt is monotone so the floor survives
    return Dyadic(math.isqrt(radicand), -n)


def exp2_neg(c: Dyadic, p: int) -> Dyadic:
    """Approximate ``2**-c`` for dyadic ``c >= 0`` to within ``2**-p``.

    Writes ``c = a + b`` with integer ``a`` and ``b`` having ``f`` fraction
    bits, then multiplies the constants ``2**(-2**-i)`` for the set bits of
    ``b``.  Each constant comes from repeated integer square roots in fixed
    point with enough guard bits that the accumulated error stays below
    ``2**-(p+1)``.
    """
    if c < 0:
        raise ValueError("exp2_neg expects a non-negative exponent")
    if p < 0:
        raise ValueError("precision must be non-negative")
    whole = c.numerator // c.denominator
    if whole > p:
        return ZERO
    frac_bits = max(0, -c.exponent)
    frac = c.mantissa & ((1 << frac_bits) - 1) if frac_bits else 0
    guard = p + frac_bits.bit_length() + 5
    one = 1 << guard
    acc = one
    s = one >> 1  # 2^-1; after i square roots it holds 2^(-2^-i)
    for i in range(1, frac_bits + 1):
        s = math.isqrt(s << guard)
        _charge(guard)
        if (frac >> (frac_bits - i)) & 1:
            acc = (acc * s) >> guard
            _charge(2 * guard)
    return round_to(Dyadic(acc, -guard - whole), p + 1)


_DYADIC_LITERAL = re.compile(r"^\s*([+-]?\d+)\s*\*\s*2\s*\^\s*([+-]?\d+)\s*$")


def parse_number(text: str | int) -> Fraction:
    """Parse ``"p/q"``, an integer, or a dyadic literal ``"m*2^e"`` into a Fraction."""
    if isinstance(text, int):
        return Fraction(text)
    m = _DYADIC_LITERAL.match(text)
    if m:
        return Dyadic(int(m.group(1)), int(m.group(2))).to_fraction()
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"not a rational literal: {text!r}") from exc


def parse_dyadic(text: str | int) -> Dyadic:
    return Dyadic.from_fraction(parse_number(text))


def render_decimal(x: RationalLike, places: int = 10) -> str:
    """Decimal rendering to ``places`` digits, prefixed with ``≈`` when inexact."""
    q = to_fraction(x)
    scale = 10**places
    digits = round(q * scale)
    exact = q * scale == digits
    whole, rest = divmod(abs(digits), scale)
    text = f"{whole}.{rest:0{places}d}"
    if exact:
        text = text.rstrip("0").rstrip(".")
    if digits < 0:
        text = "-" + text
    return text if exact else "≈" + text

"""Binary words, pairing, self-delimiting dyadic codes and regular string functions.

Words are Python strings over ``"01"``.  Oracle queries for coordinate ``i``
at precision ``j`` are the words ``0^i 1 0^j``, the usual pairing of the two
unary arguments; :func:`pair` gives the matching Cantor numbering of the
same pair for callers that want an integer key.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable

from .numerics import Dyadic

Word = str


class MalformedCode(ValueError):
    """A word that is not a well-formed code of the expected kind."""


class PadOverflow(ValueError):
    """The requested padded length cannot hold the word and its end marker."""


# -- pairing -------------------------------------------------------------


def pair(i: int, j: int) -> int:
    """Cantor pairing ``(i + j)(i + j + 1)/2 + j``.

    >>> pair(1, 2)
    8
    """
    if i < 0 or j < 0:
        raise ValueError("pair is defined on natural numbers")
    s = i + j
    return s * (s + 1) // 2 + j


def unpair(k: int) -> tuple[int, int]:
    """Inverse of :func:`pair`."""
    if k < 0:
        raise ValueError("unpair is defined on natural numbers")
    s = (math.isqrt(8 * k + 1) - 1) // 2
    j = k - s * (s + 1) // 2
    return s - j, j


def query_word(i: int, j: int) -> Word:
    """The oracle query asking for coordinate ``i`` to precision ``2**-j``."""
    return "0" * i + "1" + "0" * j


def parse_query(w: Word) -> tuple[int, int]:
    """Coordinate and precision addressed by an arbitrary word.

    Every word of length ``m >= 1`` is read as a query with ``i + j + 1 = m``:
    leading zeros give ``i`` and whatever follows the first ``1`` gives ``j``.
    A word without a ``1`` addresses coordinate ``m - 1`` at precision 0, and
    the empty word addresses ``(0, 0)``.
    """
    k = w.find("1")
    if k < 0:
        return max(len(w) - 1, 0), 0
    return k, len(w) - k - 1


# -- self-delimiting codes -------------------------------------------------


def _double(bits: str) -> str:
    return "".join(b + b for b in bits) + "01"


def _undouble(w: Word, pos: int) -> tuple[str, int]:
    out = []
    while True:
        pair_ = w[pos : pos + 2]
        if len(pair_) < 2:
            raise MalformedCode("truncated bit-doubled field")
        if pair_ == "01":
            return "".join(out), pos + 2
        if pair_ not in ("00", "11"):
            raise MalformedCode(f"unexpected pair {pair_!r} at offset {pos}")
        out.append(pair_[0])
        pos += 2


def _magnitude_bits(v: int) -> str:
    return format(v, "b") if v else ""


def encode_dyadic(d: Dyadic) -> Word:
    """Sign bit, then bit-doubled mantissa magnitude, then bit-doubled signed exponent.

    Each doubled field ends with ``01``.  The exponent field starts with its
    own sign bit.

    >>> encode_dyadic(Dyadic(0))
    '0010001'
    """
    sign = "1" if d.mantissa < 0 else "0"
    exp = d.exponent
    exp_bits = ("1" if exp < 0 else "0") + _magnitude_bits(abs(exp))
    return sign + _double(_magnitude_bits(abs(d.mantissa))) + _double(exp_bits)


def decode_prefix(w: Word, pos: int = 0) -> tuple[Dyadic, int]:
    """Decode the code starting at ``pos``; return the value and the end offset."""
    if pos >= len(w) or w[pos] not in "01":
        raise MalformedCode("missing sign bit")
    negative = w[pos] == "1"
    mant_bits, pos = _undouble(w, pos + 1)
    exp_bits, pos = _undouble(w, pos)
    if mant_bits.startswith("0") or not exp_bits or exp_bits[1:].startswith("0"):
        raise MalformedCode("non-canonical digit string")
    mant = int(mant_bits, 2) if mant_bits else 0
    exp = int(exp_bits[1:], 2) if len(exp_bits) > 1 else 0
    if exp_bits[0] == "1":
        if exp == 0:
            raise MalformedCode("negative zero exponent")
        exp = -exp
    if mant == 0 and (negative or exp != 0):
        raise MalformedCode("non-canonical zero")
    if mant and not mant & 1:
        raise MalformedCode("even mantissa")
    return Dyadic(-mant if negative else mant, exp), pos


def decode_dyadic(w: Word) -> Dyadic:
    d, end = decode_prefix(w)
    if end != len(w):
        raise MalformedCode(f"{len(w) - end} trailing bits after code")
    return d


def code_length_bound(mantissa_bits: int, exponent_magnitude: int) -> int:
    """Length of the code of any dyadic whose mantissa has at most ``mantissa_bits`` bits
    and whose exponent is at most ``exponent_magnitude`` in absolute value."""
    return 7 + 2 * mantissa_bits + 2 * exponent_magnitude.bit_length()


# -- padding -------------------------------------------------------------


def pad_to(w: Word, length: int) -> Word:
    """Append a ``1`` marker and zeros so the result has exactly ``length`` bits.

    >>> pad_to("", 3)
    '100'
    """
    if length < len(w) + 1:
        raise PadOverflow(f"cannot pad a {len(w)}-bit word to {length} bits")
    return w + "1" + "0" * (length - len(w) - 1)


def unpad(w: Word) -> Word:
    k = w.rfind("1")
    if k < 0:
        raise MalformedCode("padded word lacks its end marker")
    return w[:k]


# -- regular functions ---------------------------------------------------


@dataclass(frozen=True)
class RegularFn:
    """A total word function with a declared size bound.

    ``answer`` must be regular (output length monotone in input length) and
    satisfy ``len(answer("0" * n)) == size_bound(n)``; :func:`audit_regularity`
    checks both on samples.
    """

    answer: Callable[[Word], Word]
    size_bound: Callable[[int], int]

    def __call__(self, w: Word) -> Word:
        return self.answer(w)


def size_of(phi: RegularFn, n: int) -> int:
    """``|phi|(n) = |phi(0^n)|``."""
    return len(phi.answer("0" * n))


def audit_regularity(phi: RegularFn, words: Iterable[Word]) -> list[tuple[Word, Word]]:
    """Pairs ``(u, v)`` with ``|u| <= |v|`` but ``|phi(u)| > |phi(v)|``, plus size-law failures.

    A size-law failure at ``n`` is reported as the pair ``(0^n, 0^n)``.
    """
    by_len: dict[int, tuple[int, Word, int, Word]] = {}
    for w in words:
        out = len(phi.answer(w))
        lo, lo_w, hi, hi_w = by_len.get(len(w), (out, w, out, w))
        if out < lo:
            lo, lo_w = out, w
        if out > hi:
            hi, hi_w = out, w
        by_len[len(w)] = (lo, lo_w, hi, hi_w)
    bad: list[tuple[Word, Word]] = []
    lengths = sorted(by_len)
    running_hi, running_w = -1, ""
    for m in lengths:
        lo, lo_w, hi, hi_w = by_len[m]
        if running_hi > lo:
            bad.append((running_w, lo_w))
        if lo != hi:
            bad.append((hi_w, lo_w))
        if hi > running_hi:
            running_hi, running_w = hi, hi_w
    for m in lengths:
        if size_of(phi, m) != phi.size_bound(m):
            bad.append(("0" * m, "0" * m))
    return bad

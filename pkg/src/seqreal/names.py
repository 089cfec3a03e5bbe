"""Finite sequence descriptions and the oracle names built from them.

A :class:`SequenceSpec` denotes a total rational sequence ``x: N -> Q`` that can
be evaluated exactly at any index.  A :class:`SequenceName` turns a spec into
a regular word function answering the query ``0^i 1 0^j`` with a padded code
of a dyadic within ``2**-j`` of ``x_i``.
"""

from __future__ import annotations

import ast
import hashlib
import json
import math
import re
import threading
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Any, ClassVar

from .encoding import (
    MalformedCode,
    RegularFn,
    Word,
    code_length_bound,
    decode_dyadic,
    encode_dyadic,
    pad_to,
    parse_query,
    unpad,
)
from .numerics import Dyadic, parse_number

__all__ = [
    "MissingModulus",
    "SpecError",
    "Expr",
    "SequenceSpec",
    "Zeros",
    "Spike",
    "FiniteList",
    "Geometric",
    "PerIndex",
    "spec_from_json",
    "load_spec",
    "SequenceName",
    "name_from_spec",
    "left_approx_name",
    "perturb_representation",
    "make_name",
    "STYLES",
]


class SpecError(ValueError):
    """A sequence description that cannot be parsed or fails its checks."""


class MissingModulus(LookupError):
    """A computation needed a summability modulus the sequence description lacks."""


# -- index expressions ---------------------------------------------------

_BINOPS = (ast.Add, ast.Sub, ast.Mult, ast.Div, ast.Pow)


class Expr:
    """An arithmetic expression in the index variable ``k``, evaluated exactly.

    Grammar: integer constants, ``k``, ``+ - * /``, unary minus, parentheses
    and ``^`` (or ``**``) with an integer constant exponent.

    >>> Expr("1/(k+1)^2")(3)
    Fraction(1, 16)
    """

    def __init__(self, source: str):
        self.source = source.strip()
        try:
            tree = ast.parse(self.source.replace("^", "**"), mode="eval")
        except SyntaxError as exc:
            raise SpecError(f"cannot parse expression {source!r}") from exc
        self._check(tree.body)
        self._tree = tree.body

    def _check(self, node: ast.AST) -> None:
        if isinstance(node, ast.Constant):
            if not isinstance(node.value, int) or isinstance(node.value, bool):
                raise SpecError(f"only integer constants are allowed in {self.source!r}")
        elif isinstance(node, ast.Name):
            if node.id != "k":
                raise SpecError(f"unknown variable {node.id!r} in {self.source!r}")
        elif isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            self._check(node.operand)
        elif isinstance(node, ast.BinOp) and isinstance(node.op, _BINOPS):
            self._check(node.left)
            if isinstance(node.op, ast.Pow):
                if _const_int(node.right) is None:
                    raise SpecError(f"exponents must be integer constants in {self.source!r}")
            else:
                self._check(node.right)
        else:
            raise SpecError(f"unsupported syntax in {self.source!r}")

    def __call__(self, k: int) -> Fraction:
        return _eval(self._tree, Fraction(k))

    def __repr__(self) -> str:
        return f"Expr({self.source!r})"

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Expr) and other.source == self.source

    def __hash__(self) -> int:
        return hash(self.source)


def _const_int(node: ast.AST) -> int | None:
    if isinstance(node, ast.Constant) and isinstance(node.value, int):
        return node.value
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, ast.USub):
        inner = _const_int(node.operand)
        return None if inner is None else -inner
    return None


def _eval(node: ast.AST, k: Fraction) -> Fraction:
    if isinstance(node, ast.Constant):
        return Fraction(node.value)
    if isinstance(node, ast.Name):
        return k
    if isinstance(node, ast.UnaryOp):
        v = _eval(node.operand, k)
        return -v if isinstance(node.op, ast.USub) else v
    left = _eval(node.left, k)
    op = node.op
    if isinstance(op, ast.Pow):
        return left ** _const_int(node.right)
    right = _eval(node.right, k)
    if isinstance(op, ast.Add):
        return left + right
    if isinstance(op, ast.Sub):
        return left - right
    if isinstance(op, ast.Mult):
        return left * right
    return left / right


# -- sequence specs ------------------------------------------------------

MODULUS_CHECK_RANGE = 24


@dataclass(frozen=True, kw_only=True)
class SequenceSpec:
    """Base class of the constructive sequence descriptions.

    ``modulus`` is an expression ``mu(k)`` with ``sum_{i >= mu(k)} |x_i| <= 2**-k``;
    ``square_modulus`` is the analogous bound for ``sum x_i**2``.
    """

    kind: ClassVar[str] = ""

    modulus: Expr | None = None
    square_modulus: Expr | None = None

    def value(self, i: int) -> Fraction:
        raise NotImplementedError

    def values(self, count: int) -> list[Fraction]:
        return [self.value(i) for i in range(count)]

    def abs_tail(self, m: int) -> Fraction | None:
        """Exact ``sum_{i >= m} |x_i|`` when it is known in closed form."""
        return None

    def square_tail(self, m: int) -> Fraction | None:
        """Exact ``sum_{i >= m} x_i**2`` when it is known in closed form."""
        return None

    def summability_modulus(self, k: int) -> int:
        if self.modulus is None:
            raise MissingModulus(f"{self.label()} carries no summability modulus")
        return max(0, math.ceil(self.modulus(k)))

    def square_summability_modulus(self, k: int) -> int:
        """Index beyond which the squares sum to at most ``2**-k``.

        Falls back to the summability modulus at ``ceil(k/2)``, since
        ``sum x_i**2 <= (sum |x_i|)**2``.
        """
        if self.square_modulus is not None:
            return max(0, math.ceil(self.square_modulus(k)))
        if self.modulus is not None:
            return self.summability_modulus((k + 1) // 2)
        raise MissingModulus(f"{self.label()} carries no square-summability modulus")

    def check_moduli(self, upto: int = MODULUS_CHECK_RANGE) -> list[str]:
        """Return descriptions of modulus violations for ``k <= upto`` (closed-form kinds only)."""
        problems = []
        for k in range(upto + 1):
            bound = Fraction(1, 2**k)
            if self.modulus is not None:
                tail = self.abs_tail(self.summability_modulus(k))
                if tail is not None and tail > bound:
                    problems.append(f"modulus fails at k={k}: tail {tail} > 2^-{k}")
            if self.square_modulus is not None:
                tail = self.square_tail(self.square_summability_modulus(k))
                if tail is not None and tail > bound:
                    problems.append(f"square modulus fails at k={k}: tail {tail} > 2^-{k}")
        return problems

    def _params(self) -> dict[str, Any]:
        return {}

    def to_json(self) -> dict[str, Any]:
        doc: dict[str, Any] = {"kind": self.kind, **self._params()}
        if self.modulus is not None:
            doc["modulus"] = self.modulus.source
        if self.square_modulus is not None:
            doc["squareModulus"] = self.square_modulus.source
        return doc

    def label(self) -> str:
        args = ",".join(str(v) if not isinstance(v, list) else "[" + ",".join(v) + "]" for v in self._params().values())
        return f"{self.kind}({args})" if args else self.kind


def _frac_str(q: Fraction) -> str:
    return str(q)


@dataclass(frozen=True, kw_only=True)
class Zeros(SequenceSpec):
    kind: ClassVar[str] = "zeros"

    def value(self, i: int) -> Fraction:
        return Fraction(0)

    def abs_tail(self, m: int) -> Fraction:
        return Fraction(0)

    def square_tail(self, m: int) -> Fraction:
        return Fraction(0)


@dataclass(frozen=True, kw_only=True)
class Spike(SequenceSpec):
    """Zero everywhere except ``x[index] = value``."""

    kind: ClassVar[str] = "spike"
    index: int
    value_at: Fraction

    def value(self, i: int) -> Fraction:
        return self.value_at if i == self.index else Fraction(0)

    def abs_tail(self, m: int) -> Fraction:
        return abs(self.value_at) if m <= self.index else Fraction(0)

    def square_tail(self, m: int) -> Fraction:
        return self.value_at**2 if m <= self.index else Fraction(0)

    def _params(self) -> dict[str, Any]:
        return {"index": self.index, "value": _frac_str(self.value_at)}


@dataclass(frozen=True, kw_only=True)
class FiniteList(SequenceSpec):
    """The listed values followed by zeros."""

    kind: ClassVar[str] = "finiteList"
    entries: tuple[Fraction, ...]

    def value(self, i: int) -> Fraction:
        return self.entries[i] if i < len(self.entries) else Fraction(0)

    def abs_tail(self, m: int) -> Fraction:
        return sum((abs(v) for v in self.entries[m:]), Fraction(0))

    def square_tail(self, m: int) -> Fraction:
        return sum((v * v for v in self.entries[m:]), Fraction(0))

    def _params(self) -> dict[str, Any]:
        return {"values": [_frac_str(v) for v in self.entries]}


@dataclass(frozen=True, kw_only=True)
class Geometric(SequenceSpec):
    """``x_k = ratio**k``."""

    kind: ClassVar[str] = "geometric"
    ratio: Fraction

    def value(self, i: int) -> Fraction:
        return self.ratio**i

    def abs_tail(self, m: int) -> Fraction | None:
        r = abs(self.ratio)
        if r >= 1:
            return None
        return r**m / (1 - r)

    def square_tail(self, m: int) -> Fraction | None:
        r = self.ratio**2
        if r >= 1:
            return None
        return r**m / (1 - r)

    def check_moduli(self, upto: int = MODULUS_CHECK_RANGE) -> list[str]:
        if abs(self.ratio) >= 1 and (self.modulus is not None or self.square_modulus is not None):
            return [f"ratio {self.ratio} is not summable, so no modulus exists"]
        return super().check_moduli(upto)

    def _params(self) -> dict[str, Any]:
        return {"ratio": _frac_str(self.ratio)}


@dataclass(frozen=True, kw_only=True)
class PerIndex(SequenceSpec):
    """``x_k`` given by an index expression; moduli are taken on trust."""

    kind: ClassVar[str] = "perIndex"
    expr: Expr

    def value(self, i: int) -> Fraction:
        try:
            return self.expr(i)
        except ZeroDivisionError as exc:
            raise SpecError(f"{self.expr.source!r} is undefined at k={i}") from exc

    def _params(self) -> dict[str, Any]:
        return {"expr": self.expr.source}

    def label(self) -> str:
        return f"perIndex({self.expr.source})"


_TOTALITY_CHECK_RANGE = 64


def spec_from_json(doc: dict[str, Any] | str) -> SequenceSpec:
    """Build a spec from its JSON document (a dict or a JSON string)."""
    if isinstance(doc, str):
        try:
            doc = json.loads(doc)
        except json.JSONDecodeError as exc:
            raise SpecError(f"invalid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise SpecError("a sequence spec must be a JSON object")
    doc = dict(doc)
    kind = doc.pop("kind", None)
    common: dict[str, Any] = {}
    for key, attr in (("modulus", "modulus"), ("squareModulus", "square_modulus")):
        if key in doc:
            common[attr] = Expr(str(doc.pop(key)))
    try:
        if kind == "zeros":
            spec: SequenceSpec = Zeros(**common)
        elif kind == "spike":
            index = doc.pop("index")
            if not isinstance(index, int) or index < 0:
                raise SpecError("spike index must be a natural number")
            spec = Spike(index=index, value_at=parse_number(doc.pop("value")), **common)
        elif kind == "finiteList":
            spec = FiniteList(entries=tuple(parse_number(v) for v in doc.pop("values")), **common)
        elif kind == "geometric":
            spec = Geometric(ratio=parse_number(doc.pop("ratio")), **common)
        elif kind == "perIndex":
            spec = PerIndex(expr=Expr(str(doc.pop("expr"))), **common)
        else:
            raise SpecError(f"unknown sequence kind {kind!r}")
    except KeyError as exc:
        raise SpecError(f"{kind} spec lacks field {exc.args[0]!r}") from exc
    except (TypeError, ValueError) as exc:
        if isinstance(exc, SpecError):
            raise
        raise SpecError(str(exc)) from exc
    if doc:
        raise SpecError(f"unexpected fields {sorted(doc)} for kind {kind!r}")
    if isinstance(spec, PerIndex):
        for k in range(_TOTALITY_CHECK_RANGE):
            try:
                spec.value(k)
            except ZeroDivisionError as exc:
                raise SpecError(f"expression {spec.expr.source!r} undefined at k={k}") from exc
    for mod in (spec.modulus, spec.square_modulus):
        if mod is not None:
            for k in range(MODULUS_CHECK_RANGE + 1):
                try:
                    mod(k)
                except ZeroDivisionError as exc:
                    raise SpecError(f"modulus {mod.source!r} undefined at k={k}") from exc
    problems = spec.check_moduli()
    if problems:
        raise SpecError("; ".join(problems[:3]))
    return spec


def load_spec(path: str | Path) -> SequenceSpec:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise SpecError(f"cannot read {path}: {exc.strerror}") from exc
    return spec_from_json(text)


# -- names ---------------------------------------------------------------

STYLES = ("standard", "leftApprox", "seeded")
_SEEDED = re.compile(r"^seeded\((\d+)\)$")


def _seed_choice(seed: int, i: int, j: int, options: int) -> int:
    digest = hashlib.blake2b(f"{seed}:{i}:{j}".encode(), digest_size=8).digest()
    return int.from_bytes(digest, "big") % options


class SequenceName:
    """A regular oracle for a sequence spec.

    The answer to coordinate ``i`` at precision ``j`` is ``0^i`` followed by the
    code of a dyadic ``r`` with ``|r - x_i| <= 2**-j``, padded to the length
    schedule entry for queries of length ``i + j + 1``.  The schedule is an
    a-priori bound derived from ``B(m)``, the largest bit length of
    ``ceil|x_i|`` over ``i < m`` (raised to ``magnitude_floor``), so answer
    lengths depend on the query length only and the word function is regular.

    Styles:

    ``standard``
        truncation of ``x_i * 2**j`` toward zero;
    ``leftApprox``
        the floor, so answers never exceed ``x_i``;
    ``seeded``
        a seed-determined legal neighbour of the standard answer
        (seed 0 reproduces ``standard``).
    """

    def __init__(self, spec: SequenceSpec, style: str = "standard", seed: int = 0, magnitude_floor: int = 0):
        if style not in STYLES:
            raise ValueError(f"unknown representation style {style!r}")
        if seed < 0:
            raise ValueError("seed must be non-negative")
        self.spec = spec
        self.style = style
        self.seed = seed
        self.magnitude_floor = magnitude_floor
        self._mag: list[int] = [magnitude_floor]  # _mag[m] = B(m)
        self._lock = threading.Lock()

    # -- identity ---------------------------------------------------------

    @property
    def style_label(self) -> str:
        return f"seeded({self.seed})" if self.style == "seeded" else self.style

    @property
    def id(self) -> str:
        suffix = f"^{self.magnitude_floor}" if self.magnitude_floor else ""
        return f"{self.spec.label()}#{self.style_label}{suffix}"

    def __repr__(self) -> str:
        return f"SequenceName({self.id})"

    # -- approximation ----------------------------------------------------

    def approx(self, i: int, j: int) -> Dyadic:
        """The dyadic this name reports for coordinate ``i`` at precision ``j``."""
        if i < 0 or j < 0:
            raise ValueError("queries address natural numbers")
        x = self.spec.value(i)
        scaled = x * (1 << j)
        if self.style == "leftApprox":
            return Dyadic(math.floor(scaled), -j)
        t = math.trunc(scaled)
        if self.style == "seeded" and self.seed:
            options = [c for c in (t - 1, t, t + 1) if abs(c - scaled) <= 1]
            t = options[_seed_choice(self.seed, i, j, len(options))]
        return Dyadic(t, -j)

    # -- length schedule --------------------------------------------------

    def _magnitude_bits(self, m: int) -> int:
        """``B(m)``: max bit length of ``ceil|x_i|`` for ``i < m``, at least the floor."""
        mag = self._mag
        if m < len(mag):
            return mag[m]
        with self._lock:
            while len(mag) <= m:
                i = len(mag) - 1
                bits = math.ceil(abs(self.spec.value(i))).bit_length()
                mag.append(max(mag[-1], bits))
            return mag[m]

    def schedule(self, m: int) -> int:
        """Padded answer length for query words of length ``m``."""
        m = max(m, 1)
        b = self._magnitude_bits(m)
        # i + j = m - 1, |x_i| < 2^b: mantissa bits <= b + j + 1, |exponent| <= max(j, b)
        raw = code_length_bound(b + 1, max(m - 1, b)) + 2 * (m - 1)
        return raw + 1

    # -- words ------------------------------------------------------------

    def answer(self, i: int, j: int) -> Word:
        code = "0" * i + encode_dyadic(self.approx(i, j))
        return pad_to(code, self.schedule(i + j + 1))

    def respond(self, w: Word) -> Word:
        """The regular word function: any word is read as a query."""
        i, j = parse_query(w)
        code = "0" * i + encode_dyadic(self.approx(i, j))
        return pad_to(code, self.schedule(len(w)))

    def regular_fn(self) -> RegularFn:
        return RegularFn(self.respond, self.schedule)

    @staticmethod
    def read(i: int, w: Word) -> Dyadic:
        """Decode an answer word for coordinate ``i``."""
        body = unpad(w)
        if not body.startswith("0" * i):
            raise MalformedCode(f"answer lacks the 0^{i} coordinate prefix")
        return decode_dyadic(body[i:])


def name_from_spec(spec: SequenceSpec) -> SequenceName:
    return SequenceName(spec)


def left_approx_name(spec: SequenceSpec) -> SequenceName:
    return SequenceName(spec, style="leftApprox")


def perturb_representation(name: SequenceName, seed: int) -> SequenceName:
    """Same sequence, answers moved to a seed-chosen legal neighbour."""
    return SequenceName(name.spec, style="seeded", seed=seed, magnitude_floor=name.magnitude_floor)


def make_name(spec: SequenceSpec, style: str = "standard", magnitude_floor: int = 0) -> SequenceName:
    """Build a name from a style label such as ``"leftApprox"`` or ``"seeded(3)"``."""
    m = _SEEDED.match(style)
    if m:
        return SequenceName(spec, "seeded", int(m.group(1)), magnitude_floor)
    return SequenceName(spec, style, 0, magnitude_floor)

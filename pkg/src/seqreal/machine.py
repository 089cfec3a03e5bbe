"""Instrumented oracle-machine runtime and second-order polynomials.

A :class:`Functional` is a deterministic procedure ``body(oracle, n)`` that
returns a :class:`~seqreal.numerics.Dyadic` within ``2**-n`` of ``f(x)``.  It
sees the input only through an :class:`Oracle` handle, which logs every
query, so the :class:`QueryTrace` returned by :func:`run` is complete.

Cost model (fixed so bound reports are comparable)::

    cost = sum over queries (1 + |query word| + |answer word|)
         + sum over arithmetic operations (1 + operand bit length)

where the arithmetic part is whatever the functional's dyadic and rational
operations charge to the active :class:`~seqreal.numerics.Meter`.
"""

from __future__ import annotations

import ast
import json
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Optional, Sequence

from .encoding import Word, query_word, size_of
from .names import SequenceName
from .numerics import Dyadic, metered

__all__ = [
    "Functional",
    "Oracle",
    "Query",
    "QueryTrace",
    "QueryBudgetExceeded",
    "run",
    "cord_of",
    "SecondOrderPoly",
    "parse_sop",
    "eval_sop",
    "BoundReport",
    "check_bound",
]


class QueryBudgetExceeded(RuntimeError):
    """A run tried to submit more queries than its budget allows."""

    def __init__(self, budget: int):
        super().__init__(f"query budget of {budget} exhausted")
        self.budget = budget


Body = Callable[[Any, int], Dyadic]


@dataclass(frozen=True)
class Functional:
    """A computable ``f: R^N -> R`` packaged as an oracle procedure.

    ``query_bound`` is the declared ``l`` of a bounded-query functional.
    ``alternative`` is an independent implementation of the same function,
    used for machine-independence checks.  ``claims`` optionally gives the
    exact value (on sequence specs) the functional says it approximates.
    """

    id: str
    body: Body
    query_bound: Optional[int] = None
    alternative: Optional["Functional"] = None
    claims: Optional[Callable[[Any], Any]] = None
    doc: str = ""

    def __call__(self, oracle: Any, n: int) -> Dyadic:
        return self.body(oracle, n)


@dataclass(frozen=True)
class Query:
    i: int
    j: int
    response: Word


@dataclass
class QueryTrace:
    functional: str
    name: str
    n: int
    queries: list[Query] = field(default_factory=list)
    cost: int = 0

    @property
    def cord(self) -> frozenset[int]:
        return cord_of(self)

    def coordinates(self) -> list[int]:
        """Coordinates in submission order, repeats included."""
        return [q.i for q in self.queries]

    def to_dict(self) -> dict[str, Any]:
        return {
            "functional": self.functional,
            "name": self.name,
            "n": self.n,
            "queries": [{"i": q.i, "j": q.j, "response": q.response} for q in self.queries],
            "cord": sorted(self.cord),
            "cost": self.cost,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, doc: dict[str, Any]) -> "QueryTrace":
        trace = cls(
            functional=doc["functional"],
            name=doc["name"],
            n=doc["n"],
            queries=[Query(q["i"], q["j"], q["response"]) for q in doc["queries"]],
            cost=doc["cost"],
        )
        if sorted(trace.cord) != list(doc.get("cord", sorted(trace.cord))):
            raise ValueError("cord field disagrees with the query list")
        return trace

    @classmethod
    def from_json(cls, text: str) -> "QueryTrace":
        return cls.from_dict(json.loads(text))


class Oracle:
    """The only channel between a functional and its input name.

    ``query(i, j)`` submits the word ``0^i 1 0^j``, records the answer word
    and returns the decoded dyadic.
    """

    def __init__(self, name: SequenceName, budget: int | None = None):
        self.name = name
        self.budget = budget
        self.queries: list[Query] = []
        self.cost = 0

    def query(self, i: int, j: int) -> Dyadic:
        if not (isinstance(i, int) and isinstance(j, int)) or i < 0 or j < 0:
            raise ValueError(f"invalid query ({i!r}, {j!r})")
        if self.budget is not None and len(self.queries) >= self.budget:
            raise QueryBudgetExceeded(self.budget)
        word = query_word(i, j)
        response = self.name.respond(word)
        self.queries.append(Query(i, j, response))
        self.cost += 1 + len(word) + len(response)
        return self.name.read(i, response)


def run(f: Functional, name: SequenceName, n: int, budget: int | None = None) -> tuple[Dyadic, QueryTrace]:
    """Run ``f`` on ``name`` at precision ``n`` and return its output and full trace.

    If the functional raises, the exception propagates with the partial trace
    attached as its ``trace`` attribute.
    """
    if n < 0:
        raise ValueError("precision must be non-negative")
    oracle = Oracle(name, budget)
    trace = QueryTrace(f.id, name.id, n, oracle.queries)
    with metered() as meter:
        try:
            out = f.body(oracle, n)
        except Exception as exc:
            trace.cost = oracle.cost + meter.cost
            exc.trace = trace  # type: ignore[attr-defined]
            raise
    if not isinstance(out, Dyadic):
        raise TypeError(f"functional {f.id} returned {type(out).__name__}, not Dyadic")
    trace.cost = oracle.cost + meter.cost
    return out, trace


def cord_of(trace: QueryTrace) -> frozenset[int]:
    """The set of coordinates touched by a run."""
    return frozenset(q.i for q in trace.queries)


# -- second-order polynomials --------------------------------------------


class SecondOrderPoly:
    """Polynomial terms over one first-order variable and one function variable ``f``.

    Built from naturals, the variable, ``+``, ``*`` and ``f(P)``.  The tree is
    a nested tuple: ``("const", c)``, ``("var",)``, ``("add", P, Q)``,
    ``("mul", P, Q)``, ``("app", P)``.
    """

    __slots__ = ("tree",)

    def __init__(self, tree: tuple):
        self.tree = tree

    @staticmethod
    def const(c: int) -> "SecondOrderPoly":
        if c < 0:
            raise ValueError("constants are natural numbers")
        return SecondOrderPoly(("const", c))

    @staticmethod
    def var() -> "SecondOrderPoly":
        return SecondOrderPoly(("var",))

    def __add__(self, other: "SecondOrderPoly | int") -> "SecondOrderPoly":
        return SecondOrderPoly(("add", self.tree, _lift(other).tree))

    __radd__ = __add__

    def __mul__(self, other: "SecondOrderPoly | int") -> "SecondOrderPoly":
        return SecondOrderPoly(("mul", self.tree, _lift(other).tree))

    __rmul__ = __mul__

    def apply(self) -> "SecondOrderPoly":
        """``f(self)``."""
        return SecondOrderPoly(("app", self.tree))

    def __call__(self, f: Callable[[int], int], x: int) -> int:
        return eval_sop(self, f, x)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, SecondOrderPoly) and other.tree == self.tree

    def __hash__(self) -> int:
        return hash(self.tree)

    def __str__(self) -> str:
        return _render(self.tree)

    def __repr__(self) -> str:
        return f"SecondOrderPoly({_render(self.tree)!r})"


def _lift(p: "SecondOrderPoly | int") -> SecondOrderPoly:
    return p if isinstance(p, SecondOrderPoly) else SecondOrderPoly.const(p)


def _render(t: tuple) -> str:
    tag = t[0]
    if tag == "const":
        return str(t[1])
    if tag == "var":
        return "x"
    if tag == "app":
        return f"f({_render(t[1])})"
    op = " + " if tag == "add" else " * "
    return f"({_render(t[1])}{op}{_render(t[2])})"


def eval_sop(p: SecondOrderPoly, f: Callable[[int], int], x: int) -> int:
    """Structural evaluation of ``P(f, x)``."""

    def ev(t: tuple) -> int:
        tag = t[0]
        if tag == "const":
            return t[1]
        if tag == "var":
            return x
        if tag == "add":
            return ev(t[1]) + ev(t[2])
        if tag == "mul":
            return ev(t[1]) * ev(t[2])
        return f(ev(t[1]))

    return ev(p.tree)


def parse_sop(text: str) -> SecondOrderPoly:
    """Parse an expression such as ``"f(x+2) + f(f(x)*f(x)) + x*x + 4"``.

    The first-order variable may be written ``x`` or ``n``; ``^`` with a
    natural constant exponent expands to repeated products.
    """
    source = text.replace("^", "**")
    try:
        tree = ast.parse(source, mode="eval").body
    except SyntaxError as exc:
        raise ValueError(f"cannot parse second-order polynomial {text!r}") from exc

    def build(node: ast.AST) -> SecondOrderPoly:
        if isinstance(node, ast.Constant) and isinstance(node.value, int) and node.value >= 0:
            return SecondOrderPoly.const(node.value)
        if isinstance(node, ast.Name) and node.id in ("x", "n"):
            return SecondOrderPoly.var()
        if isinstance(node, ast.Call) and isinstance(node.func, ast.Name) and node.func.id == "f":
            if len(node.args) != 1 or node.keywords:
                raise ValueError("f takes exactly one argument")
            return build(node.args[0]).apply()
        if isinstance(node, ast.BinOp):
            if isinstance(node.op, ast.Add):
                return build(node.left) + build(node.right)
            if isinstance(node.op, ast.Mult):
                return build(node.left) * build(node.right)
            if isinstance(node.op, ast.Pow):
                exp = node.right
                if not (isinstance(exp, ast.Constant) and isinstance(exp.value, int) and exp.value >= 1):
                    raise ValueError("exponents must be positive integer constants")
                base = build(node.left)
                out = base
                for _ in range(exp.value - 1):
                    out = out * base
                return out
        raise ValueError(f"unsupported term in second-order polynomial {text!r}")

    return build(tree)


# -- bound checking ------------------------------------------------------


@dataclass(frozen=True)
class BoundViolation:
    name: str
    n: int
    cost: int
    bound: int


@dataclass
class BoundReport:
    functional: str
    polynomial: str
    checked: int = 0
    violations: list[BoundViolation] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict[str, Any]:
        return {
            "functional": self.functional,
            "polynomial": self.polynomial,
            "checked": self.checked,
            "passed": self.passed,
            "violations": [v.__dict__ for v in self.violations],
        }


def check_bound(
    f: Functional,
    p: SecondOrderPoly,
    names: Iterable[SequenceName],
    precisions: Sequence[int],
) -> BoundReport:
    """Compare every run's cost with ``P(|name|, n)``; violations are reported, not raised."""
    report = BoundReport(f.id, str(p))
    for name in names:
        fn = name.regular_fn()

        def size(m: int, fn=fn) -> int:
            return size_of(fn, m)

        for n in precisions:
            _, trace = run(f, name, n)
            bound = eval_sop(p, size, n)
            report.checked += 1
            if trace.cost > bound:
                report.violations.append(BoundViolation(name.id, n, trace.cost, bound))
    return report

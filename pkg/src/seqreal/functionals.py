"""Concrete functionals over R^N and the metrics d1, d2 and D.

Every library functional comes with an independent second implementation
(``Functional.alternative``) that computes the same function with a
different evaluation order, for machine-independence checks.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

from .machine import Functional, Oracle
from .names import SequenceName, SequenceSpec, make_name
from .numerics import (
    ZERO,
    Dyadic,
    alpha,
    exp2_neg,
    isqrt_approx,
    parse_dyadic,
    rat_approx,
    round_to,
)

__all__ = [
    "tail_sum",
    "shifted_tail_sum",
    "constant",
    "projection",
    "FiniteFunction",
    "AVERAGE",
    "SUM",
    "MAX_ABS",
    "finite_combo",
    "fake_sup",
    "fake_weighted",
    "fake_trunc_l1",
    "shift_lower_bound",
    "shifted_truncation",
    "SHIFT_PROBE",
    "resolve_functional",
    "UnknownFunctional",
    "MetricApproxRequest",
    "metric_lower",
    "metric_full",
    "product_metric_d",
    "product_metric_lower",
    "approximate",
]


# -- f(x) = sum_k alpha(x_k) / 2^k ---------------------------------------


def _tail_sum(oracle: Oracle, n: int) -> Dyadic:
    # coordinate k at precision n+k+3: term errors sum below 2^-n/3,
    # the ignored tail k >= n+2 is below 2^-(n+1)
    acc = ZERO
    for k in range(n + 2):
        p = n + k + 3
        a = oracle.query(k, p)
        acc = acc + rat_approx(alpha(a), p).shift(-k)
    return round_to(acc, n + 3)


def _tail_sum_reversed(oracle: Oracle, n: int) -> Dyadic:
    total = Fraction(0)
    for k in reversed(range(n + 2)):
        a = oracle.query(k, n + k + 3)
        total += alpha(a) / 2**k
    return rat_approx(total, n + 3)


# -- g(x) = sum_k alpha(x_k) / 2^(k + |x_0|) -----------------------------


SHIFT_PROBE = 8


def shift_lower_bound(a: Dyadic) -> int:
    """Integer ``lam <= |x_0|`` from an answer ``a`` with ``|a - x_0| <= 2**-SHIFT_PROBE``.

    ``floor(|a| + 1/2) - 1`` is the same for every legal answer unless
    ``|x_0|`` lies within ``2**-SHIFT_PROBE`` of a half-integer, so the
    truncation point (and the cord) is representation-free off that thin set.
    No terminating rule avoids such boundary points entirely.
    """
    half_up = math.floor(abs(a.to_fraction()) + Fraction(1, 2))
    return max(0, half_up - 1)


def shifted_truncation(n: int, lam: int) -> int:
    """Number of leading coordinates summed at precision ``n``."""
    return max(0, n + 2 - lam)


def _shifted_tail_sum(oracle: Oracle, n: int) -> Dyadic:
    lam = shift_lower_bound(oracle.query(0, SHIFT_PROBE))
    K = shifted_truncation(n, lam)
    if K == 0:
        return ZERO  # g(x) < 2^(1-|x_0|) <= 2^-(n+1)
    p = n + 6
    a0 = oracle.query(0, p)
    weight = exp2_neg(abs(a0), p)
    acc = rat_approx(alpha(a0), p)
    for k in range(1, K):
        a = oracle.query(k, p + k)
        acc = acc + rat_approx(alpha(a), p + k).shift(-k)
    return round_to(acc * weight, n + 4)


def _shifted_tail_sum_reversed(oracle: Oracle, n: int) -> Dyadic:
    lam = shift_lower_bound(oracle.query(0, SHIFT_PROBE))
    K = shifted_truncation(n, lam)
    if K == 0:
        return ZERO
    p = n + 6
    total = Fraction(0)
    for k in range(K - 1, 0, -1):
        total += alpha(oracle.query(k, p + k)) / 2**k
    a0 = oracle.query(0, p)
    total += alpha(a0)
    weight = exp2_neg(abs(a0), p)
    return round_to(rat_approx(total, p) * weight, n + 4)


tail_sum = Functional(
    "tailsum",
    _tail_sum,
    alternative=Functional("tailsum-alt", _tail_sum_reversed),
    doc="sum_k alpha(x_k)/2^k; queries exactly coordinates 0..n+1",
)

shifted_tail_sum = Functional(
    "shifted-tailsum",
    _shifted_tail_sum,
    alternative=Functional("shifted-tailsum-alt", _shifted_tail_sum_reversed),
    doc="sum_k alpha(x_k)/2^(k+|x_0|); truncation depends on x_0",
)


# -- constants and projections -------------------------------------------


def constant(c: Dyadic | int = 0) -> Functional:
    value = c if isinstance(c, Dyadic) else Dyadic(c)

    def body(oracle: Oracle, n: int) -> Dyadic:
        return value

    def body_alt(oracle: Oracle, n: int) -> Dyadic:
        return round_to(value, max(0, -value.exponent))

    ident = "const0" if value.is_zero() else f"const:{value}"
    return Functional(ident, body, query_bound=0, alternative=Functional(ident + "-alt", body_alt, query_bound=0))


def projection(i: int) -> Functional:
    """``x -> x_i``: one query, coordinate ``i``."""
    if i < 0:
        raise ValueError("coordinates are natural numbers")

    def body(oracle: Oracle, n: int) -> Dyadic:
        return oracle.query(i, n)

    def body_alt(oracle: Oracle, n: int) -> Dyadic:
        return round_to(oracle.query(i, n + 1), n + 1)

    return Functional(f"proj{i}", body, query_bound=1, alternative=Functional(f"proj{i}-alt", body_alt, query_bound=1))


# -- finite combinations -------------------------------------------------

Arg = Callable[[int], Dyadic]


@dataclass(frozen=True)
class FiniteFunction:
    """A computable ``phi: R^l -> R`` over argument oracles ``j -> Dyadic``.

    ``body(args, n)`` must return a value within ``2**-n`` of
    ``phi(x_1, ..., x_l)`` and query each argument at most
    ``queries_per_arg`` times.
    """

    name: str
    body: Callable[[Sequence[Arg], int], Dyadic]
    queries_per_arg: int = 1

    def __call__(self, args: Sequence[Arg], n: int) -> Dyadic:
        return self.body(args, n)


def _average(args: Sequence[Arg], n: int) -> Dyadic:
    if not args:
        return ZERO
    total = sum((arg(n + 1) for arg in args), ZERO)
    return rat_approx(total.to_fraction() / len(args), n + 1)


def _sum(args: Sequence[Arg], n: int) -> Dyadic:
    p = n + len(args).bit_length()
    return sum((arg(p) for arg in args), ZERO)


def _max_abs(args: Sequence[Arg], n: int) -> Dyadic:
    return max((abs(arg(n)) for arg in args), default=ZERO)


AVERAGE = FiniteFunction("avg", _average)
SUM = FiniteFunction("sum", _sum)
MAX_ABS = FiniteFunction("maxabs", _max_abs)
FINITE_FUNCTIONS = {f.name: f for f in (AVERAGE, SUM, MAX_ABS)}


def finite_combo(coords: Sequence[int], phi: FiniteFunction) -> Functional:
    """``x -> phi(x_{c_1}, ..., x_{c_l})`` querying only the listed coordinates."""
    coords = tuple(coords)
    if any(c < 0 for c in coords):
        raise ValueError("coordinates are natural numbers")

    def body(oracle: Oracle, n: int) -> Dyadic:
        return phi([lambda j, c=c: oracle.query(c, j) for c in coords], n)

    def body_alt(oracle: Oracle, n: int) -> Dyadic:
        cache: dict[tuple[int, int], Dyadic] = {}

        def arg_for(c: int) -> Arg:
            def arg(j: int) -> Dyadic:
                if (c, j) not in cache:
                    cache[c, j] = oracle.query(c, j)
                return cache[c, j]

            return arg

        return phi([arg_for(c) for c in coords], n)

    ident = f"{phi.name}:{','.join(map(str, coords))}"
    bound = len(coords) * phi.queries_per_arg
    return Functional(ident, body, query_bound=bound, alternative=Functional(ident + "-alt", body_alt, query_bound=bound))


# -- candidate norms for the falsifier -----------------------------------


def _exact_l1(spec: SequenceSpec) -> Fraction | None:
    return spec.abs_tail(0)


def fake_sup(k: int = 3) -> Functional:
    """``max_{i <= k} |x_i|``: a seminorm that ignores coordinates beyond ``k``."""

    def body(oracle: Oracle, n: int) -> Dyadic:
        return max(abs(oracle.query(i, n)) for i in range(k + 1))

    return Functional(f"fake-sup{k}", body, query_bound=k + 1)


def fake_weighted(k: int) -> Functional:
    """``sum_{i <= k} 2^-i |x_i|``."""

    def body(oracle: Oracle, n: int) -> Dyadic:
        acc = ZERO
        for i in range(k + 1):
            acc = acc + abs(oracle.query(i, n + 2)).shift(-i)
        return acc

    return Functional(f"fake-weighted{k}", body, query_bound=k + 1)


def _trunc_l1(oracle: Oracle, n: int) -> Dyadic:
    p = n + (n + 1).bit_length()
    acc = ZERO
    for i in range(n + 1):
        acc = acc + abs(oracle.query(i, p))
    return acc


fake_trunc_l1 = Functional(
    "fake-trunc-l1",
    _trunc_l1,
    claims=_exact_l1,
    doc="sum_{i <= n} |x_i|, presented as the l1 norm",
)


# -- registry ------------------------------------------------------------


class UnknownFunctional(KeyError):
    pass


_FIXED = {
    "tailsum": tail_sum,
    "tailsum-alt": tail_sum.alternative,
    "shifted-tailsum": shifted_tail_sum,
    "shifted-tailsum-alt": shifted_tail_sum.alternative,
    "fake-trunc-l1": fake_trunc_l1,
}


def resolve_functional(ident: str) -> Functional:
    """Look up a functional by id.

    Recognised ids: ``tailsum``, ``shifted-tailsum`` (and their ``-alt``
    twins), ``const0``, ``const:<dyadic>``, ``proj<i>``,
    ``avg:<i,j,...>``, ``sum:<...>``, ``maxabs:<...>``, ``fake-sup<k>``,
    ``fake-weighted<k>`` and ``fake-trunc-l1``.
    """
    if ident in _FIXED:
        return _FIXED[ident]  # type: ignore[return-value]
    if ident == "const0":
        return constant(0)
    if m := re.fullmatch(r"const:(.+)", ident):
        try:
            return constant(parse_dyadic(m.group(1)))
        except ValueError as exc:
            raise UnknownFunctional(ident) from exc
    if m := re.fullmatch(r"proj(\d+)", ident):
        return projection(int(m.group(1)))
    if m := re.fullmatch(r"(\w+):(\d+(?:,\d+)*)?", ident):
        phi = FINITE_FUNCTIONS.get(m.group(1))
        if phi is not None:
            coords = [int(c) for c in m.group(2).split(",")] if m.group(2) else []
            return finite_combo(coords, phi)
    if m := re.fullmatch(r"fake-sup(\d+)", ident):
        return fake_sup(int(m.group(1)))
    if m := re.fullmatch(r"fake-weighted(\d+)", ident):
        return fake_weighted(int(m.group(1)))
    raise UnknownFunctional(ident)


# -- metrics -------------------------------------------------------------

METRICS = ("d1", "d2", "D")


@dataclass(frozen=True)
class MetricApproxRequest:
    """One metric evaluation: ``truncate`` selects the lower bound, else ``precision``."""

    spec_x: SequenceSpec
    spec_y: SequenceSpec
    metric: str
    truncate: int | None = None
    precision: int | None = None
    root: bool = False

    def __post_init__(self) -> None:
        if self.metric not in METRICS:
            raise ValueError(f"unknown metric {self.metric!r}")
        if (self.truncate is None) == (self.precision is None):
            raise ValueError("give exactly one of truncate and precision")


def _term(metric: str, x: Fraction, y: Fraction) -> Fraction:
    return abs(x - y) if metric == "d1" else (x - y) ** 2


def metric_lower(spec_x: SequenceSpec, spec_y: SequenceSpec, metric: str, M: int) -> Fraction:
    """Exact truncation ``sum_{i <= M}`` of d1 or d2; never exceeds the full metric."""
    if metric not in ("d1", "d2"):
        raise ValueError("metric_lower handles d1 and d2; use product_metric_lower for D")
    return sum((_term(metric, spec_x.value(i), spec_y.value(i)) for i in range(M + 1)), Fraction(0))


def metric_full(spec_x: SequenceSpec, spec_y: SequenceSpec, metric: str, n: int, root: bool = False) -> Dyadic:
    """d1 or d2 within ``2**-n``, using the specs' moduli to place the truncation.

    d2 is the plain sum of squared differences; ``root=True`` returns its
    square root instead, still within ``2**-n``.
    """
    if n < 0:
        raise ValueError("precision must be non-negative")
    if metric == "d1":
        if root:
            raise ValueError("root applies to d2 only")
        N = max(spec_x.summability_modulus(n + 2), spec_y.summability_modulus(n + 2))
    elif metric == "d2":
        if root:
            return isqrt_approx(metric_full(spec_x, spec_y, "d2", 2 * n + 2), n + 1)
        # sum (x-y)^2 <= 2 sum x^2 + 2 sum y^2 <= 4 * 2^-(n+3)
        N = max(spec_x.square_summability_modulus(n + 3), spec_y.square_summability_modulus(n + 3))
    else:
        raise ValueError("metric_full handles d1 and d2; use product_metric_d for D")
    p = n + 1 + N.bit_length()  # N terms, each within 2^-p: head error below 2^-(n+1)
    acc = ZERO
    for i in range(N):
        acc = acc + rat_approx(_term(metric, spec_x.value(i), spec_y.value(i)), p)
    return acc


def product_metric_d(name_x: SequenceName, name_y: SequenceName, k: int) -> Dyadic:
    """``D(x, y) = sup_i min(|x_i - y_i|, 1) / (i + 1)`` within ``2**-k``.

    Indices ``i >= 2^(k+1)`` contribute less than ``2^-(k+1)``; each windowed
    term is accurate to ``3 * 2^-(k+3)``.
    """
    if k < 0:
        raise ValueError("precision must be non-negative")
    ox, oy = Oracle(name_x), Oracle(name_y)
    p = k + 3
    best = ZERO
    for i in range(2 ** (k + 1)):
        diff = abs(ox.query(i, p) - oy.query(i, p))
        capped = diff if diff < 1 else Dyadic(1)
        term = rat_approx(capped.to_fraction() / (i + 1), p)
        if term > best:
            best = term
    return best


def product_metric_lower(spec_x: SequenceSpec, spec_y: SequenceSpec, M: int) -> Fraction:
    """Exact ``max_{i <= M} min(|x_i - y_i|, 1) / (i + 1)``, a lower bound for D."""
    return max(
        (min(abs(spec_x.value(i) - spec_y.value(i)), Fraction(1)) / (i + 1) for i in range(M + 1)),
        default=Fraction(0),
    )


def approximate(req: MetricApproxRequest) -> Fraction | Dyadic:
    """Dispatch a :class:`MetricApproxRequest`."""
    if req.metric == "D":
        if req.truncate is not None:
            return product_metric_lower(req.spec_x, req.spec_y, req.truncate)
        return product_metric_d(make_name(req.spec_x), make_name(req.spec_y), req.precision)
    if req.truncate is not None:
        value = metric_lower(req.spec_x, req.spec_y, req.metric, req.truncate)
        if req.root:
            raise ValueError("root is only available with a precision")
        return value
    return metric_full(req.spec_x, req.spec_y, req.metric, req.precision, root=req.root)

"""Value lattices for constraint weights.

Two concrete quantales are provided:

* ``TWO`` — the Boolean chain 0 <= 1 with conjunction as tensor and
  implication as residual.  Relations weighted in ``TWO`` are ordinary
  crisp relations.

* ``RBAR`` — the extended rationals Q ∪ {±inf} ordered by the *reverse*
  of the numeric order (so +inf is the least element and -inf the
  greatest), with extended addition as tensor and extended subtraction
  as residual.  Lattice joins are numeric infima and lattice meets are
  numeric suprema.  Finite values are exact ``Fraction``s.

Both tensors are commutative, so the right extension and right lifting
residuals coincide; ``residual(a, b)`` is the largest ``x`` (in the
quantale order) with ``tensor(b, x) <= a``.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable

POS_INF = math.inf
NEG_INF = -math.inf


class QuantaleValue:
    """An element of one of the built-in quantales, tagged with its quantale.

    Immutable and hashable.  The payload is a ``bool`` for ``TWO`` and a
    ``Fraction`` or ``±math.inf`` for ``RBAR``.
    """

    __slots__ = ("quantale", "payload", "_hash")

    def __init__(self, quantale, payload):
        object.__setattr__(self, "quantale", quantale)
        object.__setattr__(self, "payload", payload)
        object.__setattr__(self, "_hash", hash((quantale.name, payload)))

    def __setattr__(self, name, value):
        raise AttributeError("QuantaleValue is immutable")

    def __eq__(self, other):
        return (
            isinstance(other, QuantaleValue)
            and self.quantale is other.quantale
            and self.payload == other.payload
        )

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"{self.quantale.name}({self.payload})"

    @property
    def is_bottom(self):
        return self == self.quantale.bottom

    @property
    def is_top(self):
        return self == self.quantale.top


class BoolQuantale:
    """The two-element quantale: 0 <= 1, tensor = conjunction."""

    name = "bool"

    def __init__(self):
        self.false = QuantaleValue(self, False)
        self.true = QuantaleValue(self, True)
        self.bottom = self.false
        self.top = self.true
        self.unit = self.true

    def of(self, x):
        return self.true if x else self.false

    def leq(self, a, b):
        return (not a.payload) or b.payload

    def tensor(self, a, b):
        return self.true if (a.payload and b.payload) else self.false

    def residual(self, a, b):
        # b => a
        return self.true if ((not b.payload) or a.payload) else self.false

    def join(self, values):
        out = False
        for v in values:
            out = out or v.payload
            if out:
                break
        return self.of(out)

    def meet(self, values):
        out = True
        for v in values:
            out = out and v.payload
            if not out:
                break
        return self.of(out)

    def __repr__(self):
        return "TWO"


class ExtRealQuantale:
    """Extended rationals under the reversed numeric order.

    bottom = +inf, top = -inf, unit = 0.  Tensor is extended addition
    (+inf absorbs everything, otherwise -inf absorbs); the residual
    ``a - b`` is the exact adjoint of addition, in particular
    ``anything - (+inf) = -inf`` and ``(+inf) - (+inf) = -inf``.
    """

    name = "extreal"

    def __init__(self):
        self.bottom = QuantaleValue(self, POS_INF)
        self.top = QuantaleValue(self, NEG_INF)
        self.unit = QuantaleValue(self, Fraction(0))
        self.pos_inf = self.bottom
        self.neg_inf = self.top

    def of(self, x):
        """Build a value from an int, Fraction, 'p/q' string or 'inf'/'-inf'."""
        if isinstance(x, QuantaleValue):
            if x.quantale is not self:
                raise ValueError("value belongs to a different quantale")
            return x
        if isinstance(x, str):
            s = x.strip()
            if s in ("inf", "+inf"):
                return self.pos_inf
            if s == "-inf":
                return self.neg_inf
            return QuantaleValue(self, Fraction(s))
        if isinstance(x, float):
            if x == POS_INF:
                return self.pos_inf
            if x == NEG_INF:
                return self.neg_inf
            raise ValueError(f"non-infinite float {x!r}; use int, Fraction or 'p/q'")
        return QuantaleValue(self, Fraction(x))

    def leq(self, a, b):
        # reversed order: a <= b in the quantale iff a >= b numerically
        return a.payload >= b.payload

    def tensor(self, a, b):
        pa, pb = a.payload, b.payload
        if pa == POS_INF or pb == POS_INF:
            return self.bottom
        if pa == NEG_INF or pb == NEG_INF:
            return self.top
        return QuantaleValue(self, pa + pb)

    def residual(self, a, b):
        pg, pb = a.payload, b.payload
        if pb == POS_INF or pg == NEG_INF:
            return self.top
        if pb == NEG_INF or pg == POS_INF:
            return self.bottom
        return QuantaleValue(self, pg - pb)

    def join(self, values):
        # quantale join = numeric inf
        best = POS_INF
        for v in values:
            if v.payload < best:
                best = v.payload
        return QuantaleValue(self, best) if best != POS_INF else self.bottom

    def meet(self, values):
        # quantale meet = numeric sup
        best = NEG_INF
        for v in values:
            if v.payload > best:
                best = v.payload
        return QuantaleValue(self, best) if best != NEG_INF else self.top

    def __repr__(self):
        return "RBAR"


TWO = BoolQuantale()
RBAR = ExtRealQuantale()


def _same(a: QuantaleValue, b: QuantaleValue):
    q = a.quantale
    if q is not b.quantale:
        raise ValueError(f"mixed quantales: {q.name} vs {b.quantale.name}")
    return q


def leq(a: QuantaleValue, b: QuantaleValue) -> bool:
    return _same(a, b).leq(a, b)


def tensor(a: QuantaleValue, b: QuantaleValue) -> QuantaleValue:
    return _same(a, b).tensor(a, b)


def residual(a: QuantaleValue, b: QuantaleValue) -> QuantaleValue:
    """The residual a/b: the largest x with tensor(b, x) <= a.

    Both built-in tensors are commutative, so this is simultaneously the
    right extension and the right lifting of a along b.
    """
    return _same(a, b).residual(a, b)


def join(values: Iterable[QuantaleValue], quantale=None) -> QuantaleValue:
    values = list(values)
    if quantale is None:
        if not values:
            raise ValueError("empty join needs an explicit quantale")
        quantale = values[0].quantale
    for v in values:
        if v.quantale is not quantale:
            raise ValueError("mixed quantales in join")
    return quantale.join(values)


def meet(values: Iterable[QuantaleValue], quantale=None) -> QuantaleValue:
    values = list(values)
    if quantale is None:
        if not values:
            raise ValueError("empty meet needs an explicit quantale")
        quantale = values[0].quantale
    for v in values:
        if v.quantale is not quantale:
            raise ValueError("mixed quantales in meet")
    return quantale.meet(values)


def is_finite(v: QuantaleValue) -> bool:
    return v.quantale is RBAR and isinstance(v.payload, Fraction)


def to_float(v: QuantaleValue) -> float:
    if v.quantale is TWO:
        return 1.0 if v.payload else 0.0
    return float(v.payload)


def quantale_by_name(name: str):
    if name == "bool":
        return TWO
    if name == "extreal":
        return RBAR
    raise ValueError(f"unknown quantale {name!r}")

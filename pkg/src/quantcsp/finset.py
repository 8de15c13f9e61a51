"""Finite sets, total functions, powers and guarded hom-set enumeration.

Sets compare by their element sequence (names are cosmetic), functions by
domain, codomain and lookup table.  Power sets use tuple labels in
lexicographic order of the component indices; the first power of a set is
the set itself, so unary operations are plain endofunctions.
"""

from __future__ import annotations

import itertools
import os
from typing import Optional, Sequence

from .errors import MismatchError, SizeExceeded

DEFAULT_ENUM_LIMIT = 10**6


def default_enum_limit() -> int:
    """Enumeration guard; override with the QUANTCSP_ENUM_LIMIT env var."""
    raw = os.environ.get("QUANTCSP_ENUM_LIMIT")
    if not raw:
        return DEFAULT_ENUM_LIMIT
    try:
        return int(raw)
    except ValueError:
        from .errors import FormatError

        raise FormatError(
            f"QUANTCSP_ENUM_LIMIT must be an integer, got {raw!r}"
        ) from None


class FiniteSet:
    """An ordered finite set of distinct labels (strings, ints or tuples)."""

    __slots__ = ("name", "elements", "_index", "_hash")

    def __init__(self, name, elements):
        elements = tuple(elements)
        index = {}
        for pos, label in enumerate(elements):
            if label in index:
                raise ValueError(f"duplicate label {label!r} in finite set {name!r}")
            index[label] = pos
        object.__setattr__(self, "name", name)
        object.__setattr__(self, "elements", elements)
        object.__setattr__(self, "_index", index)
        object.__setattr__(self, "_hash", hash(elements))

    def __setattr__(self, name, value):
        raise AttributeError("FiniteSet is immutable")

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, label):
        return label in self._index

    def index(self, label) -> int:
        try:
            return self._index[label]
        except KeyError:
            raise KeyError(f"{label!r} is not an element of {self.name}") from None

    def __eq__(self, other):
        return isinstance(other, FiniteSet) and self.elements == other.elements

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"FiniteSet({self.name!r}, {self.elements!r})"


def fin_range(k: int) -> FiniteSet:
    """The canonical k-element index set {1, ..., k}."""
    return FiniteSet(f"[{k}]", tuple(range(1, k + 1)))


class FnArrow:
    """A total function between finite sets, stored as a codomain-index table."""

    __slots__ = ("dom", "cod", "table", "_hash")

    def __init__(self, dom: FiniteSet, cod: FiniteSet, table: Sequence[int]):
        table = tuple(table)
        if len(table) != len(dom):
            raise ValueError(f"table length {len(table)} != |dom| {len(dom)}")
        ncod = len(cod)
        for i in table:
            if not (0 <= i < ncod):
                raise ValueError(f"table entry {i} outside codomain of size {ncod}")
        object.__setattr__(self, "dom", dom)
        object.__setattr__(self, "cod", cod)
        object.__setattr__(self, "table", table)
        object.__setattr__(self, "_hash", hash((dom._hash, cod._hash, table)))

    def __setattr__(self, name, value):
        raise AttributeError("FnArrow is immutable")

    def apply_index(self, i: int) -> int:
        return self.table[i]

    def __call__(self, label):
        return self.cod.elements[self.table[self.dom.index(label)]]

    def graph(self):
        """Pairs (domain label, codomain label) in domain order."""
        return [
            (x, self.cod.elements[i]) for x, i in zip(self.dom.elements, self.table)
        ]

    def __eq__(self, other):
        return (
            isinstance(other, FnArrow)
            and self.table == other.table
            and self.dom == other.dom
            and self.cod == other.cod
        )

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"FnArrow({self.dom.name}->{self.cod.name}, {self.table})"


def identity(A: FiniteSet) -> FnArrow:
    return FnArrow(A, A, range(len(A)))


def compose(g: FnArrow, f: FnArrow) -> FnArrow:
    """The composite g∘f; requires cod(f) = dom(g)."""
    if f.cod != g.dom:
        raise MismatchError(
            f"cannot compose: cod {f.cod.name} != dom {g.dom.name}"
        )
    gt = g.table
    return FnArrow(f.dom, g.cod, tuple(gt[i] for i in f.table))


def terminal_map(A: FiniteSet) -> FnArrow:
    """The unique map A -> [1]."""
    return FnArrow(A, fin_range(1), (0,) * len(A))


def tuple_arrow(labels: Sequence, cod: FiniteSet) -> FnArrow:
    """A k-tuple over cod as a function from the index set [k]."""
    labels = tuple(labels)
    return FnArrow(fin_range(len(labels)), cod, tuple(cod.index(x) for x in labels))


def arrow_labels(f: FnArrow) -> tuple:
    """The codomain labels of f in domain order (a tuple for tuple arrows)."""
    return tuple(f.cod.elements[i] for i in f.table)


def power(A: FiniteSet, n: int) -> FiniteSet:
    """The canonical n-th power of A.

    Elements are n-tuples of labels in lexicographic order of the
    component indices; power(A, 1) is A itself.
    """
    if n < 0:
        raise ValueError("negative power")
    if n == 1:
        return A
    elements = tuple(itertools.product(A.elements, repeat=n))
    return FiniteSet(f"{A.name}^{n}", elements)


def power_arity(P: FiniteSet, A: FiniteSet, max_arity: int = 16) -> Optional[int]:
    """The n with P = power(A, n), or None if P is no canonical power of A."""
    base = len(A)
    for n in range(max_arity + 1):
        size = base**n
        if base > 1 and size > len(P):
            return None
        if size == len(P) and P == power(A, n):
            return n
    return None


def projection(A: FiniteSet, n: int, i: int) -> FnArrow:
    """The i-th projection power(A, n) -> A, 1-based."""
    if not 1 <= i <= n:
        raise ValueError(f"projection index {i} out of range 1..{n}")
    P = power(A, n)
    if n == 1:
        return identity(A)
    return FnArrow(P, A, tuple(A.index(w[i - 1]) for w in P.elements))


def tupling(fs: Sequence[FnArrow]) -> FnArrow:
    """The tupling <f_1, ..., f_m> into the canonical power of the shared codomain."""
    if not fs:
        raise ValueError("tupling needs at least one component")
    dom = fs[0].dom
    cod = fs[0].cod
    for f in fs[1:]:
        if f.dom != dom or f.cod != cod:
            raise MismatchError("tupling components must be parallel")
    if len(fs) == 1:
        return fs[0]
    P = power(cod, len(fs))
    table = tuple(
        P.index(tuple(f.cod.elements[f.table[i]] for f in fs))
        for i in range(len(dom))
    )
    return FnArrow(dom, P, table)


def hom_size(A: FiniteSet, B: FiniteSet) -> int:
    return len(B) ** len(A)


def enumerate_hom(A: FiniteSet, B: FiniteSet, limit: Optional[int] = None):
    """All functions A -> B in lexicographic table order.

    Raises SizeExceeded when |B|^|A| exceeds the guard; callers must then
    fall back to lazy evaluation.
    """
    if limit is None:
        limit = default_enum_limit()
    size = hom_size(A, B)
    if size > limit:
        raise SizeExceeded(size, limit)
    return [
        FnArrow(A, B, table)
        for table in itertools.product(range(len(B)), repeat=len(A))
    ]

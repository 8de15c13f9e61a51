"""Weighted sets of functions between finite sets.

A ``QMorphism`` from A to B assigns a quantale value to every function
A -> B, stored sparsely: functions absent from the support implicitly
carry the bottom value.  Over ``TWO`` this is exactly a set of functions;
over ``RBAR`` it is a cost table with default +inf.

Composition joins tensor products over all factorisations (min-plus over
``RBAR``).  Right extensions and right liftings — the adjoints of pre-
and post-composition — are available both materialised (guarded, since
the result lives on a whole hom-set) and as lazy point evaluators.
"""

from __future__ import annotations

from typing import Iterable

from . import quantale as qv
from .errors import MismatchError
from .finset import FiniteSet, FnArrow, compose as fn_compose, enumerate_hom, identity

__all__ = [
    "QMorphism",
    "bottom",
    "top",
    "singleton",
    "singleton_weighted",
    "compose",
    "leq",
    "join_morphisms",
    "meet_morphisms",
    "right_extension",
    "right_lifting",
    "eval_right_extension_at",
    "eval_right_lifting_at",
    "crisp_relation",
    "valued_relation",
    "relation_tuples",
]


class QMorphism:
    """A sparse map Hom(dom, cod) -> Q with default bottom."""

    __slots__ = ("quantale", "dom", "cod", "support")

    def __init__(self, quantale, dom: FiniteSet, cod: FiniteSet, entries=()):
        support = {}
        bottom_v = quantale.bottom
        items = entries.items() if isinstance(entries, dict) else entries
        for f, value in items:
            if f.dom != dom or f.cod != cod:
                raise MismatchError("entry arrow does not match morphism shape")
            if value.quantale is not quantale:
                raise ValueError("entry value from a different quantale")
            if value == bottom_v:
                continue
            support[f] = value
        # canonical iteration order: sort by lookup table
        ordered = dict(sorted(support.items(), key=lambda kv: kv[0].table))
        object.__setattr__(self, "quantale", quantale)
        object.__setattr__(self, "dom", dom)
        object.__setattr__(self, "cod", cod)
        object.__setattr__(self, "support", ordered)

    def __setattr__(self, name, value):
        raise AttributeError("QMorphism is immutable")

    def value_at(self, f: FnArrow) -> qv.QuantaleValue:
        return self.support.get(f, self.quantale.bottom)

    def __contains__(self, f):
        return f in self.support

    @property
    def is_empty(self):
        return not self.support

    def entries(self):
        return self.support.items()

    def __eq__(self, other):
        return (
            isinstance(other, QMorphism)
            and self.quantale is other.quantale
            and self.dom == other.dom
            and self.cod == other.cod
            and self.support == other.support
        )

    def __hash__(self):
        return hash(
            (self.quantale.name, self.dom, self.cod, frozenset(self.support.items()))
        )

    def __repr__(self):
        return (
            f"QMorphism({self.quantale.name}, {self.dom.name}~>{self.cod.name}, "
            f"{len(self.support)} entries)"
        )


def _check_parallel(a: QMorphism, b: QMorphism):
    if a.quantale is not b.quantale:
        raise ValueError("mixed quantales")
    if a.dom != b.dom or a.cod != b.cod:
        raise MismatchError("morphisms are not parallel")


def bottom(quantale, dom: FiniteSet, cod: FiniteSet) -> QMorphism:
    return QMorphism(quantale, dom, cod)


def top(quantale, dom: FiniteSet, cod: FiniteSet, limit=None) -> QMorphism:
    """The constant-top morphism, materialised over the whole hom-set."""
    t = quantale.top
    return QMorphism(quantale, dom, cod, ((f, t) for f in enumerate_hom(dom, cod, limit)))


def singleton(f: FnArrow, quantale=qv.TWO) -> QMorphism:
    """{f}: assigns the unit to f and bottom elsewhere."""
    return QMorphism(quantale, f.dom, f.cod, ((f, quantale.unit),))


def singleton_weighted(f: FnArrow, alpha: qv.QuantaleValue) -> QMorphism:
    """{f}^alpha: assigns alpha to f and bottom elsewhere."""
    return QMorphism(alpha.quantale, f.dom, f.cod, ((f, alpha),))


def compose(psi: QMorphism, phi: QMorphism) -> QMorphism:
    """Composite morphism: (psi∘phi)(h) = join of psi(g) ⊗ phi(f) over g∘f = h."""
    if psi.quantale is not phi.quantale:
        raise ValueError("mixed quantales")
    if phi.cod != psi.dom:
        raise MismatchError(
            f"cannot compose: cod {phi.cod.name} != dom {psi.dom.name}"
        )
    q = psi.quantale
    acc = {}
    for f, vf in phi.entries():
        for g, vg in psi.entries():
            h = fn_compose(g, f)
            v = q.tensor(vg, vf)
            prev = acc.get(h)
            acc[h] = v if prev is None else q.join((prev, v))
    return QMorphism(q, phi.dom, psi.cod, acc)


def leq(phi: QMorphism, psi: QMorphism) -> bool:
    """Pointwise order; only support keys of phi need checking."""
    _check_parallel(phi, psi)
    q = phi.quantale
    return all(q.leq(v, psi.value_at(f)) for f, v in phi.entries())


def join_morphisms(
    morphisms: Iterable[QMorphism], quantale=None, dom=None, cod=None
) -> QMorphism:
    """Pointwise join; sparse (the empty join is the bottom morphism)."""
    morphisms = list(morphisms)
    if not morphisms:
        if quantale is None or dom is None or cod is None:
            raise ValueError("empty join needs explicit quantale, dom and cod")
        return bottom(quantale, dom, cod)
    first = morphisms[0]
    q = first.quantale
    acc = {}
    for m in morphisms:
        _check_parallel(first, m)
        for f, v in m.entries():
            prev = acc.get(f)
            acc[f] = v if prev is None else q.join((prev, v))
    return QMorphism(q, first.dom, first.cod, acc)


def meet_morphisms(
    morphisms: Iterable[QMorphism], quantale=None, dom=None, cod=None, limit=None
) -> QMorphism:
    """Pointwise meet.

    A meet over a nonempty family is supported inside the intersection of
    the supports (meeting with bottom gives bottom), so it stays sparse.
    The empty meet is the constant-top morphism and must be materialised,
    which is where the hom-set guard applies.
    """
    morphisms = list(morphisms)
    if not morphisms:
        if quantale is None or dom is None or cod is None:
            raise ValueError("empty meet needs explicit quantale, dom and cod")
        return top(quantale, dom, cod, limit)
    first = morphisms[0]
    q = first.quantale
    for m in morphisms[1:]:
        _check_parallel(first, m)
    keys = set(first.support)
    for m in morphisms[1:]:
        keys &= set(m.support)
    acc = {f: q.meet([m.support[f] for m in morphisms]) for f in keys}
    return QMorphism(q, first.dom, first.cod, acc)


def eval_right_extension_at(
    theta: QMorphism, phi: QMorphism, g: FnArrow
) -> qv.QuantaleValue:
    """(theta ↙ phi)(g) without materialising the extension.

    Meet over f of residual(theta(g∘f), phi(f)); f outside the support of
    phi contributes residual(·, bottom) = top, so only the support is
    iterated.
    """
    if theta.quantale is not phi.quantale:
        raise ValueError("mixed quantales")
    if theta.dom != phi.dom:
        raise MismatchError("right extension needs dom(theta) = dom(phi)")
    if g.dom != phi.cod or g.cod != theta.cod:
        raise MismatchError("evaluation point has the wrong shape")
    q = theta.quantale
    out = q.top
    for f, vf in phi.entries():
        out = q.meet((out, q.residual(theta.value_at(fn_compose(g, f)), vf)))
        if out == q.bottom:
            break
    return out


def eval_right_lifting_at(
    psi: QMorphism, theta: QMorphism, f: FnArrow
) -> qv.QuantaleValue:
    """(psi ↘ theta)(f) without materialising the lifting."""
    if theta.quantale is not psi.quantale:
        raise ValueError("mixed quantales")
    if theta.cod != psi.cod:
        raise MismatchError("right lifting needs cod(psi) = cod(theta)")
    if f.dom != theta.dom or f.cod != psi.dom:
        raise MismatchError("evaluation point has the wrong shape")
    q = theta.quantale
    out = q.top
    for g, vg in psi.entries():
        out = q.meet((out, q.residual(theta.value_at(fn_compose(g, f)), vg)))
        if out == q.bottom:
            break
    return out


def right_extension(theta: QMorphism, phi: QMorphism, limit=None) -> QMorphism:
    """theta ↙ phi, materialised over Hom(cod(phi), cod(theta)) (guarded)."""
    if theta.quantale is not phi.quantale:
        raise ValueError("mixed quantales")
    if theta.dom != phi.dom:
        raise MismatchError("right extension needs dom(theta) = dom(phi)")
    hom = enumerate_hom(phi.cod, theta.cod, limit)
    entries = ((g, eval_right_extension_at(theta, phi, g)) for g in hom)
    return QMorphism(theta.quantale, phi.cod, theta.cod, entries)


def right_lifting(psi: QMorphism, theta: QMorphism, limit=None) -> QMorphism:
    """psi ↘ theta, materialised over Hom(dom(theta), dom(psi)) (guarded)."""
    if theta.quantale is not psi.quantale:
        raise ValueError("mixed quantales")
    if theta.cod != psi.cod:
        raise MismatchError("right lifting needs cod(psi) = cod(theta)")
    hom = enumerate_hom(theta.dom, psi.dom, limit)
    entries = ((f, eval_right_lifting_at(psi, theta, f)) for f in hom)
    return QMorphism(theta.quantale, theta.dom, psi.dom, entries)


def identity_morphism(A: FiniteSet, quantale=qv.TWO) -> QMorphism:
    return singleton(identity(A), quantale)


def crisp_relation(domain: FiniteSet, arity: int, tuples) -> QMorphism:
    """A k-ary crisp relation over `domain` as a TWO-morphism [k] ~> domain."""
    from .finset import tuple_arrow

    entries = []
    for t in tuples:
        t = tuple(t) if isinstance(t, (tuple, list)) else (t,)
        if len(t) != arity:
            raise ValueError(f"tuple {t!r} has arity {len(t)}, expected {arity}")
        entries.append((tuple_arrow(t, domain), qv.TWO.true))
    from .finset import fin_range

    return QMorphism(qv.TWO, fin_range(arity), domain, entries)


def valued_relation(domain: FiniteSet, arity: int, entries) -> QMorphism:
    """A k-ary extended-real relation; absent tuples are +inf.

    `entries` is an iterable of (tuple, value) with values accepted by
    RBAR.of.
    """
    from .finset import fin_range, tuple_arrow

    built = []
    for t, value in entries:
        t = tuple(t) if isinstance(t, (tuple, list)) else (t,)
        if len(t) != arity:
            raise ValueError(f"tuple {t!r} has arity {len(t)}, expected {arity}")
        built.append((tuple_arrow(t, domain), qv.RBAR.of(value)))
    return QMorphism(qv.RBAR, fin_range(arity), domain, built)


def relation_tuples(rel: QMorphism):
    """Support keys of a relation as label tuples, in canonical order."""
    from .finset import arrow_labels

    return [arrow_labels(f) for f in rel.support]

"""Graded polymorphisms of weighted relations, sublevel languages, and the
zero-grade bridge to crisp polymorphisms.

For a weighted relation rho and an operation f, the polymorphism degree of
f is the largest grade alpha such that tensoring alpha onto the meet of
any family of row values stays below the value of the f-image row.  Over
the extended reals, grade 0 is admissible exactly when f preserves every
sublevel set of rho, which turns weighted tractability questions into
crisp ones.
"""

from __future__ import annotations

import itertools
from typing import Optional, Sequence

from . import csp as csp_mod
from . import quantale as qv
from . import qmorphism as qm
from .errors import MismatchError, SizeExceeded
from .finset import FiniteSet, FnArrow, power
from .polymorphism import LawReport, is_polymorphism, operation_arity, projection

DEGREE_ITERATION_GUARD = 10**7


def pol_degree(
    relation: qm.QMorphism, n: int, op: FnArrow, guard: Optional[int] = None
) -> qv.QuantaleValue:
    """The degree to which op is an n-ary polymorphism of the relation.

    Meet over row combinations of residual(value of the image row, meet of
    the row values).  Combinations involving an off-support row contribute
    the top residual and are skipped; the guard bounds the number of
    combinations actually iterated.
    """
    if guard is None:
        guard = DEGREE_ITERATION_GUARD
    q = relation.quantale
    A = relation.cod
    if op.cod != A:
        raise MismatchError("operation codomain differs from the relation domain")
    rows = [(f.table, v) for f, v in relation.entries()]
    count = len(rows) ** n
    if count > guard:
        raise SizeExceeded(count, guard)
    k = len(relation.dom)
    P = power(A, n)
    if n == 1:
        pow_index = {(i,): i for i in range(len(A))}
    else:
        elems = list(A.elements)
        pow_index = {
            tuple(elems.index(c) for c in w): i for i, w in enumerate(P.elements)
        }
    f_table = op.table
    value_of = {f.table: v for f, v in relation.entries()}
    bottom_v = q.bottom
    out = q.top
    for combo in itertools.product(rows, repeat=n):
        row_meet = q.meet([v for _, v in combo])
        image = tuple(
            f_table[pow_index[tuple(t[j] for t, _ in combo)]] for j in range(k)
        )
        image_value = value_of.get(
            image, bottom_v
        )  # image row may fall outside the support
        out = q.meet((out, q.residual(image_value, row_meet)))
        if out == bottom_v:
            break
    return out


def family_degree(
    relations: Sequence[qm.QMorphism], n: int, op: FnArrow, guard=None
) -> qv.QuantaleValue:
    """Meet of the degrees over a family of relations on a common domain."""
    relations = list(relations)
    if not relations:
        raise ValueError("need at least one relation")
    q = relations[0].quantale
    return q.meet([pol_degree(rel, n, op, guard) for rel in relations])


def check_graded(
    relations, op: FnArrow, alpha: qv.QuantaleValue, n: Optional[int] = None, guard=None
) -> bool:
    """Whether (op, alpha) is a graded polymorphism of every relation given."""
    if isinstance(relations, qm.QMorphism):
        relations = [relations]
    if n is None:
        n = operation_arity(op)
    q = alpha.quantale
    return all(q.leq(alpha, pol_degree(rel, n, op, guard)) for rel in relations)


def check_graded_clone_laws(relations: Sequence[qm.QMorphism], cases) -> LawReport:
    """Verify the graded clone inequalities on sampled superpositions.

    `cases` is an iterable of (g, [f_1, ..., f_m]) with g an m-ary and the
    f_i n-ary operations on the relations' domain.  For every arity
    appearing in the samples the projections are also checked to carry at
    least the unit grade.
    """
    from .finset import compose, tupling

    relations = list(relations)
    q = relations[0].quantale if relations else qv.RBAR
    report = LawReport()
    A = relations[0].cod if relations else None
    arities = set()
    for g, fs in cases:
        m = len(fs)
        n = operation_arity(fs[0]) if fs else operation_arity(g)
        arities.add(n)
        arities.add(m)
        deg_g = family_degree(relations, m, g)
        degs_f = [family_degree(relations, n, f) for f in fs]
        lhs = q.tensor(deg_g, q.meet(degs_f))
        composite = compose(g, tupling(list(fs)))
        rhs = family_degree(relations, n, composite)
        report.checked += 1
        if not q.leq(lhs, rhs):
            report.add(
                f"superposition grade {lhs!r} exceeds composite degree {rhs!r}"
            )
    if A is not None:
        for n in sorted(a for a in arities if a >= 1):
            for i in range(1, n + 1):
                report.checked += 1
                deg = family_degree(relations, n, projection(A, n, i))
                if not q.leq(q.unit, deg):
                    report.add(f"projection {i} of arity {n} has degree below the unit")
    return report


def check_graded_closure(
    relations: Sequence[qm.QMorphism], sigma: qm.QMorphism, n: int, limit=None
) -> LawReport:
    """Verify that degrees survive meets of parallel relations and right extensions."""
    from .finset import enumerate_hom

    report = LawReport()
    relations = list(relations)
    if not relations:
        return report
    q = relations[0].quantale
    A = relations[0].cod
    met = qm.meet_morphisms(relations)
    extensions = []
    for rel in relations:
        if sigma.dom != rel.dom:
            raise MismatchError("sigma must share the relation index set")
        extensions.append(qm.right_extension(rel, sigma, limit))
    for op in enumerate_hom(power(A, n), A, limit):
        lhs = family_degree(relations, n, op)
        report.checked += 1
        if not q.leq(lhs, pol_degree(met, n, op)):
            report.add(f"meet inequality fails at operation {op.table}")
        for idx, (rel, extended) in enumerate(zip(relations, extensions)):
            report.checked += 1
            if not q.leq(pol_degree(rel, n, op), pol_degree(extended, n, op)):
                report.add(
                    f"extension inequality fails at relation {idx}, operation {op.table}"
                )
    return report


# ---------------------------------------------------------------------------
# sublevel sets


def sublevel(relation: qm.QMorphism, alpha) -> qm.QMorphism:
    """The crisp relation of tuples whose value is at most alpha (numerically).

    alpha must be below +inf; tuples outside the support carry +inf and
    are never included.
    """
    if relation.quantale is not qv.RBAR:
        raise ValueError("sublevel sets are defined for extended-real relations")
    alpha = qv.RBAR.of(alpha)
    if alpha == qv.RBAR.bottom:
        raise ValueError("sublevel threshold must be below +inf")
    cut = alpha.payload
    entries = [
        (f, qv.TWO.true) for f, v in relation.entries() if v.payload <= cut
    ]
    return qm.QMorphism(qv.TWO, relation.dom, relation.cod, entries)


def attained_thresholds(relation: qm.QMorphism):
    """The candidate thresholds at which sublevel sets can change.

    The attained values of the relation plus -inf, sorted numerically.
    """
    values = {v.payload for _, v in relation.entries()}
    values.add(qv.NEG_INF)
    return [qv.RBAR.of(p) if p != qv.NEG_INF else qv.RBAR.neg_inf for p in sorted(values)]


def language_sublevels(
    relations: Sequence[qm.QMorphism], domain: Optional[FiniteSet] = None
) -> csp_mod.ConstraintLanguage:
    """The crisp language of all distinct sublevel sets of a weighted family.

    Only attained values (and -inf, giving the empty relation when -inf is
    never attained) produce distinct sublevels, so the language is finite.
    An empty family yields the empty language (domain required explicitly).
    """
    relations = list(relations)
    if not relations:
        if domain is None:
            raise ValueError("empty family needs an explicit domain")
        return csp_mod.ConstraintLanguage(domain, ())
    domain = relations[0].cod
    out = []
    seen = set()
    for rel in relations:
        if rel.cod != domain:
            raise MismatchError("relations must share a domain")
        for alpha in attained_thresholds(rel):
            level = sublevel(rel, alpha)
            key = (len(level.dom), frozenset(level.support))
            if key not in seen:
                seen.add(key)
                out.append(level)
    return csp_mod.ConstraintLanguage(domain, tuple(out))


def verify_f_zero(
    relations: Sequence[qm.QMorphism], op: FnArrow, n: Optional[int] = None
) -> bool:
    """Whether the zero-grade test agrees with sublevel preservation for op.

    Both sides are computed independently; the result says whether they
    coincide (they always should).
    """
    if isinstance(relations, qm.QMorphism):
        relations = [relations]
    relations = list(relations)
    if n is None:
        n = operation_arity(op)
    graded = check_graded(relations, op, qv.RBAR.unit, n)
    crisp = all(
        is_polymorphism(op, level, n)
        for level in language_sublevels(relations).relations
    )
    return graded == crisp

"""Polymorphisms of crisp relations and the Siggers-based tractability test.

The n-ary polymorphisms of a relation arise from two nested residuals:
lift the projection set through the relation, then extend the relation
along that lifting.  A constraint language is tractable exactly when
some 4-ary operation satisfying f(y,x,y,z) = f(x,y,z,x) is a polymorphism
of every relation; searching for one either scans all operation tables
(feasible only for two-element domains) or solves the indicator CSP whose
solutions are precisely such operations.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Optional, Sequence

from . import csp as csp_mod
from . import quantale as qv
from . import qmorphism as qm
from .errors import MismatchError
from .finset import (
    FiniteSet,
    FnArrow,
    compose,
    enumerate_hom,
    hom_size,
    power,
    power_arity,
    projection,
    tupling,
)


def projections_morphism(A: FiniteSet, n: int) -> qm.QMorphism:
    """The set {pi_1, ..., pi_n} of projections power(A, n) ~> A."""
    if n == 0:
        return qm.bottom(qv.TWO, power(A, 0), A)
    return qm.join_morphisms(
        [qm.singleton(projection(A, n, i)) for i in range(1, n + 1)]
    )


def operation_arity(op: FnArrow) -> int:
    """The n with dom(op) = power(cod(op), n)."""
    n = power_arity(op.dom, op.cod)
    if n is None:
        raise MismatchError("operation domain is not a canonical power of its codomain")
    return n


def _support_tables(relation: qm.QMorphism):
    return [f.table for f in relation.support]


def is_polymorphism(op: FnArrow, relation: qm.QMorphism, arity: Optional[int] = None) -> bool:
    """Whether op maps every column-wise combination of relation rows into the relation.

    Iterates over n-tuples of support rows (all other combinations satisfy
    the implication vacuously).
    """
    if relation.quantale is not qv.TWO:
        raise ValueError("is_polymorphism expects a crisp relation")
    A = relation.cod
    if op.cod != A:
        raise MismatchError("operation codomain differs from the relation domain")
    n = operation_arity(op) if arity is None else arity
    rows = _support_tables(relation)
    members = set(rows)
    k = len(relation.dom)
    P = power(A, n)
    if n == 1:
        pow_index = {(i,): i for i in range(len(A))}
    else:
        elems = A.elements
        pow_index = {
            tuple(elems.index(c) for c in w): i for i, w in enumerate(P.elements)
        }
    f_table = op.table
    for combo in itertools.product(rows, repeat=n):
        image = tuple(
            f_table[pow_index[tuple(row[j] for row in combo)]] for j in range(k)
        )
        if image not in members:
            return False
    return True


def pol_set(relation: qm.QMorphism, n: int, limit=None) -> qm.QMorphism:
    """All n-ary polymorphisms as a crisp morphism power(A, n) ~> A.

    Computed by the nested residuals: extend the relation along the
    lifting of the projection set through it.
    """
    A = relation.cod
    pis = projections_morphism(A, n)
    lifted = qm.right_lifting(pis, relation, limit)
    return qm.right_extension(relation, lifted, limit)


def intersect_pol(
    relations: Sequence[qm.QMorphism], n: int, limit=None, domain=None
) -> qm.QMorphism:
    """The n-ary polymorphisms common to every relation in the family.

    An empty family constrains nothing, so the result is the whole
    (guarded) operation hom-set; the domain must then be given explicitly.
    """
    relations = list(relations)
    if not relations:
        if domain is None:
            raise ValueError("empty family needs an explicit domain")
        return qm.top(qv.TWO, power(domain, n), domain, limit)
    A = relations[0].cod
    return qm.meet_morphisms(
        [pol_set(rel, n, limit) for rel in relations],
        quantale=qv.TWO,
        dom=power(A, n),
        cod=A,
        limit=limit,
    )


@dataclass
class LawReport:
    checked: int = 0
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, message: str):
        self.violations.append(message)


def check_clone_laws(family: dict, base: FiniteSet) -> LawReport:
    """Verify the clone laws for a family of operation sets keyed by arity.

    Clause 1: every projection of each listed arity is present.  Clause 2:
    the family is closed under superposition g∘<f_1,...,f_m> for all
    composable choices drawn from the family.
    """
    report = LawReport()
    ops = {n: set(mor.support) for n, mor in family.items()}
    for n in ops:
        for i in range(1, n + 1):
            report.checked += 1
            if projection(base, n, i) not in ops[n]:
                report.add(f"projection {i} of arity {n} missing")
    for m, gs in ops.items():
        if m == 0:
            continue
        for n, fs in ops.items():
            ordered = sorted(fs, key=lambda f: f.table)
            for g in gs:
                for combo in itertools.product(ordered, repeat=m):
                    report.checked += 1
                    composite = compose(g, tupling(list(combo)))
                    if composite not in ops[n]:
                        report.add(
                            f"superposition of arity-{m} op with {m} arity-{n} ops escapes the family"
                        )
    return report


def check_closure_properties(
    relations: Sequence[qm.QMorphism], sigma: qm.QMorphism, n: int, limit=None
) -> LawReport:
    """Verify that polymorphism sets survive meets and right extensions.

    Checks intersection-of-pols <= pol-of-meet for the (parallel) family,
    and pol(rho) <= pol(rho ↙ sigma) for each relation.
    """
    report = LawReport()
    relations = list(relations)
    if relations:
        met = qm.meet_morphisms(relations)
        lhs = intersect_pol(relations, n, limit)
        rhs = pol_set(met, n, limit)
        report.checked += 1
        if not qm.leq(lhs, rhs):
            report.add("common polymorphisms do not preserve the meet of the family")
    for idx, rel in enumerate(relations):
        if sigma.dom != rel.dom:
            raise MismatchError("sigma must share the relation index set")
        extended = qm.right_extension(rel, sigma, limit)
        report.checked += 1
        if not qm.leq(pol_set(rel, n, limit), pol_set(extended, n, limit)):
            report.add(f"polymorphisms of relation {idx} lost along the extension")
    return report


# ---------------------------------------------------------------------------
# Siggers operations and the dichotomy classifier


def is_siggers(op: FnArrow) -> bool:
    """Whether the 4-ary operation satisfies f(y,x,y,z) = f(x,y,z,x)."""
    A = op.cod
    if operation_arity(op) != 4:
        raise MismatchError("Siggers operations are 4-ary")
    P = op.dom
    for x in A.elements:
        for y in A.elements:
            for z in A.elements:
                if op.table[P.index((y, x, y, z))] != op.table[P.index((x, y, z, x))]:
                    return False
    return True


def siggers_identification(D: FiniteSet):
    """Union-find classes of D^4 under (y,x,y,z) ~ (x,y,z,x).

    Returns (class representatives in first-occurrence order, mapping from
    element index of D^4 to class position).
    """
    P = power(D, 4)
    parent = list(range(len(P)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    def union(i, j):
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[max(ri, rj)] = min(ri, rj)

    for x in D.elements:
        for y in D.elements:
            for z in D.elements:
                union(P.index((y, x, y, z)), P.index((x, y, z, x)))
    class_pos = {}
    class_of = []
    for i in range(len(P)):
        root = find(i)
        if root not in class_pos:
            class_pos[root] = len(class_pos)
        class_of.append(class_pos[root])
    return len(class_pos), class_of


def _indicator_instance(language: csp_mod.ConstraintLanguage) -> csp_mod.CspInstance:
    """The CSP whose solutions are exactly the Siggers polymorphisms of the language."""
    D = language.domain
    nclasses, class_of = siggers_identification(D)
    V = FiniteSet("cells", tuple(range(nclasses)))
    constraints = []
    seen = set()
    P4 = power(D, 4)
    elem_index = {w: i for i, w in enumerate(P4.elements)}
    for rel in language.relations:
        k = len(rel.dom)
        rows = _support_tables(rel)
        for combo in itertools.product(rows, repeat=4):
            t1, t2, t3, t4 = combo
            scope = tuple(
                class_of[
                    elem_index[
                        (
                            D.elements[t1[j]],
                            D.elements[t2[j]],
                            D.elements[t3[j]],
                            D.elements[t4[j]],
                        )
                    ]
                ]
                for j in range(k)
            )
            key = (scope, id(rel))
            if key in seen:
                continue
            seen.add(key)
            constraints.append(csp_mod.make_constraint(scope, rel, V))
    return csp_mod.CspInstance(V, D, tuple(constraints))


def find_siggers(
    language: csp_mod.ConstraintLanguage,
    mode: str = "auto",
    limit=None,
    jobs: int = 1,
) -> Optional[FnArrow]:
    """A Siggers polymorphism of the language, or None.

    mode 'exhaustive' scans all |D|^(|D|^4) operation tables in
    lexicographic order and returns the first hit; 'indicator' solves the
    identification CSP with the library's own solver; 'auto' picks
    exhaustive when it fits under the enumeration guard.
    """
    D = language.domain
    P4 = power(D, 4)
    if mode == "auto":
        from .finset import default_enum_limit

        cap = limit if limit is not None else default_enum_limit()
        mode = "exhaustive" if hom_size(P4, D) <= cap else "indicator"
    if mode == "exhaustive":
        candidates = enumerate_hom(P4, D, limit)
        if jobs > 1:
            return _scan_parallel(candidates, language, jobs)
        for op in candidates:
            if is_siggers(op) and all(
                is_polymorphism(op, rel, 4) for rel in language.relations
            ):
                return op
        return None
    if mode == "indicator":
        instance = _indicator_instance(language)
        assignment = csp_mod.solve(instance)
        if assignment is None:
            return None
        _, class_of = siggers_identification(D)
        table = tuple(assignment.table[class_of[i]] for i in range(len(P4)))
        op = FnArrow(P4, D, table)
        assert is_siggers(op)
        return op
    raise ValueError(f"unknown mode {mode!r}")


def _scan_parallel(candidates, language, jobs):
    """Chunked scan with a deterministic reduce: the earliest witness wins."""
    from concurrent.futures import ThreadPoolExecutor

    def scan(chunk_start, chunk):
        for offset, op in enumerate(chunk):
            if is_siggers(op) and all(
                is_polymorphism(op, rel, 4) for rel in language.relations
            ):
                return (chunk_start + offset, op)
        return None

    chunk_size = max(1, len(candidates) // (jobs * 4) or 1)
    futures = []
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        for start in range(0, len(candidates), chunk_size):
            futures.append(pool.submit(scan, start, candidates[start : start + chunk_size]))
        hits = [f.result() for f in futures]
    hits = [h for h in hits if h is not None]
    return min(hits, key=lambda h: h[0])[1] if hits else None


IN_P = "InP"
NP_COMPLETE = "NPComplete"


@dataclass(frozen=True)
class Classification:
    verdict: str
    witness: Optional[FnArrow]
    mode: str


def classify(
    language: csp_mod.ConstraintLanguage, mode: str = "auto", limit=None, jobs: int = 1
) -> Classification:
    """Tractability verdict for the language, with a Siggers witness when in P."""
    D = language.domain
    effective = mode
    if mode == "auto":
        from .finset import default_enum_limit

        cap = limit if limit is not None else default_enum_limit()
        effective = "exhaustive" if hom_size(power(D, 4), D) <= cap else "indicator"
    witness = find_siggers(language, effective, limit=limit, jobs=jobs)
    verdict = IN_P if witness is not None else NP_COMPLETE
    return Classification(verdict, witness, effective)

"""Tropical valued CSP: minimise over assignments the worst weighted excess.

An instance carries finitely many constraints (k, sigma, rho) with sigma a
weighted scope relation over the variables and rho a weighted relation
over the domain, both extended-real valued with finite support lists.
An assignment s scores sup over scoped tuples x of rho(s∘x) - sigma(x)
(extended-real subtraction, so tuples outside the support of sigma never
contribute), and the optimum is the infimum of that score.

Solving reduces exactly to a ladder of crisp CSPs: the score of some
assignment is at most alpha iff the sublevel instance at alpha is
satisfiable, and the optimum is the least such threshold among the
finitely many candidate differences rho(d) - sigma(x).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from . import csp as csp_mod
from . import qmorphism as qm
from . import qpoly
from . import quantale as qv
from .errors import FormatError, MismatchError, NoPreimage
from .finset import FiniteSet, FnArrow, compose, enumerate_hom, fin_range, tuple_arrow
from .polymorphism import Classification


@dataclass(frozen=True)
class TvcspConstraint:
    arity: int
    sigma: qm.QMorphism  # RBAR, [k] ~> V
    rho: qm.QMorphism  # RBAR, [k] ~> D

    def __post_init__(self):
        if self.sigma.quantale is not qv.RBAR or self.rho.quantale is not qv.RBAR:
            raise ValueError("tropical constraints are extended-real valued")
        k = fin_range(self.arity)
        if self.sigma.dom != k or self.rho.dom != k:
            raise MismatchError("sigma and rho must share the index set [k]")


@dataclass(frozen=True)
class TvcspInstance:
    variables: FiniteSet
    domain: FiniteSet
    constraints: tuple

    def __post_init__(self):
        object.__setattr__(self, "constraints", tuple(self.constraints))
        for c in self.constraints:
            if c.sigma.cod != self.variables:
                raise MismatchError("sigma must land in the variables")
            if c.rho.cod != self.domain:
                raise MismatchError("rho must land in the domain")


@dataclass
class ReductionStats:
    csp_calls: int = 0
    alphas_tested: int = 0
    nodes: int = 0
    propagations: int = 0


def eval_assignment(instance: TvcspInstance, s: FnArrow) -> qv.QuantaleValue:
    """The score sup over constraints and scoped tuples of rho(s∘x) - sigma(x).

    The empty supremum is -inf.
    """
    if s.dom != instance.variables or s.cod != instance.domain:
        raise MismatchError("assignment has the wrong shape")
    q = qv.RBAR
    out = q.top  # numeric -inf
    for c in instance.constraints:
        for x, weight in c.sigma.entries():
            term = q.residual(c.rho.value_at(compose(s, x)), weight)
            out = q.meet((out, term))  # quantale meet = numeric sup
            if out == q.bottom:
                return out
    return out


def solve_bruteforce(instance: TvcspInstance, limit=None):
    """Exact optimum and first minimiser by enumerating all assignments."""
    best_value = qv.RBAR.bottom  # numeric +inf: the empty infimum
    best_assignment = None
    for s in enumerate_hom(instance.variables, instance.domain, limit):
        value = eval_assignment(instance, s)
        if best_assignment is None or value.payload < best_value.payload:
            best_value = value
            best_assignment = s
    return best_value, best_assignment


def reduce_to_csp(instance: TvcspInstance, alpha) -> csp_mod.CspInstance:
    """The crisp sublevel instance at threshold alpha (< +inf).

    One constraint per scoped tuple in each sigma support, whose relation
    is the sublevel of rho at sigma(x) + alpha.
    """
    alpha = qv.RBAR.of(alpha)
    if alpha == qv.RBAR.bottom:
        raise ValueError("threshold must be below +inf")
    constraints = []
    for c in instance.constraints:
        for x, weight in c.sigma.entries():
            cut = qv.tensor(weight, alpha)
            rel = qpoly.sublevel(c.rho, cut)
            constraints.append(csp_mod.Constraint(c.arity, x, rel))
    return csp_mod.CspInstance(instance.variables, instance.domain, tuple(constraints))


def candidate_alphas(instance: TvcspInstance):
    """All thresholds at which satisfiability of the sublevel instance can flip.

    The pairwise differences rho(d) - sigma(x) (dropping +inf) plus -inf,
    deduplicated and sorted ascending; the optimum always lies in this
    list or is +inf.
    """
    q = qv.RBAR
    payloads = {qv.NEG_INF}
    for c in instance.constraints:
        sigma_values = [w for _, w in c.sigma.entries()]
        for _, rho_value in c.rho.entries():
            for weight in sigma_values:
                diff = q.residual(rho_value, weight)
                if diff != q.bottom:
                    payloads.add(diff.payload)
    return [
        q.neg_inf if p == qv.NEG_INF else q.of(p) for p in sorted(payloads)
    ]


def solve_by_reduction(
    instance: TvcspInstance,
    method: str = "binary",
    jobs: int = 1,
    stats: Optional[ReductionStats] = None,
):
    """Exact optimum via the candidate ladder of crisp instances.

    Satisfiability of the sublevel instance is monotone in the threshold,
    so a binary search over the sorted candidates finds the least
    satisfiable one; a linear scan is available for debugging and `jobs`
    > 1 tests all candidates with a deterministic least-threshold reduce.
    Returns (+inf, None) when no candidate is satisfiable.
    """
    if stats is None:
        stats = ReductionStats()
    candidates = candidate_alphas(instance)

    solutions = {}

    def attempt(i):
        search = csp_mod.SolveStats()
        found = csp_mod.solve(reduce_to_csp(instance, candidates[i]), search)
        return found, search

    def record(i, found, search):
        stats.csp_calls += 1
        stats.alphas_tested += 1
        stats.nodes += search.nodes
        stats.propagations += search.propagations
        if found is not None:
            solutions[i] = found

    def satisfiable(i):
        found, search = attempt(i)
        record(i, found, search)
        return found is not None

    best = None
    if jobs > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(attempt, range(len(candidates))))
        hits = []
        for i, (found, search) in enumerate(results):
            record(i, found, search)
            if found is not None:
                hits.append(i)
        best = min(hits) if hits else None
    elif method == "scan":
        for i in range(len(candidates)):
            if satisfiable(i):
                best = i
                break
    elif method == "binary":
        lo, hi = 0, len(candidates) - 1
        if satisfiable(hi):
            best = hi
            while lo < best:
                mid = (lo + best) // 2
                if satisfiable(mid):
                    best = mid
                else:
                    lo = mid + 1
    else:
        raise ValueError(f"unknown method {method!r}")

    if best is None:
        return qv.RBAR.bottom, None
    return candidates[best], solutions[best]


def csp_to_tvcsp(
    instance: csp_mod.CspInstance, relations: Sequence[qm.QMorphism]
) -> TvcspInstance:
    """Rebuild a crisp instance as a tropical one over a weighted family.

    Every constraint relation must be a sublevel set of some relation in
    the family; it is replaced by that relation with a singleton weighted
    scope at the matching threshold.  The crisp instance is satisfiable
    exactly when the rebuilt optimum is at most 0.
    """
    relations = list(relations)
    constraints = []
    for c in instance.constraints:
        target = frozenset(c.relation.support)
        found = None
        for rho in relations:
            if len(rho.dom) != c.arity or rho.cod != c.relation.cod:
                continue
            for alpha in qpoly.attained_thresholds(rho):
                if frozenset(qpoly.sublevel(rho, alpha).support) == target:
                    found = (rho, alpha)
                    break
            if found:
                break
        if found is None:
            raise NoPreimage(
                f"relation of arity {c.arity} is not a sublevel of the family"
            )
        rho, alpha = found
        sigma = qm.singleton_weighted(c.scope, alpha)
        constraints.append(TvcspConstraint(c.arity, sigma, rho))
    return TvcspInstance(instance.variables, instance.domain, tuple(constraints))


def classify_tvcsp(
    relations: Sequence[qm.QMorphism], mode: str = "auto", limit=None, jobs: int = 1
) -> Classification:
    """Tractability of the tropical problem class over a weighted family.

    In P iff some Siggers operation admits grade 0 for every relation,
    which by the zero-grade bridge is a crisp classification of the
    sublevel language; otherwise NP-hard.
    """
    from . import polymorphism as pol

    language = qpoly.language_sublevels(relations)
    crisp = pol.classify(language, mode=mode, limit=limit, jobs=jobs)
    verdict = "InP" if crisp.verdict == pol.IN_P else "NPHard"
    return Classification(verdict, crisp.witness, crisp.mode)


def from_scheduling(
    activities: Sequence,
    precedences: Sequence,
    processing: dict,
    due: dict,
    horizon: int,
) -> TvcspInstance:
    """Minimise the largest deviation of finish times from due dates.

    Start times range over {0, ..., horizon}; one unary constraint per
    activity scores |due - (start + processing)| and one crisp binary
    constraint per precedence (i, j) forbids j starting before i ends.
    """
    activities = list(activities)
    for i in activities:
        if i not in processing or i not in due:
            raise FormatError(f"activity {i!r} lacks processing time or due date")
    V = FiniteSet("activities", tuple(activities))
    D = FiniteSet("slots", tuple(range(horizon + 1)))
    constraints = []
    zero = qv.RBAR.unit
    for i in activities:
        sigma = qm.singleton_weighted(tuple_arrow((i,), V), zero)
        entries = [((t,), abs(due[i] - (t + processing[i]))) for t in D.elements]
        rho = qm.valued_relation(D, 1, entries)
        constraints.append(TvcspConstraint(1, sigma, rho))
    for i, j in precedences:
        if i not in V or j not in V:
            raise FormatError(f"precedence ({i!r}, {j!r}) mentions an unknown activity")
        sigma = qm.singleton_weighted(tuple_arrow((i, j), V), zero)
        entries = [
            ((ti, tj), 0)
            for ti in D.elements
            for tj in D.elements
            if tj >= ti + processing[i]
        ]
        rho = qm.valued_relation(D, 2, entries)
        constraints.append(TvcspConstraint(2, sigma, rho))
    return TvcspInstance(V, D, tuple(constraints))

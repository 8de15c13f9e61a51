"""Classical CSP instances, the weighted-set view of their solution sets,
and a complete backtracking solver with generalised arc consistency.

A constraint is (arity, scope, relation) where the scope is a tuple of
variables as a function from the index set [k] and the relation is a
crisp weighted set [k] ~> D.  The solution set of an instance is the
meet over constraints of the right extension of each relation along its
scope singleton; solving asks whether that morphism is nonempty.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from . import quantale as qv
from . import qmorphism as qm
from .errors import FormatError, MismatchError
from .finset import FiniteSet, FnArrow, compose, fin_range, tuple_arrow


@dataclass(frozen=True)
class Constraint:
    arity: int
    scope: FnArrow  # [k] -> V
    relation: qm.QMorphism  # TWO, [k] ~> D

    def __post_init__(self):
        if self.relation.quantale is not qv.TWO:
            raise ValueError("constraint relation must be crisp (TWO-valued)")
        k = fin_range(self.arity)
        if self.scope.dom != k or self.relation.dom != k:
            raise MismatchError("scope and relation must share the index set [k]")


@dataclass(frozen=True)
class CspInstance:
    variables: FiniteSet
    domain: FiniteSet
    constraints: tuple

    def __post_init__(self):
        object.__setattr__(self, "constraints", tuple(self.constraints))
        for c in self.constraints:
            if c.scope.cod != self.variables:
                raise MismatchError("constraint scope must land in the variables")
            if c.relation.cod != self.domain:
                raise MismatchError("constraint relation must land in the domain")


@dataclass(frozen=True)
class ConstraintLanguage:
    domain: FiniteSet
    relations: tuple

    def __post_init__(self):
        object.__setattr__(self, "relations", tuple(self.relations))
        for rel in self.relations:
            if rel.quantale is not qv.TWO:
                raise ValueError("language relations must be crisp")
            if rel.cod != self.domain:
                raise MismatchError("language relation over the wrong domain")

    def by_arity(self):
        out = {}
        for rel in self.relations:
            out.setdefault(len(rel.dom), []).append(rel)
        return out


@dataclass
class SolveStats:
    nodes: int = 0
    propagations: int = 0


def make_constraint(scope_labels: Sequence, relation: qm.QMorphism, variables: FiniteSet) -> Constraint:
    scope = tuple_arrow(tuple(scope_labels), variables)
    return Constraint(len(scope_labels), scope, relation)


def is_solution(instance: CspInstance, s: FnArrow) -> bool:
    """True iff s∘scope lies in every constraint relation."""
    if s.dom != instance.variables or s.cod != instance.domain:
        raise MismatchError("assignment has the wrong shape")
    return all(compose(s, c.scope) in c.relation for c in instance.constraints)


def solution_value_at(instance: CspInstance, s: FnArrow) -> bool:
    """Lazy evaluation of the solution-set morphism at s; agrees with is_solution."""
    values = (
        qm.eval_right_extension_at(c.relation, qm.singleton(c.scope), s)
        for c in instance.constraints
    )
    return qv.meet(values, qv.TWO) == qv.TWO.true


def solution_set(instance: CspInstance, limit=None) -> qm.QMorphism:
    """The solution set as a crisp morphism V ~> D (guarded materialisation)."""
    parts = [
        qm.right_extension(c.relation, qm.singleton(c.scope), limit)
        for c in instance.constraints
    ]
    return qm.meet_morphisms(
        parts,
        quantale=qv.TWO,
        dom=instance.variables,
        cod=instance.domain,
        limit=limit,
    )


def solution_relation(instance: CspInstance, limit=None) -> qm.QMorphism:
    """The solution set as a |V|-ary relation over D, variables in order."""
    from .finset import arrow_labels

    morphism = solution_set(instance, limit)
    return qm.crisp_relation(
        instance.domain,
        len(instance.variables),
        [arrow_labels(f) for f in morphism.support],
    )


# ---------------------------------------------------------------------------
# backtracking search with generalised arc consistency


class _Propagator:
    """Per-instance tables for GAC: constraint tuples as index vectors."""

    def __init__(self, instance: CspInstance):
        self.nvars = len(instance.variables)
        self.ndom = len(instance.domain)
        self.constraints = []  # (positions-per-var dict, tuple list, arity)
        self.watching = [[] for _ in range(self.nvars)]
        for c in instance.constraints:
            var_positions = {}
            for pos in range(c.arity):
                var_positions.setdefault(c.scope.table[pos], []).append(pos)
            tuples = [f.table for f in c.relation.support]
            ci = len(self.constraints)
            self.constraints.append((var_positions, tuples, c.arity))
            for v in var_positions:
                self.watching[v].append(ci)

    def revise(self, ci: int, domains) -> Optional[list]:
        """Variables whose domain shrank, or None on wipeout."""
        var_positions, tuples, arity = self.constraints[ci]
        if arity == 0:
            return [] if tuples else None
        supported = {v: set() for v in var_positions}
        for t in tuples:
            value_of = {}
            ok = True
            for v, positions in var_positions.items():
                d = t[positions[0]]
                if any(t[p] != d for p in positions[1:]) or d not in domains[v]:
                    ok = False
                    break
                value_of[v] = d
            if ok:
                for v, d in value_of.items():
                    supported[v].add(d)
        changed = []
        for v, good in supported.items():
            old = domains[v]
            if len(good) < len(old):
                new = [d for d in old if d in good]
                if not new:
                    return None
                domains[v] = new
                changed.append(v)
        return changed

    def propagate(self, domains, stats: SolveStats) -> bool:
        queue = list(range(len(self.constraints)))
        queued = set(queue)
        while queue:
            ci = queue.pop()
            queued.discard(ci)
            stats.propagations += 1
            changed = self.revise(ci, domains)
            if changed is None:
                return False
            for v in changed:
                for cj in self.watching[v]:
                    if cj != ci and cj not in queued:
                        queue.append(cj)
                        queued.add(cj)
        return True


def solve(instance: CspInstance, stats: Optional[SolveStats] = None) -> Optional[FnArrow]:
    """Find a solution by backtracking with GAC propagation, or None.

    Deterministic: branches on the unassigned variable with the smallest
    current domain (ties by variable order) and tries values in domain
    order.
    """
    if stats is None:
        stats = SolveStats()
    nvars = len(instance.variables)
    ndom = len(instance.domain)
    if ndom == 0 and nvars > 0:
        return None
    prop = _Propagator(instance)
    domains = [list(range(ndom)) for _ in range(nvars)]

    def search(domains):
        if not prop.propagate(domains, stats):
            return None
        best = None
        for v in range(nvars):
            size = len(domains[v])
            if size > 1 and (best is None or size < len(domains[best])):
                best = v
        if best is None:
            return FnArrow(
                instance.variables, instance.domain, tuple(d[0] for d in domains)
            )
        for value in domains[best]:
            stats.nodes += 1
            child = [list(d) for d in domains]
            child[best] = [value]
            found = search(child)
            if found is not None:
                return found
        return None

    if nvars == 0:
        # only arity-0 constraints can decide the empty instance
        empty = FnArrow(instance.variables, instance.domain, ())
        return empty if is_solution(instance, empty) else None
    return search(domains)


def o_value(instance: CspInstance) -> bool:
    """Whether the instance has a solution."""
    return solve(instance) is not None


# ---------------------------------------------------------------------------
# ingestion


def neq_relation(domain: FiniteSet) -> qm.QMorphism:
    """The binary disequality relation over a colour domain."""
    pairs = [
        (a, b) for a in domain.elements for b in domain.elements if a != b
    ]
    return qm.crisp_relation(domain, 2, pairs)


def from_graph_colouring(edges, colours: int, vertices=None) -> CspInstance:
    """A graph colouring instance: one disequality constraint per edge."""
    if vertices is None:
        seen = []
        for u, v in edges:
            for w in (u, v):
                if w not in seen:
                    seen.append(w)
        vertices = seen
    V = FiniteSet("V", tuple(vertices))
    D = FiniteSet("D", tuple(range(colours)))
    neq = neq_relation(D)
    constraints = []
    for u, v in edges:
        if u not in V or v not in V:
            raise FormatError(f"edge ({u!r}, {v!r}) mentions an unknown vertex")
        constraints.append(make_constraint((u, v), neq, V))
    return CspInstance(V, D, tuple(constraints))


def from_dimacs_cnf(text: str) -> CspInstance:
    """A SAT instance from DIMACS CNF: one constraint per clause.

    A clause of width w becomes the constraint over its literal variables
    whose relation is {0,1}^w minus the single falsifying tuple.
    """
    nvars = None
    nclauses = None
    literals = []
    clauses = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise FormatError("malformed problem line", line=lineno)
            try:
                nvars, nclauses = int(parts[2]), int(parts[3])
            except ValueError:
                raise FormatError("non-numeric problem line", line=lineno) from None
            continue
        if nvars is None:
            raise FormatError("clause before problem line", line=lineno)
        for tok in line.split():
            try:
                lit = int(tok)
            except ValueError:
                raise FormatError(f"bad literal {tok!r}", line=lineno) from None
            if lit == 0:
                clauses.append(tuple(literals))
                literals = []
            else:
                if abs(lit) > nvars:
                    raise FormatError(
                        f"literal {lit} references an undeclared variable", line=lineno
                    )
                literals.append(lit)
    if literals:
        raise FormatError("unterminated clause at end of input")
    if nvars is None:
        raise FormatError("missing problem line")
    if nclauses is not None and len(clauses) != nclauses:
        raise FormatError(
            f"header declares {nclauses} clauses, found {len(clauses)}"
        )
    V = FiniteSet("V", tuple(f"x{i}" for i in range(1, nvars + 1)))
    D = FiniteSet("D", (0, 1))
    import itertools

    constraints = []
    for clause in clauses:
        w = len(clause)
        falsifying = tuple(0 if lit > 0 else 1 for lit in clause)
        tuples = [t for t in itertools.product((0, 1), repeat=w) if t != falsifying]
        rel = qm.crisp_relation(D, w, tuples)
        scope = tuple(f"x{abs(lit)}" for lit in clause)
        constraints.append(make_constraint(scope, rel, V))
    return CspInstance(V, D, tuple(constraints))


def parse_dimacs_graph(text: str):
    """Vertices and edge list from a DIMACS-like 'p edge n m' file."""
    nverts = None
    nedges = None
    edges = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        parts = line.split()
        if parts[0] == "p":
            if len(parts) != 4 or parts[1] not in ("edge", "edges"):
                raise FormatError("malformed problem line", line=lineno)
            nverts, nedges = int(parts[2]), int(parts[3])
        elif parts[0] == "e":
            if nverts is None:
                raise FormatError("edge before problem line", line=lineno)
            if len(parts) != 3:
                raise FormatError("malformed edge line", line=lineno)
            u, v = int(parts[1]), int(parts[2])
            if not (1 <= u <= nverts and 1 <= v <= nverts):
                raise FormatError(
                    f"edge ({u}, {v}) outside declared vertex range", line=lineno
                )
            edges.append((u, v))
        else:
            raise FormatError(f"unknown line type {parts[0]!r}", line=lineno)
    if nverts is None:
        raise FormatError("missing problem line")
    if nedges is not None and len(edges) != nedges:
        raise FormatError(f"header declares {nedges} edges, found {len(edges)}")
    return list(range(1, nverts + 1)), edges

"""Shared generators and independent oracles for the test suite."""

import itertools
from fractions import Fraction

from quantcsp import csp, linopt, qmorphism as qm, quantale as qv, tvcsp as tv
from quantcsp.finset import FiniteSet, FnArrow, enumerate_hom, fin_range, power

# ---------------------------------------------------------------------------
# random generators (all driven by an explicit random.Random)


def rand_set(rng, name, max_size=3, min_size=1):
    size = rng.randint(min_size, max_size)
    return FiniteSet(name, tuple(f"{name}{i}" for i in range(size)))


def rand_arrow(rng, A, B):
    return FnArrow(A, B, tuple(rng.randrange(len(B)) for _ in A.elements))


def rand_rbar_value(rng, lo=-5, hi=5, neg_inf_p=0.1):
    if rng.random() < neg_inf_p:
        return qv.RBAR.neg_inf
    return qv.RBAR.of(Fraction(rng.randint(lo, hi), rng.randint(1, 3)))


def rand_morphism(rng, quantale, A, B, max_support=5):
    entries = {}
    for _ in range(rng.randint(0, max_support)):
        f = rand_arrow(rng, A, B)
        if quantale is qv.TWO:
            entries[f] = qv.TWO.true
        else:
            entries[f] = rand_rbar_value(rng)
    return qm.QMorphism(quantale, A, B, entries)


def rand_crisp_relation(rng, D, arity, fill=0.5):
    tuples = [
        t for t in itertools.product(D.elements, repeat=arity) if rng.random() < fill
    ]
    return qm.crisp_relation(D, arity, tuples)


def rand_valued_relation(rng, D, arity, values=None, fill=0.6):
    entries = []
    for t in itertools.product(D.elements, repeat=arity):
        if rng.random() >= fill:
            continue
        v = rand_rbar_value(rng) if values is None else rng.choice(values)
        entries.append((t, v))
    return qm.valued_relation(D, arity, entries)


def rand_tvcsp_instance(rng, max_vars=4, max_dom=3, max_constraints=3):
    V = rand_set(rng, "v", max_vars)
    D = FiniteSet("d", tuple(range(rng.randint(1, max_dom))))
    constraints = []
    for _ in range(rng.randint(0, max_constraints)):
        arity = rng.choice((0, 1, 1, 2, 2, 3))
        k = fin_range(arity)
        sigma_entries = {}
        for _ in range(rng.randint(0, 3)):
            x = rand_arrow(rng, k, V)
            sigma_entries[x] = rand_rbar_value(rng)
        rho_entries = {}
        for _ in range(rng.randint(0, 4)):
            d = rand_arrow(rng, k, D)
            rho_entries[d] = rand_rbar_value(rng)
        constraints.append(
            tv.TvcspConstraint(
                arity,
                qm.QMorphism(qv.RBAR, k, V, sigma_entries),
                qm.QMorphism(qv.RBAR, k, D, rho_entries),
            )
        )
    return tv.TvcspInstance(V, D, tuple(constraints))


def rand_csp_from_language(rng, language, max_vars=4, max_constraints=4):
    V = rand_set(rng, "v", max_vars)
    constraints = []
    for _ in range(rng.randint(0, max_constraints)):
        rel = rng.choice(language.relations)
        arity = len(rel.dom)
        scope = tuple(rng.choice(V.elements) for _ in range(arity))
        constraints.append(csp.make_constraint(scope, rel, V))
    return csp.CspInstance(V, language.domain, tuple(constraints))


# ---------------------------------------------------------------------------
# independent oracles


def brute_solve_csp(instance):
    """Satisfiability by full enumeration."""
    for s in enumerate_hom(instance.variables, instance.domain):
        if csp.is_solution(instance, s):
            return s
    return None


def brute_pol_set(relation, n):
    """Operations preserving the relation, by filtering the full hom-set."""
    A = relation.cod
    from quantcsp.polymorphism import is_polymorphism

    return {
        f
        for f in enumerate_hom(power(A, n), A)
        if is_polymorphism(f, relation, n)
    }


def _solve_unique(matrix, rhs):
    """Unique exact solution of an (possibly overdetermined) system, else None."""
    m = len(matrix)
    n = len(matrix[0]) if m else 0
    rows = [list(r) + [b] for r, b in zip(matrix, rhs)]
    pivot_cols = []
    r = 0
    for c in range(n):
        pivot = next((i for i in range(r, m) if rows[i][c] != 0), None)
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        inv = Fraction(1) / rows[r][c]
        rows[r] = [a * inv for a in rows[r]]
        for i in range(m):
            if i != r and rows[i][c] != 0:
                factor = rows[i][c]
                rows[i] = [a - factor * b for a, b in zip(rows[i], rows[r])]
        pivot_cols.append(c)
        r += 1
        if r == m:
            break
    if len(pivot_cols) < n:
        return None  # not unique
    for i in range(r, m):
        if rows[i][n] != 0:
            return None  # inconsistent
    sol = [Fraction(0)] * n
    for i, c in enumerate(pivot_cols):
        sol[c] = rows[i][n]
    return sol


def minimax_oracle(lp):
    """Exact min over s of max over rows, by brute force over row subsets.

    Enumerates subsets of at most |variables|+1 rows whose gradient rows
    admit a unique convex combination summing to zero; the optimum is the
    best combined constant, or None (= -inf) when no subset qualifies.
    """
    names = list(lp.variables)
    rows = []
    for row in lp.rows:
        cmap = row.coeff_map()
        rows.append(
            (
                [cmap.get(v, Fraction(0)) for v in names],
                row.constant,
            )
        )
    if not rows:
        return None
    nvars = len(names)
    best = None
    for size in range(1, min(len(rows), nvars + 1) + 1):
        for subset in itertools.combinations(range(len(rows)), size):
            matrix = [
                [rows[i][0][v] for i in subset] for v in range(nvars)
            ] + [[Fraction(1)] * size]
            rhs = [Fraction(0)] * nvars + [Fraction(1)]
            lam = _solve_unique(matrix, rhs)
            if lam is None or any(l < 0 for l in lam):
                continue
            value = sum(
                (l * rows[i][1] for l, i in zip(lam, subset)), Fraction(0)
            )
            if best is None or value > best:
                best = value
    return best


def eval_lp_point(lp, point):
    """max over rows at a point; None when there are no rows."""
    best = None
    for row in lp.rows:
        value = (
            sum((c * point[v] for v, c in row.coeffs), Fraction(0)) + row.constant
        )
        if best is None or value > best:
            best = value
    return best


def rand_linear_instance(rng, max_vars=3, max_rows=5):
    nvars = rng.randint(1, max_vars)
    variables = tuple(f"x{i}" for i in range(nvars))
    constraints = []
    total_rows = 0
    budget = rng.randint(0, max_rows)
    while total_rows < budget:
        arity = rng.randint(1, min(2, nvars))
        weights = tuple(
            Fraction(rng.randint(-4, 4), rng.randint(1, 3)) for _ in range(arity)
        )
        sigma = []
        for _ in range(rng.randint(1, budget - total_rows)):
            x = tuple(rng.choice(variables) for _ in range(arity))
            sigma.append((x, Fraction(rng.randint(-6, 6), rng.randint(1, 3))))
        total_rows += len(sigma)
        constraints.append(
            linopt.LinearConstraint(arity, tuple(sigma), linopt.LinearRel(weights))
        )
    return linopt.LinearInstance(variables, tuple(constraints))

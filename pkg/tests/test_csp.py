import itertools
import random

import pytest

from conftest import brute_solve_csp, rand_crisp_relation
from quantcsp import csp, jsonio
from quantcsp import qmorphism as qm
from quantcsp.errors import FormatError, MismatchError
from quantcsp.finset import FiniteSet, FnArrow, arrow_labels, enumerate_hom, fin_range

D2 = FiniteSet("D", (0, 1))


def path_instance():
    return csp.from_graph_colouring([("v1", "v2")], 2)


def k3(colours):
    return csp.from_graph_colouring([(1, 2), (2, 3), (1, 3)], colours)


def test_no_constraints_every_assignment_solves():
    V = FiniteSet("V", ("a", "b"))
    inst = csp.CspInstance(V, D2, ())
    for s in enumerate_hom(V, D2):
        assert csp.is_solution(inst, s)
    assert len(csp.solution_set(inst).support) == 4


def test_single_disequality():
    inst = path_instance()
    V, D = inst.variables, inst.domain
    ok = FnArrow(V, D, (0, 1))
    bad = FnArrow(V, D, (0, 0))
    assert csp.is_solution(inst, ok)
    assert not csp.is_solution(inst, bad)
    assert sorted(f.table for f in csp.solution_set(inst).support) == [(0, 1), (1, 0)]


def test_k3_two_colours_unsolvable_by_bruteforce():
    inst = k3(2)
    assert all(not csp.is_solution(inst, s) for s in enumerate_hom(inst.variables, inst.domain))
    assert csp.solve(inst) is None
    assert not csp.o_value(inst)


def test_k3_three_colours():
    inst = k3(3)
    found = csp.solve(inst)
    assert found is not None and csp.is_solution(inst, found)
    assert csp.o_value(inst)


def test_empty_relation_unsolvable():
    V = FiniteSet("V", ("a",))
    empty = qm.crisp_relation(D2, 1, [])
    inst = csp.CspInstance(V, D2, (csp.make_constraint(("a",), empty, V),))
    assert csp.solve(inst) is None


def test_arity_zero_constraints():
    V = FiniteSet("V", ("a",))
    nonempty = qm.crisp_relation(D2, 0, [()])
    empty = qm.crisp_relation(D2, 0, [])
    sat = csp.CspInstance(V, D2, (csp.make_constraint((), nonempty, V),))
    unsat = csp.CspInstance(V, D2, (csp.make_constraint((), empty, V),))
    assert csp.solve(sat) is not None
    assert csp.solve(unsat) is None


def test_solution_value_agrees_with_is_solution():
    rng = random.Random(13)
    for _ in range(40):
        nv = rng.randint(1, 3)
        nd = rng.randint(1, 3)
        V = FiniteSet("V", tuple(f"v{i}" for i in range(nv)))
        D = FiniteSet("D", tuple(range(nd)))
        constraints = []
        for _ in range(rng.randint(0, 3)):
            k = rng.randint(1, 2)
            rel = rand_crisp_relation(rng, D, k)
            scope = tuple(rng.choice(V.elements) for _ in range(k))
            constraints.append(csp.make_constraint(scope, rel, V))
        inst = csp.CspInstance(V, D, tuple(constraints))
        for s in enumerate_hom(V, D):
            assert csp.is_solution(inst, s) == csp.solution_value_at(inst, s)


def test_solver_agrees_with_bruteforce():
    rng = random.Random(19)
    for _ in range(150):
        nv = rng.randint(1, 4)
        nd = rng.randint(1, 3)
        V = FiniteSet("V", tuple(f"v{i}" for i in range(nv)))
        D = FiniteSet("D", tuple(range(nd)))
        constraints = []
        for _ in range(rng.randint(0, 4)):
            k = rng.choice((1, 2, 2, 3))
            rel = rand_crisp_relation(rng, D, k, fill=rng.uniform(0.2, 0.9))
            scope = tuple(rng.choice(V.elements) for _ in range(k))
            constraints.append(csp.make_constraint(scope, rel, V))
        inst = csp.CspInstance(V, D, tuple(constraints))
        assert len(D) ** len(V) <= 4096
        found = csp.solve(inst)
        brute = brute_solve_csp(inst)
        assert (found is None) == (brute is None)
        if found is not None:
            assert csp.is_solution(inst, found)


def test_language_based_solution_set_form():
    # grouping constraints by relation and joining the scope singletons
    # gives the same solution set
    rng = random.Random(23)
    for _ in range(30):
        D = FiniteSet("D", (0, 1))
        rels = [rand_crisp_relation(rng, D, 2, fill=0.6) for _ in range(2)]
        V = FiniteSet("V", ("x", "y", "z"))
        constraints = []
        for _ in range(rng.randint(1, 4)):
            rel = rng.choice(rels)
            scope = tuple(rng.choice(V.elements) for _ in range(2))
            constraints.append(csp.make_constraint(scope, rel, V))
        inst = csp.CspInstance(V, D, tuple(constraints))
        per_relation = []
        for rel in rels:
            scopes = [
                qm.singleton(c.scope) for c in constraints if c.relation == rel
            ]
            if scopes:
                per_relation.append(qm.right_extension(rel, qm.join_morphisms(scopes)))
        assert per_relation
        assert qm.meet_morphisms(per_relation) == csp.solution_set(inst)


def test_solver_determinism():
    inst = k3(3)
    a = csp.solve(inst)
    b = csp.solve(inst)
    assert a == b


def test_odd_cycle_two_colouring_unsat():
    n = 21
    edges = [(i, i % n + 1) for i in range(1, n + 1)]
    assert not csp.o_value(csp.from_graph_colouring(edges, 2))
    assert csp.o_value(csp.from_graph_colouring(edges, 3))


def test_petersen_graph_colouring():
    outer = [(i, i % 5 + 1) for i in range(1, 6)]
    spokes = [(i, i + 5) for i in range(1, 6)]
    inner = [(i + 5, (i + 1) % 5 + 6) for i in range(1, 6)]
    edges = outer + spokes + inner
    assert not csp.o_value(csp.from_graph_colouring(edges, 2))
    found = csp.solve(csp.from_graph_colouring(edges, 3))
    assert found is not None


def test_yes_no_output_is_collapse_to_the_point():
    # composing the solution set with the unique map to the one-point set
    # leaves a morphism that is nonempty exactly when a solution exists
    from quantcsp.finset import terminal_map

    for inst in (path_instance(), k3(2), k3(3)):
        collapsed = qm.compose(
            qm.singleton(terminal_map(inst.domain)), csp.solution_set(inst)
        )
        assert (not collapsed.is_empty) == csp.o_value(inst)
        assert len(collapsed.support) <= 1


# ---------------------------------------------------------------------------
# ingestion


def test_dimacs_clause_relation():
    inst = csp.from_dimacs_cnf("p cnf 2 1\n1 -2 0\n")
    assert len(inst.constraints) == 1
    c = inst.constraints[0]
    assert arrow_labels(c.scope) == ("x1", "x2")
    tuples = set(qm.relation_tuples(c.relation))
    assert tuples == set(itertools.product((0, 1), repeat=2)) - {(0, 1)}


def test_dimacs_three_literal_clause():
    inst = csp.from_dimacs_cnf("p cnf 4 1\n1 -2 4 0\n")
    c = inst.constraints[0]
    assert arrow_labels(c.scope) == ("x1", "x2", "x4")
    assert set(qm.relation_tuples(c.relation)) == set(
        itertools.product((0, 1), repeat=3)
    ) - {(0, 1, 0)}


def test_dimacs_multiline_and_comments():
    text = "c header\np cnf 3 2\n1 2\n-3 0\n2 3 0\n"
    inst = csp.from_dimacs_cnf(text)
    assert len(inst.constraints) == 2
    assert inst.constraints[0].arity == 3


def test_dimacs_empty_clause_list():
    inst = csp.from_dimacs_cnf("p cnf 3 0\n")
    assert csp.solve(inst) is not None


def test_dimacs_errors():
    with pytest.raises(FormatError):
        csp.from_dimacs_cnf("p cnf 2 1\n1 -3 0\n")  # undeclared variable
    with pytest.raises(FormatError):
        csp.from_dimacs_cnf("1 2 0\n")  # clause before header
    with pytest.raises(FormatError):
        csp.from_dimacs_cnf("p cnf 2 1\n1 2\n")  # unterminated
    err = None
    try:
        csp.from_dimacs_cnf("p cnf 2 1\nx y 0\n")
    except FormatError as exc:
        err = exc
    assert err is not None and err.line == 2


def test_dimacs_satisfiability_round_trip():
    sat = "p cnf 3 2\n1 2 0\n-1 3 0\n"
    unsat = "p cnf 1 2\n1 0\n-1 0\n"
    assert csp.solve(csp.from_dimacs_cnf(sat)) is not None
    assert csp.solve(csp.from_dimacs_cnf(unsat)) is None


def test_graph_parsing_and_colouring():
    text = "c k3\np edge 3 3\ne 1 2\ne 2 3\ne 1 3\n"
    vertices, edges = csp.parse_dimacs_graph(text)
    assert vertices == [1, 2, 3]
    assert len(edges) == 3
    inst = csp.from_graph_colouring(edges, 3, vertices)
    assert len(inst.constraints) == 3
    assert csp.o_value(inst)
    assert not csp.o_value(csp.from_graph_colouring(edges, 2, vertices))


def test_graph_errors():
    with pytest.raises(FormatError):
        csp.parse_dimacs_graph("p edge 2 1\ne 1 3\n")
    with pytest.raises(FormatError):
        csp.parse_dimacs_graph("e 1 2\n")


def test_instance_json_round_trip():
    inst = k3(3)
    blob = jsonio.encode_csp_instance(inst)
    back = jsonio.decode_csp_instance(blob)
    assert back.variables == inst.variables
    assert back.domain == inst.domain
    assert [c.relation for c in back.constraints] == [
        c.relation for c in inst.constraints
    ]
    assert [c.scope for c in back.constraints] == [c.scope for c in inst.constraints]


def test_constraint_shape_validation():
    V = FiniteSet("V", ("a",))
    rel = qm.crisp_relation(D2, 2, [(0, 1)])
    with pytest.raises(MismatchError):
        csp.Constraint(1, FnArrow(fin_range(1), V, (0,)), rel)

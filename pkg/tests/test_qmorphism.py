import random

import pytest

from conftest import rand_morphism, rand_set
from quantcsp import jsonio
from quantcsp.errors import MismatchError, SizeExceeded
from quantcsp.finset import FiniteSet, FnArrow, enumerate_hom, identity, tuple_arrow
from quantcsp.qmorphism import (
    bottom,
    compose,
    crisp_relation,
    eval_right_extension_at,
    eval_right_lifting_at,
    join_morphisms,
    leq,
    meet_morphisms,
    relation_tuples,
    right_extension,
    right_lifting,
    singleton,
    singleton_weighted,
    top,
)
from quantcsp.quantale import RBAR, TWO

D2 = FiniteSet("D", (0, 1))


def rbar_singleton(f, x):
    return singleton_weighted(f, RBAR.of(x))


def test_singleton_is_identity_for_compose():
    A = FiniteSet("A", ("p", "q"))
    f = FnArrow(A, D2, (1, 0))
    phi = singleton(f)
    assert compose(phi, singleton(identity(A))) == phi
    assert compose(singleton(identity(D2)), phi) == phi


def test_weighted_singleton_normalisation():
    A = FiniteSet("A", ("p",))
    f = FnArrow(A, D2, (0,))
    assert rbar_singleton(f, 0) == singleton(f, RBAR)
    assert singleton_weighted(f, RBAR.bottom).is_empty


def test_compose_bool_is_setwise():
    A, B, C = D2, FiniteSet("B", (0, 1)), FiniteSet("C", (0, 1))
    rng = random.Random(3)
    for _ in range(50):
        phi = rand_morphism(rng, TWO, A, B)
        psi = rand_morphism(rng, TWO, B, C)
        expected = {
            FnArrow(A, C, tuple(g.table[i] for i in f.table))
            for f in phi.support
            for g in psi.support
        }
        assert set(compose(psi, phi).support) == expected


def test_compose_rbar_min_plus():
    A = FiniteSet("A", ("p",))
    B = FiniteSet("B", ("u", "v"))
    C = FiniteSet("C", ("x",))
    f = FnArrow(A, B, (0,))
    g = FnArrow(B, C, (0, 0))
    psi_phi = compose(rbar_singleton(g, 3), rbar_singleton(f, 2))
    assert psi_phi.value_at(FnArrow(A, C, (0,))) == RBAR.of(5)
    # two factorisations of the same composite: join (numeric min) wins
    f2 = FnArrow(A, B, (1,))
    phi = join_morphisms([rbar_singleton(f, 2), rbar_singleton(f2, 10)])
    out = compose(rbar_singleton(g, 3), phi)
    assert out.value_at(FnArrow(A, C, (0,))) == RBAR.of(5)


def test_compose_with_bottom_annihilates():
    A = FiniteSet("A", ("p",))
    empty = bottom(TWO, A, D2)
    anything = singleton(FnArrow(D2, D2, (0, 1)))
    assert compose(anything, empty).is_empty


def test_right_extension_disequality_example():
    # relation: the two distinct pairs over {0,1}; scope the pair (v1, v2)
    V = FiniteSet("V", ("v1", "v2"))
    neq = crisp_relation(D2, 2, [(0, 1), (1, 0)])
    scope = singleton(tuple_arrow(("v1", "v2"), V))
    ext = right_extension(neq, scope)
    tables = sorted(f.table for f in ext.support)
    assert tables == [(0, 1), (1, 0)]  # exactly the non-constant maps V -> {0,1}


def test_right_extension_along_identity():
    rng = random.Random(5)
    A, B = rand_set(rng, "A"), rand_set(rng, "B")
    theta = rand_morphism(rng, RBAR, A, B)
    assert right_extension(theta, singleton(identity(A), RBAR)) == theta


def test_right_extension_singleton_difference():
    # theta = {h}^5, phi = {f}^2 with h = g∘f: the extension at g is 3
    A = FiniteSet("A", ("p",))
    B = FiniteSet("B", ("u", "v"))
    C = FiniteSet("C", ("x", "y"))
    f = FnArrow(A, B, (0,))
    g = FnArrow(B, C, (0, 1))
    h = FnArrow(A, C, (0,))
    ext = right_extension(rbar_singleton(h, 5), rbar_singleton(f, 2))
    assert ext.value_at(g) == RBAR.of(3)


def test_lazy_evaluators_match_materialised():
    rng = random.Random(17)
    for quantale in (TWO, RBAR):
        for _ in range(60):
            A, B, C = (rand_set(rng, n) for n in "ABC")
            phi = rand_morphism(rng, quantale, A, B)
            psi = rand_morphism(rng, quantale, B, C)
            theta = rand_morphism(rng, quantale, A, C)
            ext = right_extension(theta, phi)
            for g in enumerate_hom(B, C):
                assert ext.value_at(g) == eval_right_extension_at(theta, phi, g)
            lift = right_lifting(psi, theta)
            for f in enumerate_hom(A, B):
                assert lift.value_at(f) == eval_right_lifting_at(psi, theta, f)


def test_extension_of_empty_is_top():
    A, B, C = D2, FiniteSet("B", (0,)), FiniteSet("C", (0, 1))
    theta = bottom(TWO, A, C)
    ext = right_extension(theta, bottom(TWO, A, B))
    assert ext == top(TWO, B, C)


def test_bool_extension_is_forall_membership():
    rng = random.Random(23)
    for _ in range(40):
        A, B, C = (rand_set(rng, n) for n in "ABC")
        phi = rand_morphism(rng, TWO, A, B)
        theta = rand_morphism(rng, TWO, A, C)
        for g in enumerate_hom(B, C):
            expected = all(
                FnArrow(A, C, tuple(g.table[i] for i in f.table)) in theta
                for f in phi.support
            )
            got = eval_right_extension_at(theta, phi, g) == TWO.true
            assert got == expected


def test_order_meet_join():
    A = FiniteSet("A", ("p",))
    f = FnArrow(A, D2, (0,))
    three, five = rbar_singleton(f, 3), rbar_singleton(f, 5)
    assert leq(three, three)
    assert join_morphisms([three, five]) == three  # join is numeric min
    assert meet_morphisms([three, five]) == five
    g = FnArrow(A, D2, (1,))
    u = join_morphisms([singleton(f), singleton(g)])
    v = singleton(f)
    assert meet_morphisms([u, v]) == v  # intersection
    assert join_morphisms([u, v]) == u  # union
    assert leq(v, u) and not leq(u, v)


def test_meet_empty_family_materialises_with_guard():
    big = FiniteSet("big", tuple(range(10)))
    with pytest.raises(SizeExceeded):
        meet_morphisms([], quantale=TWO, dom=big, cod=big, limit=100)
    small = meet_morphisms([], quantale=TWO, dom=D2, cod=D2)
    assert len(small.support) == 4


def test_adjointness_random():
    rng = random.Random(29)
    for quantale in (TWO, RBAR):
        for _ in range(100):
            A, B, C = (rand_set(rng, n) for n in "ABC")
            phi = rand_morphism(rng, quantale, A, B)
            psi = rand_morphism(rng, quantale, B, C)
            theta = rand_morphism(rng, quantale, A, C)
            lhs = leq(psi, right_extension(theta, phi))
            mid = leq(compose(psi, phi), theta)
            rhs = leq(phi, right_lifting(psi, theta))
            assert lhs == mid == rhs


def _identities_case(rng, quantale):
    A, B, C, D = (rand_set(rng, n) for n in "ABCD")
    phi = rand_morphism(rng, quantale, A, B)
    psi = rand_morphism(rng, quantale, B, C)
    theta = rand_morphism(rng, quantale, C, D)
    gamma = rand_morphism(rng, quantale, A, D)
    thetas = [rand_morphism(rng, quantale, A, C) for _ in range(2)]
    phis = [rand_morphism(rng, quantale, A, B) for _ in range(2)]
    psis = [rand_morphism(rng, quantale, B, C) for _ in range(2)]
    psi_bc = rand_morphism(rng, quantale, B, C)

    # meets/joins commute with extension and lifting
    assert right_extension(meet_morphisms(thetas), phi) == meet_morphisms(
        [right_extension(t, phi) for t in thetas]
    )
    assert right_extension(thetas[0], join_morphisms(phis)) == meet_morphisms(
        [right_extension(thetas[0], p) for p in phis]
    )
    assert right_lifting(psi_bc, meet_morphisms(thetas)) == meet_morphisms(
        [right_lifting(psi_bc, t) for t in thetas]
    )
    assert right_lifting(join_morphisms(psis), thetas[0]) == meet_morphisms(
        [right_lifting(p, thetas[0]) for p in psis]
    )
    # extension along a composite, lifting through a composite, and the mixed law
    assert right_extension(gamma, compose(psi, phi)) == right_extension(
        right_extension(gamma, phi), psi
    )
    assert right_lifting(compose(theta, psi), gamma) == right_lifting(
        psi, right_lifting(theta, gamma)
    )
    assert right_lifting(theta, right_extension(gamma, phi)) == right_extension(
        right_lifting(theta, gamma), phi
    )


def test_residuation_identities_random():
    rng = random.Random(31)
    for quantale in (TWO, RBAR):
        for _ in range(60):
            _identities_case(rng, quantale)


def test_compose_distributes_over_join():
    rng = random.Random(37)
    for quantale in (TWO, RBAR):
        for _ in range(40):
            A, B, C = (rand_set(rng, n) for n in "ABC")
            phis = [rand_morphism(rng, quantale, A, B) for _ in range(2)]
            psi = rand_morphism(rng, quantale, B, C)
            assert compose(psi, join_morphisms(phis)) == join_morphisms(
                [compose(psi, p) for p in phis]
            )
            psis = [rand_morphism(rng, quantale, B, C) for _ in range(2)]
            phi = rand_morphism(rng, quantale, A, B)
            assert compose(join_morphisms(psis), phi) == join_morphisms(
                [compose(p, phi) for p in psis]
            )


def test_compose_associative():
    rng = random.Random(41)
    for quantale in (TWO, RBAR):
        for _ in range(40):
            A, B, C, D = (rand_set(rng, n) for n in "ABCD")
            phi = rand_morphism(rng, quantale, A, B)
            psi = rand_morphism(rng, quantale, B, C)
            theta = rand_morphism(rng, quantale, C, D)
            assert compose(compose(theta, psi), phi) == compose(
                theta, compose(psi, phi)
            )


def test_shape_errors():
    A, B = D2, FiniteSet("B", (0, 1, 2))
    phi = bottom(TWO, A, B)
    with pytest.raises(MismatchError):
        compose(phi, phi)
    with pytest.raises(MismatchError):
        leq(phi, bottom(TWO, B, A))


def test_relation_helpers_and_json():
    rel = crisp_relation(D2, 2, [(0, 1), (1, 0)])
    assert relation_tuples(rel) == [(0, 1), (1, 0)]
    rng = random.Random(43)
    for quantale in (TWO, RBAR):
        for _ in range(20):
            A, B = rand_set(rng, "A"), rand_set(rng, "B")
            m = rand_morphism(rng, quantale, A, B)
            assert jsonio.decode_morphism(jsonio.encode_morphism(m)) == m

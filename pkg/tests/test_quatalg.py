"""Quaternion arithmetic, orders, ideals, and representation maps."""

import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from orienter import numtheory as nt
from orienter import quatalg as qa


A419 = qa.QuatAlgebra(419, 1)
O419 = qa.standard_max_order(A419)


def rand_elem(algebra, rng, span=20, half=True):
    den = (1, 2) if half else (1,)
    return algebra.element(*[Fraction(rng.randrange(-span, span + 1), rng.choice(den))
                             for _ in range(4)])


# ------------------------------------------------------------- element layer

def test_multiplication_table():
    i, j, k = A419.i(), A419.j(), A419.k()
    p, q = 419, 1
    assert i * i == A419.element(-q)
    assert j * j == A419.element(-p)
    assert k * k == A419.element(-p * q)
    assert i * j == k and j * i == -k
    assert i * k == j.scale(-q) and k * i == j.scale(q)
    assert j * k == i.scale(p) and k * j == i.scale(-p)


def test_trace_norm_conjugate_basics():
    x = A419.element(Fraction(1, 2), 3, Fraction(-5, 2), 7)
    assert x.trd == 1
    assert x.nrd == Fraction(1, 4) + 9 + 419 * Fraction(25, 4) + 419 * 49
    assert x + x.conjugate() == A419.element(x.trd)
    assert x * x.conjugate() == A419.element(x.nrd)
    # characteristic polynomial: x^2 - trd*x + nrd = 0
    assert x * x - x.scale(x.trd) + A419.element(x.nrd) == A419.element(0)


@given(st.integers(0, 2**32))
@settings(max_examples=40, deadline=None)
def test_element_algebra_laws(seed):
    rng = random.Random(seed)
    a, b, c = (rand_elem(A419, rng) for _ in range(3))
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert (a * b).nrd == a.nrd * b.nrd
    assert (a * b).conjugate() == b.conjugate() * a.conjugate()
    assert (a + b).trd == a.trd + b.trd
    if not a.is_zero():
        assert a * a.inverse() == A419.one()


def test_algebra_parameter_validation():
    with pytest.raises(AssertionError):
        qa.QuatAlgebra(419, 2)   # p = 3 mod 4 needs q = 1
    with pytest.raises(AssertionError):
        qa.QuatAlgebra(13, 1)    # p = 5 mod 8 needs q = 2
    with pytest.raises(AssertionError):
        qa.QuatAlgebra(17, 5)    # odd q must be 3 mod 4
    with pytest.raises(AssertionError):
        qa.QuatAlgebra(73, 19)   # (-19 | 73) = +1: splits, not a representation
    assert qa.QuatAlgebra(17, 3).denominator_class == 6


# ---------------------------------------------------------------- HNF layer

def test_hnf_identity_lattice():
    prof = qa.hnf([(1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1)])
    assert prof.N == 1
    assert prof.e == tuple(tuple(Fraction(int(m == n)) for n in range(4)) for m in range(4))


def test_hnf_standard_order_shape():
    # the p = 3 mod 4 order reduces to rows (1+j)/2, (i+k)/2, j, k with N = 2
    h = Fraction(1, 2)
    assert O419.basis == (
        (h, 0, h, 0),
        (0, h, 0, h),
        (0, 0, 1, 0),
        (0, 0, 0, 1),
    )
    assert O419.profile().N == 2
    assert O419.profile()[0, 0] == h


def test_hnf_rank_deficient():
    with pytest.raises(qa.RankDeficient):
        qa.lattice_hnf([(1, 0, 0, 0), (0, 1, 0, 0), (1, 1, 0, 0), (2, 1, 0, 0)])


@given(st.integers(0, 2**32))
@settings(max_examples=30, deadline=None)
def test_hnf_invariant_under_row_operations(seed):
    rng = random.Random(seed)
    rows = [[Fraction(rng.randrange(-30, 31), rng.choice((1, 2, 3))) for _ in range(4)]
            for _ in range(4)]
    try:
        base = qa.lattice_hnf(rows)
    except qa.RankDeficient:
        return
    # shuffle, add random integer multiples of other rows, negate: same lattice
    mixed = [row[:] for row in rows]
    for _ in range(6):
        i, j = rng.randrange(4), rng.randrange(4)
        if i != j:
            t = rng.randrange(-3, 4)
            mixed[i] = [a + t * b for a, b in zip(mixed[i], mixed[j])]
    rng.shuffle(mixed)
    mixed[0] = [-a for a in mixed[0]]
    assert qa.lattice_hnf(mixed) == base
    assert qa.lattice_hnf(base) == base  # idempotent


def test_lattice_membership_and_solve():
    rng = random.Random(5)
    for _ in range(20):
        coeffs = [rng.randrange(-9, 10) for _ in range(4)]
        vec = [sum(c * row[m] for c, row in zip(coeffs, O419.basis)) for m in range(4)]
        assert qa.lattice_contains(O419.basis, vec)
        elem = qa.QuatElement(A419, tuple(map(Fraction, vec)))
        assert O419.contains(elem)
    assert O419.contains(A419.i())  # i = 2*(i+k)/2 - k
    assert O419.contains(A419.element(0, Fraction(1, 2), 0, Fraction(1, 2)))
    assert not O419.contains(A419.element(Fraction(1, 2), Fraction(1, 2), 0, 0))
    assert not O419.contains(A419.element(0, 0, Fraction(1, 2), 0))


# ------------------------------------------------------------ order layer

@pytest.mark.parametrize("p,q", [(419, 1), (83, 1), (13, 2), (29, 2), (17, 3), (73, None)])
def test_standard_orders_are_maximal(p, q):
    if q is None:  # p = 1 mod 8: take the smallest valid odd q
        q = qa.alternative_representations(p, 1)[0].q
    alg = qa.QuatAlgebra(p, q)
    order = qa.standard_max_order(alg)
    assert order.is_ring()
    assert order.reduced_discriminant() == p
    assert order.profile()[0, 0] == Fraction(1, 2)
    one = alg.one()
    assert order.contains(one)


def test_alternative_representations_are_orders():
    for p in (419, 83, 79, 10007):
        for alt in qa.alternative_representations(p, 3):
            assert alt.q % 4 == 3 and nt.is_prime(alt.q)
            assert nt.kronecker(-alt.q, p) == -1
            order = qa.standard_max_order(alt)
            assert order.reduced_discriminant() == p
            # denominators stay within the advertised class
            assert order.profile().N in (alt.q, 2 * alt.q)


def test_random_maximal_orders_deterministic_and_maximal():
    seen = set()
    for seed in range(6):
        o1 = qa.random_maximal_order(A419, seed=seed)
        o2 = qa.random_maximal_order(A419, seed=seed)
        assert o1.basis == o2.basis
        assert o1.reduced_discriminant() == 419
        assert o1.is_ring()
        seen.add(o1.basis)
    assert len(seen) > 3  # different seeds explore different orders


# ------------------------------------------------------------ ideal layer

def test_connecting_ideal_trivial():
    ideal = qa.connecting_ideal(O419, O419)
    assert ideal.norm() == 1
    assert ideal.basis == O419.basis


def test_connecting_ideal_left_right_orders():
    other = qa.random_maximal_order(A419, seed=42)
    ideal = qa.connecting_ideal(O419, other)
    # recompute the multiplier rings from scratch and compare
    fresh = qa.QuatIdeal(A419, ideal.basis)
    assert fresh.left_order() == O419
    assert fresh.right_order() == other
    assert fresh.norm() == ideal.norm()


def test_connecting_ideal_conjugate_order():
    rng = random.Random(3)
    gamma = rand_elem(A419, rng, span=6, half=False)
    while gamma.nrd == 0:
        gamma = rand_elem(A419, rng, span=6, half=False)
    conj_order = O419.conjugate_by(gamma)
    assert conj_order.reduced_discriminant() == 419
    ideal = qa.connecting_ideal(O419, conj_order)
    # N(I) * O_R(I) = conj(I) * I as lattices
    n = ideal.norm()
    lhs = [tuple(n * x for x in row) for row in conj_order.basis]
    prods = [(a.conjugate() * b).coords for a in ideal.basis_elements()
             for b in ideal.basis_elements()]
    assert qa.lattice_hnf(lhs) == qa.lattice_hnf(prods)


def test_hnf_profile_suite_random_orders():
    # e00 = 1/2, entries >= 0, denominators | K*N(I), e22*e33 <= N(I),
    # e01 in {0, 1/(2K e22 e33)} -- on 50 seeded random maximal orders
    K = A419.denominator_class
    for seed in range(50):
        order = qa.random_maximal_order(A419, seed=seed)
        ideal = qa.connecting_ideal(order, O419)
        n_i = ideal.norm()
        e = order.profile().e
        assert e[0][0] == Fraction(1, 2)
        assert all(e[m][n] >= 0 for m in range(4) for n in range(4))
        assert all((K * n_i) % e[m][n].denominator == 0
                   for m in range(4) for n in range(4))
        e22e33 = e[2][2] * e[3][3]
        assert e22e33 <= n_i
        assert e[0][1] in (0, Fraction(1, 2 * K * e22e33))


def test_small_equivalent_ideals_norm_bound():
    # every random order's connecting ideal has an equivalent of norm <= 19
    assert qa.lemma_norm_bound(419) == 19
    for seed in range(50):
        order = qa.random_maximal_order(A419, seed=seed)
        ideal = qa.connecting_ideal(O419, order)
        results = qa.small_equivalent_ideals(ideal, count=3)
        assert results, seed
        for j_ideal, gamma in results:
            assert j_ideal.norm() <= 19, (seed, j_ideal.norm())
            assert ideal.contains(gamma)
            # J = I * conj(gamma)/N(I), same left order, conjugate right order
            n_i = ideal.norm()
            rebuilt = ideal.mul_element(gamma.conjugate().scale(Fraction(1, n_i)))
            assert rebuilt.basis == j_ideal.basis
            assert j_ideal.left_order() == O419


def test_small_equivalent_right_order_conjugate():
    order = qa.random_maximal_order(A419, seed=9)
    ideal = qa.connecting_ideal(O419, order)
    j_ideal, gamma = qa.small_equivalent_ideals(ideal, count=1)[0]
    expect = order.conjugate_by(gamma.conjugate())
    assert j_ideal.right_order() == expect


def test_short_vectors_frozen_small_case():
    # the Z[i]-plane inside the order: 1, i, 1 +- i, 2, 2i, 2 +- i, 1 +- 2i
    vecs = qa.short_vectors(A419, O419.basis, 5)
    got = {(n, v) for n, v in vecs}
    assert got == {
        (1, (1, 0, 0, 0)), (1, (0, 1, 0, 0)),
        (2, (1, 1, 0, 0)), (2, (1, -1, 0, 0)),
        (4, (2, 0, 0, 0)), (4, (0, 2, 0, 0)),
        (5, (2, 1, 0, 0)), (5, (2, -1, 0, 0)),
        (5, (1, 2, 0, 0)), (5, (1, -2, 0, 0)),
    }
    for n, v in vecs:
        assert qa.QuatElement(A419, v).nrd == n
        assert qa.lattice_contains(O419.basis, v)


def test_random_ideal_step_norms():
    rng = random.Random(0)
    for n in (2, 3, 5, 101):
        ideal = qa.random_ideal_step(O419, n, rng)
        assert ideal.norm() == n
        assert ideal.left_order() == O419
        right = ideal.right_order()
        assert right.reduced_discriminant() == 419


# ---------------------------------------------- representation isomorphisms

def test_representation_map_identity():
    phi = qa.representation_isomorphism(A419, A419)
    x = A419.element(1, 2, 3, 4)
    assert phi(x) == x and phi.inv(x) == x


@pytest.mark.parametrize("p", [419, 83, 10007])
def test_representation_map_properties(p):
    q = 1 if p % 4 == 3 else 2 if p % 8 == 5 else None
    assert q is not None
    src = qa.QuatAlgebra(p, q)
    for dst in qa.alternative_representations(p, 2):
        phi = qa.representation_isomorphism(src, dst)
        rng = random.Random(p)
        for _ in range(10):
            a, b = rand_elem(src, rng), rand_elem(src, rng)
            assert phi(a * b) == phi(a) * phi(b)
            assert phi(a + b) == phi(a) + phi(b)
            assert phi(a).nrd == a.nrd and phi(a).trd == a.trd
            assert phi.inv(phi(a)) == a
        image = phi.map_order(qa.standard_max_order(src))
        assert image.reduced_discriminant() == p
        assert image.is_ring()
        assert phi.map_order_back(image).basis == qa.standard_max_order(src).basis


def test_representation_map_between_alternatives():
    a3 = qa.QuatAlgebra(419, 3)
    a7 = qa.QuatAlgebra(419, 7)
    phi = qa.representation_isomorphism(a3, a7)
    rng = random.Random(77)
    x, y = rand_elem(a3, rng), rand_elem(a3, rng)
    assert phi(x * y) == phi(x) * phi(y)
    assert phi(x).nrd == x.nrd


# ------------------------------------------------------------- 256-bit scale

def test_cryptographic_size_operations():
    p = nt.next_prime(2**255)
    while p % 4 != 3:
        p = nt.next_prime(p)
    alg = qa.QuatAlgebra(p, 1)
    o0 = qa.standard_max_order(alg)
    assert o0.reduced_discriminant() == p

    far = qa.random_maximal_order(alg, seed=3, ideal_norm=2, steps=3)
    ideal = qa.connecting_ideal(o0, far)
    assert 1 < ideal.norm() <= 8
    results = qa.small_equivalent_ideals(ideal, count=4)
    bound = qa.lemma_norm_bound(p)
    for j_ideal, gamma in results:
        assert j_ideal.norm() <= bound

    dst = qa.alternative_representations(p, 1)[0]
    phi = qa.representation_isomorphism(alg, dst)
    x = alg.element(3, Fraction(1, 2), 5, Fraction(7, 2))
    assert phi.inv(phi(x)) == x
    assert phi(x).nrd == x.nrd

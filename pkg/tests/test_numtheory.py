import math

import pytest
from hypothesis import given, settings, strategies as st

from orienter import numtheory as nt

from oracles import (
    cornacchia_box,
    smooth_fact_reference,
    sqrt_table,
    trial_division_factor,
)


# ---------------------------------------------------------------- primality

def test_is_prime_small_agrees_with_sieve():
    sieve = set(nt.primes_upto(5000))
    for n in range(5000):
        assert nt.is_prime(n) == (n in sieve)


def test_is_prime_large():
    assert nt.is_prime(2**127 - 1)
    assert not nt.is_prime(2**128 - 1)
    # Carmichael numbers must not fool it
    for n in (561, 41041, 825265, 321197185):
        assert not nt.is_prime(n)


def test_next_prime():
    assert nt.next_prime(1) == 2
    assert nt.next_prime(2) == 3
    assert nt.next_prime(419) == 421
    assert nt.next_prime(10**6) == 1000003


# ---------------------------------------------------------------- factoring

def test_factorize_matches_trial_division():
    for n in list(range(1, 2000)) + [2**32 + 1, 10**12 + 39, 999999999989]:
        assert nt.factorize(n) == trial_division_factor(n)


@given(st.integers(min_value=1, max_value=10**9))
@settings(max_examples=200, deadline=None)
def test_factorize_product_and_primality(n):
    fs = nt.factorize(n)
    assert math.prod(fs) == n
    assert fs == sorted(fs)
    assert all(nt.is_prime(p) for p in fs)


def test_smooth_fact_examples():
    assert nt.smooth_fact(12, 3) == [2, 2, 3]
    assert nt.smooth_fact(35, 5) is None  # 7 > 5
    assert nt.smooth_fact(1001, 13) == [7, 11, 13]
    assert nt.smooth_fact(1, 2) == []


def test_smooth_fact_agrees_with_reference_exhaustive():
    for n in range(1, 20000):
        for bound in (3, 10, 100):
            assert nt.smooth_fact(n, bound) == smooth_fact_reference(n, bound), n


@given(st.integers(min_value=1, max_value=10**6), st.sampled_from([3, 10, 100]))
@settings(max_examples=300, deadline=None)
def test_smooth_fact_agrees_with_reference_sampled(n, bound):
    assert nt.smooth_fact(n, bound) == smooth_fact_reference(n, bound)


def test_smooth_fact_large_smooth_number():
    n = 2**20 * 3**15 * 13**6
    assert nt.smooth_fact(n, 13) == [2] * 20 + [3] * 15 + [13] * 6
    assert nt.smooth_fact(n * nt.next_prime(10**8), 13) is None


# ---------------------------------------------------------------- kronecker

def test_kronecker_against_euler_criterion():
    for p in (3, 5, 7, 11, 13, 419, 10007):
        for a in range(-20, 21):
            expect = pow(a % p, (p - 1) // 2, p)
            expect = {0: 0, 1: 1, p - 1: -1}[expect]
            assert nt.kronecker(a, p) == expect, (a, p)


def test_kronecker_multiplicativity():
    for n in (15, 21, 35, 77):
        for a in range(1, 40):
            for b in range(1, 40):
                assert nt.kronecker(a * b, n) == nt.kronecker(a, n) * nt.kronecker(b, n)


# ---------------------------------------------------------------- square roots

def test_sqrt_mod_prime_examples():
    assert nt.sqrt_mod_prime(4, 419) == {2, 417}
    assert nt.sqrt_mod_prime(0, 419) == {0}
    assert nt.sqrt_mod_prime(2, 7) == {3, 4}


@pytest.mark.parametrize("p", [3, 7, 11, 13, 17, 97, 101, 419])
def test_sqrt_mod_prime_exhaustive(p):
    for a in range(p):
        got = nt.sqrt_mod_prime(a, p)
        expect = sqrt_table(a, p)
        if got is None:
            assert not expect
            assert pow(a, (p - 1) // 2, p) == p - 1
        else:
            assert got == expect
            for r in got:
                assert r * r % p == a


def test_sqrt_mod_prime_large():
    p = 2**255 - 19
    rts = nt.sqrt_mod_prime(4, p)
    assert 2 in rts
    for r in rts:
        assert r * r % p == 4


def test_sqrt_mod_prime_power_brute():
    for p, e in [(2, 5), (3, 4), (5, 3), (7, 2)]:
        pe = p**e
        for a in range(pe):
            got = nt._sqrt_mod_prime_power(a, p, e)
            assert got == sorted(r for r in range(pe) if r * r % pe == a), (p, e, a)


def test_sqrt_mod_prime_power_large_lift():
    p, e = 10007, 3
    pe = p**e
    for a in (2, 5, 1234567):
        roots = nt._sqrt_mod_prime_power(a % pe, p, e)
        for r in roots:
            assert r * r % pe == a % pe
        # every unit square must be hit
    r = 123456789 % pe
    a = r * r % pe
    assert r in nt._sqrt_mod_prime_power(a, p, e) or pe - r in nt._sqrt_mod_prime_power(a, p, e)


# ---------------------------------------------------------------- cornacchia

def test_cornacchia_trivial_and_frozen():
    assert nt.cornacchia_all(1, 0) == {(0, 0)}
    assert nt.cornacchia_all(1, 25) == {
        (5, 0), (-5, 0), (0, 5), (0, -5),
        (3, 4), (3, -4), (-3, 4), (-3, -4),
        (4, 3), (4, -3), (-4, 3), (-4, -3),
    }
    assert nt.cornacchia_all(3, 28) == {
        (5, 1), (5, -1), (-5, 1), (-5, -1),
        (4, 2), (4, -2), (-4, 2), (-4, -2),
        (1, 3), (1, -3), (-1, 3), (-1, -3),
    }


def test_cornacchia_box_agreement_dense():
    for q in (1, 2, 3, 7):
        for v in range(0, 3000):
            assert nt.cornacchia_all(q, v) == cornacchia_box(q, v), (q, v)


@given(st.integers(min_value=0, max_value=10**5), st.sampled_from([1, 2, 3, 7]))
@settings(max_examples=300, deadline=None)
def test_cornacchia_box_agreement_sampled(v, q):
    assert nt.cornacchia_all(q, v) == cornacchia_box(q, v)


@given(st.integers(min_value=1, max_value=10**4), st.sampled_from([1, 2, 3, 7]))
@settings(max_examples=200, deadline=None)
def test_cornacchia_solution_set_invariants(v, q):
    sols = nt.cornacchia_all(q, v)
    for x, y in sols:
        assert x * x + q * y * y == v
        assert (-x, y) in sols and (x, -y) in sols and (-x, -y) in sols


def test_cornacchia_prime_targets():
    # primes are the rerandomized driver's main diet
    for p in (5, 13, 10007, 2**89 - 1):
        sols = nt.cornacchia_all(1, p, factors_of_v=[p])
        for x, y in sols:
            assert x * x + y * y == p
        if p % 4 == 1:
            assert sols


def test_cornacchia_imprimitive_square_scaling():
    # 100 = 2^2 * 5^2: includes (10,0), (0,10), (6,8), ...
    sols = nt.cornacchia_all(1, 100)
    assert (10, 0) in sols and (0, 10) in sols and (6, 8) in sols and (8, 6) in sols


def test_cornacchia_respects_provided_factors():
    v = 98  # 2 * 7^2
    assert nt.cornacchia_all(1, v, factors_of_v=[2, 7, 7]) == cornacchia_box(1, v)


# ------------------------------------------------------- feasibility filter

def test_sum_of_squares_feasible_frozen():
    assert nt.sum_of_squares_feasible(21, 1) is False  # 3 * 7, both 3 mod 4 odd power
    assert nt.sum_of_squares_feasible(25, 1) is True   # 3^2 + 4^2
    assert nt.sum_of_squares_feasible(0, 1) is True


def test_sum_of_squares_feasible_exact_for_q1():
    for v in range(0, 2000):
        has = bool(cornacchia_box(1, v))
        assert nt.sum_of_squares_feasible(v, 1) == has, v


@given(st.integers(min_value=0, max_value=5000), st.sampled_from([2, 3, 7]))
@settings(max_examples=300, deadline=None)
def test_sum_of_squares_feasible_necessary(v, q):
    # False must imply the equation has no solutions; True commits to nothing.
    if not nt.sum_of_squares_feasible(v, q):
        assert not cornacchia_box(q, v)


# ---------------------------------------------------------------- crt helper

def test_crt_basic():
    assert nt.crt([1, 2], [3, 5]) == 7
    assert nt.crt([0, 0, 0], [2, 3, 5]) == 0
    x = nt.crt([2, 3, 2], [3, 5, 7])
    assert x % 3 == 2 and x % 5 == 3 and x % 7 == 2

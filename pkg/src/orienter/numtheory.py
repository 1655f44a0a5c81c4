"""Integer subroutines: primality, factoring, smoothness, Cornacchia, square roots.

Everything here is exact integer arithmetic.  Randomized routines take an
explicit 64-bit seed (default 0) so runs are reproducible.
"""

import logging
import math
import random

log = logging.getLogger(__name__)


class FactorBudgetExceeded(Exception):
    """The configured factor-finder budget ran out before n was split."""


# Deterministic Miller-Rabin witness set, valid for all n < 3.317e24.
_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
_MR_DETERMINISTIC_LIMIT = 3_317_044_064_679_887_385_961_981

_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47)


def _miller_rabin_round(n, a):
    # n odd > 2; returns False if a witnesses compositeness
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    x = pow(a, d, n)
    if x == 1 or x == n - 1:
        return True
    for _ in range(r - 1):
        x = x * x % n
        if x == n - 1:
            return True
    return False


def is_prime(n: int, seed: int = 0) -> bool:
    """Miller-Rabin: deterministic below 3.3e24, else 64 seeded rounds."""
    if n < 2:
        return False
    for p in _SMALL_PRIMES:
        if n == p:
            return True
        if n % p == 0:
            return False
    if n < _MR_DETERMINISTIC_LIMIT:
        return all(_miller_rabin_round(n, a) for a in _MR_WITNESSES)
    rng = random.Random(seed)
    return all(_miller_rabin_round(n, rng.randrange(2, n - 1)) for _ in range(64))


def next_prime(n: int) -> int:
    """Smallest prime strictly greater than n."""
    k = max(n + 1, 2)
    if k > 2 and k % 2 == 0:
        k += 1
    while not is_prime(k):
        k += 1 if k == 2 else 2
    return k


def primes_upto(n):
    """Sieve of Eratosthenes; all primes <= n in increasing order."""
    if n < 2:
        return []
    sieve = bytearray([1]) * (n + 1)
    sieve[0] = sieve[1] = 0
    for p in range(2, math.isqrt(n) + 1):
        if sieve[p]:
            sieve[p * p :: p] = bytearray(len(sieve[p * p :: p]))
    return [i for i in range(2, n + 1) if sieve[i]]


def is_perfect_square(n: int) -> bool:
    if n < 0:
        return False
    r = math.isqrt(n)
    return r * r == n


def _pollard_rho_brent(n, rng, budget):
    """Brent-cycle Pollard rho.  Returns a nontrivial factor of composite n,
    or None once `budget` squarings are exhausted."""
    if n % 2 == 0:
        return 2
    spent = 0
    while spent < budget:
        y = rng.randrange(1, n)
        c = rng.randrange(1, n)
        m = 128
        g = r = q = 1
        x = ys = y
        while g == 1 and spent < budget:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                spent += min(m, r - k)
                g = math.gcd(q, n)
                k += m
            r *= 2
        if g == n:
            # backtrack one step at a time
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if 1 < g < n:
            return g
    return None


def find_factor(n, seed=0, budget=200_000):
    """A nontrivial factor of composite n, or None if the budget runs out.

    Trial division by a few small primes first, then Brent's rho.
    """
    assert n > 1 and not is_prime(n)
    for p in _SMALL_PRIMES:
        if n % p == 0:
            return p
    if is_perfect_square(n):
        return math.isqrt(n)
    return _pollard_rho_brent(n, random.Random(seed), budget)


def factorize(n, seed=0, budget=200_000):
    """Full prime factorization of n >= 1 as a sorted list with multiplicity.

    Raises FactorBudgetExceeded if some composite cofactor resists the
    factor-finder within its budget.
    """
    assert n >= 1
    out = []
    stack = [n]
    while stack:
        m = stack.pop()
        if m == 1:
            continue
        if is_prime(m):
            out.append(m)
            continue
        f = find_factor(m, seed=seed, budget=budget)
        if f is None:
            raise FactorBudgetExceeded(f"cannot split {m} within budget {budget}")
        stack.append(f)
        stack.append(m // f)
    out.sort()
    return out


def smooth_fact(n: int, bound: int, seed: int = 0, budget: int = 200_000):
    """Factor n completely if every prime factor is <= bound, else None.

    Recursive split-at-composites / primality-test-at-leaves structure, with
    the rho factor-finder as an accelerator.  When rho stalls on a composite
    we fall back to trial division by primes up to `bound`, which settles
    smoothness exactly: a composite with no prime factor <= bound is not
    smooth.
    """
    assert n >= 1 and bound >= 2
    out = []
    stack = [n]
    trial = None
    while stack:
        m = stack.pop()
        if m == 1:
            continue
        if is_prime(m):
            if m > bound:
                return None
            out.append(m)
            continue
        f = find_factor(m, seed=seed, budget=budget)
        if f is None:
            if trial is None:
                trial = primes_upto(bound)
            for p in trial:
                if m % p == 0:
                    f = p
                    break
            if f is None:
                return None  # composite, all prime factors > bound
        stack.append(f)
        stack.append(m // f)
    out.sort()
    return out


def kronecker(a: int, n: int) -> int:
    """Kronecker symbol (a|n), defined for all integers."""
    if n == 0:
        return 1 if a in (1, -1) else 0
    if n < 0:
        return (-1 if a < 0 else 1) * kronecker(a, -n)
    # strip factors of 2 from n
    t = 0
    while n % 2 == 0:
        n //= 2
        t += 1
    if t and a % 2 == 0:
        return 0
    # (a|2)^t with (a|2) = (2|a) = (-1)^((a^2-1)/8) for odd a
    result = 1
    if t % 2 == 1 and a % 8 in (3, 5):
        result = -1
    a %= n
    # Jacobi symbol (a|n) for odd n > 0
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def sqrt_mod_prime(a: int, p: int):
    """Square roots of a mod odd prime p: a set {r, p-r}, {0}, or None.

    (p+1)/4 exponent shortcut for p = 3 mod 4, Tonelli-Shanks otherwise.
    """
    assert p > 2 and 0 <= a < p
    if a == 0:
        return {0}
    if pow(a, (p - 1) // 2, p) != 1:
        return None
    if p % 4 == 3:
        r = pow(a, (p + 1) // 4, p)
    else:
        # Tonelli-Shanks with a deterministic non-residue search
        q, s = p - 1, 0
        while q % 2 == 0:
            q //= 2
            s += 1
        z = 2
        while pow(z, (p - 1) // 2, p) != p - 1:
            z += 1
        m, c, t, r = s, pow(z, q, p), pow(a, q, p), pow(a, (q + 1) // 2, p)
        while t != 1:
            i, tt = 0, t
            while tt != 1:
                tt = tt * tt % p
                i += 1
            b = pow(c, 1 << (m - i - 1), p)
            m, c = i, b * b % p
            t, r = t * c % p, r * b % p
    assert r * r % p == a
    return {r, p - r}


def _sqrt_mod_prime_power(a, p, e):
    """All roots of x^2 = a (mod p^e), as a sorted list of residues.

    Brute force for small moduli; for large p^e we require p not to divide a
    (the only case that arises: huge prime-power divisors of a Cornacchia
    target are coprime to the tiny form coefficient q) and Hensel-lift.
    """
    pe = p**e
    a %= pe
    if pe <= 4096:
        return [r for r in range(pe) if r * r % pe == a]
    if a == 0:
        half = (e + 1) // 2
        return [p**half * t for t in range(p ** (e - half))]
    if a % p == 0:
        # factor out the p-power: x = p^(s/2) x' with x'^2 = u (mod p^(e-s))
        s, u = 0, a
        while u % p == 0:
            u //= p
            s += 1
        if s % 2:
            return []
        half = s // 2
        base_mod = p ** (e - s)
        roots = set()
        for r in _sqrt_mod_prime_power(u % base_mod, p, e - s):
            for t in range(p**half):
                roots.add(p**half * (r + t * base_mod) % pe)
        return sorted(roots)
    if p == 2:
        # odd a: solvable mod 2^e (e >= 3) iff a = 1 mod 8; 4 roots
        if a % 8 != 1:
            return []
        # lift from mod 8: roots of odd squares
        r = 1
        for k in range(3, e):
            if (r * r - a) % (1 << (k + 1)):
                r += 1 << (k - 1)
        roots = {r % pe, (-r) % pe, (r + pe // 2) % pe, (-r + pe // 2) % pe}
        return sorted(roots)
    base = sqrt_mod_prime(a % p, p)
    if base is None:
        return []
    roots = set()
    for r0 in base:
        r = r0
        pk = p
        while pk < pe:
            # Hensel: r <- r - (r^2 - a) / (2r) mod pk*p
            pk *= p
            inv = pow(2 * r % pk, -1, pk)
            r = (r - (r * r - a) * inv) % pk
        roots.add(r)
    return sorted(roots)


def _sqrt_mod(a, factors):
    """All roots of x^2 = a (mod n) by CRT over n's prime-power factorization."""
    pps = {}
    for p in factors:
        pps[p] = pps.get(p, 0) + 1
    cur = [(0, 1)]  # accumulated (residue, modulus) pairs
    for p, e in sorted(pps.items()):
        pe = p**e
        rs = _sqrt_mod_prime_power(a, p, e)
        if not rs:
            return []
        nxt = []
        for r0, m0 in cur:
            inv = pow(m0, -1, pe)
            for r in rs:
                x = (r0 + m0 * ((r - r0) * inv % pe)) % (m0 * pe)
                nxt.append((x, m0 * pe))
        cur = nxt
    return sorted(x for x, _ in cur)


def _primitive_cornacchia(q, n, n_factors):
    """All primitive solutions (gcd(x,y)=1) of x^2 + q y^2 = n, n >= 1,
    as a set of (|x|, |y|) pairs (signs expanded by the caller)."""
    sols = set()
    if n == 1:
        sols.add((1, 0))
        if q == 1:
            sols.add((0, 1))
        return sols
    if n == q:
        sols.add((0, 1))
    # Solutions with y invertible mod n satisfy x = r*y (n) for a root r of
    # r^2 = -q (n).  Testing every Euclid remainder <= sqrt(n) (not only the
    # first) is what makes the enumeration complete: for q = 1 a single root
    # can carry two distinct positive solutions, e.g. n = 25, root 7 gives
    # both (3,4) and (4,3) in one remainder sequence.
    limit = math.isqrt(n)
    for r in _sqrt_mod(-q % n, n_factors):
        a, b = n, r
        while b:
            if b <= limit:
                x = b
                y2, residue = divmod(n - x * x, q)
                if not residue:
                    y = math.isqrt(y2)
                    if y * y == y2 and math.gcd(x, y) == 1:
                        assert x * x + q * y * y == n
                        sols.add((x, y))
            a, b = b, a % b
    return sols


def _square_divisors(factors):
    """All g with g^2 dividing the factored integer, as (g, factors of g)."""
    pps = {}
    for p in factors:
        pps[p] = pps.get(p, 0) + 1
    gs = [(1, [])]
    for p, e in sorted(pps.items()):
        gs = [(g * p**k, fs + [p] * k) for g, fs in gs for k in range(e // 2 + 1)]
    return sorted(gs)


def cornacchia_all(q: int, v: int, factors_of_v=None, seed: int = 0, budget: int = 200_000):
    """ALL integer solutions (x, y) of x^2 + q y^2 = v, as a set of pairs.

    Imprimitive solutions included: for every square divisor g^2 | v we solve
    the primitive equation at v/g^2 and scale back by g.  Needs v factored;
    raises FactorBudgetExceeded if v resists the factor-finder.
    """
    assert q >= 1 and v >= 0
    if v == 0:
        return {(0, 0)}
    if factors_of_v is None:
        factors_of_v = factorize(v, seed=seed, budget=budget)
    assert math.prod(factors_of_v) == v
    out = set()
    for g, g_factors in _square_divisors(factors_of_v):
        n = v // (g * g)
        n_factors = list(factors_of_v)
        for p in g_factors:
            n_factors.remove(p)
            n_factors.remove(p)
        for x, y in _primitive_cornacchia(q, n, n_factors):
            for sx in (1, -1) if x else (1,):
                for sy in (1, -1) if y else (1,):
                    out.add((sx * x * g, sy * y * g))
    for x, y in out:
        assert x * x + q * y * y == v
    return out


def sum_of_squares_feasible(v: int, q: int, factors_of_v=None, seed: int = 0, budget: int = 200_000) -> bool:
    """Cheap necessary condition for x^2 + q y^2 = v to be solvable.

    False means definitely no solution.  True is non-committal for q > 1
    (for q = 1 the test is the exact two-squares criterion).  The test: any
    prime divisor l of v with l coprime to 2q and (-q | l) = -1 must divide v
    to an even power.
    """
    assert v >= 0 and q >= 1
    if v == 0:
        return True
    if factors_of_v is None:
        factors_of_v = factorize(v, seed=seed, budget=budget)
    counts = {}
    for p in factors_of_v:
        counts[p] = counts.get(p, 0) + 1
    for p, e in counts.items():
        if p == 2 or q % p == 0:
            continue
        if e % 2 == 1 and kronecker(-q, p) == -1:
            return False
    return True


def crt(residues, moduli):
    """x mod prod(moduli) with x = residues[i] mod moduli[i]; moduli coprime."""
    x, m = 0, 1
    for r, mi in zip(residues, moduli):
        assert math.gcd(m, mi) == 1
        x = (x + m * ((r - x) * pow(m, -1, mi) % mi)) % (m * mi)
        m *= mi
    return x

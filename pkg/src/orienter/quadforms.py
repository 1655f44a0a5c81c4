"""Imaginary quadratic orders Z[omega] and the smooth-generator search.

The canonical generator is omega = (s + sqrt(D))/2 with s = D mod 2, so an
order is determined by its discriminant D < 0 alone.  Elements are a + b*omega
with integer a, b.
"""

import logging
import math
import random
from dataclasses import dataclass

from . import numtheory as nt

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class QuadOrder:
    """Imaginary quadratic order of discriminant disc < 0 (disc = 0, 1 mod 4)."""

    disc: int

    def __post_init__(self):
        assert self.disc < 0 and self.disc % 4 in (0, 1), self.disc

    @property
    def t(self):
        """Trace of the canonical generator: disc mod 2, in {0, 1}."""
        return self.disc % 2

    @property
    def n(self):
        """Norm of the canonical generator: (t^2 + |disc|) / 4."""
        num = self.t * self.t - self.disc
        assert num % 4 == 0
        return num // 4


@dataclass(frozen=True)
class QuadElement:
    """a + b*omega in a fixed quadratic order."""

    order: QuadOrder
    a: int
    b: int

    @property
    def trace(self):
        return 2 * self.a + self.b * self.order.t

    @property
    def norm(self):
        return self.a * self.a + self.a * self.b * self.order.t + self.b * self.b * self.order.n


@dataclass(frozen=True)
class SmoothGen:
    """A generator theta = a + omega together with the factors of its norm."""

    theta: QuadElement
    factors: tuple

    def __post_init__(self):
        assert self.theta.b == 1
        assert math.prod(self.factors) == self.theta.norm


def canonical_generator(order: QuadOrder) -> QuadElement:
    """omega itself, as the element 0 + 1*omega."""
    return QuadElement(order, 0, 1)


def is_ns_smooth(n: int, bound: int, r_m: int, d: int):
    """Factors of n if n is ns-(bound, r_m, d)-smooth, else None.

    ns-smooth: at most r_m prime factors with multiplicity, each <= bound,
    none dividing d, and n is not a perfect square.
    """
    assert n >= 1
    factors = nt.smooth_fact(n, bound)
    if factors is None or len(factors) > r_m:
        return None
    if any(d % p == 0 for p in factors):
        return None
    if nt.is_perfect_square(n):
        return None
    return factors


def find_smooth_gen(order: QuadOrder, bound: int, r_m: int, seed: int = 0, max_attempts: int = 10_000):
    """Search for a generator theta = a + omega with ns-smooth norm.

    Samples a from {-floor(sqrt(n)), ..., floor(sqrt(n))} without replacement
    (the range is small at desk scale and the literal sample-forever loop need
    not terminate, e.g. disc = -15 has no valid a at all).  Returns a
    SmoothGen, or None once the range or max_attempts is exhausted.
    """
    assert bound >= 2 and r_m >= 1
    omega = canonical_generator(order)
    s = math.isqrt(omega.norm)
    candidates = list(range(-s, s + 1))
    random.Random(seed).shuffle(candidates)
    for a in candidates[:max_attempts]:
        theta = QuadElement(order, a, 1)
        factors = is_ns_smooth(theta.norm, bound, r_m, order.disc)
        if factors is not None:
            log.debug("smooth generator a=%d, norm %d = %s", a, theta.norm, factors)
            return SmoothGen(theta, tuple(factors))
    return None


def default_parameters(disc: int):
    """Default (B, r_m) from the subexponential tuning formulas.

    B = ceil(exp(sqrt(log|D| loglog|D|) * sqrt(2)/2)) and
    r_m = ceil(sqrt(2 log|D| / loglog|D|)) + 1, each clamped below (B >= 3,
    r_m >= 2) so desk-scale discriminants get usable values.
    """
    a = abs(disc)
    assert a >= 8
    loga = math.log(a)
    logloga = math.log(loga)
    bound = math.ceil(math.exp(math.sqrt(loga * logloga) * math.sqrt(2) / 2))
    r_m = math.ceil(math.sqrt(2 * loga / logloga)) + 1
    return max(bound, 3), max(r_m, 2)

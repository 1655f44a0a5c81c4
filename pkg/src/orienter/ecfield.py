"""Supersingular curves over F_{p^2}: fields, isogenies, torsion, modular polynomials.

Everything here is desk-scale (p up to a few thousand): exhaustive point counts,
division-polynomial factoring, affine arithmetic.  Extensions F_{p^(2*delta)} are
built as F_p[z]/(f) with f the first monic irreducible in lexicographic
coefficient order, so towers are reproducible across runs; F_{p^2} itself uses
u^2 = n with n the smallest positive non-residue (u^2 = -1 when p = 3 mod 4).
"""

import logging
import math
import random
from importlib import resources

from . import numtheory as nt

log = logging.getLogger(__name__)

CURVE_PRIME_CAP = 4096  # exhaustive point counting beyond this is hopeless
ISOGENY_DEGREE_CAP = 13
TORSION_CAP = 50


class UnsupportedDegree(Exception):
    """Isogeny degree outside the shipped modular-polynomial / division-poly range."""


class DegreeEqualsP(Exception):
    """Asked for an ell-isogeny with ell = p; separable kernel machinery breaks."""


class JMismatch(Exception):
    """Isomorphism requested between curves with different j-invariants."""


class CapExceeded(Exception):
    """Torsion order above the configured cap."""


class PrimeTooLarge(Exception):
    """The curve side only counts points exhaustively; p must stay desk-sized."""


# ---------------------------------------------------------------------------
# finite fields
#
# Two flavours share one element class: absolute fields F_p[z]/(f) with integer
# coefficient tuples, and relative extensions K[z]/(g) whose coefficients are
# themselves field elements (used when chasing kernel points through a factor
# of a division polynomial).  A field object knows how to add/multiply raw
# coefficient tuples; FF wraps a tuple with operators.


class FF:
    """Element of a finite field: coefficient tuple (low degree first)."""

    __slots__ = ("fld", "co")

    def __init__(self, fld, co):
        self.fld = fld
        self.co = co

    def _lift(self, other):
        if isinstance(other, FF):
            assert other.fld is self.fld, "mixed fields"
            return other
        if isinstance(other, int):
            return self.fld.from_int(other)
        return NotImplemented

    def __add__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return NotImplemented
        return self.fld._add(self, other)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return NotImplemented
        return self.fld._add(self, self.fld._neg(other))

    def __rsub__(self, other):
        other = self._lift(other)
        return self.fld._add(other, self.fld._neg(self))

    def __neg__(self):
        return self.fld._neg(self)

    def __mul__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return NotImplemented
        return self.fld._mul(self, other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._lift(other)
        return self.fld._mul(self, other.inv())

    def __rtruediv__(self, other):
        other = self._lift(other)
        return self.fld._mul(other, self.inv())

    def inv(self):
        return self.fld._inv(self)

    def __pow__(self, e):
        assert isinstance(e, int)
        base = self
        if e < 0:
            base, e = base.inv(), -e
        out = self.fld.one
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, int):
            other = self.fld.from_int(other)
        return isinstance(other, FF) and other.fld is self.fld and other.co == self.co

    def __ne__(self, other):
        return not self.__eq__(other)

    def __bool__(self):
        return any(not _iszero(c) for c in self.co)

    def __hash__(self):
        return hash((self.fld.p, self.fld.k, self.co))

    def key(self):
        """Total-order key: lexicographic on coefficients, highest degree first."""
        return tuple(c.key() if isinstance(c, FF) else c for c in reversed(self.co))

    def __repr__(self):
        if self.fld.k == 2 and isinstance(self.co[0], int):
            a, b = self.co
            if b == 0:
                return str(a)
            return "%d+%d*u" % (a, b)
        return "FF%r" % (self.co,)


def _iszero(c):
    return (c == 0) if isinstance(c, int) else (not c)


class _FieldOps:
    """Shared arithmetic: schoolbook multiplication folded by z^k = top(z)."""

    def element(self, co):
        co = tuple(co)
        assert len(co) == self.k
        return FF(self, co)

    def _add(self, x, y):
        return FF(self, tuple(self.cadd(a, b) for a, b in zip(x.co, y.co)))

    def _neg(self, x):
        return FF(self, tuple(self.cneg(a) for a in x.co))

    def _mul(self, x, y):
        k = self.k
        if k == 1:
            return FF(self, (self.cmul(x.co[0], y.co[0]),))
        prod = [self.czero] * (2 * k - 1)
        for i, a in enumerate(x.co):
            if _iszero(a):
                continue
            for j, b in enumerate(y.co):
                if not _iszero(b):
                    prod[i + j] = self.cadd(prod[i + j], self.cmul(a, b))
        top = self._top
        for d in range(2 * k - 2, k - 1, -1):
            c = prod[d]
            if _iszero(c):
                continue
            for i, t in enumerate(top):
                if not _iszero(t):
                    prod[d - k + i] = self.cadd(prod[d - k + i], self.cmul(c, t))
        return FF(self, tuple(prod[:k]))

    def _inv(self, x):
        assert x, "inverting zero"
        # extended Euclid on coefficient polynomials against the modulus
        mod = [self.cneg(t) for t in self._top] + [self.cone]
        r0, r1 = mod, list(x.co)
        s0, s1 = [], [self.cone]
        while True:
            while r1 and _iszero(r1[-1]):
                r1.pop()
            assert r1, "modulus not irreducible?"
            if len(r1) == 1:
                c = self.cinv(r1[0])
                out = [self.cmul(c, s) for s in s1]
                out += [self.czero] * (self.k - len(out))
                return FF(self, tuple(out[:self.k]))
            q, r = self._cdivmod(r0, r1)
            r0, r1 = r1, r
            s_new = self._csub(s0, self._cmulpoly(q, s1))
            s0, s1 = s1, s_new

    # -- raw coefficient-polynomial helpers (lists of coefficient objects) --

    def _cdivmod(self, num, den):
        num = list(num)
        dn = len(den) - 1
        lead_inv = self.cinv(den[-1])
        q = [self.czero] * max(0, len(num) - dn)
        for i in range(len(num) - 1 - dn, -1, -1):
            c = self.cmul(num[i + dn], lead_inv)
            if _iszero(c):
                continue
            q[i] = c
            for j, d in enumerate(den):
                num[i + j] = self.cadd(num[i + j], self.cneg(self.cmul(c, d)))
        rem = num[:dn]
        while rem and _iszero(rem[-1]):
            rem.pop()
        return q, rem

    def _cmulpoly(self, a, b):
        if not a or not b:
            return []
        out = [self.czero] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if _iszero(x):
                continue
            for j, y in enumerate(b):
                if not _iszero(y):
                    out[i + j] = self.cadd(out[i + j], self.cmul(x, y))
        return out

    def _csub(self, a, b):
        n = max(len(a), len(b))
        a = list(a) + [self.czero] * (n - len(a))
        out = list(a)
        for i, y in enumerate(b):
            out[i] = self.cadd(out[i], self.cneg(y))
        while out and _iszero(out[-1]):
            out.pop()
        return out

    # -- common conveniences --

    @property
    def zero(self):
        return FF(self, self._zero_co)

    @property
    def one(self):
        return FF(self, self._one_co)

    @property
    def gen(self):
        co = [self.czero] * self.k
        if self.k == 1:
            co[0] = self.cone  # degenerate: the "generator" is 1
        else:
            co[1] = self.cone
        return FF(self, tuple(co))


class AbsField(_FieldOps):
    """F_p[z]/(f) with integer coefficient tuples."""

    def __init__(self, p, k, top):
        assert nt.is_prime(p) and p % 2 == 1
        self.p = p
        self.k = k
        self._top = tuple(t % p for t in top)  # z^k = sum top[i] z^i
        self.order = p ** k
        self.czero = 0
        self.cone = 1
        self._zero_co = (0,) * k
        self._one_co = (1,) + (0,) * (k - 1)
        self._embeddings = {}
        self._chi = None

    def cadd(self, a, b):
        return (a + b) % self.p

    def cneg(self, a):
        return (-a) % self.p

    def cmul(self, a, b):
        return (a * b) % self.p

    def cinv(self, a):
        return pow(a, -1, self.p)

    def from_int(self, n):
        return FF(self, (n % self.p,) + (0,) * (self.k - 1))

    def random(self, rng):
        return FF(self, tuple(rng.randrange(self.p) for _ in range(self.k)))

    def _mul(self, x, y):
        if self.k == 2:  # hot path: (a+bu)(c+du) with u^2 = n
            p = self.p
            a, b = x.co
            c, d = y.co
            n = self._top[0]
            return FF(self, ((a * c + n * b * d) % p, (a * d + b * c) % p))
        return _FieldOps._mul(self, x, y)

    def chi_table(self):
        """Quadratic character table of F_p (index by residue)."""
        if self._chi is None:
            tab = [-1] * self.p
            tab[0] = 0
            for a in range(1, (self.p + 1) // 2):
                tab[a * a % self.p] = 1
            self._chi = tab
        return self._chi

    def __repr__(self):
        return "F_%d^%d" % (self.p, self.k)


class RelExt(_FieldOps):
    """base[z]/(g) for monic irreducible g over another finite field."""

    def __init__(self, base, g):
        assert g and isinstance(g[-1], FF) and g[-1] == base.one, "g must be monic"
        self.base = base
        self.p = base.p
        self.k = len(g) - 1
        self._top = tuple(-c for c in g[:-1])
        self.order = base.order ** self.k
        self.czero = base.zero
        self.cone = base.one
        self._zero_co = (base.zero,) * self.k
        self._one_co = (base.one,) + (base.zero,) * (self.k - 1)

    def cadd(self, a, b):
        return a + b

    def cneg(self, a):
        return -a

    def cmul(self, a, b):
        return a * b

    def cinv(self, a):
        return a.inv()

    def from_int(self, n):
        return self.scalar(self.base.from_int(n))

    def scalar(self, c):
        """Embed a base-field element as a constant."""
        assert c.fld is self.base
        return FF(self, (c,) + (self.base.zero,) * (self.k - 1))

    def random(self, rng):
        return FF(self, tuple(self.base.random(rng) for _ in range(self.k)))

    def __repr__(self):
        return "%r[z]/deg%d" % (self.base, self.k)


def _int_poly_irreducible(p, coeffs):
    """Is z^k + sum coeffs[i] z^i irreducible over F_p?  (plain int arithmetic)"""
    k = len(coeffs)
    assert k >= 2
    mod = list(coeffs) + [1]

    def pmulmod(a, b):
        out = [0] * (len(a) + len(b) - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    out[i + j] = (out[i + j] + x * y) % p
        for d in range(len(out) - 1, k - 1, -1):
            c = out[d]
            if c:
                out[d] = 0
                for i in range(k):
                    out[d - k + i] = (out[d - k + i] - c * mod[i]) % p
        out = out[:k]
        while out and out[-1] == 0:
            out.pop()
        return out

    def ppow(a, e):
        out, base = [1], a
        while e:
            if e & 1:
                out = pmulmod(out, base)
            base = pmulmod(base, base)
            e >>= 1
        return out

    def pgcd(a, b):
        a, b = list(a), list(b)
        while b:
            # remainder of a by b
            bb = list(b)
            inv = pow(bb[-1], -1, p)
            r = list(a)
            for i in range(len(r) - len(bb), -1, -1):
                c = r[i + len(bb) - 1] * inv % p
                if c:
                    for j, d in enumerate(bb):
                        r[i + j] = (r[i + j] - c * d) % p
            while r and r[-1] == 0:
                r.pop()
            a, b = b, r
        return a

    x = [0, 1]
    w = list(x)
    frob = []
    for _ in range(k):
        w = ppow(w, p)
        frob.append(list(w))
    if frob[-1] != x:
        return False
    for r in set(nt.factorize(k)):
        d = k // r - 1
        diff = list(frob[d])
        # subtract x
        while len(diff) < 2:
            diff.append(0)
        diff[1] = (diff[1] - 1) % p
        while diff and diff[-1] == 0:
            diff.pop()
        if not diff:
            return False
        g = pgcd(mod, diff)
        if len(g) - 1 > 0:
            return False
    return True


_FIELD_CACHE = {}


def ext_field(p, k):
    """The canonical F_{p^k}: deterministic modulus, cached instance."""
    key = (p, k)
    if key in _FIELD_CACHE:
        return _FIELD_CACHE[key]
    assert k >= 1
    if k == 2:
        # u^2 = n, smallest positive non-residue; -1 preferred when p = 3 mod 4
        if p % 4 == 3:
            n = p - 1
        else:
            n = next(m for m in range(2, p) if nt.kronecker(m, p) == -1)
        fld = AbsField(p, 2, (n, 0))
    else:
        num = 0
        while True:
            coeffs = [(num // p ** i) % p for i in range(k)]
            if _int_poly_irreducible(p, coeffs):
                break
            num += 1
        # z^k = -sum coeffs[i] z^i
        fld = AbsField(p, k, tuple((-c) % p for c in coeffs))
    _FIELD_CACHE[key] = fld
    return fld


def fp2(p):
    return ext_field(p, 2)


class FieldEmbedding:
    """F_{p^k} -> F_{p^K} (k | K) sending the small generator to a fixed root."""

    def __init__(self, small, big, root):
        self.small = small
        self.big = big
        self.powers = [big.one]
        for _ in range(small.k - 1):
            self.powers.append(self.powers[-1] * root)

    def __call__(self, x):
        assert x.fld is self.small
        if self.small is self.big:
            return x
        acc = self.big.zero
        for c, rpow in zip(x.co, self.powers):
            if c:
                acc = acc + self.big.from_int(c) * rpow
        return acc

    def map_poly(self, poly):
        return [self(c) for c in poly]


def embed_into(small, big):
    """Cached embedding; the root of the small modulus is chosen lex-smallest."""
    if small is big:
        return FieldEmbedding(small, big, big.one)
    key = (small.p, small.k, small._top)
    if key in big._embeddings:
        return big._embeddings[key]
    assert small.p == big.p and big.k % small.k == 0
    # roots in big of the small modulus z^k - top(z)
    mod_poly = [big.from_int((-t) % small.p) for t in small._top] + [big.one]
    roots = poly_roots(mod_poly, big, seed=0)
    assert roots, "modulus has no root in the bigger field"
    root = min(roots, key=lambda r: r.key())
    emb = FieldEmbedding(small, big, root)
    big._embeddings[key] = emb
    return emb


# ---------------------------------------------------------------------------
# polynomials over a field (lists of FF, low degree first; [] is zero)


def p_trim(f):
    while f and not f[-1]:
        f.pop()
    return f


def p_deg(f):
    return len(f) - 1


def p_add(f, g):
    if not f:
        return p_trim(list(g))
    if not g:
        return p_trim(list(f))
    n = max(len(f), len(g))
    out = list(f) + [f[0].fld.zero] * (n - len(f))
    for i, c in enumerate(g):
        out[i] = out[i] + c
    return p_trim(out)


def p_sub(f, g):
    return p_add(f, [-c for c in g])


def p_mul(f, g):
    if not f or not g:
        return []
    zero = f[0].fld.zero
    out = [zero] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        if a:
            for j, b in enumerate(g):
                if b:
                    out[i + j] = out[i + j] + a * b
    return p_trim(out)


def p_scale(f, c):
    if not c:
        return []
    return p_trim([a * c for a in f])


def p_monic(f):
    assert f
    if f[-1] == f[0].fld.one:
        return list(f)
    return p_scale(f, f[-1].inv())


def p_divmod(num, den):
    assert den
    num = list(num)
    dn = p_deg(den)
    if p_deg(num) < dn:
        return [], p_trim(num)
    fld = den[0].fld
    lead_inv = den[-1].inv()
    q = [fld.zero] * (len(num) - dn)
    for i in range(len(num) - 1 - dn, -1, -1):
        c = num[i + dn] * lead_inv
        if c:
            q[i] = c
            for j, d in enumerate(den):
                num[i + j] = num[i + j] - c * d
    return p_trim(q), p_trim(num[:dn])


def p_mod(num, den):
    return p_divmod(num, den)[1]


def p_gcd(f, g):
    f, g = list(f), list(g)
    while g:
        f, g = g, p_mod(f, g)
    return p_monic(f) if f else []


def p_deriv(f):
    return p_trim([c * i for i, c in enumerate(f)][1:])


def p_eval(f, x):
    acc = x.fld.zero
    for c in reversed(f):
        acc = acc * x + c
    return acc


def p_powmod(base, e, mod, fld):
    out = [fld.one]
    base = p_mod(base, mod)
    while e:
        if e & 1:
            out = p_mod(p_mul(out, base), mod)
        base = p_mod(p_mul(base, base), mod)
        e >>= 1
    return out


def _x_poly(fld):
    return [fld.zero, fld.one]


def poly_roots(f, fld, seed=0, multiplicities=False):
    """Roots of f in fld; Cantor-Zassenhaus with an explicit seed."""
    f = p_trim(list(f))
    assert f, "zero polynomial"
    if p_deg(f) == 0:
        return []
    fm = p_monic(f)
    x = _x_poly(fld)
    xq = p_powmod(x, fld.order, fm, fld)
    lin = p_gcd(p_sub(xq, x), fm)
    rng = random.Random("roots,%d,%d,%d,%d" % (seed, fld.p, fld.k, len(f)))
    roots = []
    stack = [lin] if p_deg(lin) > 0 else []
    while stack:
        g = stack.pop()
        if p_deg(g) == 1:
            roots.append(-g[0])
            continue
        while True:
            a = fld.random(rng)
            h = p_powmod([a, fld.one], (fld.order - 1) // 2, g, fld)
            h = p_sub(h, [fld.one])
            d = p_gcd(h, g) if h else []
            if d and 0 < p_deg(d) < p_deg(g):
                stack.append(d)
                stack.append(p_divmod(g, d)[0])
                break
    if multiplicities:
        out = []
        for r in roots:
            rem = fm
            while True:
                q, m = p_divmod(rem, [-r, fld.one])
                if m:
                    break
                out.append(r)
                rem = q
        out.sort(key=lambda t: t.key())
        return out
    roots.sort(key=lambda t: t.key())
    return roots


def poly_factor(f, fld, seed=0):
    """Monic irreducible factors of a squarefree f (distinct-degree + CZ)."""
    fm = p_monic(p_trim(list(f)))
    assert p_deg(p_gcd(fm, p_deriv(fm))) == 0, "expected squarefree input"
    rng = random.Random("factor,%d,%d,%d,%d" % (seed, fld.p, fld.k, len(f)))
    out = []
    r = fm
    x = _x_poly(fld)
    w = x
    d = 0
    while p_deg(r) > 0:
        d += 1
        if 2 * d > p_deg(r):
            out.append(r)
            break
        w = p_mod(w, r)
        w = p_powmod(w, fld.order, r, fld)
        g = p_gcd(p_sub(w, x), r)
        if p_deg(g) > 0:
            out.extend(_equal_degree_split(g, d, fld, rng))
            r = p_divmod(r, g)[0]
    assert p_mul_list(out, fld) == fm
    return sorted(out, key=lambda h: tuple(c.key() for c in h))


def _equal_degree_split(g, d, fld, rng):
    if p_deg(g) == d:
        return [g]
    exp = (fld.order ** d - 1) // 2
    while True:
        a = [fld.random(rng) for _ in range(p_deg(g))]
        a = p_trim(a)
        if p_deg(a) < 1:
            continue
        b = p_powmod(a, exp, g, fld)
        h = p_gcd(p_sub(b, [fld.one]), g) if b else []
        if h and 0 < p_deg(h) < p_deg(g):
            return _equal_degree_split(h, d, fld, rng) + \
                _equal_degree_split(p_divmod(g, h)[0], d, fld, rng)


def p_mul_list(polys, fld):
    out = [fld.one]
    for f in polys:
        out = p_mul(out, f)
    return out


# ---------------------------------------------------------------------------
# curves and points


class Curve:
    """y^2 = x^3 + Ax + B over F_{p^2}, with cached j-invariant."""

    __slots__ = ("field", "A", "B", "_j", "_t2", "_divp")

    def __init__(self, field, A, B):
        assert isinstance(field, AbsField) and field.k == 2
        assert A.fld is field and B.fld is field
        disc = 4 * A ** 3 + 27 * B ** 2
        assert disc, "singular curve"
        self.field = field
        self.A = A
        self.B = B
        self._j = 1728 * 4 * A ** 3 / disc
        self._t2 = None
        self._divp = None

    @property
    def j(self):
        return self._j

    def __eq__(self, other):
        return isinstance(other, Curve) and other.field is self.field \
            and other.A == self.A and other.B == self.B

    def __hash__(self):
        return hash((self.field.p, self.A.co, self.B.co))

    def __repr__(self):
        return "Curve(p=%d, A=%r, B=%r)" % (self.field.p, self.A, self.B)

    def trace2(self):
        """Trace of Frobenius over F_{p^2}, by exhaustive point count."""
        if self._t2 is not None:
            return self._t2
        fld = self.field
        p = fld.p
        if p > CURVE_PRIME_CAP:
            raise PrimeTooLarge("p=%d exceeds the exhaustive-count cap %d" % (p, CURVE_PRIME_CAP))
        chi = fld.chi_table()
        n = fld._top[0]  # u^2 = n, so N(a+bu) = a^2 - n b^2
        count = 1  # point at infinity
        A, B = self.A, self.B
        for a in range(p):
            for b in range(p):
                x = FF(fld, (a, b))
                t = (x * x + A) * x + B
                ta, tb = t.co
                count += 1 + chi[(ta * ta - n * tb * tb) % p]
        t2 = p * p + 1 - count
        assert abs(t2) <= 2 * p, "Hasse bound violated; counting bug"
        self._t2 = t2
        return t2


def curve_from_j(field, j):
    """Some curve with the requested j-invariant."""
    if isinstance(j, int):
        j = field.from_int(j)
    if j == 0:
        E = Curve(field, field.zero, field.one)
    elif j == 1728:
        E = Curve(field, field.one, field.zero)
    else:
        c = j / (1728 - j)
        E = Curve(field, 3 * c, 2 * c)
    assert E.j == j
    return E


def curve_json(E):
    return {"p": E.field.p, "A": list(E.A.co), "B": list(E.B.co)}


def curve_from_json(doc):
    p = int(doc["p"])
    fld = fp2(p)
    A = fld.element([int(c) % p for c in doc["A"]])
    B = fld.element([int(c) % p for c in doc["B"]])
    return Curve(fld, A, B)


# points: None is the identity, otherwise (x, y) with FF coordinates


def on_curve(A, B, P):
    if P is None:
        return True
    x, y = P
    return y * y == (x * x + A) * x + B


def point_neg(P):
    if P is None:
        return None
    return (P[0], -P[1])


def point_add(A, P, Q):
    if P is None:
        return Q
    if Q is None:
        return P
    x1, y1 = P
    x2, y2 = Q
    if x1 == x2:
        if y1 == -y2:
            return None
        lam = (3 * x1 * x1 + A) / (2 * y1)
    else:
        lam = (y2 - y1) / (x2 - x1)
    x3 = lam * lam - x1 - x2
    return (x3, lam * (x1 - x3) - y1)


def point_mul(A, n, P):
    if n < 0:
        return point_mul(A, -n, point_neg(P))
    out = None
    base = P
    while n:
        if n & 1:
            out = point_add(A, out, base)
        base = point_add(A, base, base)
        n >>= 1
    return out


def random_point(fld, A, B, rng):
    """A uniform-ish affine point on y^2 = x^3 + Ax + B over fld."""
    for _ in range(4000):
        x = fld.random(rng)
        t = (x * x + A) * x + B
        if not t:
            return (x, fld.zero)
        ys = poly_roots([-t, fld.zero, fld.one], fld, seed=rng.getrandbits(30))
        if ys:
            return (x, ys[0])
    raise AssertionError("no point found; field too small?")


# ---------------------------------------------------------------------------
# division polynomials
#
# f_m is the univariate part: psi_m = f_m * (2y)^(m even), with (2y)^2 = Fq4.


def _div_f(E, m):
    if E._divp is None:
        fld = E.field
        A, B = E.A, E.B
        f3 = [-(A * A), 12 * B, 6 * A, fld.zero, fld.from_int(3)]
        f4 = [-(8 * B * B + A ** 3), -4 * A * B, -5 * A * A, 20 * B, 5 * A, fld.zero, fld.one]
        f4 = p_scale(f4, fld.from_int(2))
        E._divp = {0: [], 1: [fld.one], 2: [fld.one], 3: p_trim(f3), 4: p_trim(f4)}
    tab = E._divp
    if m in tab:
        return tab[m]
    fld = E.field
    fq4 = [4 * E.B, 4 * E.A, fld.zero, fld.from_int(4)]
    k = m // 2
    if m % 2:
        a = p_mul(_div_f(E, k + 2), p_mul(_div_f(E, k), p_mul(_div_f(E, k), _div_f(E, k))))
        b = p_mul(_div_f(E, k - 1), p_mul(_div_f(E, k + 1), p_mul(_div_f(E, k + 1), _div_f(E, k + 1))))
        f2 = p_mul(fq4, fq4)
        f = p_sub(p_mul(a, f2), b) if k % 2 == 0 else p_sub(a, p_mul(b, f2))
    else:
        inner = p_sub(p_mul(_div_f(E, k + 2), p_mul(_div_f(E, k - 1), _div_f(E, k - 1))),
                      p_mul(_div_f(E, k - 2), p_mul(_div_f(E, k + 1), _div_f(E, k + 1))))
        f = p_mul(_div_f(E, k), inner)
    if m < E.field.p:
        want_deg = (m * m - 1) // 2 if m % 2 else (m * m - 4) // 2
        want_lead = m if m % 2 else m // 2
        assert p_deg(f) == want_deg and f[-1] == want_lead, "division polynomial recurrence broken"
    tab[m] = f
    return f


def division_polynomial(E, m):
    """Univariate m-division polynomial (odd m): vanishes on x(E[m] \\ O)."""
    assert m % 2 == 1, "univariate form only for odd m"
    return list(_div_f(E, m))


# ---------------------------------------------------------------------------
# isogenies


class Isogeny:
    """Separable prime-degree isogeny with explicit rational maps.

    x' = Nx/Dx, y' = y * Ny/Dy (all polynomials in x over F_{p^2}); the kernel
    polynomial is monic of degree (ell-1)/2 (degree 1 for ell = 2).
    """

    __slots__ = ("domain", "codomain", "degree", "kernel_poly", "Nx", "Dx", "Ny", "Dy")

    def __init__(self, domain, codomain, degree, kernel_poly, Nx, Dx, Ny, Dy):
        self.domain = domain
        self.codomain = codomain
        self.degree = degree
        self.kernel_poly = kernel_poly
        self.Nx = Nx
        self.Dx = Dx
        self.Ny = Ny
        self.Dy = Dy

    def __call__(self, P, emb=None):
        if P is None:
            return None
        x, y = P
        if emb is None:
            nx, dx, ny, dy = self.Nx, self.Dx, self.Ny, self.Dy
            a2, b2 = self.codomain.A, self.codomain.B
        else:
            nx, dx = emb.map_poly(self.Nx), emb.map_poly(self.Dx)
            ny, dy = emb.map_poly(self.Ny), emb.map_poly(self.Dy)
            a2, b2 = emb(self.codomain.A), emb(self.codomain.B)
        dv = p_eval(dx, x)
        if not dv:
            return None  # kernel
        X = p_eval(nx, x) / dv
        Y = y * p_eval(ny, x) / p_eval(dy, x)
        assert on_curve(a2, b2, (X, Y)), "isogeny image off the codomain"
        return (X, Y)

    def kernel_key(self):
        return tuple(c.key() for c in self.kernel_poly)

    def __repr__(self):
        return "Isogeny(deg=%d, j:%r->%r)" % (self.degree, self.domain.j, self.codomain.j)


class Isomorphism:
    """u-twist (x, y) -> (u^2 x, u^3 y) between curves of equal j."""

    __slots__ = ("domain", "codomain", "u")
    degree = 1

    def __init__(self, domain, codomain, u):
        assert u ** 4 * domain.A == codomain.A and u ** 6 * domain.B == codomain.B
        self.domain = domain
        self.codomain = codomain
        self.u = u

    def __call__(self, P, emb=None):
        if P is None:
            return None
        u = self.u if emb is None else emb(self.u)
        x, y = P
        return (u * u * x, u ** 3 * y)

    def inverse(self):
        return Isomorphism(self.codomain, self.domain, self.u.inv())

    def __repr__(self):
        return "Isomorphism(u=%r)" % (self.u,)


def _rational_maps(Nx, Dx):
    ny = p_sub(p_mul(p_deriv(Nx), Dx), p_mul(Nx, p_deriv(Dx)))
    dy = p_mul(Dx, Dx)
    return ny, dy


def _velu_two(E, x0):
    fld = E.field
    A, B = E.A, E.B
    t = 3 * x0 * x0 + A
    A2 = A - 5 * t
    B2 = B - 7 * t * x0
    h = [-x0, fld.one]
    Nx = [t, -x0, fld.one]
    Ny, Dy = _rational_maps(Nx, h)
    return Isogeny(E, Curve(fld, A2, B2), 2, h, Nx, h, Ny, Dy)


def _velu_odd(E, h, ell):
    fld = E.field
    A, B = E.A, E.B
    n = p_deg(h)
    assert n == (ell - 1) // 2 and h[-1] == fld.one
    zero = fld.zero
    c1 = h[n - 1] if n >= 1 else zero
    c2 = h[n - 2] if n >= 2 else zero
    c3 = h[n - 3] if n >= 3 else zero
    e1, e2, e3 = -c1, c2, -c3
    pw1 = e1
    pw2 = e1 * e1 - 2 * e2
    pw3 = e1 ** 3 - 3 * e1 * e2 + 3 * e3
    t = 6 * pw2 + 2 * n * A
    w = 10 * pw3 + 6 * A * pw1 + 4 * n * B
    A2 = A - 5 * t
    B2 = B - 7 * w
    hp = p_deriv(h)
    hpp = p_deriv(hp)
    h2 = p_mul(h, h)
    fq = [B, A, zero, fld.one]
    lead = p_sub(p_scale(_x_poly(fld), fld.from_int(ell)), [2 * pw1])
    mid = p_add(p_mul([2 * A, zero, fld.from_int(6)], hp), p_scale(p_mul(fq, hpp), fld.from_int(4)))
    Nx = p_add(p_sub(p_mul(lead, h2), p_mul(mid, h)),
               p_scale(p_mul(fq, p_mul(hp, hp)), fld.from_int(4)))
    assert p_deg(Nx) == 2 * n + 1 and Nx[-1] == fld.one, "Velu numerator malformed"
    Ny, Dy = _rational_maps(Nx, h2)
    return Isogeny(E, Curve(fld, A2, B2), ell, h, Nx, h2, Ny, Dy)


def _kernel_polys_odd(E, ell, seed=0):
    """Monic degree-(ell-1)/2 kernel polynomials of rational ell-subgroups."""
    fld = E.field
    f_ell = _div_f(E, ell)
    nker = (ell - 1) // 2
    factors = poly_factor(f_ell, fld, seed=seed)
    fq4 = [4 * E.B, 4 * E.A, fld.zero, fld.from_int(4)]
    kernels = []
    seen = set()
    for g in factors:
        if p_deg(g) > nker:
            continue
        R = RelExt(fld, g)
        theta = R.gen if R.k > 1 else R.scalar(-g[0])

        def evR(poly):
            acc = R.zero
            for c in reversed(poly):
                acc = acc * theta + R.scalar(c)
            return acc

        fv = {m: evR(_div_f(E, m)) for m in range(nker + 2)}
        fqv = evR(fq4)
        xs = [theta]
        ok = True
        for k in range(2, nker + 1):
            if k % 2:
                num = fqv * fv[k - 1] * fv[k + 1]
                den = fv[k] * fv[k]
            else:
                num = fv[k - 1] * fv[k + 1]
                den = fqv * fv[k] * fv[k]
            if not den:
                ok = False
                break
            xs.append(theta - num / den)
        if not ok:
            continue
        hR = [R.one]
        for xv in xs:
            hR = p_mul(hR, [-xv, R.one])
        coeffs = []
        for cR in hR[:-1]:
            if any(cR.co[1:]):  # coefficient does not descend: subgroup not rational
                coeffs = None
                break
            coeffs.append(cR.co[0])
        if coeffs is None:
            continue
        h = coeffs + [fld.one]
        keyt = tuple(c.key() for c in h)
        if keyt in seen:
            continue
        seen.add(keyt)
        assert not p_mod(f_ell, h), "kernel polynomial must divide the division polynomial"
        kernels.append(h)
    assert len(kernels) <= ell + 1
    return sorted(kernels, key=lambda hh: tuple(c.key() for c in hh))


def isogenies_of_degree(E, ell, seed=0):
    """All ell-isogenies from E with F_{p^2}-rational kernel polynomial."""
    p = E.field.p
    if ell == p:
        raise DegreeEqualsP("ell = p = %d" % p)
    if not (ell == 2 or (ell % 2 == 1 and nt.is_prime(ell) and ell <= ISOGENY_DEGREE_CAP)):
        raise UnsupportedDegree("ell=%d (cap %d)" % (ell, ISOGENY_DEGREE_CAP))
    if ell == 2:
        cubic = [E.B, E.A, E.field.zero, E.field.one]
        out = [_velu_two(E, x0) for x0 in poly_roots(cubic, E.field, seed=seed)]
    else:
        out = [_velu_odd(E, h, ell) for h in _kernel_polys_odd(E, ell, seed=seed)]
    out.sort(key=lambda phi: phi.kernel_key())
    db = default_modpoly_db()
    if ell in db.levels():
        for phi in out:
            assert not db.value(ell, phi.domain.j, phi.codomain.j), \
                "isogeny codomain violates the modular polynomial"
    return out


def isogeny_between(E, j_target, ell):
    """First ell-isogeny (canonical kernel order) landing on j_target, else None."""
    if isinstance(j_target, int):
        j_target = E.field.from_int(j_target)
    for phi in isogenies_of_degree(E, ell):
        if phi.codomain.j == j_target:
            return phi
    return None


def find_isomorphisms(E1, E2):
    """All F_{p^2}-isomorphisms E1 -> E2 as u-twists (may be empty for twists)."""
    if E1.j != E2.j:
        raise JMismatch("j mismatch: %r vs %r" % (E1.j, E2.j))
    fld = E1.field
    assert fld is E2.field
    if not E1.A and not E2.A:  # j = 0
        ratio = E2.B / E1.B
        cands = poly_roots([-ratio] + [fld.zero] * 5 + [fld.one], fld, seed=0)
    elif not E1.B and not E2.B:  # j = 1728
        ratio = E2.A / E1.A
        cands = poly_roots([-ratio] + [fld.zero] * 3 + [fld.one], fld, seed=0)
    else:
        val = (E2.B * E1.A) / (E1.B * E2.A)
        cands = poly_roots([-val, fld.zero, fld.one], fld, seed=0)
    out = []
    for u in cands:
        if u ** 4 * E1.A == E2.A and u ** 6 * E1.B == E2.B:
            out.append(Isomorphism(E1, E2, u))
    out.sort(key=lambda iso: iso.u.key())
    return out


# ---------------------------------------------------------------------------
# modular polynomials


class ModPolyDB:
    """Coefficient tables of the classical modular polynomials Phi_ell(X, Y)."""

    def __init__(self, tables):
        self.tables = tables
        for ell, tab in tables.items():
            assert tab.get((ell + 1, 0)) == 1, "Phi_%d not monic" % ell
            assert all(0 <= i <= ell + 1 and 0 <= j <= ell + 1 for i, j in tab)
            assert all(tab.get((i, j)) == tab.get((j, i)) for i, j in tab), \
                "Phi_%d not symmetric" % ell
            kron = {k: c % ell for k, c in tab.items() if c % ell}
            expect = {(ell + 1, 0): 1, (0, ell + 1): 1,
                      (ell, ell): (-1) % ell, (1, 1): (-1) % ell}
            expect = {k: v for k, v in expect.items() if v % ell}
            assert kron == expect, "Phi_%d fails the Kronecker congruence" % ell

    @classmethod
    def load(cls, path=None):
        if path is None:
            text = resources.files("orienter").joinpath("data/modpoly.txt").read_text()
        else:
            with open(path) as fh:
                text = fh.read()
        tables = {}
        for line in text.splitlines():
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            ell_s, i_s, j_s, c_s = line.split()
            ell, i, j, c = int(ell_s), int(i_s), int(j_s), int(c_s)
            assert i >= j, "file stores the upper triangle only"
            tab = tables.setdefault(ell, {})
            assert (i, j) not in tab, "duplicate coefficient line"
            tab[(i, j)] = c
            if i != j:
                tab[(j, i)] = c
        return cls(tables)

    def levels(self):
        return sorted(self.tables)

    def __contains__(self, ell):
        return ell in self.tables

    def specialize(self, ell, j):
        """Phi_ell(j, Y) as a polynomial in Y over j's field."""
        if ell not in self.tables:
            raise UnsupportedDegree("no modular polynomial for ell=%d" % ell)
        fld = j.fld
        jp = [fld.one]
        for _ in range(ell + 1):
            jp.append(jp[-1] * j)
        coeffs = [fld.zero] * (ell + 2)
        for (i, jy), c in self.tables[ell].items():
            coeffs[jy] = coeffs[jy] + fld.from_int(c) * jp[i]
        return p_trim(coeffs)

    def value(self, ell, j1, j2):
        return p_eval(self.specialize(ell, j1), j2)


_DEFAULT_DB = None


def default_modpoly_db():
    global _DEFAULT_DB
    if _DEFAULT_DB is None:
        _DEFAULT_DB = ModPolyDB.load()
    return _DEFAULT_DB


def set_default_modpoly_db(db):
    """Swap the process-wide table (e.g. for a user-supplied file)."""
    global _DEFAULT_DB
    assert isinstance(db, ModPolyDB)
    _DEFAULT_DB = db


def ell_isogenous_j(j, ell, db=None):
    """j-invariants ell-isogenous to j over F_{p^2}, with multiplicity."""
    db = db or default_modpoly_db()
    if ell not in db:
        raise UnsupportedDegree("no modular polynomial for ell=%d" % ell)
    out = poly_roots(db.specialize(ell, j), j.fld, seed=0, multiplicities=True)
    assert len(out) <= ell + 1
    return out


# ---------------------------------------------------------------------------
# supersingularity and random walks


def is_supersingular(E):
    """Exhaustive count over F_{p^2}; supersingular iff trace in {0, +-p, +-2p}."""
    t2 = E.trace2()
    p = E.field.p
    return t2 in (0, p, -p, 2 * p, -2 * p)


def random_supersingular(p, steps, seed=0):
    """Non-backtracking 2-isogeny walk from y^2 = x^3 + x (needs p = 3 mod 4)."""
    assert nt.is_prime(p) and p % 4 == 3
    fld = fp2(p)
    E = Curve(fld, fld.one, fld.zero)
    rng = random.Random("walk,%d,%d" % (p, seed))
    prev_j = None
    for _ in range(steps):
        isos = isogenies_of_degree(E, 2)
        fresh = [phi for phi in isos if prev_j is None or phi.codomain.j != prev_j]
        if not fresh:
            fresh = isos  # dead end (tiny graphs); allow the backtrack
        phi = rng.choice(fresh)
        prev_j = E.j
        E = phi.codomain
    return E


# ---------------------------------------------------------------------------
# Weil pairing and torsion bases


class _PairingFailure(Exception):
    """Degenerate auxiliary point during Miller's algorithm; retry."""


def _line_value(A, T, U, X):
    """Value at X of the line through T and U over the vertical at T+U."""
    x1, y1 = T
    x2, y2 = U
    xv, yv = X
    if x1 == x2 and y1 == -y2:
        v = xv - x1
        if not v:
            raise _PairingFailure
        return v
    if T == U:
        lam = (3 * x1 * x1 + A) / (2 * y1)
    else:
        lam = (y2 - y1) / (x2 - x1)
    S = point_add(A, T, U)
    assert S is not None
    lnum = yv - y1 - lam * (xv - x1)
    vden = xv - S[0]
    if not lnum or not vden:
        raise _PairingFailure
    return lnum / vden


def _miller(fld, A, P, m, X):
    """Miller function f_{m,P} evaluated at the affine point X."""
    if X is None:
        raise _PairingFailure
    f = fld.one
    T = P
    for bit in bin(m)[3:]:
        f = f * f * _line_value(A, T, T, X)
        T = point_add(A, T, T)
        if bit == "1":
            f = f * _line_value(A, T, P, X)
            T = point_add(A, T, P)
    assert T is None, "argument point does not have order dividing m"
    return f


def weil_pairing(fld, A, B, P, Q, m, seed=0):
    """Weil pairing e_m(P, Q) for points of exact order m on y^2 = x^3 + Ax + B."""
    assert P is not None and Q is not None
    rng = random.Random("weil,%d,%d,%d,%d" % (seed, fld.p, fld.k, m))
    for _ in range(64):
        try:
            S = random_point(fld, A, B, rng)
            num = _miller(fld, A, P, m, point_add(A, Q, S)) / _miller(fld, A, P, m, S)
            den = _miller(fld, A, Q, m, point_add(A, P, point_neg(S))) / \
                _miller(fld, A, Q, m, point_neg(S))
            e = num / den
        except _PairingFailure:
            continue
        assert e ** m == fld.one, "pairing value not an m-th root of unity"
        return e
    raise AssertionError("Weil pairing kept hitting degenerate auxiliaries")


class TorsionBasis:
    """Basis (P, Q) of E[m] over F_{p^(2*delta)}, with the embedding used."""

    __slots__ = ("m", "delta", "field", "emb", "P", "Q")

    def __init__(self, m, delta, field, emb, P, Q):
        self.m = m
        self.delta = delta
        self.field = field
        self.emb = emb
        self.P = P
        self.Q = Q

    def __repr__(self):
        return "TorsionBasis(m=%d, delta=%d)" % (self.m, self.delta)


def _totient(m):
    out = m
    for q in set(nt.factorize(m)):
        out = out // q * (q - 1)
    return out


def _divisors(n):
    fac = nt.factorize(n)
    out = [1]
    for q in set(fac):
        e = fac.count(q)
        out = [d * q ** i for d in out for i in range(e + 1)]
    return sorted(set(out))


def _point_of_exact_order(fld, A, N, m, mfac, rng, B):
    """A point of exact order m, assembled prime power by prime power."""
    parts = []
    for q, a in mfac:
        target = q ** a
        vq = 0
        Nq = N
        while Nq % q == 0:
            Nq //= q
            vq += 1
        assert vq >= a, "group order lacks the required prime power"
        cof = N // q ** vq
        for _ in range(48):
            R = random_point(fld, A, B, rng)
            S = point_mul(A, cof, R)
            if S is None:
                continue
            # order of S is a power of q; find it
            chain = [S]
            while chain[-1] is not None:
                chain.append(point_mul(A, q, chain[-1]))
            e = len(chain) - 1  # order q^e
            if e < a:
                continue
            parts.append(point_mul(A, q ** (e - a), S))
            break
        else:
            return None
    P = None
    for T in parts:
        P = point_add(A, P, T)
    assert point_mul(A, m, P) is None and P is not None
    return P


def torsion_basis(E, m, seed=0):
    """Basis of E[m] over the smallest workable F_{p^(2*delta)}, delta | 6*phi(m)."""
    if m > TORSION_CAP:
        raise CapExceeded("m=%d above cap %d" % (m, TORSION_CAP))
    assert m >= 2 and math.gcd(m, E.field.p) == 1
    p = E.field.p
    t2 = E.trace2()
    p2 = p * p
    flat = nt.factorize(m)
    mprimes = sorted(set(flat))
    mfac = [(q, flat.count(q)) for q in mprimes]
    # trace of Frobenius over F_{p^(2*delta)} by the Newton recurrence
    traces = {0: 2, 1: t2}

    def trace_d(d):
        while d not in traces:
            k = max(traces) + 1
            traces[k] = t2 * traces[k - 1] - p2 * traces[k - 2]
        return traces[d]

    for delta in _divisors(6 * _totient(m)):
        N = p2 ** delta + 1 - trace_d(delta)
        if N % (m * m):
            continue
        big = ext_field(p, 2 * delta)
        emb = embed_into(E.field, big)
        Ab, Bb = emb(E.A), emb(E.B)
        rng = random.Random("torsion,%d,%d,%d,%d" % (seed, p, m, delta))
        got = None
        for _ in range(24):
            P = _point_of_exact_order(big, Ab, N, m, mfac, rng, Bb)
            if P is None:
                break
            Q = _point_of_exact_order(big, Ab, N, m, mfac, rng, Bb)
            if Q is None:
                break
            try:
                z = weil_pairing(big, Ab, Bb, P, Q, m, seed=rng.getrandbits(30))
            except AssertionError:
                continue
            if all(z ** (m // q) != big.one for q in mprimes):
                got = (P, Q)
                break
        if got is not None:
            log.debug("torsion basis m=%d found at delta=%d", m, delta)
            return TorsionBasis(m, delta, big, emb, got[0], got[1])
    raise AssertionError("no extension in the 6*phi(m) range carried E[%d]; bug" % m)

"""Exact arithmetic in the quaternion algebra (-q, -p | Q) and its lattices.

Elements carry four Fraction coordinates over the basis 1, i, j, k with
i^2 = -q, j^2 = -p, ij = k = -ji.  Orders and ideals are rank-4 lattices
given by rational 4x4 basis matrices (rows = elements), normalized to an
upper-triangular Hermite form whose diagonal profile drives the embedding
solver.  Everything is exact; no floats anywhere.
"""

import logging
import math
import random
from dataclasses import dataclass
from fractions import Fraction

from . import numtheory as nt

log = logging.getLogger(__name__)


class AlgebraMismatch(Exception):
    pass


class RankDeficient(Exception):
    pass


class NoneFound(Exception):
    pass


class NotIsomorphic(Exception):
    pass


class NoSuitableC(Exception):
    pass


# --------------------------------------------------------------- the algebra

@dataclass(frozen=True)
class QuatAlgebra:
    """(-q, -p | Q): i^2 = -q, j^2 = -p, ramified exactly at p and infinity."""

    p: int
    q: int

    def __post_init__(self):
        p, q = self.p, self.q
        assert p > 2 and nt.is_prime(p), p
        if q == 1:
            assert p % 4 == 3
        elif q == 2:
            assert p % 8 == 5
        else:
            # covers the p = 1 mod 8 standard choice and all alternative
            # representations: q an odd prime, q = 3 mod 4, (-q | p) = -1
            assert nt.is_prime(q) and q % 4 == 3 and nt.kronecker(-q, p) == -1, (p, q)

    @property
    def denominator_class(self):
        """The K with standard-order denominators dividing K: 2, 4 or 2q."""
        if self.q == 1:
            return 2
        if self.q == 2:
            return 4
        return 2 * self.q

    def element(self, w, x=0, y=0, z=0):
        return QuatElement(self, (Fraction(w), Fraction(x), Fraction(y), Fraction(z)))

    def one(self):
        return self.element(1)

    def i(self):
        return self.element(0, 1)

    def j(self):
        return self.element(0, 0, 1)

    def k(self):
        return self.element(0, 0, 0, 1)


@dataclass(frozen=True)
class QuatElement:
    algebra: QuatAlgebra
    coords: tuple  # (w, x, y, z) Fractions over 1, i, j, k

    def __add__(self, other):
        assert self.algebra == other.algebra
        return QuatElement(self.algebra, tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other):
        assert self.algebra == other.algebra
        return QuatElement(self.algebra, tuple(a - b for a, b in zip(self.coords, other.coords)))

    def __neg__(self):
        return QuatElement(self.algebra, tuple(-a for a in self.coords))

    def scale(self, c):
        c = Fraction(c)
        return QuatElement(self.algebra, tuple(c * a for a in self.coords))

    def __mul__(self, other):
        if not isinstance(other, QuatElement):
            return self.scale(other)
        assert self.algebra == other.algebra
        p, q = self.algebra.p, self.algebra.q
        w1, x1, y1, z1 = self.coords
        w2, x2, y2, z2 = other.coords
        return QuatElement(self.algebra, (
            w1 * w2 - q * x1 * x2 - p * y1 * y2 - p * q * z1 * z2,
            w1 * x2 + x1 * w2 + p * (y1 * z2 - z1 * y2),
            w1 * y2 + y1 * w2 + q * (z1 * x2 - x1 * z2),
            w1 * z2 + z1 * w2 + x1 * y2 - y1 * x2,
        ))

    __rmul__ = scale

    def conjugate(self):
        w, x, y, z = self.coords
        return QuatElement(self.algebra, (w, -x, -y, -z))

    @property
    def trd(self):
        return 2 * self.coords[0]

    @property
    def nrd(self):
        p, q = self.algebra.p, self.algebra.q
        w, x, y, z = self.coords
        return w * w + q * x * x + p * y * y + p * q * z * z

    def inverse(self):
        n = self.nrd
        assert n != 0
        return self.conjugate().scale(Fraction(1, 1) / n)

    def is_zero(self):
        return all(c == 0 for c in self.coords)


# ------------------------------------------------------------ lattice basics

def _lcm_denominator(rows):
    out = 1
    for row in rows:
        for x in row:
            out = out * x.denominator // math.gcd(out, x.denominator)
    return out


def _integer_hnf(rows):
    """Row-style Hermite form of an integer matrix whose rows generate a
    rank-4 lattice in Z^4: upper triangular, positive diagonal, entries above
    each pivot reduced into [0, pivot)."""
    mat = [list(r) for r in rows]
    n = 4
    fixed = 0
    for col in range(n):
        # gcd-eliminate column `col` below row `fixed`
        while True:
            nonzero = [r for r in range(fixed, len(mat)) if mat[r][col]]
            if len(nonzero) <= 1:
                break
            nonzero.sort(key=lambda r: abs(mat[r][col]))
            piv = nonzero[0]
            for r in nonzero[1:]:
                t = mat[r][col] // mat[piv][col]
                mat[r] = [a - t * b for a, b in zip(mat[r], mat[piv])]
        nonzero = [r for r in range(fixed, len(mat)) if mat[r][col]]
        if not nonzero:
            continue
        mat[fixed], mat[nonzero[0]] = mat[nonzero[0]], mat[fixed]
        if mat[fixed][col] < 0:
            mat[fixed] = [-a for a in mat[fixed]]
        fixed += 1
    mat = [row for row in mat[:fixed] if any(row)]
    if len(mat) != n:
        raise RankDeficient(f"rank {len(mat)} < {n}")
    # reduce entries above each diagonal pivot
    for j in range(1, n):
        for i in range(j):
            t = mat[i][j] // mat[j][j]
            if t:
                mat[i] = [a - t * b for a, b in zip(mat[i], mat[j])]
    return mat


def lattice_hnf(rows):
    """Canonical upper-triangular basis of the lattice generated by the given
    rational rows (any number >= 4 of them)."""
    rows = [tuple(Fraction(x) for x in row) for row in rows]
    den = _lcm_denominator(rows)
    mat = _integer_hnf([[int(x * den) for x in row] for row in rows])
    return tuple(tuple(Fraction(a, den) for a in row) for row in mat)


def lattice_det(basis):
    """Covolume: |det| of a triangular (or any) basis matrix."""
    return abs(_det4(basis))


def _det4(m):
    # cofactor expansion, exact
    def det3(a):
        return (a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1])
                - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
                + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]))

    total = Fraction(0)
    for c in range(4):
        minor = [[m[r][cc] for cc in range(4) if cc != c] for r in range(1, 4)]
        total += (-1) ** c * m[0][c] * det3(minor)
    return total


def _mat_inv(m):
    """Inverse of a 4x4 Fraction matrix by Gauss-Jordan."""
    a = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(4)]
         for i, row in enumerate(m)]
    for col in range(4):
        piv = next(r for r in range(col, 4) if a[r][col] != 0)
        a[col], a[piv] = a[piv], a[col]
        inv = 1 / a[col][col]
        a[col] = [x * inv for x in a[col]]
        for r in range(4):
            if r != col and a[r][col]:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return tuple(tuple(row[4:]) for row in a)


def _mat_mul(a, b):
    return tuple(tuple(sum(a[i][k] * b[k][j] for k in range(4)) for j in range(4))
                 for i in range(4))


def _vec_mat(v, m):
    return tuple(sum(v[k] * m[k][j] for k in range(4)) for j in range(4))


def _transpose(m):
    return tuple(tuple(m[j][i] for j in range(4)) for i in range(4))


def lattice_dual(basis):
    return _transpose(_mat_inv(basis))


def lattice_intersect(*bases):
    """Intersection of full-rank lattices: dual of the sum of the duals."""
    duals = [row for b in bases for row in lattice_dual(b)]
    return lattice_dual(lattice_hnf(duals))


def solve_coords(basis, vector):
    """Rational coordinates of `vector` over the basis rows."""
    inv = _mat_inv(basis)
    return _vec_mat(tuple(Fraction(x) for x in vector), inv)


def lattice_contains(basis, vector):
    return all(c.denominator == 1 for c in solve_coords(basis, vector))


# --------------------------------------------------------- orders and ideals

@dataclass(frozen=True)
class HnfProfile:
    e: tuple  # 4x4 upper-triangular Fractions
    N: int    # lcm of all denominators

    def __getitem__(self, mn):
        return self.e[mn[0]][mn[1]]


def hnf(lattice_or_rows):
    """HNF profile of an order/ideal basis (or raw rational rows)."""
    rows = getattr(lattice_or_rows, "basis", lattice_or_rows)
    e = lattice_hnf(rows)
    return HnfProfile(e, _lcm_denominator(e))


class QuatOrder:
    """A rank-4 lattice subring of the algebra, stored in HNF."""

    def __init__(self, algebra, rows, check=True):
        self.algebra = algebra
        self.basis = lattice_hnf(rows)
        self._inv = _mat_inv(self.basis)
        if check:
            assert self.is_ring(), "lattice is not closed under multiplication"

    def __eq__(self, other):
        return isinstance(other, QuatOrder) and self.algebra == other.algebra \
            and self.basis == other.basis

    def __hash__(self):
        return hash((self.algebra, self.basis))

    def element(self, coords):
        return QuatElement(self.algebra, tuple(Fraction(c) for c in coords))

    def basis_elements(self):
        return [self.element(row) for row in self.basis]

    def contains(self, elem):
        return all(c.denominator == 1 for c in _vec_mat(elem.coords, self._inv))

    def coordinates(self, elem):
        """Integer coordinates of elem over the order basis (asserts membership)."""
        cs = _vec_mat(elem.coords, self._inv)
        assert all(c.denominator == 1 for c in cs), "element not in order"
        return tuple(int(c) for c in cs)

    def is_ring(self):
        one = (Fraction(1), Fraction(0), Fraction(0), Fraction(0))
        if not lattice_contains(self.basis, one):
            return False
        els = self.basis_elements()
        return all(self.contains(a * b) for a in els for b in els)

    def reduced_discriminant(self):
        """sqrt of |det trd(e_m e_n)|; equals p exactly for maximal orders."""
        els = self.basis_elements()
        gram = [[(a * b).trd for b in els] for a in els]
        d = abs(_det4(gram))
        assert d.denominator == 1
        r = math.isqrt(int(d))
        assert r * r == d, "trace Gram determinant is not a perfect square"
        return r

    def is_maximal(self):
        return self.reduced_discriminant() == self.algebra.p

    def profile(self):
        return HnfProfile(self.basis, _lcm_denominator(self.basis))

    def conjugate_by(self, gamma):
        """gamma^-1 * O * gamma, an isomorphic order."""
        ginv = gamma.inverse()
        rows = [(ginv * b * gamma).coords for b in self.basis_elements()]
        return QuatOrder(self.algebra, rows, check=False)


class QuatIdeal:
    """A rank-4 lattice with (lazily computed) left and right orders."""

    def __init__(self, algebra, rows):
        self.algebra = algebra
        self.basis = lattice_hnf(rows)
        self._left = None
        self._right = None

    def basis_elements(self):
        return [QuatElement(self.algebra, row) for row in self.basis]

    def contains(self, elem):
        return lattice_contains(self.basis, elem.coords)

    def conjugate(self):
        return QuatIdeal(self.algebra, [b.conjugate().coords for b in self.basis_elements()])

    def _mult_order(self, side):
        """{x : x*I <= I} (side 'left') or {x : I*x <= I} (side 'right')."""
        pieces = []
        for b in self.basis_elements():
            # rows of the multiplication-by-b matrix on standard coordinates
            rows = []
            for idx in range(4):
                e = QuatElement(self.algebra, tuple(Fraction(int(m == idx)) for m in range(4)))
                prod = (e * b) if side == "left" else (b * e)
                rows.append(prod.coords)
            m = _mat_mul(rows, _mat_inv(self.basis))   # x-coords -> I-coords
            pieces.append(_mat_inv(m))                  # lattice {v : v m in Z^4}
        return QuatOrder(self.algebra, lattice_intersect(*pieces), check=False)

    def left_order(self):
        if self._left is None:
            self._left = self._mult_order("left")
        return self._left

    def right_order(self):
        if self._right is None:
            self._right = self._mult_order("right")
        return self._right

    def norm(self):
        """N(I) = sqrt([O_L(I) : I]) via the covolume ratio."""
        ratio = lattice_det(self.basis) / lattice_det(self.left_order().basis)
        assert ratio.denominator == 1, "ideal not integral over its left order"
        n = math.isqrt(int(ratio))
        assert n * n == int(ratio), "index is not a perfect square"
        return n

    def mul_element(self, gamma):
        """The ideal I * gamma."""
        return QuatIdeal(self.algebra, [(b * gamma).coords for b in self.basis_elements()])


def standard_max_order(algebra: QuatAlgebra) -> QuatOrder:
    """The standard maximal order for each congruence class of p.

    q = 1:  Z[(1+j)/2, (i+k)/2, j, k]
    q = 2:  Z[(1+j+k)/2, (i+2j+k)/4, j, k]
    else:   Z[(1+i)/2, (i+ck)/q, (j+k)/2, k] with q | c^2 p + 1
            (valid for every p, which is what the rerandomization
            representations rely on)
    """
    p, q = algebra.p, algebra.q
    h = Fraction(1, 2)
    if q == 1:
        rows = [(h, 0, h, 0), (0, h, 0, h), (0, 0, 1, 0), (0, 0, 0, 1)]
    elif q == 2:
        rows = [(h, 0, h, h), (0, Fraction(1, 4), h, Fraction(1, 4)),
                (0, 0, 1, 0), (0, 0, 0, 1)]
    else:
        c = next((c for c in range(q) if (c * c * p + 1) % q == 0), None)
        if c is None:
            raise NoSuitableC(f"no c with q | c^2 p + 1 for p={p}, q={q}")
        rows = [(h, h, 0, 0), (0, Fraction(1, q), 0, Fraction(c, q)),
                (0, 0, h, h), (0, 0, 0, 1)]
    order = QuatOrder(algebra, rows)
    assert order.is_maximal()
    return order


def connecting_ideal(o1: QuatOrder, o2: QuatOrder) -> QuatIdeal:
    """I = N * O1 * O2 with N = [O1 : O1 n O2]; O_L(I) = O1, O_R(I) = O2."""
    if o1.algebra != o2.algebra:
        raise AlgebraMismatch((o1.algebra, o2.algebra))
    inter = lattice_intersect(o1.basis, o2.basis)
    n = lattice_det(inter) / lattice_det(o1.basis)
    assert n.denominator == 1 and n >= 1
    n = int(n)
    products = [(a * b).scale(n).coords for a in o1.basis_elements()
                for b in o2.basis_elements()]
    ideal = QuatIdeal(o1.algebra, products)
    ideal._left = o1
    ideal._right = o2
    return ideal


# ----------------------------------------------------------- short vectors

def _norm_gram(algebra, basis):
    """Gram matrix of the reduced-norm form on the given basis rows."""
    els = [QuatElement(algebra, row) for row in basis]
    return [[(a * b.conjugate()).trd / 2 for b in els] for a in els]


def _gso_from_gram(g, n):
    """Gram-Schmidt data (mu, squared norms) computed from a Gram matrix."""
    mu = [[Fraction(0)] * n for _ in range(n)]
    bs = [Fraction(0)] * n
    for i in range(n):
        for j in range(i):
            mu[i][j] = (g[i][j] - sum(mu[i][l] * mu[j][l] * bs[l] for l in range(j))) / bs[j]
        bs[i] = g[i][i] - sum(mu[i][l] ** 2 * bs[l] for l in range(i))
        assert bs[i] > 0, "form must be positive definite"
    return mu, bs


def _lll_reduce(basis, gram, delta=Fraction(3, 4)):
    """Exact LLL of a basis under the PD form given by its Gram matrix.

    Recomputes the GSO from the Gram each round; plenty fast at rank <= 4
    even with 256-bit entries, and keeps everything rational.
    """
    n = len(basis)
    b = [list(row) for row in basis]
    g = [row[:] for row in gram]

    def row_op(i, t, j):
        # b_i <- b_i - t*b_j, with the matching symmetric Gram update
        b[i] = [x - t * y for x, y in zip(b[i], b[j])]
        for kk in range(n):
            g[i][kk] -= t * g[j][kk]
        for kk in range(n):
            g[kk][i] -= t * g[kk][j]

    def swap(i, j):
        b[i], b[j] = b[j], b[i]
        g[i], g[j] = g[j], g[i]
        for row in g:
            row[i], row[j] = row[j], row[i]

    k = 1
    guard = 0
    while k < n:
        guard += 1
        assert guard < 10_000, "LLL failed to terminate"
        mu, bs = _gso_from_gram(g, n)
        for j in range(k - 1, -1, -1):
            t = round(mu[k][j])
            if t:
                row_op(k, t, j)
                mu, bs = _gso_from_gram(g, n)
        if bs[k] >= (delta - mu[k][k - 1] ** 2) * bs[k - 1]:
            k += 1
        else:
            swap(k, k - 1)
            k = max(k - 1, 1)
    return [tuple(row) for row in b], g


def _floor_sqrt_frac(f):
    """floor(sqrt(f)) for a non-negative Fraction."""
    if f < 0:
        return -1
    return math.isqrt(f.numerator * f.denominator) // f.denominator


def _enumerate_form(mu, bs, bound, limit):
    """Fincke-Pohst on Q(c) = sum_j bs[j] (c_j + sum_{i>j} mu[i][j] c_i)^2.

    Returns ([(value, coeffs)], complete); incomplete when the node budget
    runs out, with everything collected so far."""
    n = len(bs)
    bound = Fraction(bound)
    out = []
    nodes = 0
    complete = True

    def recurse(level, rem, partial):
        nonlocal nodes, complete
        center = Fraction(sum(mu[i][level] * partial[i] for i in range(level + 1, n)))
        # valid c lie in [-center - s, -center + s], s = sqrt(rem/bs[level]);
        # bracket that window with integers, then trim by the exact predicate
        radius = _floor_sqrt_frac(rem / bs[level])
        shift = center.numerator // center.denominator
        lo, hi = -shift - radius - 2, -shift + radius + 1
        while lo <= hi and (lo + center) ** 2 * bs[level] > rem:
            lo += 1
        while hi >= lo and (hi + center) ** 2 * bs[level] > rem:
            hi -= 1
        for c in range(lo, hi + 1):
            nodes += 1
            if nodes > limit:
                complete = False
                return
            contrib = (c + center) ** 2 * bs[level]
            partial[level] = c
            if level == 0:
                if any(partial):
                    out.append((bound - (rem - contrib), tuple(partial)))
            else:
                recurse(level - 1, rem - contrib, partial)
                if not complete:
                    return
        partial[level] = 0

    recurse(n - 1, bound, [0] * n)
    return out, complete


def _dedupe_short(found, basis):
    seen = {}
    for norm, coeffs in found:
        vec = _vec_mat(coeffs, basis)
        # canonical sign: first nonzero coordinate positive
        for c in vec:
            if c:
                if c < 0:
                    vec = tuple(-x for x in vec)
                break
        seen[vec] = (norm, vec)
    return sorted(seen.values(), key=lambda t: (t[0], t[1]))


def short_vectors(algebra, basis, bound, limit=500_000):
    """All lattice vectors with reduced norm <= bound (and their norms),
    via exact LLL + Fincke-Pohst.  Returns [(norm, coords)], sorted; one
    representative per +-pair (first nonzero coefficient positive)."""
    basis, gram = _lll_reduce(basis, _norm_gram(algebra, basis))
    mu, bs = _gso_from_gram(gram, 4)
    found, complete = _enumerate_form(mu, bs, bound, limit)
    if not complete:
        raise NoneFound("enumeration budget exhausted below the requested bound")
    return _dedupe_short(found, basis)


def lemma_norm_bound(p: int) -> int:
    """ceil((2 sqrt(2) / pi) * sqrt(p)): the guaranteed small-ideal norm."""
    # 8/pi^2 as an exact fraction of the float approximation; error ~1e-16
    # cannot move a ceiling at any realistic p
    c = Fraction(8) / Fraction(math.pi) ** 2
    f = c * p
    r = _floor_sqrt_frac(f)
    return int(r) if Fraction(r) ** 2 == f else int(r) + 1


def small_equivalent_ideals(ideal: QuatIdeal, count: int = 8, norm_bound=None):
    """Equivalent ideals J = I * (conj(gamma)/N(I)) of small norm.

    gamma runs over short vectors of I under the reduced norm; each J
    satisfies N(J) = nrd(gamma)/N(I) and O_L(J) = O_L(I).  Sorted by norm.
    """
    p = ideal.algebra.p
    n_i = ideal.norm()
    if norm_bound is None:
        norm_bound = lemma_norm_bound(p)
    cap = Fraction(norm_bound) * n_i
    basis, gram = _lll_reduce(ideal.basis, _norm_gram(ideal.algebra, ideal.basis))
    mu, bs = _gso_from_gram(gram, 4)
    # grow the enumeration radius from the lattice-minimum scale: the full
    # ball of radius ~sqrt(p)*N(I) holds far too many vectors at large p
    # (the plane through N(I) and N(I)*i is dense at that scale), but the
    # few smallest ones are all we need
    bound = min(min(gram[m][m] for m in range(4)), cap)
    results = []
    while True:
        found, complete = _enumerate_form(mu, bs, bound, limit=200_000)
        results = []
        seen = set()
        for nrm, vec in _dedupe_short(found, basis):
            gamma = QuatElement(ideal.algebra, vec)
            n_gamma = gamma.nrd
            if n_gamma == 0 or (n_gamma % n_i) != 0:
                continue
            delta = gamma.conjugate().scale(Fraction(1, n_i))
            j_ideal = ideal.mul_element(delta)
            key = j_ideal.basis
            if key in seen:
                continue
            seen.add(key)
            j_ideal._left = ideal._left
            assert j_ideal.norm() * n_i == n_gamma
            results.append((j_ideal, gamma))
            if len(results) >= count:
                break
        if len(results) >= count or bound >= cap or not complete:
            break
        bound = min(bound * 4, cap)
    if not results:
        raise NoneFound(f"no equivalent ideal with norm <= {norm_bound}")
    return results


# ------------------------------------------------- alternative representations

def alternative_representations(p: int, r: int):
    """The r smallest alternative representations (-q_i, -p): q_i prime,
    q_i = 3 mod 4, (-q_i | p) = -1."""
    assert p > 2 and r >= 1
    out = []
    q = 3
    while len(out) < r:
        if q % 4 == 3 and nt.is_prime(q) and nt.kronecker(-q, p) == -1:
            out.append(QuatAlgebra(p, q))
        q += 2
    return out


class RepresentationMap:
    """An explicit isomorphism between two representations of B_{p,oo},
    as an invertible rational 4x4 matrix on coordinates."""

    def __init__(self, src, dst, matrix):
        self.src = src
        self.dst = dst
        self.matrix = matrix
        self.inverse_matrix = _mat_inv(matrix)

    def __call__(self, elem: QuatElement) -> QuatElement:
        assert elem.algebra == self.src
        return QuatElement(self.dst, _vec_mat(elem.coords, self.matrix))

    def inv(self, elem: QuatElement) -> QuatElement:
        assert elem.algebra == self.dst
        return QuatElement(self.src, _vec_mat(elem.coords, self.inverse_matrix))

    def map_order(self, order: QuatOrder) -> QuatOrder:
        rows = [_vec_mat(row, self.matrix) for row in order.basis]
        return QuatOrder(self.dst, rows, check=False)

    def map_order_back(self, order: QuatOrder) -> QuatOrder:
        rows = [_vec_mat(row, self.inverse_matrix) for row in order.basis]
        return QuatOrder(self.src, rows, check=False)


def _lagrange_reduce_2d(v1, v2, form):
    """Gauss-Lagrange reduction of a rank-2 integer lattice under a PD form."""

    def f(v):
        return form(v[0], v[1])

    def dot(u, v):
        return (form(u[0] + v[0], u[1] + v[1]) - f(u) - f(v)) // 2

    if f(v1) > f(v2):
        v1, v2 = v2, v1
    while True:
        t = round(Fraction(dot(v1, v2), f(v1)))
        v2 = (v2[0] - t * v1[0], v2[1] - t * v1[1])
        if f(v2) >= f(v1):
            return v1, v2
        v1, v2 = v2, v1


def _pure_norm_q(algebra, target_q):
    """A trace-zero element of reduced norm target_q in `algebra`, or None.

    Searches the rank-2 lattice {(u, w): q u^2 = target_q w^2 mod p} for
    short vectors; each yields m = (target_q w^2 - q u^2)/p, and a Cornacchia
    split m = v^2 + q s^2 completes alpha = (u i + v j + s k)/w.
    """
    p, q = algebra.p, algebra.q
    if q == target_q:
        return algebra.i(), (0, 0, 1, 0)
    ratio = target_q * pow(q, -1, p) % p
    roots = nt.sqrt_mod_prime(ratio, p)
    assert roots is not None, "representations must share the residue class"
    c = min(roots)

    def form(u, w):
        return q * u * u + target_q * w * w

    v1, v2 = _lagrange_reduce_2d((p, 0), (c, 1), form)
    # enumerate small combinations a*v1 + b*v2, smallest form-value first
    cands = []
    for a in range(-8, 9):
        for b in range(-8, 9):
            u, w = a * v1[0] + b * v2[0], a * v1[1] + b * v2[1]
            if w:
                cands.append((form(u, w), u, w))
    cands.sort()
    for _, u, w in cands:
        m, rem = divmod(target_q * w * w - q * u * u, p)
        if rem or m <= 0:
            continue
        sols = sorted(nt.cornacchia_all(q, m), key=lambda t: (abs(t[0]), abs(t[1]), t[0] < 0, t[1] < 0))
        for v, s in sols:
            alpha = QuatElement(algebra, (Fraction(0), Fraction(u, w), Fraction(v, w), Fraction(s, w)))
            assert alpha.nrd == target_q and alpha.trd == 0
            return alpha, (u, v, s, w)
    return None


def representation_isomorphism(src: QuatAlgebra, dst: QuatAlgebra) -> RepresentationMap:
    """phi: src -> dst with phi(i)^2 = -q_src, phi(j)^2 = -p, anticommuting.

    i maps to a trace-zero element of norm q_src; j maps to a norm-p element
    of its anticommutant, built from a generator orthogonal to the i-image
    and corrected by a Q(i)-multiplier whose norm a Cornacchia call supplies.
    """
    if src.p != dst.p:
        raise NotIsomorphic("different p")
    if src == dst:
        ident = tuple(tuple(Fraction(int(i == j)) for j in range(4)) for i in range(4))
        return RepresentationMap(src, dst, ident)
    p, qd = dst.p, dst.q
    qs = src.q
    found = _pure_norm_q(dst, qs)
    if found is None:
        raise NotIsomorphic("no pure element of the required norm found")
    alpha, (u, v, s, w) = found
    assert (v, s) != (0, 0), "degenerate pure element without anticommutant data"
    # beta0 = -q_dst*(s/w) j + (v/w) k is orthogonal to alpha
    beta0 = QuatElement(dst, (Fraction(0), Fraction(0), Fraction(-qd * s, w), Fraction(v, w)))
    assert (alpha * beta0 + beta0 * alpha).is_zero()
    m = (v * v + qd * s * s)
    # need (g + h*alpha) * beta0 of norm p:  g^2 + q_src h^2 = w^2/(q_dst m)
    target = None
    for k in range(1, 512):
        sols = nt.cornacchia_all(qs, qd * m * k * k)
        if sols:
            X, Y = min(sols, key=lambda t: (abs(t[0]), abs(t[1]), t[0] < 0, t[1] < 0))
            target = (X, Y, k)
            break
    if target is None:
        raise NotIsomorphic("anticommutant norm equation resisted")
    X, Y, k = target
    denom = qd * m * k
    g, h_ = Fraction(w * X, denom), Fraction(w * Y, denom)
    beta = (dst.one().scale(g) + alpha.scale(h_)) * beta0
    assert beta.nrd == p and beta.trd == 0
    assert (alpha * beta + beta * alpha).is_zero()
    gamma = alpha * beta
    matrix = (
        (Fraction(1), Fraction(0), Fraction(0), Fraction(0)),
        alpha.coords,
        beta.coords,
        gamma.coords,
    )
    phi = RepresentationMap(src, dst, matrix)
    # homomorphism sanity on the defining relations
    assert phi(src.i()) * phi(src.i()) == dst.element(-qs)
    assert phi(src.j()) * phi(src.j()) == dst.element(-p)
    return phi


# ------------------------------------------------------------ random orders

def random_maximal_order(algebra: QuatAlgebra, seed: int = 0, ideal_norm=None, steps: int = 1) -> QuatOrder:
    """Right order of a random chain of prime-norm left ideals from O_0.

    Each step picks a random integral left ideal O N + O gamma of prime norm
    N (default: a random prime in [60, 700]) and moves to its right order.
    steps=0 or N=1 returns the standard order itself.
    """
    rng = random.Random(seed)
    order = standard_max_order(algebra)
    if ideal_norm == 1 or steps == 0:
        return order
    previous = None
    for _ in range(steps):
        n = ideal_norm
        if n is None:
            n = nt.next_prime(rng.randrange(60, 700))
            while n == algebra.p:
                n = nt.next_prime(rng.randrange(60, 700))
        for _ in range(50):
            nxt = random_ideal_step(order, n, rng).right_order()
            if nxt != previous and nxt != order:
                break
        previous, order = order, nxt
    return order


def random_ideal_step(order: QuatOrder, n: int, rng) -> QuatIdeal:
    """A random integral left `order`-ideal of prime norm n."""
    assert nt.is_prime(n) and n != order.algebra.p
    els = order.basis_elements()
    for _ in range(100_000):
        if n < 50:
            # direct sampling: zeros of the norm form mod n are ~1/n dense
            cs = [rng.randrange(n) for _ in range(4)]
            if not any(cs):
                continue
            gamma = els[0] * cs[0] + els[1] * cs[1] + els[2] * cs[2] + els[3] * cs[3]
            if int(gamma.nrd) % n:
                continue
        else:
            # solve nrd(c0*b0 + rest) = 0 mod n as a quadratic in c0
            cs = [rng.randrange(n) for _ in range(3)]
            rest = els[1] * cs[0] + els[2] * cs[1] + els[3] * cs[2]
            b0 = els[0]
            a2 = int(b0.nrd) % n
            a1 = int((b0 * rest.conjugate()).trd) % n
            a0 = int(rest.nrd) % n
            if a2 == 0:
                if a1 == 0:
                    continue
                c0 = (-a0) * pow(a1, -1, n) % n
            else:
                disc = (a1 * a1 - 4 * a2 * a0) % n
                roots = nt.sqrt_mod_prime(disc, n)
                if roots is None:
                    continue
                r = min(roots) if rng.random() < 0.5 else max(roots)
                c0 = (r - a1) * pow(2 * a2, -1, n) % n
            gamma = b0 * c0 + rest
            if int(gamma.nrd) % n:
                continue
        coords = order.coordinates(gamma)
        if all(c % n == 0 for c in coords):
            continue  # gamma in n*O: not a primitive generator
        rows = [b.scale(n).coords for b in els] + [(b * gamma).coords for b in els]
        ideal = QuatIdeal(order.algebra, rows)
        ideal._left = order
        if ideal.norm() == n:
            return ideal
    raise NoneFound(f"no primitive norm-{n} ideal found")

"""Curve-side reductions: decision oracles, oriented isogeny trees, and the
search-to-decision algorithms.

Two oracle constructions answer "is this j-invariant orientable by the fixed
imaginary quadratic order": a desk-scale brute-force one (enumerate closed
isogeny chains of the right degree, match the trace, test primitivity) and a
quaternion-side one (delegate to the embedding solver when the endomorphism
order is known).  On top of them: the ramified-prime walk for special
discriminants, binary tree filling, and the meet-in-the-middle reduction with
chain witnesses.
"""

import collections
import logging
import math
import random
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from . import ecfield as ec
from . import numtheory as nt
from . import quadforms as qf
from . import embedsolver as es

log = logging.getLogger(__name__)

ORACLE_NORM_CAP = 4096       # safety valve on chain enumeration width
TRACE_PRIME_WINDOW = 48      # trace moduli are drawn from primes below this
WITNESS_POINTS = 10          # default sample size for witness verification


class OracleRejectsRoot(Exception):
    pass


class NoMatchingLeaf(Exception):
    pass


class SmoothGenExhausted(Exception):
    pass


class NoOrientedNeighbor(Exception):
    pass


class TraceUnfixable(Exception):
    pass


class UnsupportedNorm(Exception):
    pass


class HalvingFailed(Exception):
    pass


# ---------------------------------------------------------------------------
# decision oracle


class DecisionOracle:
    """Memoized predicate "j is orientable by the fixed quadratic order".

    Answers are deterministic and conjugation-stable by construction: the memo
    key identifies j with its Galois conjugate (conjugate curves carry the
    same orientations).  Queries are safe under concurrent use.
    """

    def __init__(self, p, quad, fn, name="oracle"):
        self.p = p
        self.quad = quad
        self.name = name
        self._fn = fn
        self._memo = {}
        self._lock = threading.Lock()
        self.queries = 0

    def _canonical(self, j):
        fld = ec.fp2(self.p)
        if isinstance(j, int):
            j = fld.from_int(j)
        assert j.fld is fld, "j lives in the wrong field"
        a, b = j.co
        jc = fld.element((a, (-b) % self.p))
        return j if j.key() <= jc.key() else jc

    def is_orientable(self, j):
        j = self._canonical(j)
        with self._lock:
            self.queries += 1
            if j.key() in self._memo:
                return self._memo[j.key()]
            ans = bool(self._fn(j))
            self._memo[j.key()] = ans
        log.debug("%s(%r) = %s", self.name, j, ans)
        return ans

    __call__ = is_orientable

    def __repr__(self):
        return "DecisionOracle(%s, p=%d, disc=%d)" % (self.name, self.p, self.quad.disc)


def _superorder_steps(disc, t):
    """(b, a) pairs with omega = a + b*omega' for omega' generating a strictly
    larger order (conductor shrunk by b)."""
    out = []
    for b in range(2, math.isqrt(-disc) + 1):
        if disc % (b * b):
            continue
        up = disc // (b * b)
        if up % 4 not in (0, 1):
            continue
        t2 = up % 2
        if (t - b * t2) % 2:
            continue
        out.append((b, (t - b * t2) // 2))
    return out


def _closing_j_paths(j0, factors, db):
    """All j-invariant paths from j0 back to j0 along the degree list."""
    paths = [(j0,)]
    for i, ell in enumerate(factors):
        nxt = []
        for path in paths:
            children = set(ec.ell_isogenous_j(path[-1], ell, db))
            if i == len(factors) - 1:
                if j0 in children:
                    nxt.append(path + (j0,))
            else:
                for jn in sorted(children, key=lambda t: t.key()):
                    nxt.append(path + (jn,))
        paths = nxt
    return paths


_ISOGENY_MEMO = {}


def _isogenies_cached(E, ell):
    key = (E.field.p, E.A.co, E.B.co, ell)
    if key not in _ISOGENY_MEMO:
        _ISOGENY_MEMO[key] = ec.isogenies_of_degree(E, ell)
    return _ISOGENY_MEMO[key]


def _chains_along(E, factors, jpath):
    """All isogeny chains from E whose codomain j-sequence is jpath[1:]."""
    chains = [([], E)]
    for ell, jn in zip(factors, jpath[1:]):
        nxt = []
        for steps, cur in chains:
            for phi in _isogenies_cached(cur, ell):
                if phi.codomain.j == jn:
                    nxt.append((steps + [phi], phi.codomain))
        chains = nxt
    return [steps for steps, _ in chains]


def brute_force_oracle(p, quad, cap=ORACLE_NORM_CAP):
    """Desk-scale oracle: enumerate closed chains of degree N(omega), adjust
    by isomorphisms to hit the trace, then reject imprimitive candidates."""
    assert p <= ec.CURVE_PRIME_CAP, "exhaustive oracle needs a desk-scale prime"
    d, t = quad.n, quad.t
    factors = [] if d == 1 else nt.factorize(d)
    if len(set(factors)) != len(factors) or any(ell > 13 for ell in factors):
        raise UnsupportedNorm("need squarefree norm with prime factors <= 13, got %d" % d)
    width = math.prod(ell + 1 for ell in factors)
    if width > cap:
        raise ec.CapExceeded("chain enumeration width %d exceeds cap %d" % (width, cap))
    supers = _superorder_steps(quad.disc, t)
    db = ec.default_modpoly_db()

    def check(j):
        E = ec.curve_from_j(ec.fp2(p), j)
        if not ec.is_supersingular(E):
            return False
        for jpath in _closing_j_paths(E.j, factors, db):
            for steps in _chains_along(E, factors, jpath):
                last = steps[-1].codomain if steps else E
                for beta in ec.find_isomorphisms(last, E):
                    full = steps + [beta]
                    if trace_of_chain(full, curve=E).trace != t:
                        continue
                    if any(_kills_shifted(full, E, b, a) for b, a in supers):
                        continue  # extends to a superorder: imprimitive
                    return True
        return False

    return DecisionOracle(p, quad, check, name="brute[%d]" % quad.disc)


def _kills_shifted(steps, E, b, a):
    """Does E[b] lie in ker(phi - a)?  (phi the closed chain on E.)"""
    tb = _torsion_basis_cached(E, b)
    A = tb.emb(E.A)
    for P in (tb.P, tb.Q):
        if _chain_eval(steps, P, tb.emb) != ec.point_mul(A, a, P):
            return False
    return True


def quaternion_oracle(quad, max_order):
    """Decision via the quaternion side; the caller vouches that max_order is
    isomorphic to the endomorphism ring of the curve in question."""
    return es.find_orientation(max_order, quad) is not None


# ---------------------------------------------------------------------------
# oriented isogeny trees


class IsogenyTree:
    """Levelled tree of j-invariants; node = (j, parent index in level above)."""

    def __init__(self, root_j, degrees):
        self.degrees = list(degrees)
        self.levels = [[(root_j, -1)]]

    @property
    def depth(self):
        return len(self.levels) - 1

    def leaves(self):
        return [j for j, _ in self.levels[-1]]

    def leaf_indices(self, j):
        return [i for i, (jj, _) in enumerate(self.levels[-1]) if jj == j]

    def branch(self, leaf_index):
        """j-path from the root down to the given leaf."""
        path = []
        idx = leaf_index
        for lvl in reversed(self.levels):
            j, parent = lvl[idx]
            path.append(j)
            idx = parent
        assert idx == -1
        return path[::-1]

    def __repr__(self):
        widths = [len(lvl) for lvl in self.levels]
        return "IsogenyTree(degrees=%s, widths=%s)" % (self.degrees, widths)


def tree_fill(quad, E, degrees, oracle, db=None, workers=1):
    """Grow the oriented isogeny tree: at each level keep the modular-polynomial
    neighbours that the oracle approves.  workers > 1 queries the oracle for a
    whole level concurrently (it is lock-synchronized); output is identical."""
    db = db or ec.default_modpoly_db()
    for ell in degrees:
        assert nt.kronecker(quad.disc, ell) == 1, "%d does not split in disc %d" % (ell, quad.disc)
    if not oracle(E.j):
        raise OracleRejectsRoot("root j=%r rejected" % (E.j,))
    tree = IsogenyTree(E.j, degrees)
    for ell in degrees:
        candidates = []
        for idx, (j, _) in enumerate(tree.levels[-1]):
            for cj in sorted(set(ec.ell_isogenous_j(j, ell, db)), key=lambda t: t.key()):
                candidates.append((cj, idx))
        if workers > 1 and len(candidates) > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                keep = list(pool.map(lambda cv: oracle(cv[0]), candidates))
        else:
            keep = [oracle(cj) for cj, _ in candidates]
        children = [cv for cv, ok in zip(candidates, keep) if ok]
        per_node = collections.Counter(idx for _, idx in children)
        for idx, many in per_node.items():
            if many > 2:
                log.warning("node %r sprouted %d oriented neighbours (out of regime?)",
                            tree.levels[-1][idx][0], many)
        tree.levels.append(children)
    return tree


# ---------------------------------------------------------------------------
# chains and traces


def _chain_eval(steps, P, emb=None):
    for s in steps:
        P = s(P, emb)
    return P


def _chain_degree(steps):
    return math.prod(s.degree for s in steps)


_TORSION_MEMO = {}


def _torsion_basis_cached(E, m):
    key = (E.field.p, E.A.co, E.B.co, m)
    if key not in _TORSION_MEMO:
        _TORSION_MEMO[key] = ec.torsion_basis(E, m)
    return _TORSION_MEMO[key]


@dataclass
class TraceResult:
    trace: int
    moduli: list


def _full_torsion_degree(E, m):
    """Smallest delta <= 12 with E[m] rational over F_{p^(2 delta)}, or None.

    The curves at hand have scalar pi^2, so E[m] descends exactly when
    m^2 | #E(F_{p^(2 delta)}); track the Frobenius traces by the recurrence."""
    p = E.field.p
    t2 = E.trace2()
    mm = m * m
    prev, cur = 2, t2
    for delta in range(1, 13):
        n_delta = pow(p, 2 * delta) + 1 - cur
        if n_delta % mm == 0:
            return delta
        prev, cur = cur, t2 * cur - p * p * prev
    return None


def _trace_moduli(E, deg):
    """Primes coprime to p*deg with product exceeding 4*sqrt(deg), preferring
    the ones whose torsion lives in small extensions."""
    p = E.field.p
    scored = []
    for q in nt.primes_upto(TRACE_PRIME_WINDOW):
        if p % q == 0 or deg % q == 0:
            continue
        delta = _full_torsion_degree(E, q)
        if delta is not None:
            scored.append((delta, q))
    scored.sort()
    chosen = []
    prod = 1
    for _, q in scored:
        chosen.append(q)
        prod *= q
        if prod * prod > 16 * deg:
            break
    assert prod * prod > 16 * deg, "not enough usable trace moduli below %d" % TRACE_PRIME_WINDOW
    for _, q in sorted(scored, reverse=True):  # drop expensive moduli we can spare
        if q in chosen and (prod // q) ** 2 > 16 * deg:
            chosen.remove(q)
            prod //= q
    return sorted(chosen)


def trace_of_chain(steps, curve=None, seed=0):
    """Trace of a closed chain of isogenies/isomorphisms, via its action on
    small torsion groups and the Chinese remainder theorem."""
    E = curve if curve is not None else steps[0].domain
    if steps:
        assert steps[0].domain == E and steps[-1].codomain == E, "chain is not closed"
        for s, s2 in zip(steps, steps[1:]):
            assert s.codomain == s2.domain, "chain does not compose"
    deg = _chain_degree(steps)
    moduli = _trace_moduli(E, deg)
    residues = []
    for m in moduli:
        tb = _torsion_basis_cached(E, m)
        A = tb.emb(E.A)
        pts = (tb.P, tb.Q)
        V = [_chain_eval(steps, P, tb.emb) for P in pts]
        assert all(v is not None for v in V), "torsion point fell into the kernel"
        W = [_chain_eval(steps, v, tb.emb) for v in V]
        target = [ec.point_add(A, w, ec.point_mul(A, deg % m, P))
                  for w, P in zip(W, pts)]
        tau = None
        T = None
        for k in range(m):
            if T == target[0]:
                tau = k
                break
            T = ec.point_add(A, T, V[0])
        assert tau is not None, "chain is not an endomorphism on the %d-torsion" % m
        assert ec.point_mul(A, tau, V[1]) == target[1], \
            "trace residue mod %d fails on the second basis point" % m
        residues.append(tau)
    t = nt.crt(residues, moduli)
    M = math.prod(moduli)
    if 2 * t > M:
        t -= M
    assert t * t <= 4 * deg, "trace violates the Hasse-style bound"
    return TraceResult(t, moduli)


# ---------------------------------------------------------------------------
# chain witnesses


@dataclass
class ChainWitness:
    """Closed isogeny chain psi plus metadata describing the endomorphism
    phi0 = (epsilon*psi - shift) / (2 if halve else 1) of the stated trace
    and norm."""

    chain: list
    closing: object
    epsilon: int
    shift: int
    halve: bool
    trace: int
    norm: int

    def __post_init__(self):
        assert self.epsilon in (1, -1)
        E = self.curve
        steps = self.full_chain()
        assert steps[-1].codomain == E, "witness chain does not close"
        for s, s2 in zip(steps, steps[1:]):
            assert s.codomain == s2.domain

    @property
    def curve(self):
        return (self.chain[0].domain if self.chain else self.closing.domain)

    def full_chain(self):
        return list(self.chain) + [self.closing]

    def degrees(self):
        return [s.degree for s in self.chain]

    def degree(self):
        return _chain_degree(self.chain)


def verify_witness(w, npoints=WITNESS_POINTS, seed=0):
    """Characteristic-polynomial point test, in the integral form
    psi^2 - eps*(2a + t*h)*psi + (a^2 + a*t*h + n*h^2) = 0 (h the halving
    factor); the constant term must equal the chain degree."""
    E = w.curve
    h = 2 if w.halve else 1
    c1 = w.epsilon * (2 * w.shift + w.trace * h)
    c0 = w.shift * w.shift + w.shift * w.trace * h + w.norm * h * h
    if c0 != w.degree():
        log.warning("witness metadata inconsistent: chain degree %d vs %d", w.degree(), c0)
        return False
    steps = w.full_chain()
    p = E.field.p
    rng = random.Random("witness,%d,%d,%d" % (p, seed, npoints))
    fields = [ec.fp2(p), ec.ext_field(p, 4)]
    for i in range(npoints):
        fld = fields[i % len(fields)]
        emb = ec.embed_into(E.field, fld)
        A = emb(E.A)
        P = ec.random_point(fld, A, emb(E.B), rng)
        V = _chain_eval(steps, P, emb)
        W = _chain_eval(steps, V, emb)
        acc = ec.point_add(A, W, ec.point_mul(A, -c1, V))
        acc = ec.point_add(A, acc, ec.point_mul(A, c0, P))
        if acc is not None:
            return False
    return True


class _ComposedEmbedding:
    """Two embeddings glued end to end (keeps coefficient maps consistent)."""

    def __init__(self, outer, inner):
        self.outer = outer
        self.inner = inner
        self.small = inner.small
        self.big = outer.big

    def __call__(self, x):
        return self.outer(self.inner(x))

    def map_poly(self, poly):
        return [self(c) for c in poly]


def _linear_preimage(cols, rhs, p):
    """Solve sum_j c_j * cols[j] = rhs mod p (int tuples), or None."""
    K, k = len(rhs), len(cols)
    aug = [[cols[j][i] % p for j in range(k)] + [rhs[i] % p] for i in range(K)]
    pivots = []
    r = 0
    for c in range(k):
        pr = next((i for i in range(r, K) if aug[i][c]), None)
        if pr is None:
            continue
        aug[r], aug[pr] = aug[pr], aug[r]
        inv = pow(aug[r][c], -1, p)
        aug[r] = [v * inv % p for v in aug[r]]
        for i in range(K):
            if i != r and aug[i][c]:
                f = aug[i][c]
                aug[i] = [(v - f * w) % p for v, w in zip(aug[i], aug[r])]
        pivots.append(c)
        r += 1
    if any(aug[i][k] for i in range(r, K)):
        return None
    out = [0] * k
    for i, c in enumerate(pivots):
        out[c] = aug[i][k]
    return out


def _descend(lift, x):
    """Pull x back through the embedding lift (it must lie in the image)."""
    cols = [e.co for e in lift.powers]
    sol = _linear_preimage(cols, x.co, lift.small.p)
    assert sol is not None, "value does not descend to the smaller field"
    return lift.small.element(sol)


def _halve_point(A, B, P, fld, emb):
    """Q with [2]Q = P, extending the field by degree 2 when necessary.

    A, B are base-field curve coefficients and emb embeds them into fld,
    where P lives.  Returns (Q, fld', emb', lift) with lift None when no
    extension was needed."""

    def try_in(fldL, embL, PL):
        AL, BL = embL(A), embL(B)
        x1 = PL[0]
        # x([2]Q) = x1, cleared of denominators: a quartic in x(Q)
        quartic = [AL * AL - 4 * BL * x1,
                   -(8 * BL + 4 * AL * x1),
                   -2 * AL,
                   -4 * x1,
                   fldL.one]
        for xq in ec.poly_roots(quartic, fldL):
            yy = (xq * xq + AL) * xq + BL
            for yq in ec.poly_roots([-yy, fldL.zero, fldL.one], fldL):
                Q = (xq, yq)
                if ec.point_mul(AL, 2, Q) == PL:
                    return Q
        return None

    Q = try_in(fld, emb, P)
    if Q is not None:
        return Q, fld, emb, None
    big = ec.ext_field(fld.p, 2 * fld.k)
    lift = ec.embed_into(fld, big)
    emb2 = lift if emb.small is fld else _ComposedEmbedding(lift, emb)
    P2 = (lift(P[0]), lift(P[1]))
    Q = try_in(big, emb2, P2)
    if Q is None:
        raise HalvingFailed("no preimage of %r under doubling" % (P,))
    return Q, big, emb2, lift


def evaluate_witness(w, P, emb=None):
    """phi0(P) for the witnessed endomorphism; P on w's curve, possibly over
    an extension reached by emb.  The value comes back over the same field as
    P (phi0 is rational there), even when halving routes through a quadratic
    extension internally."""
    E = w.curve
    if emb is None:
        emb = ec.embed_into(E.field, E.field)
    if P is None:
        return None
    lift = None
    if w.halve:
        P, _, emb, lift = _halve_point(E.A, E.B, P, emb.big, emb)
    A = emb(E.A)
    Q = _chain_eval(w.full_chain(), P, emb)
    if w.epsilon == -1:
        Q = ec.point_neg(Q)
    R = ec.point_add(A, Q, ec.point_mul(A, -w.shift, P))
    if lift is not None and R is not None:
        R = (_descend(lift, R[0]), _descend(lift, R[1]))
    return R


# ---------------------------------------------------------------------------
# special discriminants: walk the ramified primes


def special_reduce(E, quad, oracle, db=None):
    """Walk one oracle-approved neighbour per ramified prime, close up, and
    fix the trace with an isomorphism."""
    disc = quad.disc
    d = -disc if disc % 4 else (-disc) // 4
    flat = [] if d == 1 else nt.factorize(d)
    if len(set(flat)) != len(flat) or any(ell > 13 for ell in flat):
        raise UnsupportedNorm("need a squarefree product of primes <= 13, got %d" % d)
    factors = sorted(flat)
    p = E.field.p
    if factors and p <= abs(disc) * max(factors):
        log.warning("p=%d is outside the regime p > |disc|*max(ell) = %d; "
                    "walking with backtracking", p, abs(disc) * max(factors))
    if not oracle(E.j):
        return None
    reached = [False]

    def walk(cur, idx, steps):
        if idx == len(factors):
            reached[0] = True
            if cur.j != E.j:
                return None
            for beta in ec.find_isomorphisms(cur, E):
                if trace_of_chain(steps + [beta], curve=E).trace == 0:
                    return steps, beta
            return None
        ell = factors[idx]
        for phi in _isogenies_cached(cur, ell):
            if oracle(phi.codomain.j):
                got = walk(phi.codomain, idx + 1, steps + [phi])
                if got is not None:
                    return got
        return None

    got = walk(E, 0, [])
    if got is None:
        if not reached[0]:
            raise NoOrientedNeighbor("walk starved: some step had no oriented neighbour")
        raise TraceUnfixable("no isomorphism closure reaches trace zero")
    steps, beta = got
    halve = d % 4 == 3
    w = ChainWitness(chain=steps, closing=beta, epsilon=1,
                     shift=-1 if halve else 0, halve=halve,
                     trace=1 if halve else 0,
                     norm=(1 + d) // 4 if halve else d)
    assert verify_witness(w), "walk produced a chain failing its own characteristic polynomial"
    return w


# ---------------------------------------------------------------------------
# general discriminants: meet in the middle


def search_to_decision(E, quad, B, r_m, oracle, db=None, seed=0):
    """Smooth generator, two half-depth trees, leaf match, trace, witness."""
    assert quad.disc not in (-3, -4), "trivial automorphism orders are handled directly"
    db = db or ec.default_modpoly_db()
    p = E.field.p
    if abs(quad.disc) * B >= p:
        log.warning("|disc|*B = %d >= p = %d: outside the stated regime", abs(quad.disc) * B, p)
    if not oracle(E.j):
        return None
    gen = qf.find_smooth_gen(quad, B, r_m, seed=seed)
    if gen is None:
        raise SmoothGenExhausted("no generator with ns-smooth norm at B=%d, r_m=%d" % (B, r_m))
    theta, factors = gen.theta, list(gen.factors)
    log.info("smooth generator a=%d, norm %d = %s", theta.a, theta.norm, factors)
    for attempt in range(2):
        order = factors if attempt == 0 else factors[::-1]
        w = _match_and_close(E, quad, theta, order, oracle, db)
        if w is not None:
            return w
        log.info("no usable leaf match with degree order %s; re-sorting", order)
    raise NoMatchingLeaf("both factor orderings exhausted without a closing match")


def _match_and_close(E, quad, theta, factors, oracle, db):
    r = len(factors)
    s = r // 2
    t1 = tree_fill(quad, E, factors[:s], oracle, db)
    t2 = tree_fill(quad, E, list(reversed(factors[s:])), oracle, db)
    common = set(k.key() for k in t1.leaves()) & set(k.key() for k in t2.leaves())
    a, tq = theta.a, quad.t
    tr_theta = theta.trace
    for jkey in sorted(common):
        jmatch = next(j for j in t1.leaves() if j.key() == jkey)
        for i1 in t1.leaf_indices(jmatch):
            for half1 in _chains_along(E, factors[:s], t1.branch(i1)):
                cur = half1[-1].codomain if half1 else E
                for i2 in t2.leaf_indices(jmatch):
                    jpath2 = t2.branch(i2)
                    # walk the second branch back up: from the match to the root
                    targets2 = [cur.j] + jpath2[-2::-1]
                    for back in _chains_along(cur, factors[s:], targets2):
                        last = back[-1].codomain if back else cur
                        for beta in ec.find_isomorphisms(last, E):
                            steps = half1 + back
                            tr = trace_of_chain(steps + [beta], curve=E).trace
                            if tr_theta != 0:
                                if abs(tr) != abs(tr_theta):
                                    continue
                                eps = tr // tr_theta
                            else:
                                if tr != 0:
                                    continue
                                eps = 1
                            w = ChainWitness(chain=steps, closing=beta, epsilon=eps,
                                             shift=a, halve=False,
                                             trace=tq, norm=quad.n)
                            if verify_witness(w):
                                return w
                            log.info("leaf %r closed with the wrong endomorphism; trying on", jmatch)
    return None


# ---------------------------------------------------------------------------
# scanning for a root


def _some_supersingular_j(p):
    """A supersingular j-invariant over F_{p^2}, deterministically."""
    fld = ec.fp2(p)
    if p % 4 == 3:
        return fld.from_int(1728)
    if p % 3 == 2:
        return fld.zero
    # p = 1 mod 12: scan F_p with a one-variable character sum
    chi = fld.chi_table()
    for j in range(1, p):
        if j == 1728 % p:
            continue
        c = j * pow(1728 - j, -1, p) % p
        a, b = 3 * c % p, 2 * c % p
        if sum(chi[((x * x + a) * x + b) % p] for x in range(p)) == 0:
            E = ec.curve_from_j(fld, j)
            assert ec.is_supersingular(E)
            return E.j
    raise AssertionError("no supersingular j in F_p at p=%d" % p)


def find_orientable_root(oracle, db=None):
    """First oracle-approved j, breadth-first over the 2-isogeny graph from a
    deterministic supersingular start; None when the whole graph refuses."""
    p = oracle.p
    db = db or ec.default_modpoly_db()
    start = _some_supersingular_j(p)
    seen = {start.key()}
    layer = [start]
    while layer:
        for j in layer:
            if oracle(j):
                return ec.curve_from_j(ec.fp2(p), j)
        nxt = []
        for j in layer:
            for cj in ec.ell_isogenous_j(j, 2, db):
                if cj.key() not in seen:
                    seen.add(cj.key())
                    nxt.append(cj)
        layer = sorted(set(nxt), key=lambda t: t.key())
    return None

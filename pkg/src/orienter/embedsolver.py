"""Finding elements of prescribed trace and norm in quaternion orders.

The search walks the order's HNF profile: the trace pins the first
coordinate, a modular square root pins the second modulo p, and each
candidate second coordinate leaves a two-variable norm equation that
Cornacchia solves exactly.  On top of that sit the primitivity check
with its superorder witness, a short-vector shortcut for tiny
discriminants, and the rerandomized driver that hops through alternative
algebra representations and small equivalent ideals so the same search
runs on friendlier bases.
"""

import logging
import math
from dataclasses import dataclass
from fractions import Fraction

from . import numtheory as nt
from . import quatalg as qa
from .quadforms import QuadOrder, canonical_generator

log = logging.getLogger(__name__)

INFINITE = math.inf  # b-slot marker for scalar alpha in primitive_check


class NonResidue(Exception):
    """The square-root obstruction: no element with this (t, d) exists in
    the whole algebra (the residue class is an invariant of p, q, 4d-t^2)."""


class DiscriminantTooLarge(Exception):
    pass


class NotInOrder(Exception):
    pass


@dataclass
class SolverConfig:
    mode: str = "first"             # first | all | first-primitive
    k_order: str = "descending"     # descending | ascending
    v_policy: str = "factor"        # factor | prime | smooth
    factor_budget: int = 200_000
    max_solutions: int = 0          # 0 = unlimited (mode=all)
    smooth_bound: int = 4096        # v_policy=smooth: factor bound
    smooth_distinct: int = 4        # v_policy=smooth: distinct-prime cap

    def __post_init__(self):
        assert self.mode in ("first", "all", "first-primitive")
        assert self.k_order in ("descending", "ascending")
        assert self.v_policy in ("factor", "prime", "smooth")
        assert self.factor_budget > 0 and self.smooth_bound > 1


@dataclass
class EmbeddingSolution:
    alpha: qa.QuatElement
    trace: int
    norm: int
    primitive: bool
    witness: tuple | None  # (a, b, alpha_prime) when imprimitive

    def __post_init__(self):
        assert self.alpha.trd == self.trace and self.alpha.nrd == self.norm


@dataclass
class SolveReport:
    solutions: list
    complete: bool          # no v skipped: an empty result is a certificate
    cornacchia_calls: int   # distinct v values actually handed to Cornacchia


def _floor_quot_sqrt(F, a, b):
    """floor((sqrt(F) - a)/b) for Fraction F >= 0, rationals a, b > 0."""
    s0 = qa._floor_sqrt_frac(F)
    n = (s0 - a) / b
    n = n.numerator // n.denominator
    # predicate: n <= (sqrt(F)-a)/b  <=>  (n*b + a) <= sqrt(F)
    def ok(m):
        t = m * b + a
        return t <= 0 or t * t <= F
    while ok(n + 1):
        n += 1
    while not ok(n):
        n -= 1
    return n


def _lower_hnf(order):
    """Basis f0..f3 of the order, lower-triangular over (1, i, j, k) with
    f0 = 1; the shape the primitivity walk wants."""
    rev = [row[::-1] for row in order.basis]
    upper = qa.lattice_hnf(rev)
    rows = [row[::-1] for row in upper[::-1]]
    assert rows[0][0] == 1 and all(rows[0][m] == 0 for m in (1, 2, 3)), \
        "order must contain 1 as a primitive scalar"
    return rows


def primitive_check(order, alpha):
    """None if alpha is primitive in the order; else a witness (a, b, alpha')
    with alpha = a + b*alpha', alpha' in the order, b > 1 (b = inf and
    alpha' = 0 for scalars: every superorder absorbs those).

    Walks the lower-triangular basis f0 = 1, f1, f2, f3 and takes the gcd
    of the non-scalar coordinates.
    """
    if not order.contains(alpha):
        raise NotInOrder(alpha)
    return _primitive_from_lower(order, _lower_hnf(order), alpha)


def _v_admissible(v, config):
    """Whether this Cornacchia target passes the configured filter."""
    if config.v_policy == "factor":
        return True, None
    if v == 1:
        return True, [1]
    if nt.is_prime(v):
        return True, [v]
    if config.v_policy == "smooth":
        fac = nt.smooth_fact(v, config.smooth_bound, budget=config.factor_budget)
        if fac is not None and len(set(fac)) <= config.smooth_distinct:
            return True, fac
    return False, None


def solve_report(order, t, d, config=None) -> SolveReport:
    """All/first elements of reduced trace t and norm d in the order.

    Searches integer coordinates over the upper-triangular HNF basis: the
    trace fixes coordinate 0, the norm equation mod p fixes coordinate 1 up
    to sign and multiples of p, and Cornacchia finishes coordinates 2, 3.
    The report records whether any Cornacchia target was skipped by the
    v-filter: a complete empty run proves no element exists.
    """
    config = config or SolverConfig()
    assert d >= 1
    alg = order.algebra
    p, q = alg.p, alg.q
    prof = order.profile()
    e, N = prof.e, prof.N
    assert math.gcd(N, p) == 1, "profile denominators must be prime to p"
    E = [[int(e[m][n] * N) for n in range(4)] for m in range(4)]  # N*e, integral

    report = SolveReport([], True, 0)
    # coordinate 0 carries the whole trace: t = 2*alpha0*e00
    alpha0 = Fraction(t, 1) / (2 * e[0][0])
    if alpha0.denominator != 1:
        return report
    alpha0 = int(alpha0)
    # M = N^2 (d - (alpha0 e00)^2) = q X^2 + p(...): the budget left for i,j,k
    M = N * N * d - (alpha0 * E[0][0]) ** 2
    if M < 0:
        return report
    qinv = pow(q, -1, p)
    target = M * qinv % p
    roots = nt.sqrt_mod_prime(target, p)
    if roots is None:
        raise NonResidue(f"no element of trace {t}, norm {d}: "
                         f"{(4 * d - t * t)}*{q} is a non-residue mod {p}")
    lower = _lower_hnf(order)  # for primitivity of each hit (computed once)

    e11inv = pow(E[1][1] % p, -1, p)  # X = a01 + alpha1 * E11, inverted mod p
    a01 = alpha0 * E[0][1]  # N * alpha0 * e01, integer
    # alpha1 bounds: |alpha0*e01 + alpha1*e11| <= sqrt((d - (alpha0 e00)^2)/q)
    # i.e. |X| <= sqrt(M/q) with X = a01 + alpha1*E[1][1]
    F = Fraction(M, q)
    a1_hi = _floor_quot_sqrt(F, Fraction(a01), Fraction(E[1][1]))
    a1_lo = -_floor_quot_sqrt(F, Fraction(-a01), Fraction(E[1][1]))
    if a1_lo > a1_hi:
        return report

    memo = {}
    seen = {}
    done = False
    s_plus = min(roots)
    branch_residues = []
    for s in (s_plus, (-s_plus) % p):  # the r+ branch first, then r-
        r = (s - a01) * e11inv % p
        if r in branch_residues:
            continue  # s = 0: both square-root branches coincide
        branch_residues.append(r)
        k_lo = -((r - a1_lo) // p)
        k_hi = (a1_hi - r) // p
        ks = range(k_hi, k_lo - 1, -1) if config.k_order == "descending" else range(k_lo, k_hi + 1)
        for k in ks:
            alpha1 = r + k * p
            X = a01 + alpha1 * E[1][1]
            v, rem = divmod(M - q * X * X, p)
            assert rem == 0 and v >= 0
            # remaining equation: Y^2 + q Z^2 = v over Y = N*y, Z = N*z
            if v == 0:
                pairs = {(0, 0)}
            elif v in memo:
                pairs = memo[v]
            else:
                admissible, fac = _v_admissible(v, config)
                if not admissible:
                    report.complete = False
                    continue
                if fac == [1]:
                    fac = None
                pairs = nt.cornacchia_all(q, v, factors_of_v=fac,
                                          budget=config.factor_budget)
                memo[v] = pairs
                report.cornacchia_calls += 1
            for b1, b2 in sorted(pairs, key=lambda w: (abs(w[0]), abs(w[1]), w[0] < 0, w[1] < 0)):
                num2 = b1 - alpha0 * E[0][2] - alpha1 * E[1][2]
                alpha2, rem2 = divmod(num2, E[2][2])
                if rem2:
                    continue
                num3 = b2 - alpha0 * E[0][3] - alpha1 * E[1][3] - alpha2 * E[2][3]
                alpha3, rem3 = divmod(num3, E[3][3])
                if rem3:
                    continue
                coeffs = (alpha0, alpha1, alpha2, alpha3)
                vec = tuple(sum(Fraction(c) * e[m][n] for m, c in enumerate(coeffs))
                            for n in range(4))
                if vec in seen:
                    continue
                alpha = qa.QuatElement(alg, vec)
                assert alpha.trd == t and alpha.nrd == d
                # characteristic polynomial: alpha^2 - t*alpha + d = 0
                assert (alpha * alpha - alpha.scale(t) + alg.element(d)).is_zero()
                witness = _primitive_from_lower(order, lower, alpha)
                sol = EmbeddingSolution(alpha, t, d, witness is None, witness)
                seen[vec] = sol
                if config.mode == "first-primitive" and not sol.primitive:
                    continue
                if config.mode in ("first", "first-primitive"):
                    done = True
                    break
                if config.max_solutions and len(seen) >= config.max_solutions:
                    done = True
                    break
            if done:
                break
        if done:
            break
    cap = 2 * (qa._floor_sqrt_frac(Fraction(d * N * N, q)) // p + 1)
    assert report.cornacchia_calls <= cap, "Cornacchia call count exceeded its bound"
    if config.mode == "first-primitive":
        report.solutions = [s for s in seen.values() if s.primitive][:1]
    elif config.mode == "first":
        report.solutions = list(seen.values())[:1]
    else:
        report.solutions = list(seen.values())
    return report


def _primitive_from_lower(order, lower_rows, alpha):
    """primitive_check against a precomputed lower-triangular basis."""
    coords = qa.solve_coords(lower_rows, alpha.coords)
    assert all(c.denominator == 1 for c in coords)
    g0, g1, g2, g3 = (int(c) for c in coords)
    if g1 == g2 == g3 == 0:
        return (g0, INFINITE, order.algebra.element(0))
    g = math.gcd(g1, math.gcd(g2, g3))
    if g == 1:
        return None
    prime_part = [sum(Fraction(c) * row[m] for c, row in zip((g1, g2, g3), lower_rows[1:]))
                  for m in range(4)]
    alpha_prime = qa.QuatElement(order.algebra, tuple(x / g for x in prime_part))
    assert order.contains(alpha_prime)
    assert alpha == order.algebra.element(g0) + alpha_prime.scale(g)
    return (g0, g, alpha_prime)


def find_element(order, t, d, config=None):
    """List of EmbeddingSolution per the configured mode (see solve_report)."""
    return solve_report(order, t, d, config).solutions


def find_orientation(order, quad: QuadOrder, config=None):
    """First primitive embedding of the quadratic order, or None.

    None is definitive: either the residue obstruction fires, or the full
    (t, d) enumeration ran and every embedding extended to a superorder.
    """
    config = config or SolverConfig()
    theta = canonical_generator(quad)
    cfg = SolverConfig(mode="first-primitive", k_order=config.k_order,
                       v_policy=config.v_policy, factor_budget=config.factor_budget,
                       smooth_bound=config.smooth_bound,
                       smooth_distinct=config.smooth_distinct)
    try:
        report = solve_report(order, theta.trace, theta.norm, cfg)
    except NonResidue:
        return None
    if report.solutions:
        return report.solutions[0]
    return None


def find_embedding_smallvec(order, quad: QuadOrder):
    """Short-vector search for |disc| < 2*sqrt(p) - 1 (no Cornacchia at all).

    Enumerates the discriminant form Tr^2 - 4*nrd on order/Z — equivalently
    -4*nrd on the traceless projections of f1, f2, f3 — up to |disc|, then
    shifts the scalar part to hit the canonical generator's trace.
    """
    p = order.algebra.p
    disc = quad.disc
    if (abs(disc) + 1) ** 2 >= 4 * p:
        raise DiscriminantTooLarge(f"|{disc}| >= 2*sqrt({p}) - 1")
    theta = canonical_generator(quad)
    rows = _lower_hnf(order)
    fs = [qa.QuatElement(order.algebra, tuple(map(Fraction, row))) for row in rows[1:]]
    pures = [f - order.algebra.one().scale(f.trd / 2) for f in fs]
    # Gram of the form 4*nrd on the traceless parts: value -disc(alpha)
    gram = [[2 * (a * b.conjugate()).trd for b in pures] for a in pures]
    basis3 = [f.coords for f in pures]
    red, red_gram = qa._lll_reduce(basis3, gram)
    mu, bs = qa._gso_from_gram(red_gram, 3)
    found, complete = qa._enumerate_form(mu, bs, abs(disc), limit=500_000)
    assert complete
    for value, coeffs in sorted(found, key=lambda w: (w[0], w[1])):
        if value != abs(disc):
            continue
        pure = qa.QuatElement(order.algebra, tuple(
            sum(Fraction(c) * row[m] for c, row in zip(coeffs, red)) for m in range(4)))
        # lift back: some order element with this traceless part exists by
        # construction (integer combination of f1..f3 plus a scalar)
        for candidate in (pure, -pure):
            half_tr = Fraction(theta.trace, 2)
            alpha = candidate + order.algebra.one().scale(half_tr - candidate.coords[0])
            # candidate was already traceless; shift puts the trace right
            if alpha.trd != theta.trace or not order.contains(alpha):
                continue
            if alpha.nrd != theta.norm:
                continue
            witness = primitive_check(order, alpha)
            return EmbeddingSolution(alpha, theta.trace, theta.norm,
                                     witness is None, witness)
    return None


@dataclass
class RerandomizedResult:
    solution: EmbeddingSolution | None
    certified: bool     # an empty outcome is backed by a complete run
    runs: int           # find_element invocations performed

    def __bool__(self):
        return self.solution is not None


def rerandomized_find(order, quad: QuadOrder, r: int = 3, ideals_per_rep: int = 3,
                      seed: int = 0, config=None) -> RerandomizedResult:
    """Embedding search rerandomized over representations and small ideals.

    For the identity representation and then r alternative ones: carry the
    order across, connect it to that representation's standard order, and
    for each small equivalent ideal J = I*gamma run the prime-v-only search
    on the conjugated right order; any hit is conjugated back by gamma and
    mapped home.  A complete run with no solutions certifies non-existence
    (all Cornacchia targets were prime and still nothing), so the search
    stops early; otherwise it keeps going and reports an uncertified miss.
    """
    del seed  # the walk below is deterministic; kept for interface stability
    config = config or SolverConfig(v_policy="prime")
    theta = canonical_generator(quad)
    t, d = theta.trace, theta.norm
    src = order.algebra
    reps = [src] + [a for a in qa.alternative_representations(src.p, r) if a != src]
    runs = 0
    for rep in reps:
        phi = qa.representation_isomorphism(src, rep)
        order_i = phi.map_order(order)
        std_i = qa.standard_max_order(rep)
        ideal = qa.connecting_ideal(std_i, order_i)
        try:
            equivalents = qa.small_equivalent_ideals(ideal, count=ideals_per_rep)
        except qa.NoneFound:
            continue
        for j_ideal, gamma in equivalents:
            delta = gamma.conjugate().scale(Fraction(1, ideal.norm()))
            target_order = order_i.conjugate_by(delta)
            runs += 1
            try:
                report = solve_report(target_order, t, d, config)
            except NonResidue:
                # a global obstruction: no embedding into any order of B
                return RerandomizedResult(None, True, runs)
            if report.solutions:
                beta = report.solutions[0].alpha
                back = delta * beta * delta.inverse()
                home = phi.inv(back)
                assert order.contains(home)
                witness = primitive_check(order, home)
                sol = EmbeddingSolution(home, t, d, witness is None, witness)
                log.debug("hit after %d runs (q=%d)", runs, rep.q)
                return RerandomizedResult(sol, True, runs)
            if report.complete:
                # full enumeration of an isomorphic image came up empty
                return RerandomizedResult(None, True, runs)
    return RerandomizedResult(None, False, runs)

"""Command-line front end: embedding search, orientation walks, oracle
queries, smoothness helpers, a selftest and a bench.

JSON in, JSON out, every integer as a decimal string so 256-bit values
survive any parser.  Exit 0 = result, 1 = certified/uncertified not-found,
2 = usage error.
"""

import argparse
import json
import math
import random
import sys
import time
from fractions import Fraction

from . import __version__
from . import numtheory as nt
from . import quadforms as qf
from . import quatalg as qa
from . import embedsolver as es
from . import ecfield as ec
from . import orientsearch as osr


# ---------------------------------------------------------------------------
# encoding: integers (and Fractions) as decimal strings, recursively


def _enc(x):
    if isinstance(x, bool):
        return x
    if isinstance(x, int):
        return str(x)
    if isinstance(x, Fraction):
        return [str(x.numerator), str(x.denominator)]
    if isinstance(x, (list, tuple)):
        return [_enc(v) for v in x]
    if isinstance(x, dict):
        return {k: _enc(v) for k, v in x.items()}
    return x


def _provenance(args):
    skip = {"func", "modpoly_db"}
    params = {k: str(v) for k, v in sorted(vars(args).items())
              if k not in skip and v is not None}
    return {"version": __version__, "seed": str(getattr(args, "seed", 0)),
            "parameters": params}


def _emit(doc, args, code=0):
    doc = dict(doc)
    doc["provenance"] = _provenance(args)
    print(json.dumps(_enc(doc), indent=2))
    return code


def _notfound(args, certificate, **extra):
    doc = {"found": False, "certificate": certificate}
    doc.update(extra)
    return _emit(doc, args, code=1)


def _usage(msg):
    """Flag-level mistake: complain on stderr and exit 2, like argparse does."""
    print("orienter: error: %s" % msg, file=sys.stderr)
    raise SystemExit(2)


# ---------------------------------------------------------------------------
# readers / writers


def _json_or_file(s):
    if s.lstrip().startswith("{"):
        return json.loads(s)
    with open(s) as fh:
        return json.load(fh)


def _fp2_from_doc(fld, v):
    """[a, b] (decimal strings or ints) or a bare integer-ish -> field element."""
    if isinstance(v, (list, tuple)):
        assert len(v) == 2, "field elements are [a, b] pairs"
        return fld.element((int(v[0]) % fld.p, int(v[1]) % fld.p))
    return fld.from_int(int(v))


def _curve_from_arg(p, s):
    doc = _json_or_file(s)
    if "p" in doc:
        assert int(doc["p"]) == p, "--curve carries p=%s but --p is %d" % (doc["p"], p)
    fld = ec.fp2(p)
    return ec.Curve(fld, _fp2_from_doc(fld, doc["A"]), _fp2_from_doc(fld, doc["B"]))


def _j_from_arg(p, s):
    fld = ec.fp2(p)
    if "," in s:
        a, b = s.split(",")
        return fld.element((int(a) % p, int(b) % p))
    return fld.from_int(int(s))


def order_to_doc(order):
    return {"p": order.algebra.p, "q": order.algebra.q,
            "basis": [list(row) for row in order.basis]}


def order_from_doc(doc):
    alg = qa.QuatAlgebra(int(doc["p"]), int(doc["q"]))
    rows = []
    for row in doc["basis"]:
        assert len(row) == 4
        rows.append(tuple(Fraction(int(c[0]), int(c[1])) if isinstance(c, (list, tuple))
                          else Fraction(int(c)) for c in row))
    order = qa.QuatOrder(alg, rows)
    assert order.is_maximal(), "supplied order is not maximal"
    return order


def witness_to_doc(w):
    steps = []
    for s in w.chain:
        steps.append({"ell": s.degree,
                      "j_from": list(s.domain.j.co),
                      "j_to": list(s.codomain.j.co),
                      "kernel_poly": [list(c.co) for c in s.kernel_poly]})
    return {"steps": steps,
            "closing_u": list(w.closing.u.co),
            "epsilon": w.epsilon, "shift": w.shift, "halve": w.halve,
            "trace": w.trace, "norm": w.norm}


def _algebra_for(p):
    if p % 4 == 3:
        return qa.QuatAlgebra(p, 1)
    if p % 8 == 5:
        return qa.QuatAlgebra(p, 2)
    return qa.alternative_representations(p, 1)[0]


# ---------------------------------------------------------------------------
# commands


def cmd_embed(args):
    p = int(args.p)
    if not nt.is_prime(p):
        _usage("--p must be prime, got %d" % p)
    quad = qf.QuadOrder(int(args.disc))
    if args.order is not None:
        order = order_from_doc(_json_or_file(args.order))
        assert order.algebra.p == p, "order file is for p=%d" % order.algebra.p
    else:
        alg = _algebra_for(p)
        if args.order_seed is None:
            order = qa.standard_max_order(alg)
        else:
            order = qa.random_maximal_order(alg, seed=int(args.order_seed),
                                            steps=int(args.steps))
    if args.rerandomize > 0:
        res = es.rerandomized_find(order, quad, r=int(args.rerandomize),
                                   seed=int(args.seed))
        sol, certified, runs = res.solution, res.certified, res.runs
    else:
        sol = es.find_orientation(order, quad)
        certified, runs = sol is None, 1
    if sol is None:
        cert = "complete-search-empty" if certified else "budget-exhausted"
        return _notfound(args, cert, runs=runs, order=order_to_doc(order))
    # re-check the defining equations before reporting
    assert sol.alpha.trd == quad.t and sol.alpha.nrd == quad.n
    assert order.contains(sol.alpha)
    return _emit({"found": True, "alpha": list(sol.alpha.coords),
                  "trace": sol.trace, "norm": sol.norm,
                  "primitive": sol.primitive, "verified": True,
                  "certified": certified, "runs": runs,
                  "order": order_to_doc(order)}, args)


def _build_oracle(p, quad, spec):
    if spec == "brute":
        return osr.brute_force_oracle(p, quad), None
    if spec.startswith("quat:"):
        order = order_from_doc(_json_or_file(spec[len("quat:"):]))
        assert order.algebra.p == p, "order file is for p=%d" % order.algebra.p
        return None, order
    _usage("--oracle must be 'brute' or 'quat:<order.json>', got %r" % spec)


def cmd_orient(args):
    p = int(args.p)
    quad = qf.QuadOrder(int(args.disc))
    oracle, order = _build_oracle(p, quad, args.oracle)
    if order is not None:
        # quaternion mode: the orientation lives on the quaternion side
        sol = es.find_orientation(order, quad)
        if sol is None:
            return _notfound(args, "no-embedding-into-order")
        return _emit({"found": True, "alpha": list(sol.alpha.coords),
                      "trace": sol.trace, "norm": sol.norm,
                      "primitive": sol.primitive}, args)
    E = _curve_from_arg(p, args.curve)
    try:
        if args.special:
            w = osr.special_reduce(E, quad, oracle)
        else:
            if args.bound is not None:
                B, r_m = int(args.bound), int(args.r_m or 3)
            else:
                B, r_m = qf.default_parameters(quad.disc)
            w = osr.search_to_decision(E, quad, B, r_m, oracle, seed=int(args.seed))
    except (osr.NoMatchingLeaf, osr.SmoothGenExhausted,
            osr.NoOrientedNeighbor, osr.TraceUnfixable) as e:
        return _notfound(args, "%s: %s" % (type(e).__name__, e))
    if w is None:
        return _notfound(args, "oracle-rejects-root")
    assert osr.verify_witness(w)
    doc = {"found": True, "curve": ec.curve_json(E)}
    doc.update(witness_to_doc(w))
    return _emit(doc, args)


def cmd_oracle(args):
    p = int(args.p)
    quad = qf.QuadOrder(int(args.disc))
    oracle, order = _build_oracle(p, quad, args.oracle)
    if order is not None:
        return _emit({"orientable": osr.quaternion_oracle(quad, order)}, args)
    if args.j is not None:
        j = _j_from_arg(p, args.j)
    elif args.curve is not None:
        j = _curve_from_arg(p, args.curve).j
    else:
        _usage("oracle needs --j or --curve with --oracle brute")
    return _emit({"orientable": oracle(j), "j": list(j.co)}, args)


def cmd_factor(args):
    n, bound = int(args.n), int(args.bound)
    factors = nt.smooth_fact(n, bound)
    if factors is None:
        return _notfound(args, "not %d-smooth" % bound, n=n)
    return _emit({"found": True, "n": n, "factors": list(factors)}, args)


def cmd_tree(args):
    p = int(args.p)
    quad = qf.QuadOrder(int(args.disc))
    oracle, order = _build_oracle(p, quad, args.oracle)
    if oracle is None:
        _usage("tree needs --oracle brute (per-j decisions)")
    E = _curve_from_arg(p, args.curve)
    degrees = [int(x) for x in args.degrees.split(",") if x]
    try:
        tree = osr.tree_fill(quad, E, degrees, oracle, workers=int(args.threads))
    except osr.OracleRejectsRoot:
        return _notfound(args, "oracle-rejects-root")
    levels = [[{"j": list(j.co), "parent": parent} for j, parent in lvl]
              for lvl in tree.levels]
    return _emit({"found": True, "degrees": tree.degrees, "levels": levels,
                  "widths": [len(lvl) for lvl in tree.levels]}, args)


# -- selftest ---------------------------------------------------------------


def _check_two_isogeny_triple():
    js = ec.ell_isogenous_j(ec.fp2(41).zero, 2)
    assert [j.key() for j in js] == [(0, 3)] * 3, js


def _check_cornacchia_small():
    for q in (1, 2, 3, 7):
        for v in range(1, 400):
            got = {(abs(x), abs(y)) for x, y in nt.cornacchia_all(q, v)}
            want = set()
            y = 0
            while q * y * y <= v:
                x2 = v - q * y * y
                x = math.isqrt(x2)
                if x * x == x2:
                    want.add((x, y))
                y += 1
            assert got == want, (q, v, got, want)


def _check_order_profiles():
    for seed in range(5):
        order = qa.random_maximal_order(qa.QuatAlgebra(419, 1), seed=seed)
        prof = order.profile()
        assert order.is_maximal()
        assert prof[0, 0] == Fraction(1, 2), prof


def _check_small_ideals():
    bound = qa.lemma_norm_bound(419)
    for seed in range(5):
        order = qa.random_maximal_order(qa.QuatAlgebra(419, 1), seed=seed)
        ideal = qa.connecting_ideal(qa.standard_max_order(order.algebra), order)
        found = qa.small_equivalent_ideals(ideal, count=1)
        assert found and found[0][0].norm() <= bound


def _check_cross_oracle():
    O0 = qa.standard_max_order(qa.QuatAlgebra(83, 1))
    j1728 = ec.fp2(83).from_int(1728)
    for disc in (-4, -7, -84, -88):
        quad = qf.QuadOrder(disc)
        assert osr.brute_force_oracle(83, quad)(j1728) == \
            osr.quaternion_oracle(quad, O0), disc


def _check_search_to_decision():
    quad = qf.QuadOrder(-23)
    orc = osr.brute_force_oracle(79, quad)
    E = osr.find_orientable_root(orc)
    w = osr.search_to_decision(E, quad, 3, 3, orc)
    assert w is not None and osr.verify_witness(w)


def _check_modpoly_db():
    db = ec.default_modpoly_db()
    assert db.levels() == [2, 3, 5, 7, 11, 13]


SELFTEST = [
    ("modpoly-db-validates", _check_modpoly_db),
    ("two-isogeny-triple-p41", _check_two_isogeny_triple),
    ("cornacchia-vs-brute", _check_cornacchia_small),
    ("maximal-order-profiles-p419", _check_order_profiles),
    ("small-equivalent-ideals-p419", _check_small_ideals),
    ("cross-oracle-p83", _check_cross_oracle),
    ("search-to-decision-p79", _check_search_to_decision),
]


def cmd_selftest(args):
    results = []
    failed = 0
    for name, fn in SELFTEST:
        t0 = time.time()
        try:
            fn()
            ok, msg = True, ""
        except Exception as e:  # a selftest must report, not crash
            ok, msg = False, "%s: %s" % (type(e).__name__, e)
            failed += 1
        results.append({"name": name, "ok": ok, "ms": int(1000 * (time.time() - t0)),
                        **({"error": msg} if msg else {})})
        print("  %-32s %s" % (name, "ok" if ok else "FAIL " + msg), file=sys.stderr)
    doc = {"passed": len(SELFTEST) - failed, "failed": failed, "checks": results}
    return _emit(doc, args, code=0 if failed == 0 else 1)


def _bench_prime(bits, seed):
    rng = random.Random("bench,%d,%d" % (bits, seed))
    n = rng.getrandbits(bits) | (1 << (bits - 1))
    p = n - n % 4 + 3
    while not nt.is_prime(p):
        p += 4
    return p


def cmd_bench(args):
    quad = qf.QuadOrder(int(args.disc))
    print("p_bits,disc,rerandomizations,wall_ms,found")
    for bits_s in args.bits.split(","):
        bits = int(bits_s)
        p = _bench_prime(bits, int(args.seed))
        order = qa.standard_max_order(_algebra_for(p))
        t0 = time.time()
        res = es.rerandomized_find(order, quad, r=int(args.rerandomize),
                                   seed=int(args.seed))
        ms = int(1000 * (time.time() - t0))
        print("%d,%d,%d,%d,%s" % (bits, quad.disc, int(args.rerandomize), ms,
                                  "true" if res.solution is not None else "false"))
    return 0


# ---------------------------------------------------------------------------
# argument plumbing


def build_parser():
    top = argparse.ArgumentParser(
        prog="orienter",
        description="orientations of supersingular curves / quaternion order embeddings")
    top.add_argument("--version", action="version", version=__version__)
    sub = top.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="RNG seed (echoed in output)")
    common.add_argument("--modpoly-db", default=None,
                        help="modular polynomial table file (bundled default)")
    common.add_argument("--threads", type=int, default=1, help="worker budget")

    p_embed = sub.add_parser("embed", parents=[common],
                             help="embed a quadratic order into a maximal quaternion order")
    p_embed.add_argument("--p", required=True)
    p_embed.add_argument("--disc", required=True, type=int)
    p_embed.add_argument("--order", default=None,
                         help="order JSON (inline or file); default: standard/derived")
    p_embed.add_argument("--order-seed", default=None,
                         help="derive the target order by a seeded ideal walk")
    p_embed.add_argument("--steps", default=1, help="walk length for --order-seed")
    p_embed.add_argument("--rerandomize", type=int, default=0,
                         help="rerandomized search over this many representations")
    p_embed.set_defaults(func=cmd_embed)

    p_orient = sub.add_parser("orient", parents=[common],
                              help="find an orientation of a supersingular curve")
    p_orient.add_argument("--p", required=True)
    p_orient.add_argument("--disc", required=True, type=int)
    p_orient.add_argument("--curve", required=True, help="curve JSON (inline or file)")
    p_orient.add_argument("--oracle", default="brute", help="brute | quat:<order.json>")
    p_orient.add_argument("--special", action="store_true",
                          help="ramified-prime walk for special discriminants")
    p_orient.add_argument("--bound", default=None, help="smoothness bound B")
    p_orient.add_argument("--r-m", default=None, help="factor multiplicity cap")
    p_orient.set_defaults(func=cmd_orient)

    p_oracle = sub.add_parser("oracle", parents=[common],
                              help="answer one orientability decision")
    p_oracle.add_argument("--p", required=True)
    p_oracle.add_argument("--disc", required=True, type=int)
    p_oracle.add_argument("--j", default=None, help="j-invariant: 'a' or 'a,b'")
    p_oracle.add_argument("--curve", default=None, help="curve JSON (inline or file)")
    p_oracle.add_argument("--oracle", default="brute", help="brute | quat:<order.json>")
    p_oracle.set_defaults(func=cmd_oracle)

    p_factor = sub.add_parser("factor", parents=[common], help="smooth factorization")
    p_factor.add_argument("--n", required=True)
    p_factor.add_argument("--bound", required=True)
    p_factor.set_defaults(func=cmd_factor)

    p_tree = sub.add_parser("tree", parents=[common], help="fill an oriented isogeny tree")
    p_tree.add_argument("--p", required=True)
    p_tree.add_argument("--disc", required=True, type=int)
    p_tree.add_argument("--curve", required=True)
    p_tree.add_argument("--degrees", required=True, help="comma-separated, e.g. 2,3")
    p_tree.add_argument("--oracle", default="brute")
    p_tree.set_defaults(func=cmd_tree)

    p_self = sub.add_parser("selftest", parents=[common], help="run the invariant suite")
    p_self.set_defaults(func=cmd_selftest)

    p_bench = sub.add_parser("bench", parents=[common],
                             help="time the quaternion solver, CSV on stdout")
    p_bench.add_argument("--bits", default="64,128,256", help="comma-separated sizes")
    p_bench.add_argument("--disc", default=-47, type=int)
    p_bench.add_argument("--rerandomize", type=int, default=3)
    p_bench.set_defaults(func=cmd_bench)

    return top


def main(argv=None):
    args = build_parser().parse_args(argv)
    if getattr(args, "modpoly_db", None):
        ec.set_default_modpoly_db(ec.ModPolyDB.load(args.modpoly_db))
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())

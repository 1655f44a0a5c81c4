"""Generate the classical modular polynomials Phi_ell(X, Y) for small ell.

Writes a plaintext table (one line per coefficient: "ell i j c" with i >= j;
the symmetric completion is implied) used by the curve-side neighbor queries.

Method: everything is exact integer q-expansion arithmetic.

  j(q) = E4(q)^3 / Delta(q)  with integer coefficients 1/q + 744 + 196884 q + ...

  The ell+1 roots of Phi_ell(X, j(tau)) are j(ell tau) and j((tau + i)/ell)
  for i = 0..ell-1.  Power sums of the fractional family are picked out of
  j(t)^k (t = q^(1/ell)) by keeping every ell-th coefficient:

      sum_i j((tau+i)/ell)^k  =  ell * [every ell-th coefficient of j(t)^k]

  Newton's identities turn power sums into elementary symmetric functions,
  all of which are honest integer q-series.  Multiplying the resulting
  degree-ell factor by (X - j(ell tau)) gives the X-coefficients of Phi_ell
  as Laurent series in q, and greedy reduction against powers of j(q)
  rewrites each of them as an integer polynomial in j.  The positive-order
  tail of every reduction must cancel identically, which is a strong
  end-to-end consistency check; so is the (X,Y)-symmetry of the final table,
  which the construction does not build in.

Run:  python3 tools/gen_modpoly.py [outfile]
"""

import sys
import time

LEVELS = [2, 3, 5, 7, 11, 13]

# classical Phi_2, used as an exact self-check of the whole pipeline
PHI2_KNOWN = {
    (3, 0): 1,
    (2, 2): -1,
    (2, 1): 1488,
    (2, 0): -162000,
    (1, 1): 40773375,
    (1, 0): 8748000000,
    (0, 0): -157464000000000,
}


def j_coeffs(nterms):
    """Coefficients [c_{-1}, c_0, c_1, ...] of j(q) = 1/q + 744 + ..., nterms of them."""
    n = nterms
    # E4 = 1 + 240 sum sigma_3(k) q^k
    e4 = [0] * n
    e4[0] = 1
    for k in range(1, n):
        s = 0
        for d in range(1, k + 1):
            if k % d == 0:
                s += d ** 3
        e4[k] = 240 * s

    def ser_mul(a, b):
        out = [0] * n
        for i, ai in enumerate(a):
            if ai:
                for jx, bj in enumerate(b):
                    if i + jx >= n:
                        break
                    if bj:
                        out[i + jx] += ai * bj
        return out

    e4_3 = ser_mul(ser_mul(e4, e4), e4)

    # eta(q)^24 / q = prod (1 - q^k)^24; eta-product via pentagonal numbers, then ^24
    eta = [0] * n
    eta[0] = 1
    k = 1
    while True:
        g1 = k * (3 * k - 1) // 2
        g2 = k * (3 * k + 1) // 2
        if g1 >= n and g2 >= n:
            break
        sign = -1 if k % 2 else 1
        if g1 < n:
            eta[g1] += sign
        if g2 < n:
            eta[g2] += sign
        k += 1
    e2 = ser_mul(eta, eta)
    e4p = ser_mul(e2, e2)
    e8 = ser_mul(e4p, e4p)
    e16 = ser_mul(e8, e8)
    eta24 = ser_mul(e16, e8)  # 24 = 16 + 8

    # invert the unit series eta24 (constant term 1): integer coefficients
    inv = [0] * n
    inv[0] = 1
    for m in range(1, n):
        acc = 0
        for i in range(1, m + 1):
            if eta24[i]:
                acc += eta24[i] * inv[m - i]
        inv[m] = -acc

    jq = ser_mul(e4_3, inv)  # coefficients of q * j(q)
    assert jq[0] == 1 and jq[1] == 744 and jq[2] == 196884, "j-series sanity failed"
    return jq


class Ser:
    """Sparse integer Laurent series in q, exact for exponents <= hi."""

    __slots__ = ("c", "hi")

    def __init__(self, c, hi):
        self.c = {e: v for e, v in c.items() if v}
        self.hi = hi

    def pole(self):
        return min(self.c) if self.c else 0

    def add(self, other):
        hi = min(self.hi, other.hi)
        c = dict(self.c)
        for e, v in other.c.items():
            c[e] = c.get(e, 0) + v
        return Ser({e: v for e, v in c.items() if e <= hi}, hi)

    def scale(self, k):
        return Ser({e: k * v for e, v in self.c.items()}, self.hi)

    def mul(self, other):
        hi = min(self.hi + other.pole(), other.hi + self.pole())
        c = {}
        for e1, v1 in self.c.items():
            for e2, v2 in other.c.items():
                e = e1 + e2
                if e <= hi:
                    c[e] = c.get(e, 0) + v1 * v2
        return Ser(c, hi)

    def exact_div(self, k):
        c = {}
        for e, v in self.c.items():
            q, r = divmod(v, k)
            assert r == 0, "Newton identity division not exact"
            c[e] = q
        return Ser(c, self.hi)


def phi_table(ell, jq):
    """Coefficient table {(i, j): c} of Phi_ell, X-degree i and j-degree j."""
    hi0 = 2 * ell + 12

    # powers of t*j(t); Jk[i] = coefficient of t^(i-k) in j(t)^k
    tlen = ell * (hi0 + 1) + ell + 2
    assert len(jq) >= tlen, "j-series too short"

    def tmul(a, b):
        out = [0] * tlen
        for i, ai in enumerate(a):
            if ai:
                for jx, bj in enumerate(b):
                    if i + jx >= tlen:
                        break
                    if bj:
                        out[i + jx] += ai * bj
        return out

    base = jq[:tlen]
    powers = [None, base]
    for k in range(2, ell + 2):
        powers.append(tmul(powers[-1], base))

    # fractional-family power sums: s_k = ell * every-ell-th coefficient of j(t)^k
    svec = [None]
    for k in range(1, ell + 1):
        c = {}
        m = -(k // ell) - 1
        while True:
            idx = ell * m + k
            if idx >= tlen:
                break
            if 0 <= idx and powers[k][idx]:
                c[m] = ell * powers[k][idx]
            m += 1
        svec.append(Ser(c, (tlen - 1 - k) // ell - 1))

    # Newton: k e_k = sum_{i=1..k} (-1)^(i-1) e_{k-i} s_i
    evec = [Ser({0: 1}, hi0 + 2 * ell)]
    for k in range(1, ell + 1):
        acc = Ser({}, hi0 + 2 * ell)
        for i in range(1, k + 1):
            term = evec[k - i].mul(svec[i])
            acc = acc.add(term if i % 2 == 1 else term.scale(-1))
        evec.append(acc.exact_div(k))

    # G(X) = prod over fractional roots; then Phi = (X - j(ell tau)) * G
    g = [evec[ell - m].scale((-1) ** (ell - m)) for m in range(ell + 1)]
    jl = Ser({ell * (i - 1): jq[i] for i in range(len(jq)) if ell * (i - 1) <= hi0 + ell}, hi0 + ell)
    zero = Ser({}, hi0)
    phi = []
    for m in range(ell + 2):
        lo_part = g[m - 1] if 1 <= m <= ell + 1 else zero
        hi_part = jl.mul(g[m]).scale(-1) if m <= ell else zero
        phi.append(lo_part.add(hi_part))

    # powers of j(q) for the reduction step
    jwin = Ser({i - 1: jq[i] for i in range(len(jq)) if i - 1 <= hi0 + 2}, hi0 + 2)
    jpow = [Ser({0: 1}, hi0 + 2)]
    for _ in range(ell + 1):
        jpow.append(jpow[-1].mul(jwin))

    table = {}
    for m in range(ell + 2):
        ser = phi[m]
        assert ser.hi >= 3, "insufficient series precision"
        while ser.c and min(ser.c) < 0:
            e = -min(ser.c)
            c = ser.c[-e]
            assert e <= ell + 1
            table[(m, e)] = c
            ser = ser.add(jpow[e].scale(-c))
        c0 = ser.c.get(0, 0)
        if c0:
            table[(m, 0)] = c0
            ser = ser.add(jpow[0].scale(-c0))
        assert not ser.c, "reduction tail did not vanish: Phi_%d coefficient %d" % (ell, m)

    # consistency: monic, degree bounds, symmetry, Kronecker congruence
    assert table[(ell + 1, 0)] == 1
    assert all(i <= ell + 1 and jx <= ell + 1 for (i, jx) in table)
    assert all(table.get((i, jx), 0) == table.get((jx, i), 0)
               for i in range(ell + 2) for jx in range(ell + 2)), "table not symmetric"
    kron = {}
    for (i, jx), c in table.items():
        if c % ell:
            kron[(i, jx)] = c % ell
    expect = {(ell + 1, 0): 1 % ell, (0, ell + 1): 1 % ell,
              (ell, ell): (-1) % ell, (1, 1): (-1) % ell}
    expect = {k: v for k, v in expect.items() if v}
    assert kron == expect, "Kronecker congruence failed for ell=%d" % ell
    return table


def main():
    out_path = sys.argv[1] if len(sys.argv) > 1 else "src/orienter/data/modpoly.txt"
    need = max(LEVELS)
    nterms = need * (2 * need + 13) + need + 3
    t0 = time.time()
    jq = j_coeffs(nterms)
    print("j-series: %d terms in %.1fs" % (nterms, time.time() - t0))

    lines = ["# classical modular polynomials Phi_ell(X, Y)",
             "# format: ell i j c  (coefficient c of X^i Y^j, i >= j; symmetric completion implied)"]
    for ell in LEVELS:
        t0 = time.time()
        table = phi_table(ell, jq)
        if ell == 2:
            sym = {(max(i, jx), min(i, jx)): c for (i, jx), c in table.items()}
            assert sym == PHI2_KNOWN, "Phi_2 does not match the classical table"
        nnz = 0
        for (i, jx), c in sorted(table.items()):
            if i >= jx and c:
                lines.append("%d %d %d %d" % (ell, i, jx, c))
                nnz += 1
        print("Phi_%d: %d upper coefficients in %.1fs" % (ell, nnz, time.time() - t0))

    with open(out_path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
    print("wrote", out_path)


if __name__ == "__main__":
    main()

"""Search for a k=1 triorthogonal matrix [all-ones; G0] with no short logical operators.

The columns of G0 are a point set S in F_2^m (no zero point).  With the
all-ones row on top:

* triorthogonality  <=>  every monomial of degree 1..3 has even sum over S;
* no odd Z-logical of weight <= 3  <=>  S is a cap (no a + b = c in S);
* X-logicals have weight #{s in S : <y, s> = 0} for y != 0, bounded below.

The point-set constraints are handed to CryptoMiniSat (native XOR clauses).

    python scripts/find_triorthogonal.py --n 49 --m 8 --dist 5 --poly 0x11b --out n49.code
"""

import argparse
import itertools

import pycryptosat
from pysat.card import CardEnc, EncType
from pysat.formula import IDPool

from mpqc.codes import build_css, format_code, min_distance
from mpqc.gf2 import BitMatrix


def gf_square(x: int, m: int, poly: int) -> int:
    """Square of ``x`` in GF(2^m) modulo ``poly`` (a linear map over F_2)."""
    r, a, b = 0, x, x
    while b:
        if b & 1:
            r ^= a
        b >>= 1
        a <<= 1
        if (a >> m) & 1:
            a ^= poly
    return r


def search(n: int, m: int, dist: int, poly: int | None = None):
    points = list(range(1, 1 << m))
    pool = IDPool()
    var = {p: pool.id(("z", p)) for p in points}
    s = pycryptosat.Solver(threads=1)
    clauses = []

    def add_card(lits, bound, kind):
        enc = {"atleast": CardEnc.atleast, "equals": CardEnc.equals}[kind]
        cnf = enc(lits=lits, bound=bound, vpool=pool, encoding=EncType.seqcounter)
        clauses.extend(cnf.clauses)

    add_card([var[p] for p in points], n, "equals")
    for size in (1, 2, 3):
        for B in itertools.combinations(range(m), size):
            mask = sum(1 << b for b in B)
            s.add_xor_clause([var[p] for p in points if p & mask == mask], False)
    if dist >= 5:
        for a, b in itertools.combinations(points, 2):
            c = a ^ b
            if c > b:
                clauses.append([-var[a], -var[b], -var[c]])
    for y in points:
        lits = [var[p] for p in points if not (y & p).bit_count() & 1]
        add_card(lits, dist, "atleast")
    if poly is None:
        for i in range(m):  # fix a basis inside S
            clauses.append([var[1 << i]])
    else:
        # Frobenius symmetry: S is a union of orbits of x -> x^2
        for p in points:
            q = gf_square(p, m, poly)
            clauses += [[-var[p], var[q]], [var[p], -var[q]]]
    for cl in clauses:
        s.add_clause(cl)
    sat, model = s.solve()
    if not sat:
        return None
    S = [p for p in points if model[var[p]]]
    rows = [(1 << n) - 1] + [sum(((x >> i) & 1) << j for j, x in enumerate(S)) for i in range(m)]
    return BitMatrix(tuple(rows), n)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, required=True)
    ap.add_argument("--m", type=int, required=True)
    ap.add_argument("--dist", type=int, default=3)
    ap.add_argument("--poly", type=lambda v: int(v, 0),
                    help="irreducible polynomial; restricts S to Frobenius orbits")
    ap.add_argument("--out")
    args = ap.parse_args()
    G = search(args.n, args.m, args.dist, args.poly)
    if G is None:
        print("unsatisfiable")
        return 1
    code = build_css(G)
    d = min_distance(code, max(args.dist + 1, 6))
    print(code.params(), "d =", d, "dx/dz =", d.d_x, d.d_z)
    text = format_code(G, [f"[[{args.n},1,{d}]] triorthogonal matrix, found by scripts/find_triorthogonal.py"])
    if args.out:
        open(args.out, "w").write(text)
    else:
        print(text)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())

"""Write the small catalog entries that have closed-form constructions.

rm15: punctured first-order Reed-Muller code.
n23:  columns are the nonzero points of supp(f) in F_2^6 for the cubic-free
      f = (x0+1)(x1+1) + x2 x3.  supp(f) together with 0 is the support of a
      degree <= 2 function, so every monomial of degree <= 3 sums to zero over it.
"""

import argparse
from pathlib import Path

from mpqc.codes import build_css, construct_rm15, min_distance, save_code
from mpqc.gf2 import BitMatrix


def n23() -> BitMatrix:
    m = 6
    pts = [p for p in range(1, 1 << m)
           if (((p & 1) ^ 1) & (((p >> 1) & 1) ^ 1)) ^ ((p >> 2) & (p >> 3) & 1)]
    n = len(pts)
    rows = [(1 << n) - 1] + [sum(((p >> i) & 1) << j for j, p in enumerate(pts)) for i in range(m)]
    return BitMatrix(tuple(rows), n)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default=str(Path(__file__).resolve().parents[1] / "src/mpqc/catalog"))
    out = Path(ap.parse_args().out)
    out.mkdir(parents=True, exist_ok=True)
    for name, M, note in (("rm15", construct_rm15().G, "punctured first-order Reed-Muller code"),
                          ("n23", n23(), "nonzero support of (x0+1)(x1+1) + x2 x3 over F_2^6")):
        code = build_css(M)
        d = min_distance(code, 6)
        save_code(M, out / f"{name}.code", [f"[[{code.n},{code.k},{d}]] {note}"])
        print(name, code.n, code.k, d)


if __name__ == "__main__":
    main()

import numpy as np
import pytest

from mpqc.codes import build_css, construct_rm15, load_css, min_distance


@pytest.fixture(scope="session")
def rm15():
    code = build_css(construct_rm15())
    return code.with_distance(min_distance(code, 6).d)


@pytest.fixture(scope="session")
def n23():
    return load_css("n23")


def np_rank(a) -> int:
    """Rank over GF(2) by numpy row elimination, independent of mpqc.gf2."""
    a = np.array(a, dtype=np.uint8) % 2
    r = 0
    rows, cols = a.shape
    for c in range(cols):
        piv = next((i for i in range(r, rows) if a[i, c]), None)
        if piv is None:
            continue
        a[[r, piv]] = a[[piv, r]]
        for i in range(rows):
            if i != r and a[i, c]:
                a[i] ^= a[r]
        r += 1
        if r == rows:
            break
    return r

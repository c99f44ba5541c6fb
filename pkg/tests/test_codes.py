import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mpqc.codes import (CodeError, CodeFileError, NotTriorthogonalError, build_css, catalog_dir,
                        ccz_correction_search, ccz_phase_oracle, check_transversal_ccz, check_triorthogonal,
                        construct_rm15, diagonal_correction, format_code, load_code, load_css, min_distance,
                        save_code)
from mpqc.gf2 import BitMatrix


def brute_distance(code):
    """Minimum weight over all nontrivial logical operators by enumerating all 2^n vectors."""
    n = code.n
    best = None
    for kind in "XZ":
        checks = code.z_stabilizers if kind == "X" else code.x_stabilizers
        partners = code.logical_z if kind == "X" else code.logical_x
        for v in range(1, 1 << n):
            if any((r & v).bit_count() & 1 for r in checks.rows):
                continue
            if any((p & v).bit_count() & 1 for p in partners.rows):
                w = v.bit_count()
                best = w if best is None else min(best, w)
    return best


def test_single_row_is_triorthogonal():
    assert check_triorthogonal(BitMatrix.from_strings(["1011"])).ok


def test_pair_witness():
    res = check_triorthogonal(BitMatrix.from_strings(["1100", "0110"]))
    assert not res.ok and res.witness == (0, 1)


def test_triple_witness():
    # pairwise overlaps even, triple overlap odd
    M = BitMatrix.from_strings(["1110000", "1101000", "1011000"])
    res = check_triorthogonal(M)
    assert not res.ok and res.witness == (0, 1, 2)


def test_rm15_triorthogonal_and_shape():
    G = construct_rm15().G
    assert G.nrows == 5 and G.ncols == 15
    assert check_triorthogonal(G).ok
    # exhaustive pair and triple scan
    for i, j in itertools.combinations(range(5), 2):
        assert (G.rows[i] & G.rows[j]).bit_count() % 2 == 0
    for i, j, k in itertools.combinations(range(5), 3):
        assert (G.rows[i] & G.rows[j] & G.rows[k]).bit_count() % 2 == 0


def test_build_css_rm15(rm15):
    assert (rm15.n, rm15.k, rm15.d) == (15, 1, 3)
    rm15.check_invariants()
    for sx in rm15.x_stabilizers.rows:
        for sz in rm15.z_stabilizers.rows:
            assert (sx & sz).bit_count() % 2 == 0


def test_build_css_rejects_even_rows():
    with pytest.raises(CodeError, match="k = 0"):
        build_css(BitMatrix.from_strings(["1111", "1100"]))


def test_build_css_rejects_non_triorthogonal():
    with pytest.raises(NotTriorthogonalError) as e:
        build_css(BitMatrix.from_strings(["1100", "0110"]))
    assert e.value.witness == (0, 1)


def test_n23_catalog(n23):
    assert (n23.n, n23.k, n23.d) == (23, 1, 3)
    n23.check_invariants()


def test_min_distance_rm15(rm15):
    d = min_distance(rm15, 6)
    assert d.exact and d.d == 3 and d.d_z == 3 and d.d_x is None
    assert min_distance(rm15, 7).d_x == 7


def test_min_distance_precondition(rm15):
    with pytest.raises(ValueError):
        min_distance(rm15, 0)


def test_min_distance_bound_semantics(rm15):
    d = min_distance(rm15, 2)
    assert not d.exact and str(d) == "> 2"


def test_min_distance_monotone_and_matches_enumeration(rm15):
    exact = brute_distance(rm15)
    assert exact == 3
    seen = [min_distance(rm15, w) for w in range(1, 8)]
    for w, d in zip(range(1, 8), seen):
        assert d.d == (exact if w >= exact else None)


def small_triorthogonal_codes():
    """Triorthogonal codes of length <= 16 with k = 1, from point sets in F_2^4."""
    out = []
    for pts in ([p for p in range(1, 16)], [p for p in range(1, 16) if p != 15][:13]):
        n = len(pts)
        rows = [(1 << n) - 1] + [sum(((p >> i) & 1) << j for j, p in enumerate(pts)) for i in range(4)]
        try:
            out.append(build_css(BitMatrix(tuple(rows), n)))
        except CodeError:
            pass
    return out


def test_distance_agrees_with_brute_force_small_codes():
    for code in small_triorthogonal_codes():
        assert min_distance(code, code.n).d == brute_distance(code)


@settings(max_examples=20, deadline=None)
@given(st.permutations(range(5)))
def test_triorthogonality_invariant_under_row_permutation(perm):
    G = construct_rm15().G
    P = BitMatrix(tuple(G.rows[i] for i in perm), G.ncols)
    assert check_triorthogonal(P).ok
    bad = BitMatrix.from_strings(["1100", "0110", "1111", "0000", "0011"])
    Q = BitMatrix(tuple(bad.rows[i] for i in perm), 4)
    assert not check_triorthogonal(Q).ok


def test_ccz_rm15_exact(rm15):
    rep = check_transversal_ccz(rm15)
    assert rep.is_exact and not rep.correction and rep.method == "enumeration"
    assert ccz_phase_oracle(rm15)
    assert ccz_correction_search(rm15) == ([], [])


def test_ccz_zero_class_triples_hold_for_any_triorthogonal(n23):
    span = n23.stabilizer_span("X")
    for u, v, w in itertools.islice(itertools.product(span, repeat=3), 5000):
        assert (u & v & w).bit_count() % 2 == 0


def test_ccz_n23_exact_by_oracle(n23):
    assert check_transversal_ccz(n23).describe() == "exact"
    assert ccz_phase_oracle(n23)


def test_ccz_requires_k1():
    code = build_css(BitMatrix.from_strings(["10", "01"]))
    assert code.k == 2
    with pytest.raises(CodeError):
        check_transversal_ccz(code)


def _correction_phase(n, cz, zs, u, v, w):
    """Phase bit of a CZ/Z correction on |u>|v>|w>, evaluated qubit by qubit."""
    blocks = (u, v, w)
    bit = 0
    for p, q in cz:
        for A, B in itertools.permutations(range(3), 2):
            bit ^= ((blocks[A] >> p) & 1) & ((blocks[B] >> q) & 1)
    for q in zs:
        for blk in blocks:
            bit ^= (blk >> q) & 1
    return bit


def test_diagonal_correction_toy_by_exhaustion():
    n = 3
    pairs = list(itertools.combinations(range(n), 2))
    target = ([], [1])  # Z on qubit 1 fixes the toy phase
    triples = list(itertools.product(range(1 << n), repeat=3))
    cons = [(u, v, w, _correction_phase(n, *target, u, v, w)) for u, v, w in triples]
    found = diagonal_correction(n, cons)
    # exhaustive search over all 2^(n + n(n-1)/2) candidates
    consistent = []
    for mask in range(1 << (len(pairs) + n)):
        cz = [pairs[i] for i in range(len(pairs)) if (mask >> i) & 1]
        zs = [q for q in range(n) if (mask >> (len(pairs) + q)) & 1]
        if all(_correction_phase(n, cz, zs, u, v, w) == r for u, v, w, r in cons):
            consistent.append((cz, zs))
    assert consistent == [target]
    assert found == target


def test_diagonal_correction_infeasible():
    assert diagonal_correction(3, [(0, 0, 0, 1)]) is None
    assert diagonal_correction(3, [(1, 1, 1, 0), (1, 1, 1, 1)]) is None


def test_diagonal_correction_random_targets_minimal():
    rnd = random.Random(7)
    n = 4
    pairs = list(itertools.combinations(range(n), 2))
    for _ in range(5):
        cz = [p for p in pairs if rnd.random() < 0.3]
        zs = [q for q in range(n) if rnd.random() < 0.3]
        cons = [(u, v, w, _correction_phase(n, cz, zs, u, v, w))
                for u, v, w in itertools.product(range(1 << n), repeat=3)]
        got = diagonal_correction(n, cons)
        assert got is not None
        assert all(_correction_phase(n, *got, u, v, w) == r for u, v, w, r in cons)
        assert len(got[0]) + len(got[1]) <= len(cz) + len(zs)


def test_save_load_roundtrip(tmp_path):
    G = construct_rm15()
    p = tmp_path / "rm15.code"
    save_code(G, p, ["rm15"])
    assert load_code(p).G == G.G


def test_load_wrong_row_length(tmp_path):
    p = tmp_path / "bad.code"
    p.write_text("4 2\n1111\n110\n")
    with pytest.raises(CodeFileError) as e:
        load_code(p)
    assert e.value.line == 3


def test_load_empty_and_non_triorthogonal(tmp_path):
    p = tmp_path / "empty.code"
    p.write_text("")
    with pytest.raises(CodeFileError):
        load_code(p)
    q = tmp_path / "nt.code"
    q.write_text(format_code(BitMatrix.from_strings(["1100", "0110"])))
    with pytest.raises(NotTriorthogonalError):
        load_code(q)


def test_every_catalog_entry_builds():
    entries = sorted(catalog_dir().glob("*.code"))
    assert {p.stem for p in entries} >= {"rm15", "n23"}
    for p in entries:
        code = build_css(load_code(p))
        code.check_invariants()
        assert code.k == 1


def test_catalog_env_override(tmp_path, monkeypatch):
    save_code(construct_rm15(), tmp_path / "mine.code")
    monkeypatch.setenv("MPQC_CATALOG", str(tmp_path))
    assert load_css("mine").params() == "[[15,1,3]]"

"""Triorthogonal matrices and the CSS codes built from them.

A binary matrix ``G`` is triorthogonal when every pair of distinct rows has an
even-weight entrywise product and every triple of distinct rows does too.  Its
even-weight rows become X stabilizers, the even-weight part of its orthogonal
complement becomes the Z stabilizers, and the odd-weight rows are logical X
operators.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .gf2 import BitMatrix, BitVector, nullspace, rank, rref, solve

__all__ = [
    "CodeError",
    "NotTriorthogonalError",
    "CodeFileError",
    "TriorthogonalityResult",
    "TriorthogonalMatrix",
    "CssCode",
    "Distance",
    "CczReport",
    "check_triorthogonal",
    "build_css",
    "min_distance",
    "check_transversal_ccz",
    "ccz_phase_oracle",
    "ccz_correction_search",
    "construct_rm15",
    "load_code",
    "load_matrix",
    "save_code",
    "format_code",
    "catalog_dir",
    "catalog_path",
]


class CodeError(ValueError):
    """A matrix cannot be turned into a usable code."""


class NotTriorthogonalError(CodeError):
    def __init__(self, witness: tuple[int, ...]):
        self.witness = witness
        rows = ",".join(str(i + 1) for i in witness)
        super().__init__(f"matrix is not triorthogonal (rows {rows})")


class CodeFileError(CodeError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(prefix + message)


@dataclass(frozen=True)
class TriorthogonalityResult:
    ok: bool
    witness: tuple[int, ...] | None = None  # zero-based row indices

    def __bool__(self) -> bool:
        return self.ok


def check_triorthogonal(G: BitMatrix) -> TriorthogonalityResult:
    """Scan all distinct row pairs and triples.

    The first violation in lexicographic order of index tuples is reported,
    so a pair ``(i, j)`` is checked before the triples ``(i, j, k)``.
    """
    rows = G.rows
    m = len(rows)
    for i in range(m):
        for j in range(i + 1, m):
            ij = rows[i] & rows[j]
            if ij.bit_count() & 1:
                return TriorthogonalityResult(False, (i, j))
            for k in range(j + 1, m):
                if (ij & rows[k]).bit_count() & 1:
                    return TriorthogonalityResult(False, (i, j, k))
    return TriorthogonalityResult(True)


@dataclass(frozen=True)
class TriorthogonalMatrix:
    G: BitMatrix

    def __post_init__(self):
        res = check_triorthogonal(self.G)
        if not res.ok:
            raise NotTriorthogonalError(res.witness)

    @property
    def n(self) -> int:
        return self.G.ncols

    @property
    def m(self) -> int:
        return self.G.nrows

    def even_rows(self) -> BitMatrix:
        return BitMatrix(tuple(r for r in self.G.rows if not r.bit_count() & 1), self.n)

    def odd_rows(self) -> BitMatrix:
        return BitMatrix(tuple(r for r in self.G.rows if r.bit_count() & 1), self.n)


@dataclass(frozen=True)
class Distance:
    """Result of a bounded-weight distance search.

    ``d`` is the exact distance when one was found at weight ``<= w_max``,
    otherwise ``None`` and only ``d > w_max`` is known.
    """

    d: int | None
    w_max: int
    d_x: int | None = None
    d_z: int | None = None

    @property
    def exact(self) -> bool:
        return self.d is not None

    def __str__(self) -> str:
        return str(self.d) if self.exact else f"> {self.w_max}"


@dataclass(frozen=True, eq=False)
class CssCode:
    n: int
    k: int
    x_stabilizers: BitMatrix
    z_stabilizers: BitMatrix
    logical_x: BitMatrix
    logical_z: BitMatrix
    source: TriorthogonalMatrix | None = None
    d: int | None = None
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def with_distance(self, d: int | None) -> "CssCode":
        return CssCode(self.n, self.k, self.x_stabilizers, self.z_stabilizers,
                       self.logical_x, self.logical_z, self.source, d)

    @property
    def t_max(self) -> int:
        if self.d is None:
            raise CodeError("code distance unknown; run min_distance first")
        return (self.d - 1) // 2

    def params(self) -> str:
        d = "?" if self.d is None else str(self.d)
        return f"[[{self.n},{self.k},{d}]]"

    def check_invariants(self) -> None:
        """Raise ``CodeError`` if commutation or pairing relations fail."""
        for sx in self.x_stabilizers.rows:
            for sz in self.z_stabilizers.rows:
                if (sx & sz).bit_count() & 1:
                    raise CodeError("X and Z stabilizers anticommute")
        for a, lx in enumerate(self.logical_x.rows):
            for s in self.z_stabilizers.rows:
                if (lx & s).bit_count() & 1:
                    raise CodeError(f"logical X {a} anticommutes with a Z stabilizer")
            for b, lz in enumerate(self.logical_z.rows):
                if ((lx & lz).bit_count() & 1) != (a == b):
                    raise CodeError(f"logical pairing broken at ({a}, {b})")
        for b, lz in enumerate(self.logical_z.rows):
            for s in self.x_stabilizers.rows:
                if (lz & s).bit_count() & 1:
                    raise CodeError(f"logical Z {b} anticommutes with an X stabilizer")
        expect = self.n - rank(self.x_stabilizers) - rank(self.z_stabilizers)
        if expect != self.k:
            raise CodeError(f"k = {self.k} but n - rank(Hx) - rank(Hz) = {expect}")

    # cached helpers used by the decoders and samplers

    def stabilizer_span(self, kind: str) -> list[int]:
        key = ("span", kind)
        if key not in self._cache:
            M = self.x_stabilizers if kind == "X" else self.z_stabilizers
            self._cache[key] = M.span()
        return self._cache[key]

    def independent_stabilizers(self, kind: str) -> BitMatrix:
        key = ("basis", kind)
        if key not in self._cache:
            M = self.x_stabilizers if kind == "X" else self.z_stabilizers
            self._cache[key] = rref(M)[0]
        return self._cache[key]


def _even_subspace(M: BitMatrix) -> BitMatrix:
    """Basis of the even-weight vectors in the row space of ``M``."""
    R, rk, _ = rref(M)
    odd = [r for r in R.rows if r.bit_count() & 1]
    even = [r for r in R.rows if not r.bit_count() & 1]
    if odd:
        even += [odd[0] ^ o for o in odd[1:]]
    return BitMatrix(tuple(even), M.ncols)


def build_css(T: TriorthogonalMatrix | BitMatrix) -> CssCode:
    """CSS code of a triorthogonal matrix.

    Raises ``NotTriorthogonalError`` for an invalid matrix and ``CodeError``
    when the matrix yields no logical qubit or an inconsistent pairing.
    """
    if isinstance(T, BitMatrix):
        T = TriorthogonalMatrix(T)
    n = T.n
    hx = T.even_rows()
    lx = T.odd_rows()
    if not lx.rows:
        raise CodeError("no odd-weight rows: k = 0, unusable for the protocol")
    if rank(hx.stack(lx)) != rank(hx) + len(lx):
        raise CodeError("odd-weight rows are not independent modulo the X stabilizers")
    hz = _even_subspace(nullspace(T.G))
    k = n - rank(hx) - rank(hz)
    if k != len(lx):
        raise CodeError(
            f"n - rank(Hx) - rank(Hz) = {k} but G has {len(lx)} odd-weight rows; "
            "the all-ones vector must lie in the row space of G"
        )
    # logical Z: x with Hx x = 0 and <x, lx_b> = delta_ab
    system = hx.stack(lx)
    lz = []
    for a in range(len(lx)):
        rhs = BitVector(1 << (hx.nrows + a), system.nrows)
        x = solve(system, rhs)
        if x is None:
            raise CodeError(f"no logical Z partner for logical X {a}")
        lz.append(x.bits)
    code = CssCode(n, k, hx, hz, lx, BitMatrix(tuple(lz), n), T)
    code.check_invariants()
    return code


def _column_ints(rows: Sequence[int], n: int) -> list[int]:
    return [sum(((r >> j) & 1) << i for i, r in enumerate(rows)) for j in range(n)]


def _min_logical_weight(checks: BitMatrix, partners: BitMatrix, w_max: int) -> int | None:
    """Least weight of ``x`` with ``checks x = 0`` and ``partners x != 0``.

    Meet in the middle over column sums: the minimum is ``<= w`` iff some
    pair of column subsets of sizes ``ceil(w/2)`` and ``floor(w/2)`` sums to a
    nonzero partner pattern with zero check part.
    """
    n = checks.ncols
    nc = checks.nrows
    cols = _column_ints(checks.rows + partners.rows, n)
    targets = [t << nc for t in range(1, 1 << partners.nrows)]
    sums_by_size: list[set[int]] = [{0}]
    for size in range(1, (w_max + 1) // 2 + 1):
        sums = set()
        for combo in itertools.combinations(cols, size):
            s = 0
            for c in combo:
                s ^= c
            sums.add(s)
        sums_by_size.append(sums)
    for w in range(1, w_max + 1):
        a, b = (w + 1) // 2, w // 2
        small, large = sums_by_size[b], sums_by_size[a]
        for s in large:
            for t in targets:
                if s ^ t in small:
                    return w
    return None


def min_distance(code: CssCode, w_max: int = 6) -> Distance:
    """Minimum weight of a nontrivial logical operator, searched up to ``w_max``."""
    if w_max < 1:
        raise ValueError("w_max must be >= 1")
    # X-type logicals commute with Z stabilizers and anticommute with some logical Z
    dx = _min_logical_weight(code.z_stabilizers, code.logical_z, w_max)
    dz = _min_logical_weight(code.x_stabilizers, code.logical_x, w_max)
    # a type not found below w_max is heavier than any found one
    found = [d for d in (dx, dz) if d is not None]
    return Distance(min(found) if found else None, w_max, dx, dz)


@dataclass(frozen=True)
class CczReport:
    is_exact: bool
    cz_pairs: frozenset = frozenset()
    z_qubits: frozenset = frozenset()
    failing_witness: tuple | None = None
    method: str = "enumeration"
    correction_found: bool = True

    @property
    def correction(self) -> frozenset:
        return self.cz_pairs | frozenset((q,) for q in self.z_qubits)

    def describe(self) -> str:
        if self.is_exact and not self.cz_pairs and not self.z_qubits:
            return "exact"
        if not self.correction_found:
            return "not transversal (no diagonal correction found)"
        parts = [f"cz{p}" for p in sorted(self.cz_pairs)] + [f"z{q}" for q in sorted(self.z_qubits)]
        return "exact with correction " + " ".join(parts)


def _logical_cosets(code: CssCode) -> list[tuple[int, int]]:
    """Every codeword ``u`` with its logical class ``x``: ``u in x*L + span(Hx)``."""
    if code.k != 1:
        raise CodeError("transversal CCZ analysis supports k = 1 only")
    g = code.logical_x.rows[0]
    span = code.stabilizer_span("X")
    return [(u, 0) for u in span] + [(u ^ g, 1) for u in span]


FULL_ENUMERATION_LIMIT = 1 << 22


def _basis_words(code: CssCode) -> list[tuple[int, int]]:
    g = code.logical_x.rows[0]
    return [(r, 0) for r in code.independent_stabilizers("X").rows] + [(g, 1)]


def check_transversal_ccz(code: CssCode, full: bool | None = None) -> CczReport:
    """Check that qubit-wise CCZ across three blocks acts as logical CCZ.

    On codeword basis states ``|u>|v>|w>`` the physical gate contributes the
    phase ``(-1)^|u*v*w|``; logical CCZ needs ``(-1)^(x*y*z)``.  Both sides
    are trilinear in ``(u, v, w)`` over GF(2), so checking all basis triples
    (with repeats) is equivalent to the full enumeration; the full
    enumeration runs whenever the number of triples is below
    ``FULL_ENUMERATION_LIMIT`` or ``full`` is set.
    """
    words = _logical_cosets(code)
    if full is None:
        full = len(words) ** 3 <= FULL_ENUMERATION_LIMIT
    if not full:
        words = _basis_words(code)
    witness = None
    for (u, x), (v, y), (w, z) in itertools.product(words, repeat=3):
        if ((u & v & w).bit_count() & 1) != (x & y & z):
            witness = (u, v, w)
            break
    method = "enumeration" if full else "trilinear-basis"
    if witness is None:
        return CczReport(True, method=method)
    corr = ccz_correction_search(code)
    if corr is None:
        return CczReport(False, failing_witness=witness, method=method, correction_found=False)
    pairs, singles = corr
    return CczReport(True, frozenset(pairs), frozenset(singles), witness, method)


def ccz_phase_oracle(code: CssCode) -> bool:
    """Independent check of transversal CCZ on codeword basis states.

    Builds each codeword as a 0/1 array and multiplies the per-qubit CCZ
    diagonal entries explicitly, comparing against the logical CCZ phase.
    """
    words = _logical_cosets(code)
    n = code.n
    arr = np.array([[(u >> i) & 1 for i in range(n)] for u, _ in words], dtype=np.int64)
    cls = np.array([x for _, x in words], dtype=np.int64)
    # per-qubit CCZ diagonal: -1 exactly when all three legs are 1
    for a in range(len(words)):
        ab = arr[a] * arr  # (W, n)
        prod = np.einsum("bi,ci->bci", ab, arr)  # (W, W, n) legs a, b, c
        phys = np.prod(np.where(prod == 1, -1, 1), axis=2)
        logical = np.where((cls[a] * np.outer(cls, cls)) == 1, -1, 1)
        if not np.array_equal(phys, logical):
            return False
    return True


def _correction_row(u: int, v: int, w: int, n: int, pairs: list[tuple[int, int]]) -> int:
    """Coefficient vector of one triple's correction phase.

    Unknown ``i < len(pairs)`` is CZ on ``pairs[i]`` applied between every
    ordered pair of blocks; unknown ``len(pairs) + q`` is Z on qubit ``q`` of
    every block.
    """
    row = 0
    for i, (p, q) in enumerate(pairs):
        up, uq = (u >> p) & 1, (u >> q) & 1
        vp, vq = (v >> p) & 1, (v >> q) & 1
        wp, wq = (w >> p) & 1, (w >> q) & 1
        c = (up & vq) ^ (uq & vp) ^ (up & wq) ^ (uq & wp) ^ (vp & wq) ^ (vq & wp)
        row |= c << i
    base = len(pairs)
    s = u ^ v ^ w
    return row | (s << base)


def _min_support(x0: int, null: BitMatrix) -> int:
    """Lowest-weight element of ``x0 + rowspace(null)``; ties go to the smaller int."""
    if null.nrows <= 20:
        best = x0
        for s in null.span():
            cand = x0 ^ s
            if (cand.bit_count(), cand) < (best.bit_count(), best):
                best = cand
        return best
    # large solution space: greedy descent from the particular solution
    best = x0
    improved = True
    while improved:
        improved = False
        for r in null.rows:
            cand = best ^ r
            if (cand.bit_count(), cand) < (best.bit_count(), best):
                best, improved = cand, True
    return best


def diagonal_correction(n: int, constraints: Iterable[tuple[int, int, int, int]]):
    """Solve for a CZ/Z correction meeting ``(u, v, w, phase_bit)`` constraints.

    Each constraint demands that the correction contribute ``(-1)^phase_bit``
    on the basis state ``|u>|v>|w>`` of three ``n``-qubit blocks.  Returns the
    minimal-support ``(cz_pairs, z_qubits)`` or ``None`` if inconsistent.
    """
    pairs = list(itertools.combinations(range(n), 2))
    nunk = len(pairs) + n
    eqs: dict[int, int] = {}
    for u, v, w, rhs in constraints:
        row = _correction_row(u, v, w, n, pairs)
        if row in eqs and eqs[row] != rhs:
            return None
        eqs[row] = rhs
    rows = list(eqs)
    A = BitMatrix(tuple(rows), nunk)
    b = BitVector(sum(eqs[r] << i for i, r in enumerate(rows)), len(rows))
    sol = solve(A, b)
    if sol is None:
        return None
    best = _min_support(sol.bits, nullspace(A))
    cz = [pairs[i] for i in range(len(pairs)) if (best >> i) & 1]
    zs = [q for q in range(n) if (best >> (len(pairs) + q)) & 1]
    return cz, zs


def ccz_correction_search(code: CssCode):
    """Diagonal Clifford fix-up making transversal CCZ exact.

    Returns ``(cz_pairs, z_qubits)``, both empty for an exact code, or
    ``None`` when no CZ/Z correction of the modelled form exists.
    """
    words = _logical_cosets(code)
    if len(words) ** 3 > FULL_ENUMERATION_LIMIT:
        words = _basis_words(code)
    return diagonal_correction(code.n, (
        (u, v, w, ((u & v & w).bit_count() & 1) ^ (x & y & z))
        for (u, x), (v, y), (w, z) in itertools.product(words, repeat=3)))


def construct_rm15() -> TriorthogonalMatrix:
    """Generator of the punctured first-order Reed-Muller code of length 15.

    Row 0 is all-ones; row ``k`` marks the positions ``p`` in 1..15 whose
    binary expansion has bit ``k - 1`` set.
    """
    n = 15
    rows = [(1 << n) - 1]
    for bit in range(4):
        rows.append(sum(1 << (p - 1) for p in range(1, n + 1) if (p >> bit) & 1))
    return TriorthogonalMatrix(BitMatrix(tuple(rows), n))


def _parse(text: str) -> BitMatrix:
    header = None
    rows: list[str] = []
    lineno = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if header is None:
            parts = line.split()
            if len(parts) != 2 or not all(p.isdigit() for p in parts):
                raise CodeFileError(f"expected header 'n m', got {line!r}", lineno)
            header = (int(parts[0]), int(parts[1]))
            if header[0] < 1:
                raise CodeFileError("n must be positive", lineno)
            continue
        n, m = header
        if len(rows) == m:
            raise CodeFileError(f"more than {m} rows", lineno)
        if len(line) != n or any(c not in "01" for c in line):
            raise CodeFileError(f"row must be {n} characters of 0/1, got {line!r}", lineno)
        rows.append(line)
    if header is None:
        raise CodeFileError("empty file: missing 'n m' header", max(lineno, 1))
    if len(rows) != header[1]:
        raise CodeFileError(f"expected {header[1]} rows, found {len(rows)}", lineno)
    return BitMatrix.from_strings(rows, header[0])


def load_matrix(path: str | os.PathLike) -> BitMatrix:
    """Parse a code file without checking triorthogonality."""
    return _parse(Path(path).read_text())


def load_code(path: str | os.PathLike) -> TriorthogonalMatrix:
    return TriorthogonalMatrix(load_matrix(path))


def format_code(G: TriorthogonalMatrix | BitMatrix, comments: Iterable[str] = ()) -> str:
    M = G.G if isinstance(G, TriorthogonalMatrix) else G
    lines = [f"# {c}".rstrip() for c in comments]
    lines.append(f"{M.ncols} {M.nrows}")
    lines += M.to_strings()
    return "\n".join(lines) + "\n"


def save_code(G: TriorthogonalMatrix | BitMatrix, path: str | os.PathLike,
              comments: Iterable[str] = ()) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write(format_code(G, comments))


CATALOG_ENV = "MPQC_CATALOG"


def catalog_dir() -> Path:
    env = os.environ.get(CATALOG_ENV)
    return Path(env) if env else Path(__file__).parent / "catalog"


def catalog_path(name: str) -> Path:
    """Resolve ``name`` (e.g. ``rm15`` or ``n49``) inside the catalog directory."""
    p = Path(name)
    if p.exists():
        return p
    d = catalog_dir()
    for cand in (d / name, d / f"{name}.code"):
        if cand.exists():
            return cand
    raise FileNotFoundError(f"no catalog entry {name!r} in {d}")


def load_css(source: str | os.PathLike, w_max: int = 6) -> CssCode:
    """Load a code file or catalog entry and attach its distance (``None`` if above ``w_max``)."""
    code = build_css(load_code(catalog_path(str(source))))
    return code.with_distance(min_distance(code, w_max).d)

"""Dense GF(2) linear algebra on bit-packed rows.

Rows are stored as Python ints (bit ``i`` is column ``i``), so AND/XOR and
popcount run word-at-a-time regardless of the row length.  All values are
immutable.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np


class DimensionError(ValueError):
    """Operands have incompatible lengths or shapes."""


def _mask(n: int) -> int:
    return (1 << n) - 1


@dataclass(frozen=True)
class BitVector:
    bits: int
    length: int

    def __post_init__(self):
        if self.length < 0:
            raise DimensionError("negative length")
        if self.bits < 0 or self.bits >> self.length:
            raise ValueError(f"bits {self.bits:#x} do not fit in length {self.length}")

    @classmethod
    def from_str(cls, s: str) -> "BitVector":
        s = s.strip()
        if any(c not in "01" for c in s):
            raise ValueError(f"not a binary string: {s!r}")
        return cls(sum(1 << i for i, c in enumerate(s) if c == "1"), len(s))

    @classmethod
    def from_list(cls, values: Iterable[int]) -> "BitVector":
        values = [int(v) for v in values]
        if any(v not in (0, 1) for v in values):
            raise ValueError("entries must be 0 or 1")
        return cls(sum(1 << i for i, v in enumerate(values) if v), len(values))

    @classmethod
    def zeros(cls, n: int) -> "BitVector":
        return cls(0, n)

    @classmethod
    def ones(cls, n: int) -> "BitVector":
        return cls(_mask(n), n)

    @classmethod
    def unit(cls, n: int, i: int) -> "BitVector":
        if not 0 <= i < n:
            raise IndexError(i)
        return cls(1 << i, n)

    def __len__(self) -> int:
        return self.length

    def __getitem__(self, i: int) -> int:
        if i < 0:
            i += self.length
        if not 0 <= i < self.length:
            raise IndexError(i)
        return (self.bits >> i) & 1

    def __iter__(self):
        return (int((self.bits >> i) & 1) for i in range(self.length))

    def _check(self, other: "BitVector") -> None:
        if self.length != other.length:
            raise DimensionError(f"length mismatch: {self.length} != {other.length}")

    def __xor__(self, other: "BitVector") -> "BitVector":
        self._check(other)
        return BitVector(self.bits ^ other.bits, self.length)

    __add__ = __xor__

    def __and__(self, other: "BitVector") -> "BitVector":
        self._check(other)
        return BitVector(self.bits & other.bits, self.length)

    def weight(self) -> int:
        return self.bits.bit_count()

    def support(self) -> list[int]:
        return [i for i in range(self.length) if (self.bits >> i) & 1]

    def dot(self, other: "BitVector") -> int:
        self._check(other)
        return (self.bits & other.bits).bit_count() & 1

    def to_list(self) -> list[int]:
        return list(self)

    def __str__(self) -> str:
        return "".join("1" if (self.bits >> i) & 1 else "0" for i in range(self.length))


def weight(v: BitVector) -> int:
    """Number of ones in ``v``."""
    return v.weight()


def entrywise_product(u: BitVector, v: BitVector) -> BitVector:
    return u & v


def triple_product_weight(u: BitVector, v: BitVector, w: BitVector) -> int:
    """Weight of the entrywise product ``u * v * w``."""
    return (u & v & w).weight()


@dataclass(frozen=True)
class BitMatrix:
    """Binary matrix with bit-packed rows.

    ``rows`` holds one int per row; ``ncols`` fixes the row length even when
    there are no rows.
    """

    rows: tuple[int, ...]
    ncols: int

    def __post_init__(self):
        object.__setattr__(self, "rows", tuple(int(r) for r in self.rows))
        for r in self.rows:
            if r < 0 or r >> self.ncols:
                raise DimensionError(f"row {r:#x} does not fit in {self.ncols} columns")

    @classmethod
    def from_vectors(cls, vectors: Sequence[BitVector], ncols: int | None = None) -> "BitMatrix":
        if ncols is None:
            if not vectors:
                raise DimensionError("cannot infer column count from no rows")
            ncols = vectors[0].length
        for v in vectors:
            if v.length != ncols:
                raise DimensionError(f"row length {v.length} != {ncols}")
        return cls(tuple(v.bits for v in vectors), ncols)

    @classmethod
    def from_strings(cls, lines: Sequence[str], ncols: int | None = None) -> "BitMatrix":
        return cls.from_vectors([BitVector.from_str(s) for s in lines], ncols)

    @classmethod
    def from_array(cls, a) -> "BitMatrix":
        a = np.asarray(a, dtype=np.uint8) % 2
        if a.ndim != 2:
            raise DimensionError("expected a 2-d array")
        return cls(tuple(BitVector.from_list(row).bits for row in a), a.shape[1])

    @classmethod
    def identity(cls, n: int) -> "BitMatrix":
        return cls(tuple(1 << i for i in range(n)), n)

    @classmethod
    def zeros(cls, m: int, n: int) -> "BitMatrix":
        return cls((0,) * m, n)

    @property
    def nrows(self) -> int:
        return len(self.rows)

    @property
    def shape(self) -> tuple[int, int]:
        return (len(self.rows), self.ncols)

    def __len__(self) -> int:
        return len(self.rows)

    def row(self, i: int) -> BitVector:
        return BitVector(self.rows[i], self.ncols)

    def __iter__(self):
        return (BitVector(r, self.ncols) for r in self.rows)

    def __getitem__(self, idx):
        if isinstance(idx, tuple):
            i, j = idx
            return (self.rows[i] >> j) & 1
        if isinstance(idx, slice):
            return BitMatrix(self.rows[idx], self.ncols)
        return self.row(idx)

    def column(self, j: int) -> BitVector:
        return BitVector(sum(((r >> j) & 1) << i for i, r in enumerate(self.rows)), self.nrows)

    def to_array(self) -> np.ndarray:
        out = np.zeros(self.shape, dtype=np.uint8)
        for i, r in enumerate(self.rows):
            for j in range(self.ncols):
                out[i, j] = (r >> j) & 1
        return out

    def to_strings(self) -> list[str]:
        return [str(v) for v in self]

    def transpose(self) -> "BitMatrix":
        return BitMatrix(tuple(self.column(j).bits for j in range(self.ncols)), self.nrows)

    @property
    def T(self) -> "BitMatrix":
        return self.transpose()

    def stack(self, other: "BitMatrix") -> "BitMatrix":
        if other.ncols != self.ncols:
            raise DimensionError("column count mismatch")
        return BitMatrix(self.rows + other.rows, self.ncols)

    def mul_vec(self, v: BitVector) -> BitVector:
        """``M @ v`` over GF(2); result has one bit per row."""
        if v.length != self.ncols:
            raise DimensionError(f"vector length {v.length} != {self.ncols} columns")
        return BitVector(
            sum(((r & v.bits).bit_count() & 1) << i for i, r in enumerate(self.rows)), self.nrows
        )

    def __matmul__(self, other: "BitMatrix") -> "BitMatrix":
        if self.ncols != other.nrows:
            raise DimensionError(f"shapes {self.shape} and {other.shape} not aligned")
        cols = other.transpose().rows
        return BitMatrix(
            tuple(sum(((r & c).bit_count() & 1) << j for j, c in enumerate(cols)) for r in self.rows),
            other.ncols,
        )

    def is_zero(self) -> bool:
        return not any(self.rows)

    def span(self) -> list[int]:
        """All 2^rank distinct vectors of the row space, as ints.

        Gray-code order over an echelon basis, starting at zero.
        """
        basis = rref(self)[0].rows
        out = [0]
        for b in basis:
            out += [x ^ b for x in out]
        return out

    def __str__(self) -> str:
        return "\n".join(self.to_strings())


def _eliminate(rows: list[int], ncols: int, limit_cols: int | None = None):
    """Reduced row echelon form in place; pivots chosen at the lowest column."""
    pivots: list[int] = []
    r = 0
    for col in range(ncols if limit_cols is None else limit_cols):
        bit = 1 << col
        for i in range(r, len(rows)):
            if rows[i] & bit:
                break
        else:
            continue
        rows[r], rows[i] = rows[i], rows[r]
        for k in range(len(rows)):
            if k != r and rows[k] & bit:
                rows[k] ^= rows[r]
        pivots.append(col)
        r += 1
        if r == len(rows):
            break
    return pivots


def rref(M: BitMatrix) -> tuple[BitMatrix, int, list[int]]:
    """Reduced row echelon form of ``M``.

    Returns ``(R, rank, pivot_columns)``.  ``R`` keeps only the ``rank``
    nonzero rows; its row space equals that of ``M``.
    """
    rows = list(M.rows)
    pivots = _eliminate(rows, M.ncols)
    rank = len(pivots)
    return BitMatrix(tuple(rows[:rank]), M.ncols), rank, pivots


def rank(M: BitMatrix) -> int:
    return rref(M)[1]


def nullspace(M: BitMatrix) -> BitMatrix:
    """Basis (as rows) of ``{x : M x = 0}``."""
    R, rk, pivots = rref(M)
    n = M.ncols
    pivset = set(pivots)
    basis = []
    for free in range(n):
        if free in pivset:
            continue
        x = 1 << free
        for i, p in enumerate(pivots):
            if (R.rows[i] >> free) & 1:
                x |= 1 << p
        basis.append(x)
    return BitMatrix(tuple(basis), n)


def solve(M: BitMatrix, b: BitVector) -> BitVector | None:
    """Some ``x`` with ``M x = b``, or ``None`` when the system is inconsistent."""
    if b.length != M.nrows:
        raise DimensionError(f"rhs length {b.length} != {M.nrows} rows")
    n = M.ncols
    # augmented column sits at bit n
    rows = [r | (((b.bits >> i) & 1) << n) for i, r in enumerate(M.rows)]
    pivots = _eliminate(rows, n + 1)
    if pivots and pivots[-1] == n:
        return None
    x = 0
    for i, p in enumerate(pivots):
        if (rows[i] >> n) & 1:
            x |= 1 << p
    return BitVector(x, n)


def in_rowspan(v: BitVector, M: BitMatrix) -> bool:
    R, _, pivots = rref(M)
    x = v.bits
    for r, p in zip(R.rows, pivots):
        if (x >> p) & 1:
            x ^= r
    return x == 0


def reduce_against(x: int, R: BitMatrix, pivots: Sequence[int]) -> int:
    """Canonical coset representative of ``x`` modulo the row space of an rref matrix."""
    for r, p in zip(R.rows, pivots):
        if (x >> p) & 1:
            x ^= r
    return x

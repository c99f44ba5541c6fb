"""Pauli operators, Pauli+CZ error frames, syndrome decoding, and a CHP tableau.

An :class:`ErrorFrame` is the operator ``P * C`` that maps the ideal state to
the actual one, where ``P = i^phase X^x Z^z`` is a Pauli and ``C`` a product
of CZ gates on the listed qubit pairs.  This set is closed under conjugation
by X, Z, CZ and CCZ; H is only supported on qubits that no CZ touches.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .codes import CssCode
from .gf2 import BitVector

__all__ = [
    "PauliOp",
    "ErrorFrame",
    "FrameOverflowError",
    "UnsupportedFrameError",
    "conjugate",
    "frame_syndrome",
    "decode_syndrome",
    "DecodeResult",
    "StabilizerTableau",
]

GATES = {"X": 1, "Z": 1, "H": 1, "CZ": 2, "CCZ": 3}


class FrameOverflowError(RuntimeError):
    """A conjugation would leave the Pauli+CZ frame group (H on a CZ leg)."""


class UnsupportedFrameError(ValueError):
    """Syndrome extraction was asked for a block still carrying CZ errors."""


def _bits(indices: Iterable[int]) -> int:
    out = 0
    for i in indices:
        out |= 1 << i
    return out


@dataclass(frozen=True)
class PauliOp:
    """``i^phase * X^x * Z^z`` on ``nqubits`` qubits (x and z are bit masks)."""

    x: int
    z: int
    nqubits: int
    phase: int = 0

    def __post_init__(self):
        object.__setattr__(self, "phase", self.phase % 4)

    @classmethod
    def identity(cls, n: int) -> "PauliOp":
        return cls(0, 0, n)

    @classmethod
    def from_str(cls, s: str, phase: int = 0) -> "PauliOp":
        """Parse ``"XIZY"``; an optional leading ``+ - i -i`` sets the sign."""
        s = s.strip()
        for prefix, ph in (("-i", 2 + 1), ("+i", 1), ("i", 1), ("-", 2), ("+", 0)):
            if s.startswith(prefix):
                s = s[len(prefix):]
                phase += ph
                break
        x = z = 0
        for i, c in enumerate(s.upper()):
            if c == "X":
                x |= 1 << i
            elif c == "Z":
                z |= 1 << i
            elif c == "Y":
                x |= 1 << i
                z |= 1 << i
                phase += 1  # Y = i X Z
            elif c not in "I_":
                raise ValueError(f"bad Pauli letter {c!r}")
        return cls(x, z, len(s), phase)

    @classmethod
    def single(cls, n: int, letter: str, qubit: int) -> "PauliOp":
        s = ["I"] * n
        s[qubit] = letter
        return cls.from_str("".join(s))

    def __mul__(self, other: "PauliOp") -> "PauliOp":
        if other.nqubits != self.nqubits:
            raise ValueError("qubit count mismatch")
        sign = 2 * ((self.z & other.x).bit_count() & 1)
        return PauliOp(self.x ^ other.x, self.z ^ other.z, self.nqubits,
                       self.phase + other.phase + sign)

    def commutes(self, other: "PauliOp") -> bool:
        return not (((self.x & other.z).bit_count() + (self.z & other.x).bit_count()) & 1)

    def weight(self) -> int:
        return (self.x | self.z).bit_count()

    def support(self) -> list[int]:
        m = self.x | self.z
        return [i for i in range(self.nqubits) if (m >> i) & 1]

    def is_identity(self) -> bool:
        return self.x == 0 and self.z == 0 and self.phase == 0

    def letters(self) -> str:
        out = []
        for i in range(self.nqubits):
            xb, zb = (self.x >> i) & 1, (self.z >> i) & 1
            out.append("IXZY"[xb | (zb << 1)] if not (xb and zb) else "Y")
        return "".join(out)

    def __str__(self) -> str:
        # express with Y letters: X^x Z^z = (-i)^{#Y} * Y-string
        ph = (self.phase - (self.x & self.z).bit_count()) % 4
        return ["+", "+i", "-", "-i"][ph] + self.letters()


@dataclass(frozen=True)
class ErrorFrame:
    pauli: PauliOp
    cz: frozenset = frozenset()  # pairs (p, q) with p < q

    def __post_init__(self):
        for p, q in self.cz:
            if not p < q:
                raise ValueError(f"cz pair {(p, q)} must satisfy p < q")

    @classmethod
    def identity(cls, n: int) -> "ErrorFrame":
        return cls(PauliOp.identity(n))

    @classmethod
    def from_pauli(cls, p: PauliOp | str) -> "ErrorFrame":
        return cls(PauliOp.from_str(p) if isinstance(p, str) else p)

    @classmethod
    def x_error(cls, n: int, qubits: Iterable[int]) -> "ErrorFrame":
        return cls(PauliOp(_bits(qubits), 0, n))

    @classmethod
    def z_error(cls, n: int, qubits: Iterable[int]) -> "ErrorFrame":
        return cls(PauliOp(0, _bits(qubits), n))

    @property
    def nqubits(self) -> int:
        return self.pauli.nqubits

    def is_identity(self) -> bool:
        return self.pauli.is_identity() and not self.cz

    def with_cz(self, *pairs) -> "ErrorFrame":
        return ErrorFrame(self.pauli, self.cz ^ frozenset(tuple(sorted(p)) for p in pairs))

    def cz_neighbours(self, q: int) -> list[int]:
        return [b if a == q else a for a, b in self.cz if q in (a, b)]

    def _cz_conjugate(self, p: PauliOp) -> PauliOp:
        """``C p C^dagger`` for this frame's CZ product ``C``."""
        if not self.cz or not p.x:
            return p
        zadd = 0
        inner = 0
        for a, b in self.cz:
            xa, xb = (p.x >> a) & 1, (p.x >> b) & 1
            if xa:
                zadd ^= 1 << b
            if xb:
                zadd ^= 1 << a
            inner += xa & xb
        # X^x Z^(Ax) ordered form picks up (-1) per CZ edge inside supp(x)
        return PauliOp(p.x, p.z ^ zadd, p.nqubits, p.phase + 2 * (inner & 1))

    def __mul__(self, other: "ErrorFrame") -> "ErrorFrame":
        """Operator product ``self * other``."""
        moved = self._cz_conjugate(other.pauli)
        return ErrorFrame(self.pauli * moved, self.cz ^ other.cz)

    def left_multiply(self, x: int = 0, z: int = 0) -> "ErrorFrame":
        """``X^x Z^z * self``: a Pauli applied to the actual state."""
        p = self.pauli
        sign = 2 * ((z & p.x).bit_count() & 1)
        return ErrorFrame(PauliOp(p.x ^ x, p.z ^ z, p.nqubits, p.phase + sign), self.cz)

    def __str__(self) -> str:
        cz = " ".join(f"CZ{p}" for p in sorted(self.cz))
        return f"{self.pauli}" + (f" {cz}" if cz else "")

    def restricted_paulis(self, qubits: Sequence[int]) -> tuple[int, int]:
        """X and Z bits on ``qubits`` packed into local masks (bit i = qubits[i])."""
        x = z = 0
        px, pz = self.pauli.x, self.pauli.z
        for i, q in enumerate(qubits):
            x |= ((px >> q) & 1) << i
            z |= ((pz >> q) & 1) << i
        return x, z

    def touches_cz(self, qubits: Iterable[int]) -> bool:
        qs = set(qubits)
        return any(a in qs or b in qs for a, b in self.cz)


def _check_indices(gate: str, qubits: Sequence[int], n: int) -> None:
    if gate not in GATES:
        raise ValueError(f"unsupported gate {gate!r}")
    if len(qubits) != GATES[gate]:
        raise ValueError(f"{gate} takes {GATES[gate]} qubit(s), got {len(qubits)}")
    if len(set(qubits)) != len(qubits):
        raise ValueError(f"{gate} indices must be distinct: {qubits}")
    for q in qubits:
        if not 0 <= q < n:
            raise IndexError(f"qubit {q} out of range for {n} qubits")


def conjugate(gate: str, qubits: Sequence[int], frame: ErrorFrame) -> ErrorFrame:
    """``g * frame * g^dagger`` expressed again as a Pauli+CZ frame.

    Raises :class:`FrameOverflowError` for H on a qubit carrying a CZ error.
    """
    gate = gate.upper()
    qubits = tuple(qubits)
    p = frame.pauli
    _check_indices(gate, qubits, p.nqubits)
    if gate == "X":
        (a,) = qubits
        sign = 2 * ((p.z >> a) & 1)
        zadd = _bits(frame.cz_neighbours(a))
        return ErrorFrame(PauliOp(p.x, p.z ^ zadd, p.nqubits, p.phase + sign), frame.cz)
    if gate == "Z":
        (a,) = qubits
        return ErrorFrame(PauliOp(p.x, p.z, p.nqubits, p.phase + 2 * ((p.x >> a) & 1)), frame.cz)
    if gate == "H":
        (a,) = qubits
        if frame.cz_neighbours(a):
            raise FrameOverflowError(f"H on qubit {a} carrying a CZ error leaves the frame group")
        xa, za = (p.x >> a) & 1, (p.z >> a) & 1
        bit = 1 << a
        x = (p.x & ~bit) | (za << a)
        z = (p.z & ~bit) | (xa << a)
        # H (XZ) H = ZX = -XZ
        return ErrorFrame(PauliOp(x, z, p.nqubits, p.phase + 2 * (xa & za)), frame.cz)
    if gate == "CZ":
        a, b = qubits
        xa, xb = (p.x >> a) & 1, (p.x >> b) & 1
        z = p.z ^ (xa << b) ^ (xb << a)
        return ErrorFrame(PauliOp(p.x, z, p.nqubits, p.phase + 2 * (xa & xb)), frame.cz)
    # CCZ
    legs = qubits
    xs = [(p.x >> q) & 1 for q in legs]
    if not any(xs):
        return frame
    zadd = 0
    cz = set(frame.cz)
    for i in range(3):
        j, k = [m for m in range(3) if m != i]
        if xs[i]:
            cz ^= {tuple(sorted((legs[j], legs[k])))}
        if xs[j] and xs[k]:
            zadd ^= 1 << legs[i]
    sign = 2 * (xs[0] & xs[1] & xs[2])
    return ErrorFrame(PauliOp(p.x, p.z ^ zadd, p.nqubits, p.phase + sign), frozenset(cz))


def frame_syndrome(code: CssCode, block: Sequence[int], frame: ErrorFrame) -> tuple[BitVector, BitVector]:
    """``(x_syndrome, z_syndrome)`` of the frame restricted to ``block``.

    ``x_syndrome[j]`` is the parity of the Z part against X stabilizer ``j``;
    ``z_syndrome[j]`` the parity of the X part against Z stabilizer ``j``.
    """
    if len(block) != code.n:
        raise ValueError(f"block has {len(block)} qubits, code needs {code.n}")
    if frame.touches_cz(block):
        raise UnsupportedFrameError("block carries CZ errors; resolve them before extraction")
    ex, ez = frame.restricted_paulis(block)
    return syndrome_of(code, ez, "Z"), syndrome_of(code, ex, "X")


def syndrome_of(code: CssCode, error: int, kind: str) -> BitVector:
    """Syndrome of an X-type (``kind='X'``) or Z-type error given as a local mask."""
    M = code.z_stabilizers if kind == "X" else code.x_stabilizers
    return M.mul_vec(BitVector(error, code.n))


def syndrome_int(code: CssCode, error: int, kind: str) -> int:
    """:func:`syndrome_of` on plain ints (bit j = check j), for hot loops."""
    key = ("checks", kind)
    rows = code._cache.get(key)
    if rows is None:
        rows = (code.z_stabilizers if kind == "X" else code.x_stabilizers).rows
        code._cache[key] = rows
    s = 0
    for j, r in enumerate(rows):
        s |= ((r & error).bit_count() & 1) << j
    return s


def decode_mask(code: CssCode, error: int, kind: str) -> int | None:
    """Correction mask for the syndrome of a local error mask, ``None`` if uncorrectable."""
    return _decode_table(code, kind).get(syndrome_int(code, error, kind))


@dataclass(frozen=True)
class DecodeResult:
    positions: frozenset
    correctable: bool

    @property
    def mask(self) -> int:
        return _bits(self.positions)


def _decode_table(code: CssCode, kind: str) -> dict[int, int]:
    key = ("decode", kind)
    table = code._cache.get(key)
    if table is None:
        t = code.t_max
        M = code.z_stabilizers if kind == "X" else code.x_stabilizers
        cols = [M.column(j).bits for j in range(code.n)]
        table = {}
        for w in range(t + 1):
            for combo in itertools.combinations(range(code.n), w):
                s = 0
                for c in combo:
                    s ^= cols[c]
                table.setdefault(s, _bits(combo))
        code._cache[key] = table
    return table


def decode_syndrome(code: CssCode, syndrome: BitVector | int, kind: str) -> DecodeResult:
    """Lowest-weight error of weight <= t_max with this syndrome.

    ``kind`` is the error type: ``'X'`` (syndrome from Z stabilizers) or
    ``'Z'`` (syndrome from X stabilizers).
    """
    kind = kind.upper()[0]
    if kind not in "XZ":
        raise ValueError("kind must be 'X' or 'Z'")
    M = code.z_stabilizers if kind == "X" else code.x_stabilizers
    if isinstance(syndrome, BitVector):
        if syndrome.length != M.nrows:
            raise ValueError(f"syndrome length {syndrome.length} != {M.nrows}")
        syndrome = syndrome.bits
    err = _decode_table(code, kind).get(syndrome)
    if err is None:
        return DecodeResult(frozenset(), False)
    return DecodeResult(frozenset(i for i in range(code.n) if (err >> i) & 1), True)


class StabilizerTableau:
    """Aaronson-Gottesman tableau: rows ``0..q-1`` destabilizers, ``q..2q-1`` stabilizers.

    Row ``(x, z, r)`` stands for ``(-1)^r`` times the tensor product with
    letters X, Z, or Y where both bits are set.
    """

    def __init__(self, q: int):
        self.q = q
        self.x = np.zeros((2 * q + 1, q), dtype=bool)
        self.z = np.zeros((2 * q + 1, q), dtype=bool)
        self.r = np.zeros(2 * q + 1, dtype=bool)

    @classmethod
    def init_zero(cls, q: int) -> "StabilizerTableau":
        t = cls(q)
        for i in range(q):
            t.x[i, i] = True
            t.z[q + i, i] = True
        return t

    @classmethod
    def init_plus(cls, q: int) -> "StabilizerTableau":
        t = cls.init_zero(q)
        for i in range(q):
            t.h(i)
        return t

    @classmethod
    def from_stabilizers(cls, gens: Sequence[PauliOp]) -> "StabilizerTableau":
        """Tableau of the state stabilized by ``gens`` (independent, commuting, Hermitian)."""
        q = gens[0].nqubits
        if len(gens) != q:
            raise ValueError(f"need {q} generators, got {len(gens)}")
        for a, b in itertools.combinations(gens, 2):
            if not a.commutes(b):
                raise ValueError("stabilizer generators must commute")
        # destabilizers: solve symplectic pairing, then make them commute
        rows = [(g.z << q) | g.x for g in gens]
        from .gf2 import BitMatrix, BitVector as BV, solve as gsolve

        A = BitMatrix(tuple(rows), 2 * q)
        destab = []
        for i in range(q):
            sol = gsolve(A, BV(1 << i, q))
            if sol is None:
                raise ValueError("stabilizer generators are not independent")
            destab.append(sol.bits)
        # row . D = g.x * D_low + g.z * D_high, so D_low is D's Z part
        dz = [d & ((1 << q) - 1) for d in destab]
        dx = [d >> q for d in destab]

        def sympl(ax, az, bx, bz):
            return ((ax & bz).bit_count() + (az & bx).bit_count()) & 1

        for i in range(q):
            for j in range(i):
                if sympl(dx[i], dz[i], dx[j], dz[j]):
                    dx[i] ^= gens[j].x
                    dz[i] ^= gens[j].z
        t = cls(q)
        for i in range(q):
            for j in range(q):
                t.x[i, j] = (dx[i] >> j) & 1
                t.z[i, j] = (dz[i] >> j) & 1
            g = gens[i]
            if g.phase - (g.x & g.z).bit_count() & 1:
                raise ValueError(f"generator {g} is not Hermitian")
            t.set_row(q + i, g)
        return t

    def set_row(self, i: int, p: PauliOp) -> None:
        for j in range(self.q):
            self.x[i, j] = (p.x >> j) & 1
            self.z[i, j] = (p.z >> j) & 1
        # AG sign: P = i^phase X^x Z^z = (-1)^r * (Y-letter string), Y = iXZ
        ph = (p.phase - (p.x & p.z).bit_count()) % 4
        self.r[i] = ph == 2

    def row_pauli(self, i: int) -> PauliOp:
        x = _bits(np.flatnonzero(self.x[i]).tolist())
        z = _bits(np.flatnonzero(self.z[i]).tolist())
        return PauliOp(x, z, self.q, 2 * int(self.r[i]) + (x & z).bit_count())

    def stabilizers(self) -> list[PauliOp]:
        return [self.row_pauli(self.q + i) for i in range(self.q)]

    def _check(self, *qs: int) -> None:
        for a in qs:
            if not 0 <= a < self.q:
                raise IndexError(f"qubit {a} out of range for {self.q} qubits")
        if len(set(qs)) != len(qs):
            raise ValueError("qubit indices must be distinct")

    def h(self, a: int) -> None:
        self._check(a)
        self.r ^= self.x[:, a] & self.z[:, a]
        self.x[:, a], self.z[:, a] = self.z[:, a].copy(), self.x[:, a].copy()

    def s(self, a: int) -> None:
        self._check(a)
        self.r ^= self.x[:, a] & self.z[:, a]
        self.z[:, a] ^= self.x[:, a]

    def cnot(self, a: int, b: int) -> None:
        self._check(a, b)
        self.r ^= self.x[:, a] & self.z[:, b] & ~(self.x[:, b] ^ self.z[:, a])
        self.x[:, b] ^= self.x[:, a]
        self.z[:, a] ^= self.z[:, b]

    def cz(self, a: int, b: int) -> None:
        self.h(b)
        self.cnot(a, b)
        self.h(b)

    def pauli_x(self, a: int) -> None:
        self._check(a)
        self.r ^= self.z[:, a]

    def pauli_z(self, a: int) -> None:
        self._check(a)
        self.r ^= self.x[:, a]

    def pauli_y(self, a: int) -> None:
        self._check(a)
        self.r ^= self.x[:, a] ^ self.z[:, a]

    def apply_clifford(self, gate: str, *qubits: int) -> None:
        ops = {"H": self.h, "S": self.s, "X": self.pauli_x, "Y": self.pauli_y,
               "Z": self.pauli_z, "CNOT": self.cnot, "CX": self.cnot, "CZ": self.cz}
        try:
            fn = ops[gate.upper()]
        except KeyError:
            raise ValueError(f"not a supported Clifford gate: {gate!r}") from None
        fn(*qubits)

    def apply_pauli(self, p: PauliOp) -> None:
        """Apply a Pauli operator (signs of rows anticommuting with it flip)."""
        for i in range(2 * self.q):
            xr = _bits(np.flatnonzero(self.x[i]).tolist())
            zr = _bits(np.flatnonzero(self.z[i]).tolist())
            if ((xr & p.z).bit_count() + (zr & p.x).bit_count()) & 1:
                self.r[i] ^= True

    @staticmethod
    def _g(x1, z1, x2, z2):
        # exponent of i when multiplying single-qubit Paulis (AG's g function)
        return np.where(
            ~x1 & ~z1, 0,
            np.where(x1 & z1, z2.astype(int) - x2.astype(int),
                     np.where(x1 & ~z1, z2 * (2 * x2.astype(int) - 1),
                              x2 * (1 - 2 * z2.astype(int)))))

    def _rowsum(self, h: int, i: int) -> None:
        total = 2 * int(self.r[h]) + 2 * int(self.r[i]) + int(
            np.sum(self._g(self.x[i], self.z[i], self.x[h], self.z[h])))
        self.r[h] = (total % 4) == 2
        self.x[h] ^= self.x[i]
        self.z[h] ^= self.z[i]

    def measure(self, basis: str, a: int, rng: np.random.Generator | None = None,
                forced: int | None = None) -> tuple[int, bool]:
        """Measure qubit ``a`` in the X or Z basis.

        Returns ``(outcome_bit, deterministic)``; a random outcome comes from
        ``forced`` if given, else from ``rng``.
        """
        self._check(a)
        basis = basis.upper()
        if basis == "X":
            self.h(a)
            try:
                return self.measure("Z", a, rng, forced)
            finally:
                self.h(a)
        if basis != "Z":
            raise ValueError("basis must be 'X' or 'Z'")
        q = self.q
        hits = np.flatnonzero(self.x[q:2 * q, a])
        if hits.size:
            p = q + int(hits[0])
            for i in range(2 * q):
                if i != p and self.x[i, a]:
                    self._rowsum(i, p)
            self.x[p - q], self.z[p - q], self.r[p - q] = self.x[p], self.z[p], self.r[p]
            self.x[p] = False
            self.z[p] = False
            self.z[p, a] = True
            if forced is None:
                if rng is None:
                    raise ValueError("random outcome needs rng or forced")
                forced = int(rng.integers(2))
            self.r[p] = bool(forced)
            return int(forced), False
        s = 2 * q
        self.x[s] = False
        self.z[s] = False
        self.r[s] = False
        for i in np.flatnonzero(self.x[:q, a]):
            self._rowsum(s, int(i) + q)
        return int(self.r[s]), True

    def expectation(self, p: PauliOp) -> int:
        """+1 or -1 if ``±p`` is in the stabilizer group, else 0."""
        stabs = self.stabilizers()
        if not all(p.commutes(s) for s in stabs):
            return 0
        prod = PauliOp.identity(self.q)
        for i in range(self.q):
            d = self.row_pauli(i)
            if not d.commutes(p):
                prod = prod * stabs[i]
        if prod.x != p.x or prod.z != p.z:
            return 0
        diff = (prod.phase - p.phase) % 4
        if diff == 0:
            return 1
        if diff == 2:
            return -1
        raise ValueError(f"{p} is not Hermitian")

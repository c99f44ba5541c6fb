"""Exact statevector reference simulator for at most 20 qubits.

Qubit ``i`` is tensor axis ``i`` (qubit 0 is the most significant bit of a
basis index).  States are immutable; every operation returns a new state.
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .paulisim import ErrorFrame, PauliOp

__all__ = [
    "MAX_QUBITS",
    "PureState",
    "FactoredState",
    "SINGLE_QUBIT_STATES",
    "single_qubit_state",
    "gate_matrix",
    "pauli_matrix",
    "frame_matrix",
    "apply",
    "measure",
    "fidelity",
    "state_fidelity",
    "conjugation_oracle",
    "FrameGroupViolation",
    "run_reference",
]

MAX_QUBITS = 20
TOL = 1e-10

_S2 = 1 / np.sqrt(2)
SINGLE_QUBIT_STATES = {
    "0": np.array([1, 0], dtype=complex),
    "1": np.array([0, 1], dtype=complex),
    "+": np.array([_S2, _S2], dtype=complex),
    "-": np.array([_S2, -_S2], dtype=complex),
    "+i": np.array([_S2, 1j * _S2], dtype=complex),
    "-i": np.array([_S2, -1j * _S2], dtype=complex),
}

_I = np.eye(2, dtype=complex)
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Z = np.array([[1, 0], [0, -1]], dtype=complex)
_H = np.array([[1, 1], [1, -1]], dtype=complex) * _S2
_S = np.diag([1, 1j])
_ONE_QUBIT = {"X": _X, "Z": _Z, "H": _H, "Y": 1j * _X @ _Z, "S": _S}
_ARITY = {"X": 1, "Y": 1, "Z": 1, "H": 1, "S": 1, "CZ": 2, "CCZ": 3}


class FrameGroupViolation(ValueError):
    """A conjugated operator has no Pauli+CZ frame representation."""


def single_qubit_state(label: str) -> np.ndarray:
    try:
        return SINGLE_QUBIT_STATES[label].copy()
    except KeyError:
        raise ValueError(f"unknown state {label!r}; expected one of {sorted(SINGLE_QUBIT_STATES)}") from None


def _check_q(q: int) -> None:
    if not 0 <= q <= MAX_QUBITS:
        raise ValueError(f"statevector limited to {MAX_QUBITS} qubits, got {q}")


def _check_indices(q: int, indices: Sequence[int]) -> None:
    for i in indices:
        if not 0 <= i < q:
            raise IndexError(f"qubit {i} out of range for {q} qubits")
    if len(set(indices)) != len(indices):
        raise ValueError(f"indices must be distinct: {tuple(indices)}")


@dataclass(frozen=True, eq=False)
class PureState:
    amplitudes: np.ndarray
    q: int

    def __post_init__(self):
        _check_q(self.q)
        a = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if a.size != 1 << self.q:
            raise ValueError(f"need {1 << self.q} amplitudes for {self.q} qubits, got {a.size}")
        if abs(np.vdot(a, a).real - 1) > 1e-8:
            raise ValueError("state is not normalized")
        a.setflags(write=False)
        object.__setattr__(self, "amplitudes", a)

    @classmethod
    def zero(cls, q: int) -> "PureState":
        a = np.zeros(1 << q, dtype=complex)
        a[0] = 1
        return cls(a, q)

    @classmethod
    def product(cls, labels: Sequence[str]) -> "PureState":
        """Product of single-qubit states named by ``0 1 + - +i -i``."""
        _check_q(len(labels))
        a = np.ones(1, dtype=complex)
        for lab in labels:
            a = np.kron(a, single_qubit_state(lab))
        return cls(a, len(labels))

    @classmethod
    def from_vector(cls, v) -> "PureState":
        v = np.asarray(v, dtype=complex).reshape(-1)
        q = int(round(np.log2(v.size)))
        return cls(v / np.linalg.norm(v), q)

    def tensor(self) -> np.ndarray:
        return self.amplitudes.reshape((2,) * self.q)

    def kron(self, other: "PureState") -> "PureState":
        return PureState(np.kron(self.amplitudes, other.amplitudes), self.q + other.q)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def reduced(self, qubit: int) -> np.ndarray:
        """2x2 reduced density matrix of one qubit."""
        _check_indices(self.q, [qubit])
        t = np.moveaxis(self.tensor(), qubit, 0).reshape(2, -1)
        return t @ t.conj().T

    def permute(self, order: Sequence[int]) -> "PureState":
        """New state whose qubit ``i`` is old qubit ``order[i]``."""
        if sorted(order) != list(range(self.q)):
            raise ValueError("order must be a permutation")
        return PureState(np.transpose(self.tensor(), order).reshape(-1), self.q)

    def drop(self, qubit: int, vector: np.ndarray) -> "PureState":
        """Remove a qubit known to be in the product state ``vector``."""
        t = np.moveaxis(self.tensor(), qubit, 0)
        rest = np.tensordot(np.conj(vector), t, axes=(0, 0)).reshape(-1)
        nrm = np.linalg.norm(rest)
        if abs(nrm - 1) > 1e-8:
            raise ValueError("qubit is not in the given product state")
        return PureState(rest / nrm, self.q - 1)

    def apply_matrix(self, U: np.ndarray, indices: Sequence[int]) -> "PureState":
        k = len(indices)
        _check_indices(self.q, indices)
        t = self.tensor()
        U = np.asarray(U, dtype=complex).reshape((2,) * (2 * k))
        out = np.tensordot(U, t, axes=(list(range(k, 2 * k)), list(indices)))
        out = np.moveaxis(out, list(range(k)), list(indices))
        return PureState(out.reshape(-1), self.q)


def gate_matrix(gate: str) -> np.ndarray:
    gate = gate.upper()
    if gate in _ONE_QUBIT:
        return _ONE_QUBIT[gate].copy()
    if gate == "CZ":
        return np.diag([1, 1, 1, -1]).astype(complex)
    if gate == "CCZ":
        return np.diag([1] * 7 + [-1]).astype(complex)
    raise ValueError(f"unsupported gate {gate!r}")


def apply(state: PureState, gate: str, indices: Sequence[int]) -> PureState:
    gate = gate.upper()
    if gate not in _ARITY:
        raise ValueError(f"unsupported gate {gate!r}")
    indices = tuple(indices)
    if len(indices) != _ARITY[gate]:
        raise ValueError(f"{gate} takes {_ARITY[gate]} qubit(s)")
    _check_indices(state.q, indices)
    if gate in ("CZ", "CCZ"):
        # diagonal: flip sign of the all-ones slice
        t = np.array(state.tensor())
        sl = [slice(None)] * state.q
        for i in indices:
            sl[i] = 1
        t[tuple(sl)] *= -1
        return PureState(t.reshape(-1), state.q)
    return state.apply_matrix(gate_matrix(gate), indices)


_BASIS = {
    "Z": (SINGLE_QUBIT_STATES["0"], SINGLE_QUBIT_STATES["1"]),
    "X": (SINGLE_QUBIT_STATES["+"], SINGLE_QUBIT_STATES["-"]),
}


def measure(state: PureState, qubit: int, basis: str, rng: np.random.Generator,
            keep: bool = True) -> tuple[int, PureState]:
    """Born-rule measurement; outcome 0 means ``|0>`` or ``|+>``.

    With ``keep=False`` the measured qubit is removed from the post-state.
    """
    _check_indices(state.q, [qubit])
    vecs = _BASIS[basis.upper()]
    t = np.moveaxis(state.tensor(), qubit, 0)
    branches = [np.tensordot(np.conj(v), t, axes=(0, 0)) for v in vecs]
    p0 = float(np.vdot(branches[0], branches[0]).real)
    outcome = int(rng.random() >= p0)
    rest = branches[outcome] / np.linalg.norm(branches[outcome])
    if not keep:
        return outcome, PureState(rest.reshape(-1), state.q - 1)
    full = np.multiply.outer(vecs[outcome], rest)
    return outcome, PureState(np.moveaxis(full, 0, qubit).reshape(-1), state.q)


def fidelity(a: PureState, b: PureState) -> float:
    """``|<a|b>|^2``."""
    if a.q != b.q:
        raise ValueError(f"qubit count mismatch: {a.q} != {b.q}")
    return float(abs(np.vdot(a.amplitudes, b.amplitudes)) ** 2)


def state_fidelity(rho: np.ndarray, sigma: np.ndarray) -> float:
    """Uhlmann fidelity of two single-qubit density matrices."""
    val = np.trace(rho @ sigma).real + 2 * np.sqrt(max(np.linalg.det(rho).real, 0.0) * max(np.linalg.det(sigma).real, 0.0))
    return float(min(max(val, 0.0), 1.0))


def pauli_matrix(p: PauliOp) -> np.ndarray:
    """Dense matrix of ``i^phase X^x Z^z`` with qubit 0 most significant."""
    return (1j) ** p.phase * _xz_matrix(p.x, p.z, p.nqubits)


@functools.lru_cache(maxsize=4096)
def _xz_matrix(x: int, z: int, q: int) -> np.ndarray:
    xs, zs = np.ones((1, 1)), np.ones((1, 1))
    for i in range(q):
        xs = np.kron(xs, _X if (x >> i) & 1 else _I)
        zs = np.kron(zs, _Z if (z >> i) & 1 else _I)
    M = xs @ zs
    M.setflags(write=False)
    return M


def _diag_cz(q: int, a: int, b: int) -> np.ndarray:
    idx = np.arange(1 << q)
    bit = lambda i: (idx >> (q - 1 - i)) & 1  # noqa: E731
    return np.diag(np.where(bit(a) & bit(b), -1, 1)).astype(complex)


def frame_matrix(frame: ErrorFrame) -> np.ndarray:
    M = pauli_matrix(frame.pauli)
    for a, b in sorted(frame.cz):
        M = M @ _diag_cz(frame.nqubits, a, b)
    return M


@functools.lru_cache(maxsize=None)
def _embed(gate: str, indices: tuple, q: int) -> np.ndarray:
    U = np.eye(1 << q, dtype=complex)
    cols = [PureState(U[:, j], q) for j in range(1 << q)]
    return np.stack([apply(c, gate, indices).amplitudes for c in cols], axis=1)


@functools.lru_cache(maxsize=None)
def _frame_basis(q: int):
    """All CZ products (stacked) and the stacked Pauli basis on ``q`` qubits."""
    pairs = list(itertools.combinations(range(q), 2))
    czs, mats = [], []
    for mask in range(1 << len(pairs)):
        cz = frozenset(p for i, p in enumerate(pairs) if (mask >> i) & 1)
        C = np.eye(1 << q, dtype=complex)
        for a, b in cz:
            C = C @ _diag_cz(q, a, b)
        czs.append(cz)
        mats.append(C)
    keys = [(x, z) for x in range(1 << q) for z in range(1 << q)]
    paulis = np.stack([pauli_matrix(PauliOp(x, z, q)) for x, z in keys])
    # rows of conj(P) flattened, so Hilbert-Schmidt overlaps become one matrix product
    overlap = paulis.conj().reshape(len(keys), -1) / (1 << q)
    diags = np.stack([np.diagonal(C) for C in mats])
    return czs, diags, keys, overlap


def conjugation_oracle(gate: str, indices: Sequence[int], frame: ErrorFrame | PauliOp) -> ErrorFrame:
    """``g E g^dagger`` matched by brute force against every Pauli+CZ frame on <= 3 qubits."""
    if isinstance(frame, PauliOp):
        frame = ErrorFrame(frame)
    q = frame.nqubits
    if q > 3:
        raise ValueError("oracle limited to 3 qubits")
    G = _embed(gate.upper(), tuple(indices), q)
    target = G @ frame_matrix(frame) @ G.conj().T
    czs, diags, keys, overlap = _frame_basis(q)
    # target = P C  =>  P = target C^dagger must be a Pauli; CZ products are real diagonal
    Ps = target[None, :, :] * diags[:, None, :]
    coeffs = Ps.reshape(len(czs), -1) @ overlap.T
    for c_idx, k_idx in zip(*np.nonzero(np.abs(np.abs(coeffs) - 1) < TOL)):
        c = coeffs[c_idx, k_idx]
        for ph in range(4):
            if abs(c - (1j) ** ph) < 1e-9:
                x, z = keys[k_idx]
                return ErrorFrame(PauliOp(x, z, q, ph), czs[c_idx])
    raise FrameGroupViolation(f"{gate}{tuple(indices)} maps {frame} outside the Pauli+CZ group")


@dataclass
class FactoredState:
    """Tensor product of independent :class:`PureState` groups, one entry per wire.

    Groups merge only when a multi-qubit gate spans them, so circuits on many
    wires stay cheap as long as no entangled cluster exceeds the qubit cap.
    """

    groups: dict = field(default_factory=dict)  # gid -> (PureState, [wire ids])
    where: dict = field(default_factory=dict)  # wire -> gid
    _next: int = 0

    @classmethod
    def product(cls, labels: dict) -> "FactoredState":
        s = cls()
        for w, lab in labels.items():
            s.add_wire(w, lab)
        return s

    def add_wire(self, wire, label: str = "0") -> None:
        if wire in self.where:
            raise ValueError(f"wire {wire} already present")
        gid = self._next
        self._next += 1
        self.groups[gid] = (PureState(single_qubit_state(label), 1), [wire])
        self.where[wire] = gid

    def wires(self) -> list:
        return sorted(self.where)

    def _merge(self, wires: Sequence) -> int:
        gids = sorted({self.where[w] for w in wires})
        g0 = gids[0]
        st, ws = self.groups[g0]
        for g in gids[1:]:
            s2, w2 = self.groups.pop(g)
            if st.q + s2.q > MAX_QUBITS:
                raise ValueError(f"entangled cluster would exceed {MAX_QUBITS} qubits")
            st = st.kron(s2)
            ws = ws + w2
            for w in w2:
                self.where[w] = g0
        self.groups[g0] = (st, ws)
        return g0

    def apply(self, gate: str, wires: Sequence) -> None:
        gid = self._merge(wires)
        st, ws = self.groups[gid]
        self.groups[gid] = (apply(st, gate, [ws.index(w) for w in wires]), ws)

    def measure(self, wire, basis: str, rng: np.random.Generator) -> int:
        """Measure and remove ``wire``."""
        gid = self.where.pop(wire)
        st, ws = self.groups[gid]
        outcome, post = measure(st, ws.index(wire), basis, rng, keep=False)
        ws = [w for w in ws if w != wire]
        if ws:
            self.groups[gid] = (post, ws)
        else:
            del self.groups[gid]
        return outcome

    def rename(self, old, new) -> None:
        if new in self.where:
            raise ValueError(f"wire {new} already present")
        gid = self.where.pop(old)
        st, ws = self.groups[gid]
        self.groups[gid] = (st, [new if w == old else w for w in ws])
        self.where[new] = gid

    def reduced(self, wire) -> np.ndarray:
        st, ws = self.groups[self.where[wire]]
        return st.reduced(ws.index(wire))

    def joint(self, order: Sequence) -> PureState:
        """Full statevector over ``order`` (subject to the qubit cap)."""
        if len(order) > MAX_QUBITS:
            raise ValueError(f"joint state limited to {MAX_QUBITS} qubits")
        st = PureState(np.ones(1, dtype=complex), 0)
        ws: list = []
        for gid in sorted({self.where[w] for w in order}):
            s, w = self.groups[gid]
            st = st.kron(s)
            ws += w
        return st.permute([ws.index(w) for w in order])

    def copy(self) -> "FactoredState":
        return FactoredState({g: (s, list(w)) for g, (s, w) in self.groups.items()},
                             dict(self.where), self._next)


def run_reference(gates: Iterable[tuple[str, Sequence[int]]], inputs: Sequence[str]) -> FactoredState:
    """Ideal execution of a gate list on product inputs (wire ``i`` starts in ``inputs[i]``)."""
    state = FactoredState.product({i: lab for i, lab in enumerate(inputs)})
    for gate, wires in gates:
        state.apply(gate, wires)
    return state

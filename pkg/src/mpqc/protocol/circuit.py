"""Logical circuits over ``n`` wires and their text format.

File format, one statement per line, wires 1-based::

    # comment
    input 1 +
    ancilla 4
    h 1
    cz 1 2
    ccz 1 2 3
    x 3
    z 2

``ancilla j`` makes wire ``j`` start in a jointly prepared ``|0>`` instead of
its node's input.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from ..refsim import SINGLE_QUBIT_STATES

GATE_ARITY = {"CCZ": 3, "CZ": 2, "H": 1, "X": 1, "Z": 1}


class CircuitError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


@dataclass(frozen=True)
class Gate:
    name: str
    wires: tuple[int, ...]  # 0-based

    def __str__(self) -> str:
        return " ".join([self.name.lower(), *(str(w + 1) for w in self.wires)])


@dataclass(frozen=True)
class Circuit:
    wires: int
    gates: tuple[Gate, ...] = ()
    ancillas: frozenset = frozenset()
    inputs: dict = field(default_factory=dict)  # wire -> state label from the file

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        object.__setattr__(self, "ancillas", frozenset(self.ancillas))
        for g in self.gates:
            if g.name not in GATE_ARITY:
                raise CircuitError(f"unsupported gate {g.name!r}")
            if len(g.wires) != GATE_ARITY[g.name]:
                raise CircuitError(f"{g.name} takes {GATE_ARITY[g.name]} wire(s)")
            if len(set(g.wires)) != len(g.wires):
                raise CircuitError(f"{g.name} wires must be distinct: {g}")
            for w in g.wires:
                if not 0 <= w < self.wires:
                    raise CircuitError(f"wire {w + 1} out of range 1..{self.wires}")
        for w in self.ancillas:
            if not 0 <= w < self.wires:
                raise CircuitError(f"ancilla wire {w + 1} out of range 1..{self.wires}")
        for w, lab in self.inputs.items():
            if lab not in SINGLE_QUBIT_STATES:
                raise CircuitError(f"unknown input state {lab!r}")
            if w in self.ancillas:
                raise CircuitError(f"wire {w + 1} is both an input and an ancilla")

    @classmethod
    def identity(cls, wires: int) -> "Circuit":
        return cls(wires)

    def h_count(self) -> int:
        return sum(g.name == "H" for g in self.gates)

    def with_wires(self, wires: int) -> "Circuit":
        return Circuit(wires, self.gates, self.ancillas, dict(self.inputs))

    def to_text(self) -> str:
        lines = [f"input {w + 1} {lab}" for w, lab in sorted(self.inputs.items())]
        lines += [f"ancilla {w + 1}" for w in sorted(self.ancillas)]
        lines += [str(g) for g in self.gates]
        return "\n".join(lines) + ("\n" if lines else "")


def parse_circuit(text: str, wires: int | None = None) -> Circuit:
    """Parse the circuit text format.  ``wires`` defaults to the largest index used."""
    gates: list[Gate] = []
    ancillas: set[int] = set()
    inputs: dict[int, str] = {}
    top = 0

    def wire(tok: str, lineno: int) -> int:
        try:
            w = int(tok)
        except ValueError:
            raise CircuitError(f"bad wire index {tok!r}", lineno) from None
        if w < 1 or (wires is not None and w > wires):
            raise CircuitError(f"wire {w} out of range 1..{wires if wires else 'n'}", lineno)
        return w - 1

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        op = tok[0].lower()
        if op == "input":
            if len(tok) != 3:
                raise CircuitError("expected 'input <wire> <state>'", lineno)
            w = wire(tok[1], lineno)
            if tok[2] not in SINGLE_QUBIT_STATES:
                raise CircuitError(f"unknown state {tok[2]!r}; use one of 0 1 + - +i -i", lineno)
            inputs[w] = tok[2]
        elif op == "ancilla":
            if len(tok) != 2:
                raise CircuitError("expected 'ancilla <wire>'", lineno)
            ancillas.add(wire(tok[1], lineno))
        elif op.upper() in GATE_ARITY:
            name = op.upper()
            args = [wire(t, lineno) for t in tok[1:]]
            if len(args) != GATE_ARITY[name]:
                raise CircuitError(f"{op} takes {GATE_ARITY[name]} wire(s), got {len(args)}", lineno)
            if len(set(args)) != len(args):
                raise CircuitError(f"{op} wires must be distinct", lineno)
            gates.append(Gate(name, tuple(args)))
        else:
            raise CircuitError(f"unknown statement {tok[0]!r}", lineno)
        top = max([top] + [w + 1 for w in inputs] + [w + 1 for w in ancillas]
                  + [w + 1 for g in gates for w in g.wires])
    bad = ancillas & set(inputs)
    if bad:
        raise CircuitError(f"wire {min(bad) + 1} is both an input and an ancilla")
    return Circuit(wires if wires is not None else top, tuple(gates), frozenset(ancillas), inputs)


def load_circuit(path: str | Path, wires: int | None = None) -> Circuit:
    return parse_circuit(Path(path).read_text(), wires)


def random_circuit(wires: int, rng: np.random.Generator, max_gates: int = 12,
                   active: int | None = None, gate_set: Sequence[str] = ("CCZ", "CZ", "H", "X", "Z")) -> Circuit:
    """Uniformly random gate list of length 1..max_gates on the first ``active`` wires."""
    active = wires if active is None else active
    gates = []
    for _ in range(int(rng.integers(1, max_gates + 1))):
        name = gate_set[int(rng.integers(len(gate_set)))]
        ws = rng.choice(active, size=GATE_ARITY[name], replace=False)
        gates.append(Gate(name, tuple(int(w) for w in ws)))
    return Circuit(wires, tuple(gates))

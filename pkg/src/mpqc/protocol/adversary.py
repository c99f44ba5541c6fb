"""Non-adaptive adversaries: a fixed corrupted node set plus deviation hooks.

Node indices are 0-based in the Python API and 1-based in spec strings::

    honest
    pauli-inject:nodes=3,7;weight=1;phase=sharing;pauli=X;block=1;level=2
    liar:nodes=3;rounds=all
    liar:nodes=3;rounds=alternate;invocation=1
    forge-measure:nodes=3;blocks=1
    chosen-input:nodes=3;state=1

Several strategies combine with ``+``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable

import numpy as np

PHASES = ("sharing", "ancilla", "computation", "reconstruction")


class AdversaryError(ValueError):
    """Malformed adversary spec or a hook touching qubits the adversary does not hold."""


@dataclass(frozen=True)
class InjectionPoint:
    phase: str
    wire: int | None  # logical wire of the register, None for an unattached ancilla
    invocation: int | None  # VHSS invocation about to verify the register, if any


@dataclass(frozen=True)
class Announcement:
    kind: str  # "verify-x", "verify-z" or "measure"
    invocation: int | None
    round: int | None
    wire: int | None


# an injected error: (letter, block a, position b); b=None means a logical
# Pauli on level-2 block a, available to node a as that block's encoder
Injection = tuple


class AdversaryStrategy:
    """Honest behaviour; subclasses override the hooks they deviate in."""

    name = "honest"

    def __init__(self, corrupted: Iterable[int] = ()):
        self.corrupted = frozenset(int(c) for c in corrupted)
        self.rng: np.random.Generator | None = None
        self.n: int | None = None

    def bind(self, n: int, rng: np.random.Generator) -> None:
        for c in self.corrupted:
            if not 0 <= c < n:
                raise AdversaryError(f"corrupted node {c + 1} out of range 1..{n}")
        self.n = n
        self.rng = rng

    def choose_input(self, wire: int, proposed: str) -> str:
        return proposed

    def inject(self, point: InjectionPoint) -> list[Injection]:
        return []

    def forge(self, ann: Announcement, node: int, bits: int) -> int:
        return bits

    def spec(self) -> str:
        return "honest"

    def _nodes_spec(self) -> str:
        return ",".join(str(c + 1) for c in sorted(self.corrupted))


class PauliInjector(AdversaryStrategy):
    """Inject a Pauli error through corrupted nodes at one phase point.

    ``level=2``: physical errors on ``weight`` corrupted columns of level-2
    block ``block``.  ``level=1``: each of ``weight`` corrupted nodes, as the
    encoder of its own level-2 block, applies a logical Pauli to it.
    """

    name = "pauli-inject"

    def __init__(self, corrupted, weight: int = 1, phase: str = "sharing", pauli: str = "X",
                 block: int = 0, level: int = 2, wires: Iterable[int] | None = None):
        super().__init__(corrupted)
        if phase not in PHASES:
            raise AdversaryError(f"phase must be one of {', '.join(PHASES)}")
        if pauli not in ("X", "Y", "Z"):
            raise AdversaryError("pauli must be X, Y or Z")
        if level not in (1, 2):
            raise AdversaryError("level must be 1 or 2")
        if level == 1 and phase not in ("sharing", "ancilla"):
            raise AdversaryError("level-1 injection needs an encoding phase (sharing or ancilla)")
        if not 0 <= weight <= len(self.corrupted):
            raise AdversaryError(f"weight {weight} exceeds the {len(self.corrupted)} corrupted node(s)")
        self.weight, self.phase, self.pauli = weight, phase, pauli
        self.block, self.level = block, level
        self.wires = None if wires is None else frozenset(wires)

    def inject(self, point: InjectionPoint) -> list[Injection]:
        if point.phase != self.phase:
            return []
        if self.wires is not None and point.wire not in self.wires:
            return []
        nodes = sorted(self.corrupted)[: self.weight]
        if self.level == 1:
            return [(self.pauli, a, None) for a in nodes]
        return [(self.pauli, self.block, b) for b in nodes]

    def spec(self) -> str:
        s = (f"{self.name}:nodes={self._nodes_spec()};weight={self.weight};phase={self.phase};"
             f"pauli={self.pauli};block={self.block + 1};level={self.level}")
        if self.wires is not None:
            s += ";wires=" + ",".join(str(w + 1) for w in sorted(self.wires))
        return s


class Liar(AdversaryStrategy):
    """Flip announced verification bits.

    ``rounds='all'`` lies in every round; ``'alternate'`` lies in each round
    with probability 1/2 from the adversary stream.  ``invocation`` limits
    lying to one VHSS invocation (0-based; default: all for ``all``, the
    first for ``alternate``).
    """

    name = "liar"

    def __init__(self, corrupted, rounds: str = "all", invocation: int | None | str = "default",
                 block: int = 0):
        super().__init__(corrupted)
        if rounds not in ("all", "alternate"):
            raise AdversaryError("rounds must be 'all' or 'alternate'")
        self.rounds = rounds
        if invocation == "default":
            invocation = None if rounds == "all" else 0
        self.invocation = invocation
        self.block = block
        self._decided: dict = {}

    def lying(self, ann: Announcement) -> bool:
        if not ann.kind.startswith("verify"):
            return False
        if self.invocation is not None and ann.invocation != self.invocation:
            return False
        if self.rounds == "all":
            return True
        key = (ann.invocation, ann.round)
        if key not in self._decided:
            self._decided[key] = bool(self.rng.integers(2))
        return self._decided[key]

    def forge(self, ann: Announcement, node: int, bits: int) -> int:
        return bits ^ (1 << self.block) if self.lying(ann) else bits

    def spec(self) -> str:
        inv = "all" if self.invocation is None else str(self.invocation + 1)
        return f"{self.name}:nodes={self._nodes_spec()};rounds={self.rounds};invocation={inv}"


class MeasurementForger(AdversaryStrategy):
    """Flip announced X-measurement bits during gate teleportation."""

    name = "forge-measure"

    def __init__(self, corrupted, blocks: int = 1):
        super().__init__(corrupted)
        self.blocks = blocks

    def forge(self, ann: Announcement, node: int, bits: int) -> int:
        if ann.kind != "measure":
            return bits
        return bits ^ ((1 << self.blocks) - 1)

    def spec(self) -> str:
        return f"{self.name}:nodes={self._nodes_spec()};blocks={self.blocks}"


class ChosenInput(AdversaryStrategy):
    """Corrupted dealers substitute their own input state."""

    name = "chosen-input"

    def __init__(self, corrupted, state: str = "1"):
        super().__init__(corrupted)
        self.state = state

    def choose_input(self, wire: int, proposed: str) -> str:
        return self.state

    def spec(self) -> str:
        return f"{self.name}:nodes={self._nodes_spec()};state={self.state}"


class CompositeAdversary(AdversaryStrategy):
    name = "composite"

    def __init__(self, parts: list[AdversaryStrategy]):
        super().__init__(frozenset().union(*(p.corrupted for p in parts)))
        self.parts = parts

    def bind(self, n, rng):
        super().bind(n, rng)
        for p in self.parts:
            p.bind(n, rng)

    def choose_input(self, wire, proposed):
        for p in self.parts:
            proposed = p.choose_input(wire, proposed) if wire in p.corrupted else proposed
        return proposed

    def inject(self, point):
        return [e for p in self.parts for e in p.inject(point)]

    def forge(self, ann, node, bits):
        for p in self.parts:
            if node in p.corrupted:
                bits = p.forge(ann, node, bits)
        return bits

    def spec(self):
        return "+".join(p.spec() for p in self.parts)


def _parse_nodes(value: str) -> list[int]:
    try:
        nodes = [int(v) - 1 for v in value.split(",") if v.strip()]
    except ValueError:
        raise AdversaryError(f"bad node list {value!r}") from None
    if any(v < 0 for v in nodes):
        raise AdversaryError("node indices are 1-based")
    return nodes


def _parse_one(spec: str) -> AdversaryStrategy:
    name, _, rest = spec.strip().partition(":")
    name = name.strip().lower()
    opts: dict[str, str] = {}
    for item in filter(None, (s.strip() for s in rest.split(";"))):
        key, eq, val = item.partition("=")
        if not eq:
            raise AdversaryError(f"expected key=value, got {item!r}")
        opts[key.strip().lower()] = val.strip()

    def take(key, default=None):
        return opts.pop(key, default)

    def as_int(key, default):
        v = take(key)
        if v is None:
            return default
        try:
            return int(v)
        except ValueError:
            raise AdversaryError(f"{key} must be an integer, got {v!r}") from None

    if name in ("", "honest", "none"):
        adv: AdversaryStrategy = AdversaryStrategy()
    else:
        if "nodes" not in opts:
            raise AdversaryError(f"{name} needs nodes=...")
        nodes = _parse_nodes(take("nodes"))
        if name == "pauli-inject":
            wires = take("wires")
            adv = PauliInjector(
                nodes, weight=as_int("weight", 1), phase=take("phase", "sharing").lower(),
                pauli=take("pauli", "X").upper(), block=as_int("block", 1) - 1,
                level=as_int("level", 2),
                wires=None if wires is None else _parse_nodes(wires))
        elif name == "liar":
            inv = take("invocation", "default")
            if inv not in ("default", "all"):
                try:
                    inv = int(inv) - 1
                except ValueError:
                    raise AdversaryError(f"invocation must be a number or 'all', got {inv!r}") from None
            adv = Liar(nodes, rounds=take("rounds", "all").lower(),
                       invocation=None if inv == "all" else inv, block=as_int("block", 1) - 1)
        elif name == "forge-measure":
            adv = MeasurementForger(nodes, blocks=as_int("blocks", 1))
        elif name == "chosen-input":
            adv = ChosenInput(nodes, state=take("state", "1"))
        else:
            raise AdversaryError(f"unknown adversary {name!r}")
    if opts:
        raise AdversaryError(f"unknown option(s) for {name or 'honest'}: {', '.join(sorted(opts))}")
    return adv


# "+" also appears in input states such as "+i", so split only before a strategy name
_SPLIT = re.compile(r"\+(?=\s*(?:honest|none|pauli-inject|liar|forge-measure|chosen-input)\b)", re.I)


def parse_adversary(spec: str | None) -> AdversaryStrategy:
    """Build a strategy from its spec string (see module docstring)."""
    if spec is None or not spec.strip():
        return AdversaryStrategy()
    parts = [_parse_one(p) for p in _SPLIT.split(spec)]
    return parts[0] if len(parts) == 1 else CompositeAdversary(parts)

"""Public record of a protocol run."""

from __future__ import annotations

import json
from dataclasses import dataclass, field


@dataclass(frozen=True)
class Accusation:
    node: int  # 0-based
    reason: str
    phase: str
    invocation: int | None

    def to_dict(self) -> dict:
        return {"node": self.node + 1, "reason": self.reason, "phase": self.phase,
                "invocation": None if self.invocation is None else self.invocation + 1}


@dataclass
class Transcript:
    """Broadcast log, accusations and accounting; ``abort`` is set only by the final decision."""

    phases: list = field(default_factory=list)
    broadcasts: list = field(default_factory=list)
    accusations: list = field(default_factory=list)
    snapshots: dict = field(default_factory=dict)  # phase -> sorted accused nodes after it
    kappa: int = 0
    reshares: int = 0
    invocations: list = field(default_factory=list)  # (purpose, wire) per VHSS invocation
    failures: list = field(default_factory=list)
    abort: bool | None = None
    qubit_peak_per_node: int = 0
    qubit_usage_peak: int = 0
    outputs: list = field(default_factory=list)

    def accused(self) -> frozenset:
        return frozenset(a.node for a in self.accusations)

    def accuse(self, node: int, reason: str, phase: str, invocation: int | None) -> None:
        self.accusations.append(Accusation(node, reason, phase, invocation))

    def enter(self, phase: str) -> None:
        if self.abort is not None:
            raise RuntimeError("run already decided")
        self.phases.append(phase)

    def close(self, phase: str) -> None:
        self.snapshots[phase] = sorted(self.accused())

    def to_dict(self) -> dict:
        return {
            "phases": list(self.phases),
            "broadcasts": list(self.broadcasts),
            "accusations": [a.to_dict() for a in self.accusations],
            "accused": [a + 1 for a in sorted(self.accused())],
            "snapshots": {p: [a + 1 for a in s] for p, s in self.snapshots.items()},
            "kappa": self.kappa,
            "reshares": self.reshares,
            "invocations": [{"purpose": p, "wire": None if w is None else w + 1}
                            for p, w in self.invocations],
            "failures": list(self.failures),
            "abort": self.abort,
            "qubit_peak_per_node": self.qubit_peak_per_node,
            "qubit_usage_peak": self.qubit_usage_peak,
            "outputs": list(self.outputs),
        }

    def to_json(self, indent: int | None = None) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=indent)

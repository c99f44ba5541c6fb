"""Simulation of the multi-party computation protocol over two-level encoded shares."""

from .adversary import (PHASES, AdversaryError, AdversaryStrategy, Announcement, ChosenInput,
                        CompositeAdversary, InjectionPoint, Liar, MeasurementForger, PauliInjector,
                        parse_adversary)
from .circuit import Circuit, CircuitError, Gate, load_circuit, parse_circuit, random_circuit
from .engine import (ConfigError, NodeState, PoolExhaustedError, ProtocolConfig, ProtocolRun, RunResult,
                     abort_decision, bound_violation, default_t, run_protocol)
from .transcript import Accusation, Transcript

__all__ = [
    "PHASES", "AdversaryError", "AdversaryStrategy", "Announcement", "ChosenInput", "CompositeAdversary",
    "InjectionPoint", "Liar", "MeasurementForger", "PauliInjector", "parse_adversary",
    "Circuit", "CircuitError", "Gate", "load_circuit", "parse_circuit", "random_circuit",
    "ConfigError", "NodeState", "PoolExhaustedError", "ProtocolConfig", "ProtocolRun", "RunResult",
    "abort_decision", "bound_violation", "default_t", "run_protocol", "Accusation", "Transcript",
]

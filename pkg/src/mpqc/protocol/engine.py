"""Protocol engine: sharing, verification, computation, reconstruction, decision.

Each logical wire lives in a register of ``n`` blocks of ``n`` physical
qubits.  Physical qubit ``(a, b)`` of a register is qubit ``b`` of level-2
block ``a`` and is held by node ``b``; its global frame index is
``slot * n**2 + a * n + b``.  Honest operations act on a reference state
over logical wires, and only deviations are tracked in one global
:class:`ErrorFrame`.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..codes import CssCode
from ..paulisim import ErrorFrame, PauliOp, conjugate, decode_mask
from ..refsim import MAX_QUBITS, FactoredState, apply, fidelity, run_reference, state_fidelity
from ..refsim import SINGLE_QUBIT_STATES
from .adversary import AdversaryError, AdversaryStrategy, Announcement, InjectionPoint
from .circuit import Circuit
from .transcript import Transcript


class ConfigError(ValueError):
    """Protocol parameters violate a bound; raised before execution."""


class PoolExhaustedError(RuntimeError):
    """A node would need more than ``n**2 + 3n`` qubits."""


def bound_violation(t: int, d: int, n: int) -> str | None:
    """Message naming every violated cheater bound, or ``None``."""
    if t < 0:
        return f"t must be non-negative (t = {t})"
    tm = (d - 1) // 2
    msgs = []
    if t > tm:
        msgs.append(f"t ≤ ⌊(d−1)/2⌋ = {tm} violated (t = {t}, d = {d})")
    if 4 * t >= n:
        msgs.append(f"t < n/4 = {n / 4:g} violated (t = {t}, n = {n})")
    return "; ".join(msgs) or None


def default_t(code: CssCode) -> int:
    return min(code.t_max, (code.n - 1) // 4)


@dataclass(frozen=True)
class ProtocolConfig:
    code: CssCode
    t_max: int | None = None  # tolerated cheaters; defaults to the largest allowed
    r: int = 2
    seed: int = 0

    def __post_init__(self):
        if self.code.k != 1:
            raise ConfigError(f"protocol needs k = 1, code has k = {self.code.k}")
        if self.code.d is None:
            raise ConfigError("code distance unknown; compute it with min_distance first")
        if self.t_max is None:
            object.__setattr__(self, "t_max", default_t(self.code))
        msg = bound_violation(self.t_max, self.code.d, self.code.n)
        if msg:
            raise ConfigError(msg)
        if self.r < 1:
            raise ConfigError(f"r must be >= 1 (r = {self.r})")

    @property
    def n(self) -> int:
        return self.code.n


@dataclass(frozen=True)
class NodeState:
    id: int  # 0-based
    share_slots: tuple  # n rows (one per wire) of n physical qubit ids
    ancilla_pool: tuple  # 3n physical qubit ids
    apparent_cheaters: frozenset

    @property
    def qubits(self) -> int:
        return sum(len(r) for r in self.share_slots) + len(self.ancilla_pool)


@dataclass
class Decoded:
    ok: bool
    logical: int
    correction: int  # register-local mask to apply
    level2: list  # (block a, node b)
    level1: list  # blocks a
    fail_level: int | None = None


@dataclass
class RunResult:
    outputs: list  # 2x2 density matrix per wire, None if reconstruction failed
    fidelities: list
    joint_fidelity: float | None
    transcript: Transcript
    effective_inputs: list
    nodes: list

    @property
    def abort(self) -> bool:
        return bool(self.transcript.abort)

    @property
    def accused(self) -> frozenset:
        return self.transcript.accused()


def _parity(v: int) -> int:
    return v.bit_count() & 1


class ProtocolRun:
    """Single-use state machine for one run; see :func:`run_protocol`."""

    def __init__(self, config: ProtocolConfig, inputs: Sequence[str], circuit: Circuit,
                 adversary: AdversaryStrategy | None = None):
        code = config.code
        n = code.n
        if circuit.wires != n:
            raise ConfigError(f"circuit has {circuit.wires} wires, protocol needs n = {n}")
        if len(inputs) != n:
            raise ConfigError(f"expected {n} inputs, got {len(inputs)}")
        for lab in inputs:
            if lab not in SINGLE_QUBIT_STATES:
                raise ConfigError(f"unknown input state {lab!r}")
        self.cfg, self.code, self.n, self.circuit = config, code, n, circuit
        self.N = n * n
        self.nslots = n + 3
        self.inputs = list(inputs)
        self.adversary = adversary or AdversaryStrategy()
        pub, meas, adv = (np.random.default_rng(s) for s in np.random.SeedSequence(config.seed).spawn(3))
        self.pub, self.meas = pub, meas
        self.adversary.bind(n, adv)
        self.t = Transcript()
        self.frame = ErrorFrame.identity(self.nslots * self.N)
        self.free = list(range(self.nslots))
        self.live = 0
        self.wire_slot: dict[int, int] = {}
        self.ref = FactoredState()
        self.injected: list = []  # (phase, wire, global x mask, global z mask), for tests

        self.g = code.logical_x.rows[0]
        self.h = code.logical_z.rows[0]
        self.hx = [r for r in code.independent_stabilizers("X").rows if r]
        self.hz = [r for r in code.independent_stabilizers("Z").rows if r]
        self.nmask = (1 << n) - 1
        self.LX = sum(self.g << (a * n) for a in range(n) if (self.g >> a) & 1)
        self.LZ = sum(self.h << (a * n) for a in range(n) if (self.h >> a) & 1)
        self.colmask = [sum(1 << (a * n + b) for a in range(n)) for b in range(n)]
        self.capacity = n * n + 3 * n
        self.t.qubit_peak_per_node = self.capacity
        self._anc_count = 0
        self._pending_invocations: dict[int, int] = {}

    # ---------------------------------------------------------------- slots

    def _off(self, slot: int) -> int:
        return slot * self.N

    def _regmask(self, slot: int) -> int:
        return ((1 << self.N) - 1) << self._off(slot)

    def _reg(self, slot: int) -> tuple[int, int]:
        off, m = self._off(slot), (1 << self.N) - 1
        p = self.frame.pauli
        return (p.x >> off) & m, (p.z >> off) & m

    def _account(self, verifying: bool = False) -> None:
        usage = self.n * self.live + (2 * self.n if verifying else 0)
        if usage > self.capacity:
            raise PoolExhaustedError(f"node needs {usage} qubits, budget is {self.capacity}")
        self.t.qubit_usage_peak = max(self.t.qubit_usage_peak, usage)

    def _alloc(self) -> int:
        if not self.free:
            raise PoolExhaustedError("no free register slot")
        self.free.sort()
        slot = self.free.pop(0)
        self.live += 1
        self._account()
        return slot

    def _clear(self, slot: int) -> None:
        mask = self._regmask(slot)
        p = self.frame.pauli
        cz = frozenset(pr for pr in self.frame.cz if not ((mask >> pr[0]) & 1 or (mask >> pr[1]) & 1))
        self.frame = ErrorFrame(PauliOp(p.x & ~mask, p.z & ~mask, p.nqubits, p.phase), cz)

    def _release(self, slot: int) -> None:
        self._clear(slot)
        self.free.append(slot)
        self.live -= 1

    # ------------------------------------------------------------ adversary

    def _inject(self, phase: str, wire: int | None, slot: int, invocation: int | None) -> None:
        n, off = self.n, self._off(slot)
        x = z = 0
        for letter, a, b in self.adversary.inject(InjectionPoint(phase, wire, invocation)):
            if not 0 <= a < n:
                raise AdversaryError(f"block {a + 1} out of range 1..{n}")
            if b is None:
                if a not in self.adversary.corrupted:
                    raise AdversaryError(f"node {a + 1} is not corrupted and cannot encode block {a + 1}")
                xs, zs = self.g << (a * n), self.h << (a * n)
            else:
                if b not in self.adversary.corrupted:
                    raise AdversaryError(f"node {b + 1} is not corrupted")
                xs = zs = 1 << (a * n + b)
            if letter in "XY":
                x ^= xs
            if letter in "ZY":
                z ^= zs
        if x or z:
            self.frame = self.frame.left_multiply(x << off, z << off)
            self.injected.append((phase, wire, x << off, z << off))

    def _announce(self, word: int, ann: Announcement) -> int:
        n = self.n
        for b in sorted(self.adversary.corrupted):
            col = 0
            for a in range(n):
                col |= ((word >> (a * n + b)) & 1) << a
            diff = col ^ self.adversary.forge(ann, b, col)
            for a in range(n):
                if (diff >> a) & 1:
                    word ^= 1 << (a * n + b)
        self.t.broadcasts.append({
            "kind": ann.kind,
            "invocation": None if ann.invocation is None else ann.invocation + 1,
            "round": None if ann.round is None else ann.round + 1,
            "wire": None if ann.wire is None else ann.wire + 1,
            "word": format(word, "x"),
        })
        return word

    # ------------------------------------------------------------- decoding

    def _comb(self, rows: list[int], bits) -> int:
        v = 0
        for r, bit in zip(rows, bits):
            if bit:
                v ^= r
        return v

    def _sample_word(self, kind: str, logical: int | None = None) -> int:
        """Ideal two-level word: ``kind='X'`` from span(G), ``'Z'`` from span(G⊥) plus logical Z."""
        stab, lg = (self.hx, self.g) if kind == "X" else (self.hz, self.h)
        bits = self.meas.integers(0, 2, size=(self.n + 1, len(stab) + 1))
        top = int(bits[0, -1]) if logical is None else logical
        w1 = self._comb(stab, bits[0]) ^ (lg if top else 0)
        word = 0
        for a in range(self.n):
            blk = self._comb(stab, bits[a + 1]) ^ (lg if (w1 >> a) & 1 else 0)
            word |= blk << (a * self.n)
        return word

    def _decode(self, word: int, kind: str) -> Decoded:
        """Two-level decode of X-type (``kind='X'``) or Z-type errors on a register word."""
        n, code = self.n, self.code
        reader = self.h if kind == "X" else self.g
        fix = self.g if kind == "X" else self.h
        corr, bits1, level2 = 0, 0, []
        ok, fail = True, None
        for a in range(n):
            blk = (word >> (a * n)) & self.nmask
            fixm = decode_mask(code, blk, kind)
            if fixm is None:
                ok, fail = False, 2
            elif fixm:
                blk ^= fixm
                corr |= fixm << (a * n)
                level2 += [(a, b) for b in range(n) if (fixm >> b) & 1]
            bits1 |= _parity(blk & reader) << a
        if fail == 2:
            # an undecodable block makes its level-1 bit meaningless; attribute nothing there
            return Decoded(False, _parity(bits1 & reader), corr, level2, [], 2)
        fix1 = decode_mask(code, bits1, kind)
        level1 = [] if fix1 is None else [a for a in range(n) if (fix1 >> a) & 1]
        if fix1 is None:
            ok, fail = False, 1
        else:
            bits1 ^= fix1
            for a in level1:
                corr ^= fix << (a * n)
        return Decoded(ok, _parity(bits1 & reader), corr, level2, level1, fail)

    def _accuse(self, dec: Decoded, reason: str, phase: str, invocation: int | None,
                dealer: int | None) -> None:
        for a, b in dec.level2:
            self.t.accuse(b, f"{reason}: level-2 block {a + 1}", phase, invocation)
        for a in dec.level1:
            self.t.accuse(a, f"{reason}: level-1 block {a + 1}", phase, invocation)
        if dec.fail_level == 1 and dealer is not None:
            self.t.accuse(dealer, f"{reason}: undecodable level-1 word", phase, invocation)

    # --------------------------------------------------------- verification

    def _invoke(self, purpose: str, wire: int | None) -> int:
        inv = self.t.kappa
        self.t.kappa += 1
        self.t.invocations.append((purpose, wire))
        return inv

    def _verify_rounds(self, slot: int, wire: int | None, inv: int, dealer: int | None,
                       phase: str) -> bool:
        self._account(verifying=True)
        off = self._off(slot)
        for rnd in range(self.cfg.r):
            order = ("X", "Z") if self.pub.integers(2) == 0 else ("Z", "X")
            for kind in order:
                x, z = self._reg(slot)
                word = self._sample_word(kind) ^ (x if kind == "X" else z)
                word = self._announce(word, Announcement(f"verify-{kind.lower()}", inv, rnd, wire))
                dec = self._decode(word, kind)
                self._accuse(dec, f"verify-{kind.lower()}", phase, inv, dealer)
                if not dec.ok:
                    return False
                if kind == "X":
                    self.frame = self.frame.left_multiply(x=dec.correction << off)
                else:
                    self.frame = self.frame.left_multiply(z=dec.correction << off)
        return True

    def _verified(self, slot: int, wire: int | None, purpose: str, dealer: int | None,
                  phase: str, inject_phase: str, invocation: int | None = None) -> bool:
        """Verify a freshly dealt register; re-share once on failure.

        The re-share is a retry within the same invocation, so it does not count towards kappa.
        """
        inv = self._invoke(purpose, wire)
        injected = invocation is not None
        for attempt in range(2):
            if attempt:
                self.t.reshares += 1
                self._clear(slot)
                injected = False
            if not injected:
                self._inject(inject_phase, wire, slot, inv)
            if self._verify_rounds(slot, wire, inv, dealer, phase):
                return True
        who = f"wire {wire + 1}" if wire is not None else "ancilla"
        self.t.failures.append(f"{purpose} for {who} failed verification twice")
        return False

    # ------------------------------------------------------ frame transforms

    def _twirl(self, slot: int) -> None:
        """Replace CZ errors touching a register by uniformly random Z errors on both legs."""
        mask = self._regmask(slot)
        pairs = sorted(pr for pr in self.frame.cz if (mask >> pr[0]) & 1 or (mask >> pr[1]) & 1)
        if not pairs:
            return
        zbits = 0
        for p, q in pairs:
            u, v = self.meas.integers(0, 2, size=2)
            zbits ^= (int(u) << p) ^ (int(v) << q)
        pauli = self.frame.pauli * PauliOp(0, zbits, self.frame.nqubits)
        self.frame = ErrorFrame(pauli, self.frame.cz - frozenset(pairs))

    def _frame_x(self, slot: int) -> None:
        pat = self.LX << self._off(slot)
        if self.frame.touches_cz(q for q in range(pat.bit_length()) if (pat >> q) & 1):
            for q in range(pat.bit_length()):
                if (pat >> q) & 1:
                    self.frame = conjugate("X", [q], self.frame)
            return
        p = self.frame.pauli
        self.frame = ErrorFrame(PauliOp(p.x, p.z, p.nqubits, p.phase + 2 * _parity(p.z & pat)), self.frame.cz)

    def _frame_z(self, slot: int) -> None:
        pat = self.LZ << self._off(slot)
        p = self.frame.pauli
        self.frame = ErrorFrame(PauliOp(p.x, p.z, p.nqubits, p.phase + 2 * _parity(p.x & pat)), self.frame.cz)

    def _frame_cz(self, s1: int, s2: int) -> None:
        (x1, _), (x2, _) = self._reg(s1), self._reg(s2)
        p = self.frame.pauli
        z = p.z ^ (x1 << self._off(s2)) ^ (x2 << self._off(s1))
        self.frame = ErrorFrame(PauliOp(p.x, z, p.nqubits, p.phase + 2 * _parity(x1 & x2)), self.frame.cz)

    def _frame_ccz(self, s1: int, s2: int, s3: int) -> None:
        (x1, _), (x2, _), (x3, _) = self._reg(s1), self._reg(s2), self._reg(s3)
        o1, o2, o3 = self._off(s1), self._off(s2), self._off(s3)
        p = self.frame.pauli
        z = p.z ^ ((x2 & x3) << o1) ^ ((x1 & x3) << o2) ^ ((x1 & x2) << o3)
        cz = set(self.frame.cz)
        for xs, oa, ob in ((x1, o2, o3), (x2, o1, o3), (x3, o1, o2)):
            while xs:
                low = xs & -xs
                i = low.bit_length() - 1
                cz ^= {tuple(sorted((oa + i, ob + i)))}
                xs ^= low
        sign = 2 * _parity(x1 & x2 & x3)
        self.frame = ErrorFrame(PauliOp(p.x, z, p.nqubits, p.phase + sign), frozenset(cz))

    # --------------------------------------------------------------- phases

    def sharing_phase(self) -> None:
        self.t.enter("sharing")
        self.effective = []
        for w in range(self.n):
            if w in self.circuit.ancillas:
                self.effective.append("0")
                continue
            lab = self.inputs[w]
            if w in self.adversary.corrupted:
                lab = self.adversary.choose_input(w, lab)
                if lab not in SINGLE_QUBIT_STATES:
                    raise AdversaryError(f"unknown chosen input {lab!r}")
            self.effective.append(lab)
            slot = self._alloc()
            self.wire_slot[w] = slot
            self.ref.add_wire(w, lab)
            inv = self.t.kappa + len(self._pending_invocations)
            self._pending_invocations[w] = inv
            self._inject("sharing", w, slot, inv)
        self.t.close("sharing")

    def verification_phase(self) -> None:
        self.t.enter("verification")
        for w in sorted(self._pending_invocations):
            self._verified(self.wire_slot[w], w, "input", w, "verification", "sharing",
                           invocation=self._pending_invocations[w])
        self._pending_invocations.clear()
        self.t.close("verification")

    def prepare_verified_ancilla(self, kind: str, wire: int | None) -> int:
        """Allocate and verify a ``|0>`` or ``|+>`` register; returns its slot."""
        slot = self._alloc()
        purpose = "zero-ancilla" if kind == "0" else "plus-ancilla"
        self._verified(slot, wire, purpose, None, "computation", "ancilla")
        return slot

    def teleport_h(self, w: int) -> None:
        anc = ("anc", self._anc_count)
        self._anc_count += 1
        sa = self.prepare_verified_ancilla("+", w)
        self.ref.add_wire(anc, "+")
        sd = self.wire_slot[w]
        self._frame_cz(sd, sa)
        self.ref.apply("CZ", [w, anc])
        self._twirl(sd)
        m = self.ref.measure(w, "X", self.meas)
        _, z = self._reg(sd)
        word = self._sample_word("Z", logical=m) ^ z
        word = self._announce(word, Announcement("measure", None, None, w))
        dec = self._decode(word, "Z")
        self._accuse(dec, "measure", "computation", None, None)
        if not dec.ok:
            self.t.failures.append(f"teleported H on wire {w + 1}: undecodable measurement word")
        if m:
            self._frame_x(sa)
            self.ref.apply("X", [anc])
        if dec.logical != m:
            self.frame = self.frame.left_multiply(x=self.LX << self._off(sa))
        self._release(sd)
        self.ref.rename(anc, w)
        self.wire_slot[w] = sa

    def computation_phase(self) -> None:
        self.t.enter("computation")
        for w in sorted(self.circuit.ancillas):
            slot = self.prepare_verified_ancilla("0", w)
            self.wire_slot[w] = slot
            self.ref.add_wire(w, "0")
        for w in range(self.n):
            self._inject("computation", w, self.wire_slot[w], None)
        for gate in self.circuit.gates:
            ws = list(gate.wires)
            slots = [self.wire_slot[w] for w in ws]
            if gate.name == "H":
                self.teleport_h(ws[0])
                continue
            if gate.name == "X":
                self._frame_x(slots[0])
            elif gate.name == "Z":
                self._frame_z(slots[0])
            elif gate.name == "CZ":
                self._frame_cz(*slots)
            else:
                self._frame_ccz(*slots)
            self.ref.apply(gate.name, ws)
        self.t.close("computation")

    def reconstruction_phase(self) -> tuple[list, list]:
        self.t.enter("reconstruction")
        outputs, flips = [], []
        for w in range(self.n):
            slot = self.wire_slot[w]
            self._inject("reconstruction", w, slot, None)
            self._twirl(slot)
            x, z = self._reg(slot)
            dx, dz = self._decode(x, "X"), self._decode(z, "Z")
            before = len(self.t.accusations)
            self._accuse(dx, f"reconstruct wire {w + 1} X", "reconstruction", None, None)
            self._accuse(dz, f"reconstruct wire {w + 1} Z", "reconstruction", None, None)
            named = {a.node for a in self.t.accusations[before:]}
            if not (dx.ok and dz.ok) or len(named) > self.cfg.t_max:
                self.t.failures.append(f"reconstruction of wire {w + 1} failed")
                outputs.append(None)
                flips.append(None)
                continue
            rho = self.ref.reduced(w)
            P = np.eye(2, dtype=complex)
            if dx.logical:
                P = np.array([[0, 1], [1, 0]], dtype=complex) @ P
            if dz.logical:
                P = np.diag([1, -1]).astype(complex) @ P
            outputs.append(P @ rho @ P.conj().T)
            flips.append((dx.logical, dz.logical))
        self.t.close("reconstruction")
        return outputs, flips

    def decide(self) -> bool:
        self.t.enter("decision")
        self.t.abort = abort_decision(self.t, self.cfg.t_max)
        self.t.close("decision")
        return self.t.abort

    def nodes(self) -> list[NodeState]:
        n, accused = self.n, self.t.accused()
        share = [self.wire_slot[w] for w in range(n)]
        pool = sorted(set(range(self.nslots)) - set(share))
        out = []
        for b in range(n):
            rows = tuple(tuple(s * self.N + a * n + b for a in range(n)) for s in share)
            anc = tuple(s * self.N + a * n + b for s in pool for a in range(n))
            out.append(NodeState(b, rows, anc, accused))
        return out

    def run(self) -> RunResult:
        self.sharing_phase()
        self.verification_phase()
        self.computation_phase()
        outputs, flips = self.reconstruction_phase()
        self.decide()

        expected = run_reference([(g.name, g.wires) for g in self.circuit.gates], self.effective)
        fids = []
        for w, rho in enumerate(outputs):
            fids.append(0.0 if rho is None else state_fidelity(rho, expected.reduced(w)))
        joint = None
        if self.n <= MAX_QUBITS and all(f is not None for f in flips):
            order = list(range(self.n))
            actual = self.ref.joint(order)
            for w, (fx, fz) in enumerate(flips):
                if fx:
                    actual = apply(actual, "X", [w])
                if fz:
                    actual = apply(actual, "Z", [w])
            joint = fidelity(actual, expected.joint(order))
        self.t.outputs = [
            {"wire": w + 1, "failed": rho is None, "fidelity": round(f, 12)}
            for w, (rho, f) in enumerate(zip(outputs, fids))
        ]
        return RunResult(outputs, fids, joint, self.t, list(self.effective), self.nodes())


def abort_decision(transcript: Transcript, t_max: int) -> bool:
    """Abort iff more than ``t_max`` nodes were accused or any step failed."""
    return len(transcript.accused()) > t_max or bool(transcript.failures)


def run_protocol(config: ProtocolConfig, inputs: Sequence[str], circuit: Circuit,
                 adversary: AdversaryStrategy | None = None) -> RunResult:
    """Execute the protocol once; deterministic in ``config.seed``."""
    return ProtocolRun(config, inputs, circuit, adversary).run()


__all__ = [
    "ConfigError", "PoolExhaustedError", "ProtocolConfig", "NodeState", "ProtocolRun",
    "RunResult", "Decoded", "abort_decision", "bound_violation", "default_t", "run_protocol",
]

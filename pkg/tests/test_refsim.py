import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from mpqc.paulisim import ErrorFrame, PauliOp
from mpqc.refsim import (SINGLE_QUBIT_STATES, FactoredState, FrameGroupViolation, PureState, apply,
                         conjugation_oracle, fidelity, gate_matrix, measure, run_reference, state_fidelity)

LABELS = sorted(SINGLE_QUBIT_STATES)


def test_gate_examples():
    s = apply(PureState.zero(1), "H", [0])
    assert fidelity(s, PureState.product(["+"])) == pytest.approx(1)
    s = apply(PureState.product(["+"]), "S", [0])
    assert fidelity(s, PureState.product(["+i"])) == pytest.approx(1)
    s = apply(PureState.product(["1", "0"]), "X", [1])
    assert fidelity(s, PureState.product(["1", "1"])) == pytest.approx(1)
    s = apply(PureState.product(["1", "1", "1"]), "CCZ", [0, 1, 2])
    assert s.amplitudes[7] == pytest.approx(-1)
    s = apply(PureState.product(["1", "+"]), "CZ", [0, 1])
    assert fidelity(s, PureState.product(["1", "-"])) == pytest.approx(1)


def test_gate_errors():
    with pytest.raises(ValueError):
        apply(PureState.zero(2), "CZ", [0, 0])
    with pytest.raises((ValueError, IndexError)):
        apply(PureState.zero(2), "H", [2])
    with pytest.raises((ValueError, KeyError)):
        gate_matrix("T2")
    with pytest.raises(ValueError):
        PureState(np.array([1, 1], dtype=complex), 1)


@pytest.mark.parametrize("gate", ["X", "Y", "Z", "H", "S", "CZ", "CCZ"])
def test_gates_unitary(gate):
    U = gate_matrix(gate)
    assert np.allclose(U @ U.conj().T, np.eye(U.shape[0]))


def test_ccz_symmetric_under_permutation():
    base = PureState.product(["+", "-i", "1"])
    ref = apply(base, "CCZ", [0, 1, 2])
    for perm in itertools.permutations(range(3)):
        assert fidelity(apply(base, "CCZ", list(perm)), ref) == pytest.approx(1)


def test_born_statistics():
    rng = np.random.default_rng(7)
    plus = PureState.product(["+"])
    ones = sum(measure(plus, 0, "Z", rng)[0] for _ in range(10_000))
    assert 0.48 <= ones / 10_000 <= 0.52


def test_measure_deterministic_and_collapse():
    rng = np.random.default_rng(0)
    for lab, basis, bit in [("0", "Z", 0), ("1", "Z", 1), ("+", "X", 0), ("-", "X", 1)]:
        out, post = measure(PureState.product([lab, "+i"]), 0, basis, rng)
        assert out == bit and fidelity(post, PureState.product([lab, "+i"])) == pytest.approx(1)
    out, rest = measure(PureState.product(["1", "-"]), 0, "Z", rng, keep=False)
    assert out == 1 and rest.q == 1 and fidelity(rest, PureState.product(["-"])) == pytest.approx(1)


def test_fidelity_examples():
    assert fidelity(PureState.product(["0"]), PureState.product(["1"])) == pytest.approx(0)
    assert fidelity(PureState.product(["0"]), PureState.product(["+"])) == pytest.approx(0.5)
    assert fidelity(PureState.product(["+i"]), PureState.product(["+"])) == pytest.approx(0.5)
    rho = PureState.product(["+"]).reduced(0)
    assert state_fidelity(rho, rho) == pytest.approx(1)
    assert state_fidelity(rho, PureState.product(["-"]).reduced(0)) == pytest.approx(0)
    assert state_fidelity(rho, np.eye(2) / 2) == pytest.approx(0.5)
    with pytest.raises(ValueError):
        fidelity(PureState.zero(1), PureState.zero(2))


@given(st.lists(st.sampled_from(LABELS), min_size=1, max_size=4), st.lists(st.sampled_from(LABELS), min_size=1, max_size=4))
def test_fidelity_symmetric_and_bounded(a, b):
    n = min(len(a), len(b))
    x, y = PureState.product(a[:n]), PureState.product(b[:n])
    f = fidelity(x, y)
    assert 0 <= f <= 1 + 1e-12 and f == pytest.approx(fidelity(y, x))


def test_oracle_examples():
    assert conjugation_oracle("H", [0], PauliOp.from_str("X")) == ErrorFrame.from_pauli("Z")
    f = conjugation_oracle("CCZ", [0, 1, 2], PauliOp.from_str("IXI"))
    assert f.pauli == PauliOp.from_str("IXI") and f.cz == frozenset({(0, 2)})
    with pytest.raises(FrameGroupViolation):
        conjugation_oracle("H", [1], ErrorFrame.identity(3).with_cz((1, 2)))
    f = conjugation_oracle("CCZ", [0, 1, 2], ErrorFrame.from_pauli("XXI"))
    assert f.pauli.x == 0b011 and f.cz == frozenset({(0, 2), (1, 2)})


def test_factored_state_matches_dense():
    gates = [("H", [0]), ("CZ", [0, 2]), ("CCZ", [0, 1, 2]), ("S", [1]), ("H", [2])]
    inputs = ["+", "1", "-i"]
    fs = run_reference(gates, inputs)
    dense = PureState.product(inputs)
    for g, w in gates:
        dense = apply(dense, g, w)
    assert fidelity(fs.joint([0, 1, 2]), dense) == pytest.approx(1)
    for w in range(3):
        assert state_fidelity(fs.reduced(w), dense.reduced(w)) == pytest.approx(1)


def test_factored_state_measure_and_rename():
    fs = FactoredState.product({0: "1", 1: "+"})
    fs.apply("CZ", [0, 1])
    assert fs.measure(1, "X", np.random.default_rng(0)) == 1
    fs.add_wire(5, "-")
    fs.rename(5, 9)
    assert 9 in fs.wires() and 5 not in fs.wires()
    assert state_fidelity(fs.reduced(9), PureState.product(["-"]).reduced(0)) == pytest.approx(1)

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import controlled_op, kron_ops
from qdsp.circuit import CNOT, CPhase, CRy, CRz, Circuit, GPhase, Gate, H, P, Ry, Rz, SWAP, X, Z, gate_count
from qdsp.errors import QubitIndexError, SizeError
from qdsp.statevector import (MAX_QUBITS, apply_gate, dump_csv, expval_pauli, from_amplitudes, gate_matrix,
                              marginal, new_statevector, run_circuit, sample_counts, subspace_probability)

SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.diag([1, -1]).astype(complex)


def random_state(rng, nq):
    a = rng.normal(size=2**nq) + 1j * rng.normal(size=2**nq)
    return from_amplitudes(a / np.linalg.norm(a))


def matrix_of(gate, nq):
    u = gate_matrix(gate.kind, gate.theta)
    return controlled_op(nq, gate.controls, gate.target, u)


def test_initial_state():
    s = new_statevector(3)
    assert s.amps[0] == 1 and np.count_nonzero(s.amps) == 1


@pytest.mark.parametrize("q", [0, MAX_QUBITS + 1])
def test_size_limits(q):
    with pytest.raises(SizeError):
        new_statevector(q)


def test_from_amplitudes_validates():
    with pytest.raises(SizeError):
        from_amplitudes([1, 0, 0])


def test_single_qubit_matrices():
    assert np.allclose(gate_matrix("Rz", 0.7), np.diag([np.exp(-0.35j), np.exp(0.35j)]))
    assert np.allclose(gate_matrix("Ry", math.pi), [[0, -1], [1, 0]])
    assert np.allclose(gate_matrix("P", math.pi / 2), np.diag([1, 1j]))
    h = gate_matrix("H")
    assert np.allclose(h @ h, np.eye(2))


gate_kinds = st.sampled_from(["H", "X", "Z", "Ry", "Rz", "P", "CRy", "CRz", "CNOT", "CPhase"])


@settings(max_examples=80, deadline=None)
@given(kind=gate_kinds, seed=st.integers(0, 2**31), nq=st.integers(2, 5), theta=st.floats(-7, 7))
def test_gate_matches_dense_oracle(kind, seed, nq, theta):
    rng = np.random.default_rng(seed)
    qs = rng.permutation(nq)
    needs_angle = kind in {"Ry", "Rz", "P", "CRy", "CRz", "CPhase"}
    ctrl = (int(qs[1]),) if kind.startswith("C") else ()
    g = Gate(kind, int(qs[0]), ctrl, float(theta) if needs_angle else None)
    s = random_state(rng, nq)
    expected = matrix_of(g, nq) @ s.amps
    apply_gate(s, g)
    assert np.allclose(s.amps, expected, atol=1e-12)
    assert s.norm() == pytest.approx(1.0, abs=1e-12)


def test_multi_controlled_phase_matches_oracle(rng):
    s = random_state(rng, 4)
    g = CPhase((0, 2, 3), 1, 0.9)
    expected = controlled_op(4, (0, 2, 3), 1, gate_matrix("P", 0.9)) @ s.amps
    apply_gate(s, g)
    assert np.allclose(s.amps, expected)


def test_swap_and_global_phase(rng):
    s = random_state(rng, 3)
    before = s.amps.copy()
    apply_gate(s, SWAP(0, 2))
    for i in range(8):
        j = (i & 0b010) | ((i & 1) << 2) | ((i >> 2) & 1)
        assert s.amps[j] == before[i]
    t = random_state(rng, 2)
    ref = t.amps.copy()
    apply_gate(t, GPhase(math.pi / 3, (1,)))
    assert np.allclose(t.amps[:2], ref[:2]) and np.allclose(t.amps[2:], ref[2:] * np.exp(1j * math.pi / 3))


def test_controlled_block_repeats():
    block = Circuit(2, [Ry(1, 0.3)])
    s = new_statevector(2)
    apply_gate(s, X(0))
    apply_gate(s, Gate("CU", None, (0,), block=block, power=4))
    # 4 x Ry(0.3) on qubit 1 conditioned on qubit 0
    assert np.allclose(s.amps, [0, math.cos(0.6), 0, math.sin(0.6)])


def test_bell_state_and_sampling():
    bell = run_circuit(Circuit(2, [H(0), CNOT(0, 1)]))
    assert np.allclose(bell.amps, [2**-0.5, 0, 0, 2**-0.5])
    counts = sample_counts(bell, 4000, seed=7)
    assert set(counts) == {"00", "11"} and sum(counts.values()) == 4000
    assert counts == sample_counts(bell, 4000, seed=7)


def test_bitstring_order():
    s = run_circuit(Circuit(3, [X(0)]))
    assert sample_counts(s, 5, 0) == {"001": 5}


def test_pauli_expectations_match_dense(rng):
    s = random_state(rng, 3)
    for q in range(3):
        for axis, op in (("X", SX), ("Y", SY), ("Z", SZ)):
            dense = np.vdot(s.amps, kron_ops(3, {q: op}) @ s.amps).real
            assert expval_pauli(s, axis, q) == pytest.approx(dense, abs=1e-12)


def test_subspace_probability_and_marginal(rng):
    s = random_state(rng, 4)
    p = s.probabilities()
    idx = np.arange(16)
    assert subspace_probability(s, 2, 1) == pytest.approx(p[(idx >> 2) & 1 == 1].sum())
    m = marginal(s, [3, 1])
    for a in (0, 1):
        for b in (0, 1):
            mask = ((idx >> 3) & 1 == a) & ((idx >> 1) & 1 == b)
            assert m[a + 2 * b] == pytest.approx(p[mask].sum(), abs=1e-14)


def test_inverse_circuit_restores_state(rng):
    c = Circuit(3, [H(0), CRy(0, 1, 0.4), CRz(1, 2, -1.1), P(2, 0.3), CPhase((0, 1), 2, 0.8), Rz(0, 2.0), Z(1)])
    s = random_state(rng, 3)
    ref = s.amps.copy()
    run_circuit(c + c.inverse(), s)
    assert np.allclose(s.amps, ref, atol=1e-12)


def test_circuit_validation():
    with pytest.raises(QubitIndexError):
        Circuit(2, [CNOT(0, 2)])
    with pytest.raises(QubitIndexError):
        Circuit(2, [CNOT(1, 1)])
    with pytest.raises(ValueError):
        Gate("Ry", 0)
    with pytest.raises(ValueError):
        Gate("Toffoli", 0)


def test_gate_count_and_dump():
    c = Circuit(2, [H(0), CNOT(0, 1), H(1)])
    assert gate_count(c) == {"CNOT": 1, "H": 2}
    assert c.dump() == "H 0\nCNOT 0 1\nH 1\n"


def test_dump_csv_round_trip(tmp_path, rng):
    s = random_state(rng, 2)
    path = tmp_path / "state.csv"
    dump_csv(s, path)
    rows = path.read_text().splitlines()[1:]
    amps = np.array([complex(float(r.split(",")[1]), float(r.split(",")[2])) for r in rows])
    assert np.array_equal(amps, s.amps)

"""Dense complex statevector simulator.

Amplitudes live in a flat ``complex128`` array; qubit ``q`` is bit ``q`` of
the basis index (qubit 0 least significant). Gates mutate the state in place.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .circuit import CONTROLLED_BASE, Circuit, Gate
from .errors import QubitIndexError, SizeError

MAX_QUBITS = 28
_S2 = 1.0 / math.sqrt(2.0)


@dataclass(eq=False)
class Statevector:
    num_qubits: int
    amps: np.ndarray

    def copy(self) -> Statevector:
        return Statevector(self.num_qubits, self.amps.copy())

    def norm(self) -> float:
        return float(np.vdot(self.amps, self.amps).real)

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amps) ** 2

    def _tensor(self) -> np.ndarray:
        return self.amps.reshape((2,) * self.num_qubits)

    def _axis(self, qubit: int) -> int:
        if not 0 <= qubit < self.num_qubits:
            raise QubitIndexError(f"qubit {qubit} outside register of {self.num_qubits}")
        return self.num_qubits - 1 - qubit


def new_statevector(q: int) -> Statevector:
    if not isinstance(q, (int, np.integer)) or not 1 <= q <= MAX_QUBITS:
        raise SizeError(f"qubit count must be in [1, {MAX_QUBITS}], got {q!r}")
    amps = np.zeros(2**q, dtype=np.complex128)
    amps[0] = 1.0
    return Statevector(int(q), amps)


def from_amplitudes(amps) -> Statevector:
    amps = np.asarray(amps, dtype=np.complex128).copy()
    q = int(round(math.log2(amps.size))) if amps.size else 0
    if amps.size != 2**q or not 1 <= q <= MAX_QUBITS:
        raise SizeError("amplitude vector length must be a power of two")
    return Statevector(q, amps)


def gate_matrix(kind: str, theta: float | None = None) -> np.ndarray:
    """2x2 matrix of a single-qubit kind (controlled kinds map to their base)."""
    kind = CONTROLLED_BASE.get(kind, kind)
    if kind == "H":
        return np.array([[_S2, _S2], [_S2, -_S2]], dtype=complex)
    if kind == "X":
        return np.array([[0, 1], [1, 0]], dtype=complex)
    if kind == "Z":
        return np.array([[1, 0], [0, -1]], dtype=complex)
    if kind == "Ry":
        c, s = math.cos(theta / 2), math.sin(theta / 2)
        return np.array([[c, -s], [s, c]], dtype=complex)
    if kind == "Rz":
        return np.array([[np.exp(-0.5j * theta), 0], [0, np.exp(0.5j * theta)]], dtype=complex)
    if kind == "P":
        return np.array([[1, 0], [0, np.exp(1j * theta)]], dtype=complex)
    raise ValueError(f"{kind} is not a single-qubit kind")


def _selector(state: Statevector, qubits_values: dict[int, int]) -> list:
    sel = [slice(None)] * state.num_qubits
    for q, v in qubits_values.items():
        sel[state._axis(q)] = v
    return sel


def apply_gate(state: Statevector, gate: Gate) -> Statevector:
    if gate.kind == "CU":
        for _ in range(gate.power):
            for g in gate.block.gates:
                apply_gate(state, g.controlled(gate.controls))
        return state

    psi = state._tensor()
    ctrl = {c: 1 for c in gate.controls}
    if gate.kind == "GPhase":
        psi[tuple(_selector(state, ctrl))] *= np.exp(1j * gate.theta)
        return state
    if gate.kind == "SWAP":
        a, b = gate.target, gate.target2
        s01 = tuple(_selector(state, {**ctrl, a: 0, b: 1}))
        s10 = tuple(_selector(state, {**ctrl, a: 1, b: 0}))
        tmp = psi[s01].copy()
        psi[s01] = psi[s10]
        psi[s10] = tmp
        return state

    if gate.target in ctrl:
        raise QubitIndexError("target qubit is also a control")
    m = gate_matrix(gate.kind, gate.theta)
    s0 = tuple(_selector(state, {**ctrl, gate.target: 0}))
    s1 = tuple(_selector(state, {**ctrl, gate.target: 1}))
    if m[0, 1] == 0 and m[1, 0] == 0:
        if m[0, 0] != 1:
            psi[s0] *= m[0, 0]
        psi[s1] *= m[1, 1]
        return state
    a0 = psi[s0].copy()
    a1 = psi[s1]
    psi[s0] = m[0, 0] * a0 + m[0, 1] * a1
    psi[s1] = m[1, 0] * a0 + m[1, 1] * a1
    return state


def run_circuit(circuit: Circuit, state: Statevector | None = None) -> Statevector:
    if state is None:
        state = new_statevector(circuit.num_qubits)
    elif state.num_qubits < circuit.num_qubits:
        raise SizeError("state has fewer qubits than the circuit")
    for g in circuit.gates:
        apply_gate(state, g)
    return state


def _split(state: Statevector, qubit: int) -> tuple[np.ndarray, np.ndarray]:
    psi = state._tensor()
    ax = state._axis(qubit)
    return np.take(psi, 0, axis=ax), np.take(psi, 1, axis=ax)


def expval_pauli(state: Statevector, axis: str, qubit: int) -> float:
    """``<I x sigma_axis x I>`` on one qubit."""
    a0, a1 = _split(state, qubit)
    axis = axis.upper()
    if axis == "Z":
        return float(np.vdot(a0, a0).real - np.vdot(a1, a1).real)
    cross = np.vdot(a0, a1)  # sum conj(a0) a1
    if axis == "X":
        return float(2.0 * cross.real)
    if axis == "Y":
        return float(2.0 * cross.imag)
    raise ValueError(f"unknown Pauli axis {axis!r}")


def subspace_probability(state: Statevector, qubit: int, value: int) -> float:
    if value not in (0, 1):
        raise ValueError("value must be 0 or 1")
    part = _split(state, qubit)[value]
    return float(np.vdot(part, part).real)


def marginal(state: Statevector, qubits: list[int]) -> np.ndarray:
    """Probability of each joint value of ``qubits``; ``qubits[0]`` is the low bit."""
    probs = state.probabilities().reshape((2,) * state.num_qubits)
    keep = [state._axis(q) for q in qubits]
    other = tuple(ax for ax in range(state.num_qubits) if ax not in keep)
    reduced = probs.sum(axis=other) if other else probs
    # remaining axes are in increasing axis order; reorder to qubits[-1] ... qubits[0]
    order = sorted(keep)
    perm = [order.index(state._axis(q)) for q in reversed(qubits)]
    return np.transpose(reduced, perm).reshape(-1)


def sample_counts(state: Statevector, shots: int, seed: int | np.random.Generator) -> dict[str, int]:
    """Multinomial draw over basis states, keyed by bitstrings (qubit 0 rightmost)."""
    if shots < 1:
        raise ValueError("shots must be >= 1")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    probs = state.probabilities()
    probs = probs / probs.sum()
    draws = rng.multinomial(shots, probs)
    nz = np.flatnonzero(draws)
    return {format(int(i), f"0{state.num_qubits}b"): int(draws[i]) for i in nz}


def dump_csv(state: Statevector, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["index", "re", "im"])
        for i, a in enumerate(state.amps):
            w.writerow([i, repr(float(a.real)), repr(float(a.imag))])

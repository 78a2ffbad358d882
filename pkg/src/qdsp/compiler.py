"""Lower a DSP model into an index-preparation circuit plus a controlled-V ladder.

Layout: index qubit ``l`` holds ``j_{l+1}`` (level ``l+1``), the data qubit is
``n``. Only binary index registers are supported; a ``k == 1`` model is padded
with a zero-probability second outcome.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .circuit import CNOT, CRy, CRz, Circuit, Gate, H, Rz, Ry, X
from .errors import UnsupportedK, WrongGateKind
from .model import DspModel, Kind


class SchemeKind(str, Enum):
    PAULI_RZ = "PauliRz"
    AMPLITUDE_RY = "AmplitudeRy"


@dataclass(frozen=True)
class MeasurementScheme:
    """Which unitary family the ladder uses and at which point ``v``.

    ``PauliRz`` encodes ``x`` as a z-rotation by ``v*x``; ``<sigma_x> + i<sigma_y>``
    on the data qubit then equals the characteristic function. ``AmplitudeRy``
    encodes ``sign*v*x`` as a y-rotation; ``sign=-1`` is the sine variant.
    """

    kind: SchemeKind
    v: float
    sign: int = 1

    def __post_init__(self):
        object.__setattr__(self, "kind", SchemeKind(self.kind))
        if not math.isfinite(self.v):
            raise ValueError("v must be finite")
        if self.sign not in (1, -1):
            raise ValueError("sign must be +1 or -1")

    def v_gate(self, control: int | None, target: int, x: float) -> Gate:
        if self.kind is SchemeKind.PAULI_RZ:
            angle = self.v * x
            return Rz(target, angle) if control is None else CRz(control, target, angle)
        angle = self.sign * self.v * x
        return Ry(target, angle) if control is None else CRy(control, target, angle)


def _binary_arrays(model: DspModel) -> tuple[np.ndarray, np.ndarray | None]:
    """Values and (independent) probabilities padded to k = 2."""
    if model.k > 2:
        raise UnsupportedK(f"circuit compilation needs k <= 2, model has k = {model.k}")
    if model.k == 2:
        return model.values, model.probs
    values = np.hstack([model.values, np.zeros_like(model.values)])
    probs = None if model.probs is None else np.hstack([model.probs, np.zeros_like(model.probs)])
    return values, probs


def _angle(p0: float) -> float:
    """Ry angle putting probability ``p0`` on |0>."""
    return 2.0 * math.acos(math.sqrt(min(1.0, max(0.0, p0))))


def compile_index_prep(model: DspModel) -> Circuit:
    values, probs = _binary_arrays(model)
    n = model.n
    gates: list[Gate] = []
    if model.kind is Kind.INDEPENDENT:
        for l in range(n):
            p0 = probs[l, 0]
            gates.append(H(l) if p0 == 0.5 else Ry(l, _angle(p0)))
    else:
        initial = model.initial if model.k == 2 else np.array([1.0, 0.0])
        gates.append(Ry(0, _angle(initial[0])))
        for l in range(1, n):
            T = model.transitions[l - 1] if model.k == 2 else np.array([[1.0, 0.0], [1.0, 0.0]])
            c = l - 1
            gates += [X(c), CRy(c, l, _angle(T[0, 0])), X(c), CRy(c, l, _angle(T[1, 0]))]
    return Circuit(n + 1, gates, n_index=n)


def compile_data_ladder(model: DspModel, scheme: MeasurementScheme) -> Circuit:
    values, _ = _binary_arrays(model)
    n = model.n
    d = n
    gates = [scheme.v_gate(None, d, model.x0)]
    for l in range(n):
        gates.append(scheme.v_gate(l, d, values[l, 1]))
        gates += [X(l), scheme.v_gate(l, d, values[l, 0]), X(l)]
    return Circuit(n + 1, gates, n_index=n)


def compile_data_input(model: DspModel, scheme: MeasurementScheme) -> Circuit:
    d = model.n
    if scheme.kind is SchemeKind.PAULI_RZ:
        gates = [H(d)]
    elif scheme.sign == -1:
        gates = [Ry(d, math.pi / 2)]
    else:
        gates = []
    return Circuit(model.n + 1, gates, n_index=model.n)


def compile_circuit(model: DspModel, scheme: MeasurementScheme) -> Circuit:
    """Full state preparation: data input, index register, then the ladder."""
    circ = compile_data_input(model, scheme) + compile_index_prep(model) + compile_data_ladder(model, scheme)
    circ.meta.update(n=model.n, k=2, scheme=scheme.kind.value, v=scheme.v, sign=scheme.sign)
    return circ


def decompose_controlled_rz(gate: Gate) -> list[Gate]:
    if gate.kind != "CRz" or len(gate.controls) != 1:
        raise WrongGateKind(f"expected a singly-controlled CRz, got {gate.kind}")
    c, t, th = gate.controls[0], gate.target, gate.theta
    return [Rz(t, th / 2), CNOT(c, t), Rz(t, -th / 2), CNOT(c, t)]


def decompose_circuit(circuit: Circuit) -> Circuit:
    """Replace every CRz by its two-CNOT form."""
    gates: list[Gate] = []
    for g in circuit.gates:
        gates += decompose_controlled_rz(g) if g.kind == "CRz" else [g]
    return Circuit(circuit.num_qubits, gates, circuit.n_index, dict(circuit.meta))

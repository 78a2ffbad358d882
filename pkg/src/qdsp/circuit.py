"""Gate and circuit value types.

Qubit 0 is the least-significant bit of a basis index. A gate acts on
``target`` only on the subspace where every qubit in ``controls`` is 1.
"""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field, replace

from .errors import QubitIndexError

# kinds that take an angle
PARAMETRIC = {"Ry", "Rz", "P", "CRy", "CRz", "CPhase", "GPhase"}
SELF_INVERSE = {"H", "X", "Z", "CNOT", "SWAP"}
# controlled kind -> the single-qubit kind it controls
CONTROLLED_BASE = {"CRy": "Ry", "CRz": "Rz", "CNOT": "X", "CPhase": "P"}
CONTROLLED_V = {"CRy", "CRz"}
KINDS = PARAMETRIC | SELF_INVERSE | {"CU"}


@dataclass(frozen=True)
class Gate:
    kind: str
    target: int | None = None
    controls: tuple[int, ...] = ()
    theta: float | None = None
    # for kind "CU": apply ``block`` ``power`` times, controlled on ``controls``
    block: Circuit | None = None
    power: int = 1
    target2: int | None = None  # second qubit of SWAP

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        if (self.kind in PARAMETRIC) != (self.theta is not None):
            raise ValueError(f"{self.kind} {'needs' if self.kind in PARAMETRIC else 'takes no'} angle")
        if self.theta is not None and not math.isfinite(self.theta):
            raise ValueError("gate angle must be finite")
        if self.kind in CONTROLLED_BASE and not self.controls:
            raise ValueError(f"{self.kind} needs a control qubit")

    @property
    def qubits(self) -> tuple[int, ...]:
        qs = tuple(self.controls)
        if self.target is not None:
            qs += (self.target,)
        if self.target2 is not None:
            qs += (self.target2,)
        if self.block is not None:
            qs += tuple(q for g in self.block.gates for q in g.qubits)
        return qs

    def inverse(self) -> Gate:
        if self.kind in SELF_INVERSE:
            return self
        if self.kind == "CU":
            return replace(self, block=self.block.inverse())
        return replace(self, theta=-self.theta)

    def controlled(self, extra: tuple[int, ...]) -> Gate:
        """The same gate with additional control qubits."""
        kind = self.kind
        if not self.controls and kind in {"Ry", "Rz", "X", "P"}:
            kind = {"Ry": "CRy", "Rz": "CRz", "X": "CNOT", "P": "CPhase"}[kind]
        return replace(self, kind=kind, controls=tuple(extra) + self.controls)

    def line(self) -> str:
        qs = " ".join(str(q) for q in self.qubits if self.block is None) if self.block is None \
            else " ".join(map(str, self.controls))
        angle = "" if self.theta is None else f" {self.theta:.17g}"
        extra = f" power={self.power} block_len={len(self.block.gates)}" if self.block is not None else ""
        return f"{self.kind} {qs}{angle}{extra}".rstrip()


def H(q):
    return Gate("H", q)


def X(q):
    return Gate("X", q)


def Z(q):
    return Gate("Z", q)


def Ry(q, theta):
    return Gate("Ry", q, theta=float(theta))


def Rz(q, theta):
    return Gate("Rz", q, theta=float(theta))


def P(q, theta):
    return Gate("P", q, theta=float(theta))


def CRy(c, t, theta):
    return Gate("CRy", t, (c,), float(theta))


def CRz(c, t, theta):
    return Gate("CRz", t, (c,), float(theta))


def CNOT(c, t):
    return Gate("CNOT", t, (c,))


def CPhase(controls, t, theta):
    controls = (controls,) if isinstance(controls, int) else tuple(controls)
    return Gate("CPhase", t, controls, float(theta))


def SWAP(a, b):
    return Gate("SWAP", a, target2=b)


def GPhase(theta, controls=()):
    return Gate("GPhase", None, tuple(controls), float(theta))


@dataclass(frozen=True)
class Circuit:
    """Ordered gate list on ``num_qubits`` qubits.

    Compiled DSP circuits use index qubits ``0..n_index-1``, the data qubit
    ``n_index`` and amplitude-estimation ancillas above that.
    """

    num_qubits: int
    gates: tuple[Gate, ...] = ()
    n_index: int | None = None
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        for g in self.gates:
            qs = g.qubits
            if any(q < 0 or q >= self.num_qubits for q in qs):
                raise QubitIndexError(f"{g.kind} touches {qs} outside {self.num_qubits} qubits")
            if len(set(qs)) != len(qs) and g.block is None:
                raise QubitIndexError(f"{g.kind} repeats a qubit: {qs}")

    @property
    def data_qubit(self) -> int | None:
        return self.n_index

    def __add__(self, other: Circuit) -> Circuit:
        return Circuit(max(self.num_qubits, other.num_qubits), self.gates + other.gates,
                       self.n_index if self.n_index is not None else other.n_index, {**self.meta, **other.meta})

    def widen(self, num_qubits: int) -> Circuit:
        return replace(self, num_qubits=num_qubits)

    def inverse(self) -> Circuit:
        return replace(self, gates=tuple(g.inverse() for g in reversed(self.gates)))

    def dump(self) -> str:
        """Golden-file text form: one gate per line."""
        return "".join(g.line() + "\n" for g in self.gates)


def gate_count(circuit: Circuit) -> dict[str, int]:
    counts = Counter(g.kind for g in circuit.gates)
    return dict(sorted(counts.items()))


def controlled_v_count(circuit: Circuit) -> int:
    return sum(1 for g in circuit.gates if g.kind in CONTROLLED_V and g.target == circuit.data_qubit)

"""Canonical (phase-estimation) amplitude estimation on the statevector engine."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .circuit import CPhase, Circuit, Gate, GPhase, H, SWAP, X, Z
from .errors import SizeError
from .statevector import MAX_QUBITS, apply_gate, marginal, new_statevector, run_circuit


@dataclass(frozen=True)
class AeProblem:
    """``prep`` is the algorithm A; the good subspace is ``flag_qubit == 1``."""

    prep: Circuit
    flag_qubit: int
    m: int

    def __post_init__(self):
        if not 0 <= self.flag_qubit < self.prep.num_qubits:
            raise ValueError("flag qubit must lie inside the preparation register")
        if self.m < 1:
            raise ValueError("need at least one ancilla (m >= 1)")

    @property
    def M(self) -> int:
        return 2**self.m


@dataclass(frozen=True)
class AeResult:
    y: int
    a_hat: float
    m: int
    distribution: np.ndarray | None = None


def estimate_from_outcome(y: int, M: int) -> float:
    return math.sin(math.pi * y / M) ** 2


def error_bound(a: float, m: int) -> float:
    """Standard single-shot bound on ``|a_hat - a|`` for ``M = 2**m``."""
    M = 2**m
    return 2 * math.pi * math.sqrt(max(a * (1 - a), 0.0)) / M + math.pi**2 / M**2


def build_grover_operator(problem: AeProblem) -> Circuit:
    """``Q = -A S_0 A^dagger S_f`` as a gate list on the preparation register."""
    prep = problem.prep
    qs = list(range(prep.num_qubits))
    gates: list[Gate] = [Z(problem.flag_qubit)]
    gates += prep.inverse().gates
    gates += [X(q) for q in qs]
    gates.append(Z(qs[0]) if len(qs) == 1 else CPhase(tuple(qs[:-1]), qs[-1], math.pi))
    gates += [X(q) for q in qs]
    gates += prep.gates
    gates.append(GPhase(math.pi))
    return Circuit(prep.num_qubits, gates, prep.n_index, {"role": "grover"})


def qft_circuit(m: int, qubits: list[int] | None = None, num_qubits: int | None = None) -> Circuit:
    """QFT with ``|y> -> M^-1/2 sum_x exp(2 pi i x y / M) |x>``; ``qubits[0]`` is the low bit."""
    if m < 1:
        raise ValueError("m must be >= 1")
    qubits = list(range(m)) if qubits is None else list(qubits)
    gates: list[Gate] = []
    for i in reversed(range(m)):
        gates.append(H(qubits[i]))
        for j in reversed(range(i)):
            gates.append(CPhase(qubits[j], qubits[i], math.pi / 2 ** (i - j)))
    for i in range(m // 2):
        gates.append(SWAP(qubits[i], qubits[m - 1 - i]))
    return Circuit(num_qubits or max(qubits) + 1, gates)


def run_ae(problem: AeProblem, seed: int | np.random.Generator | None = None,
           deterministic: bool = True) -> AeResult:
    """Phase estimation of Q; returns the argmax outcome or one sampled outcome."""
    nq = problem.prep.num_qubits
    total = nq + problem.m
    if total > MAX_QUBITS:
        raise SizeError(f"{total} qubits exceeds the engine cap of {MAX_QUBITS}")
    anc = list(range(nq, total))
    state = run_circuit(problem.prep.widen(total), new_statevector(total))
    for a in anc:
        apply_gate(state, H(a))
    grover = build_grover_operator(problem)
    for j, a in enumerate(anc):
        apply_gate(state, Gate("CU", None, (a,), block=grover, power=2**j))
    run_circuit(qft_circuit(problem.m, anc, total).inverse(), state)
    pmf = marginal(state, anc)
    if deterministic:
        y = int(np.argmax(pmf))
    else:
        rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
        y = int(rng.choice(pmf.size, p=pmf / pmf.sum()))
    return AeResult(y, estimate_from_outcome(y, problem.M), problem.m, pmf)


def dump_pmf_csv(result: AeResult, path) -> None:
    M = 2**result.m
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["y", "probability", "a_hat"])
        for y, p in enumerate(result.distribution):
            w.writerow([y, repr(float(p)), repr(estimate_from_outcome(y, M))])

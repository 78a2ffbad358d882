"""Characteristic-function estimates from compiled DSP circuits."""
from __future__ import annotations

import csv
import math
import struct
from dataclasses import dataclass

import numpy as np

from .amplitude_estimation import AeProblem, error_bound, run_ae
from .circuit import H, P
from .compiler import MeasurementScheme, SchemeKind, compile_circuit
from .errors import DomainError
from .model import DspModel
from .statevector import Statevector, apply_gate, expval_pauli, marginal, run_circuit, sample_counts

_MODES = {"x": 1, "y": 2, "cos": 3, "sin": 4}
CSV_HEADER = ["v", "re", "im", "method", "shots", "stderr_re", "stderr_im"]


@dataclass(frozen=True)
class CharFnEstimate:
    v: float
    value: complex
    method: str  # "Exact", "Shots" or "AE"
    shots: int | None = None
    stderr_re: float | None = None
    stderr_im: float | None = None
    ae_m: int | None = None

    def conj(self) -> CharFnEstimate:
        """The estimate at ``-v`` implied by a real-valued ``S_n``."""
        return CharFnEstimate(-self.v, self.value.conjugate(), self.method, self.shots,
                              self.stderr_re, self.stderr_im, self.ae_m)

    def csv_row(self) -> list[str]:
        def fmt(x):
            return "" if x is None else repr(float(x)) if not isinstance(x, int) else str(x)
        return [repr(float(self.v)), repr(float(self.value.real)), repr(float(self.value.imag)),
                self.method, fmt(self.shots), fmt(self.stderr_re), fmt(self.stderr_im)]


def derive_seed(seed: int, v: float, mode: str) -> np.random.SeedSequence:
    """Per-evaluation seed sequence from the user seed, the point ``v`` and the mode."""
    (v_bits,) = struct.unpack("<Q", struct.pack("<d", float(v) + 0.0))
    return np.random.SeedSequence([seed & 0xFFFFFFFFFFFFFFFF, v_bits, _MODES[mode]])


def _prepared(model: DspModel, scheme: MeasurementScheme) -> Statevector:
    return run_circuit(compile_circuit(model, scheme))


def estimate_exact(model: DspModel, v: float) -> CharFnEstimate:
    state = _prepared(model, MeasurementScheme(SchemeKind.PAULI_RZ, v))
    d = model.n
    return CharFnEstimate(v, complex(expval_pauli(state, "X", d), expval_pauli(state, "Y", d)), "Exact")


def _measure_pauli(state: Statevector, axis: str, qubit: int, shots: int,
                   rng: np.random.Generator) -> tuple[float, float]:
    rotated = state.copy()
    if axis == "Y":
        apply_gate(rotated, P(qubit, -math.pi / 2))
    apply_gate(rotated, H(qubit))
    counts = sample_counts(rotated, shots, rng)
    pos = rotated.num_qubits - 1 - qubit
    zeros = sum(c for bits, c in counts.items() if bits[pos] == "0")
    p = zeros / shots
    return 2 * p - 1, 2 * math.sqrt(p * (1 - p) / shots)


def estimate_shots(model: DspModel, v: float, shots: int, seed: int) -> CharFnEstimate:
    """Two independent shot batches, one per Pauli observable."""
    if shots < 2:
        raise DomainError("need at least 2 shots")
    state = _prepared(model, MeasurementScheme(SchemeKind.PAULI_RZ, v))
    d = model.n
    re, se_re = _measure_pauli(state, "X", d, shots, np.random.default_rng(derive_seed(seed, v, "x")))
    im, se_im = _measure_pauli(state, "Y", d, shots, np.random.default_rng(derive_seed(seed, v, "y")))
    return CharFnEstimate(v, complex(re, im), "Shots", shots, se_re, se_im)


def ae_problem(model: DspModel, v: float, m: int, mode: str = "cos") -> AeProblem:
    if mode not in ("cos", "sin"):
        raise ValueError("mode must be 'cos' or 'sin'")
    scheme = MeasurementScheme(SchemeKind.AMPLITUDE_RY, v, 1 if mode == "cos" else -1)
    return AeProblem(compile_circuit(model, scheme), model.n, m)


def exact_good_amplitude(model: DspModel, v: float, mode: str = "cos") -> float:
    """``a = <Psi_1|Psi_1>`` read directly off the prepared state."""
    problem = ae_problem(model, v, 1, mode)
    return float(marginal(run_circuit(problem.prep), [problem.flag_qubit])[1])


def estimate_ae(model: DspModel, v: float, m: int, seed: int = 0, mode: str = "cos",
                deterministic: bool = True) -> CharFnEstimate:
    """One component of the characteristic function via amplitude estimation.

    ``mode="cos"`` fills the real part, ``mode="sin"`` the imaginary part.
    """
    if m < 3:
        raise DomainError("amplitude estimation needs m >= 3")
    rng = np.random.default_rng(derive_seed(seed, v, mode))
    res = run_ae(ae_problem(model, v, m, mode), rng, deterministic)
    value = 1.0 - 2.0 * res.a_hat
    return CharFnEstimate(v, complex(value, 0.0) if mode == "cos" else complex(0.0, value), "AE", ae_m=m)


def estimate_ae_complex(model: DspModel, v: float, m: int, seed: int = 0,
                        deterministic: bool = True) -> CharFnEstimate:
    re = estimate_ae(model, v, m, seed, "cos", deterministic).value.real
    im = estimate_ae(model, v, m, seed, "sin", deterministic).value.imag
    return CharFnEstimate(v, complex(re, im), "AE", ae_m=m)


def ae_value_bound(a: float, m: int) -> float:
    """Bound on ``|(1 - 2 a_hat) - (1 - 2 a)|`` implied by the amplitude bound."""
    return 2 * error_bound(a, m)


def write_estimates_csv(estimates, path_or_file) -> None:
    own = isinstance(path_or_file, (str, bytes)) or hasattr(path_or_file, "__fspath__")
    fh = open(path_or_file, "w", newline="", encoding="utf-8") if own else path_or_file
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for est in estimates:
            w.writerow(est.csv_row())
    finally:
        if own:
            fh.close()

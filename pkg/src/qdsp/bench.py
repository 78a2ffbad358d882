"""Error-versus-budget comparison of Monte Carlo, Pauli shots and amplitude estimation."""
from __future__ import annotations

import math
import time
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from .estimator import ae_value_bound, estimate_ae, estimate_shots, exact_good_amplitude
from .model import DspModel, LevelSpec, char_fn_brute_force, monte_carlo_estimate

HEADER = ("method", "budget", "abs_error", "error_bound", "wall_time")


@dataclass(frozen=True)
class BenchRow:
    method: str
    budget: int  # shots, or m for amplitude estimation
    abs_error: float
    error_bound: float
    wall_time: float | None = None

    def csv_row(self) -> list[str]:
        wt = "" if self.wall_time is None else f"{self.wall_time:.6f}"
        return [self.method, str(self.budget), repr(float(self.abs_error)), repr(float(self.error_bound)), wt]


def fair_walk(n: int = 2) -> DspModel:
    return DspModel.independent([LevelSpec((-1.0, 1.0), (0.5, 0.5))] * n)


def _rep_seeds(seed: int, reps: int) -> list[int]:
    return [int(s) for s in np.random.SeedSequence([seed & 0xFFFFFFFFFFFFFFFF, 0xBE4C]).generate_state(reps, np.uint64)]


def bench(model: DspModel, v: float = 1.0, seed: int = 0, *, shots: Sequence[int] = (100, 1000, 10000),
          ae_ms: Sequence[int] = (4, 5, 6, 7, 8), reps: int = 20, timing: bool = False) -> list[BenchRow]:
    """Estimate ``E[cos(v S_n)]`` per method and budget.

    Sampling methods report the RMS error over ``reps`` seeded repetitions and
    the mean reported standard error. Amplitude estimation is run in
    deterministic readout mode and reports the theoretical bound.
    """
    target = char_fn_brute_force(model, v).real
    seeds = _rep_seeds(seed, reps)
    rows: list[BenchRow] = []

    def timed(fn):
        t0 = time.perf_counter()
        out = fn()
        return out, (time.perf_counter() - t0 if timing else None)

    for N in shots:
        def mc():
            res = [monte_carlo_estimate(model, lambda x: np.cos(v * x), N, s) for s in seeds]
            return _rms([m - target for m, _ in res]), float(np.mean([se for _, se in res]))
        (err, se), wt = timed(mc)
        rows.append(BenchRow("monte_carlo", N, err, se, wt))
    for N in shots:
        def sh():
            res = [estimate_shots(model, v, N, s) for s in seeds]
            return _rms([e.value.real - target for e in res]), float(np.mean([e.stderr_re for e in res]))
        (err, se), wt = timed(sh)
        rows.append(BenchRow("shots", N, err, se, wt))
    a = exact_good_amplitude(model, v, "cos")
    for m in ae_ms:
        est, wt = timed(lambda: estimate_ae(model, v, m, seed, "cos"))
        rows.append(BenchRow("ae", m, abs(est.value.real - target), ae_value_bound(a, m), wt))
    return rows


def _rms(xs) -> float:
    return math.sqrt(sum(x * x for x in xs) / len(xs))

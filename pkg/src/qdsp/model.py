"""Discrete stochastic process (DSP) models and their classical oracles.

A model describes ``S_n = x0 + X_1 + ... + X_n`` where each increment ``X_l``
takes one of ``k`` values ``values[l][j]``. Paths are labelled by index
vectors ``(j_1, ..., j_n)`` with 0-based entries. When a path is flattened to
an integer, level 1 is the least-significant digit: ``J = sum_l j_l k**(l-1)``.
That is the same ordering the statevector engine uses for index qubits.
"""
from __future__ import annotations

import json
import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

import numpy as np
from scipy.special import ndtri

from .errors import CapExceeded, DomainError

DEFAULT_CAP = 2**24
_SUM_TOL = 1e-12


class Kind(str, Enum):
    INDEPENDENT = "Independent"
    MARKOV = "FirstOrderMarkov"
    CRW = "CorrelatedWalk"


def _check_distribution(probs: np.ndarray, what: str) -> None:
    if not np.all(np.isfinite(probs)) or np.any(probs < 0):
        raise DomainError(f"{what}: probabilities must be finite and non-negative")
    if abs(math.fsum(probs) - 1.0) > _SUM_TOL:
        raise DomainError(f"{what}: probabilities sum to {math.fsum(probs)!r}, not 1")


def _frozen(a) -> np.ndarray:
    arr = np.array(a, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class LevelSpec:
    """Realizations of one increment and their probabilities."""

    values: tuple[float, ...]
    probs: tuple[float, ...]

    def __post_init__(self):
        if len(self.values) < 1 or len(self.values) != len(self.probs):
            raise DomainError("a level needs k >= 1 values with one probability each")
        if not all(math.isfinite(x) for x in self.values):
            raise DomainError("level values must be finite")
        _check_distribution(np.asarray(self.probs, dtype=float), "level")


@dataclass(frozen=True)
class PathRealization:
    index: tuple[int, ...]
    prob: float
    sum: float


@dataclass(frozen=True, eq=False)
class DspModel:
    """An immutable DSP description.

    Use the ``independent``, ``markov`` and ``correlated_walk`` constructors
    rather than building instances by hand. ``values`` has shape ``(n, k)``.
    Independent models carry per-level ``probs`` ``(n, k)``; Markov-type models
    carry an ``initial`` distribution over ``j_1`` and ``transitions`` of shape
    ``(n - 1, k, k)`` with ``transitions[l-2][i, j] = P[j_l = j | j_{l-1} = i]``.
    """

    kind: Kind
    values: np.ndarray
    x0: float = 0.0
    probs: np.ndarray | None = None
    initial: np.ndarray | None = None
    transitions: np.ndarray | None = None
    persistence_p: tuple[float, ...] | None = None
    persistence_q: tuple[float, ...] | None = None

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def k(self) -> int:
        return self.values.shape[1]

    @property
    def levels(self) -> list[LevelSpec]:
        """Per-level values with marginal probabilities."""
        if self.kind is Kind.INDEPENDENT:
            marg = self.probs
        else:
            rows = [self.initial]
            for T in self.transitions:
                rows.append(rows[-1] @ T)
            marg = np.array(rows)
        return [
            LevelSpec(tuple(map(float, v)), tuple(map(float, p / p.sum())))
            for v, p in zip(self.values, marg)
        ]

    @property
    def step_values(self) -> tuple[float, float] | None:
        if self.kind is not Kind.CRW:
            return None
        return float(self.values[0, 0]), float(self.values[0, 1])

    # -- constructors -------------------------------------------------------

    @classmethod
    def independent(cls, levels: Sequence[LevelSpec | tuple], x0: float = 0.0) -> DspModel:
        """Independent increments; shorter levels are padded with zero-probability entries."""
        specs = [lv if isinstance(lv, LevelSpec) else LevelSpec(tuple(lv[0]), tuple(lv[1])) for lv in levels]
        if not specs:
            raise DomainError("a model needs n >= 1 levels")
        k = max(len(s.values) for s in specs)
        values = np.zeros((len(specs), k))
        probs = np.zeros((len(specs), k))
        for l, s in enumerate(specs):
            values[l, : len(s.values)] = s.values
            probs[l, : len(s.probs)] = s.probs
        _check_x0(x0)
        return cls(Kind.INDEPENDENT, _frozen(values), float(x0), probs=_frozen(probs))

    @classmethod
    def markov(cls, values, initial, transitions, x0: float = 0.0) -> DspModel:
        values = np.asarray(values, dtype=float)
        initial = np.asarray(initial, dtype=float)
        transitions = np.asarray(transitions, dtype=float).reshape(-1, values.shape[1], values.shape[1]) \
            if len(transitions) else np.zeros((0, values.shape[1], values.shape[1]))
        _check_markov(values, initial, transitions)
        _check_x0(x0)
        return cls(Kind.MARKOV, _frozen(values), float(x0), initial=_frozen(initial),
                   transitions=_frozen(transitions))

    @classmethod
    def correlated_walk(cls, step_values: tuple[float, float], p: Sequence[float],
                        q: Sequence[float], x0: float = 0.0) -> DspModel:
        """Correlated random walk with per-level persistence.

        Index 0 selects ``step_values[0]`` and index 1 ``step_values[1]``.
        ``p[0]`` is ``P[j_1 = 0]``; for ``l >= 2``, ``p[l-1]`` is the probability of
        index 0 after index 0 and ``q[l-1]`` the probability of index 0 after
        index 1. ``q[0]`` has no transition role and is only range-checked.
        """
        p = tuple(float(x) for x in p)
        q = tuple(float(x) for x in q)
        if len(p) != len(q) or not p:
            raise DomainError("persistence lists must be non-empty and of equal length")
        if any(not 0.0 <= x <= 1.0 for x in p + q):
            raise DomainError("persistence parameters must lie in [0, 1]")
        if len(step_values) != 2 or not all(math.isfinite(x) for x in step_values):
            raise DomainError("a correlated walk needs two finite step values")
        _check_x0(x0)
        n = len(p)
        values = np.tile(np.asarray(step_values, dtype=float), (n, 1))
        initial = np.array([p[0], 1.0 - p[0]])
        transitions = np.array([[[p[l], 1.0 - p[l]], [q[l], 1.0 - q[l]]] for l in range(1, n)]).reshape(-1, 2, 2)
        return cls(Kind.CRW, _frozen(values), float(x0), initial=_frozen(initial),
                   transitions=_frozen(transitions), persistence_p=p, persistence_q=q)

    # -- serialization ------------------------------------------------------

    def to_dict(self) -> dict:
        doc: dict = {"kind": self.kind.value, "x0": self.x0}
        if self.kind is Kind.INDEPENDENT:
            doc["levels"] = [{"values": v.tolist(), "probs": p.tolist()} for v, p in zip(self.values, self.probs)]
        elif self.kind is Kind.MARKOV:
            doc["levels"] = [{"values": v.tolist()} for v in self.values]
            doc["levels"][0]["probs"] = self.initial.tolist()
            doc["transitions"] = self.transitions.tolist()
        else:
            doc["step_values"] = list(self.step_values)
            doc["persistence_p"] = list(self.persistence_p)
            doc["persistence_q"] = list(self.persistence_q)
        return doc

    @classmethod
    def from_dict(cls, doc: dict) -> DspModel:
        try:
            kind = Kind(doc["kind"])
            x0 = float(doc.get("x0", 0.0))
            if kind is Kind.INDEPENDENT:
                return cls.independent([LevelSpec(tuple(lv["values"]), tuple(lv["probs"])) for lv in doc["levels"]], x0)
            if kind is Kind.MARKOV:
                levels = doc["levels"]
                initial = doc.get("initial_dist", levels[0].get("probs"))
                return cls.markov([lv["values"] for lv in levels], initial, doc.get("transitions", []), x0)
            return cls.correlated_walk(tuple(doc["step_values"]), doc["persistence_p"], doc["persistence_q"], x0)
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, DomainError):
                raise
            raise DomainError(f"malformed model document: {exc!r}") from exc

    def __eq__(self, other):
        if not isinstance(other, DspModel):
            return NotImplemented
        return self.to_dict() == other.to_dict()

    __hash__ = None


def _check_x0(x0: float) -> None:
    if not math.isfinite(x0):
        raise DomainError("x0 must be finite")


def _check_markov(values: np.ndarray, initial: np.ndarray, transitions: np.ndarray) -> None:
    if values.ndim != 2 or values.shape[0] < 1 or values.shape[1] < 1:
        raise DomainError("values must be an (n, k) array with n, k >= 1")
    if not np.all(np.isfinite(values)):
        raise DomainError("level values must be finite")
    n, k = values.shape
    if initial.shape != (k,):
        raise DomainError(f"initial distribution must have {k} entries")
    _check_distribution(initial, "initial distribution")
    if transitions.shape != (n - 1, k, k):
        raise DomainError(f"expected {n - 1} transition matrices of shape {k}x{k}")
    for l, T in enumerate(transitions):
        for i, row in enumerate(T):
            _check_distribution(row, f"transition {l + 2} row {i}")


def load_model(path: str | Path) -> DspModel:
    with open(path, encoding="utf-8") as fh:
        return DspModel.from_dict(json.load(fh))


def dump_model(model: DspModel, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(model.to_dict(), fh, indent=2)
        fh.write("\n")


# -- exact oracles ----------------------------------------------------------

def _check_cap(model: DspModel, cap: int) -> None:
    if model.k**model.n > cap:
        raise CapExceeded(f"k^n = {model.k}^{model.n} paths exceeds the enumeration cap {cap}")


def path_table(model: DspModel, cap: int = DEFAULT_CAP) -> tuple[np.ndarray, np.ndarray]:
    """Probabilities and sums of all ``k**n`` paths, indexed by flattened path index."""
    _check_cap(model, cap)
    k = model.k
    if model.kind is Kind.INDEPENDENT:
        probs = model.probs[0].copy()
    else:
        probs = model.initial.copy()
    sums = model.x0 + model.values[0]
    for l in range(1, model.n):
        if model.kind is Kind.INDEPENDENT:
            probs = (model.probs[l][:, None] * probs[None, :]).ravel()
        else:
            prev = (np.arange(probs.size) // k ** (l - 1)) % k
            probs = (model.transitions[l - 1][prev].T * probs[None, :]).ravel()
        sums = (model.values[l][:, None] + sums[None, :]).ravel()
    return probs, sums


def path_index(flat: int, n: int, k: int) -> tuple[int, ...]:
    return tuple((flat // k**l) % k for l in range(n))


def enumerate_paths(model: DspModel, cap: int = DEFAULT_CAP) -> list[PathRealization]:
    probs, sums = path_table(model, cap)
    return [PathRealization(path_index(i, model.n, model.k), float(p), float(s))
            for i, (p, s) in enumerate(zip(probs, sums))]


def _evaluate(f: Callable, xs: np.ndarray) -> np.ndarray:
    try:
        out = np.asarray(f(xs), dtype=float)
        if out.shape == xs.shape:
            return out
    except (TypeError, ValueError):
        pass
    return np.fromiter((f(float(x)) for x in xs), dtype=float, count=xs.size)


def expectation_brute_force(model: DspModel, f: Callable, cap: int = DEFAULT_CAP) -> float:
    probs, sums = path_table(model, cap)
    return float(np.dot(_evaluate(f, sums), probs))


def char_fn_brute_force(model: DspModel, v: float, cap: int = DEFAULT_CAP) -> complex:
    probs, sums = path_table(model, cap)
    return complex(np.dot(probs, np.exp(1j * v * sums)))


def sum_distribution(model: DspModel, decimals: int = 12) -> tuple[np.ndarray, np.ndarray]:
    """Exact law of ``S_n`` by dynamic programming over distinct partial sums.

    Sums that agree to ``decimals`` places are merged, so lattice walks stay
    polynomial in ``n`` where path enumeration would not.
    """
    k = model.k
    # state: (last index or -1, rounded sum) -> [sum, prob]
    if model.kind is Kind.INDEPENDENT:
        first = model.probs[0]
    else:
        first = model.initial
    states: dict = {}
    for j in range(k):
        if first[j] > 0:
            _accumulate(states, model, j, model.x0 + model.values[0, j], first[j], decimals)
    for l in range(1, model.n):
        nxt: dict = {}
        for (last, _), (s, p) in states.items():
            row = model.probs[l] if model.kind is Kind.INDEPENDENT else model.transitions[l - 1][last]
            for j in range(k):
                if row[j] > 0:
                    _accumulate(nxt, model, j, s + model.values[l, j], p * row[j], decimals)
        states = nxt
    merged: dict = {}
    for (_, key), (s, p) in states.items():
        entry = merged.setdefault(key, [s, 0.0])
        entry[1] += p
    keys = sorted(merged)
    return np.array([merged[key][0] for key in keys]), np.array([merged[key][1] for key in keys])


def _accumulate(states: dict, model: DspModel, j: int, s: float, p: float, decimals: int) -> None:
    last = -1 if model.kind is Kind.INDEPENDENT else j
    key = (last, round(s, decimals))
    entry = states.get(key)
    if entry is None:
        states[key] = [s, p]
    else:
        entry[1] += p


def expectation_from_distribution(model: DspModel, f: Callable) -> float:
    sums, probs = sum_distribution(model)
    return float(np.dot(_evaluate(f, sums), probs))


def sum_range(model: DspModel) -> tuple[float, float]:
    """Smallest and largest attainable value of ``S_n`` (over all listed values)."""
    return (model.x0 + float(model.values.min(axis=1).sum()),
            model.x0 + float(model.values.max(axis=1).sum()))


# -- sampling baselines -----------------------------------------------------

def sample_paths(model: DspModel, shots: int, rng: np.random.Generator) -> np.ndarray:
    """Draw ``shots`` realizations of ``S_n``."""
    u = rng.random((shots, model.n))
    if model.kind is Kind.INDEPENDENT:
        first = model.probs[0]
    else:
        first = model.initial
    idx = _inverse_cdf(np.cumsum(first)[None, :], u[:, 0])
    sums = model.x0 + model.values[0][idx]
    for l in range(1, model.n):
        if model.kind is Kind.INDEPENDENT:
            cum = np.cumsum(model.probs[l])[None, :]
        else:
            cum = np.cumsum(model.transitions[l - 1], axis=1)[idx]
        idx = _inverse_cdf(cum, u[:, l])
        sums = sums + model.values[l][idx]
    return sums


def _inverse_cdf(cum: np.ndarray, u: np.ndarray) -> np.ndarray:
    k = cum.shape[1]
    return np.minimum((u[:, None] >= cum[:, :-1]).sum(axis=1), k - 1) if k > 1 else np.zeros(u.size, dtype=int)


def monte_carlo_estimate(model: DspModel, f: Callable, shots: int, seed: int) -> tuple[float, float]:
    """Plain Monte Carlo estimate of ``E[f(S_n)]``; returns ``(mean, stderr)``."""
    if shots < 2:
        raise DomainError("monte carlo needs at least 2 shots")
    rng = np.random.default_rng(seed)
    fx = _evaluate(f, sample_paths(model, shots, rng))
    return float(fx.mean()), float(fx.std(ddof=1) / math.sqrt(shots))


def normal_quantile(p: float) -> float:
    if not 0.0 < p < 1.0:
        raise DomainError("quantile level must lie in (0, 1)")
    return float(ndtri(p))


def sample_count_for_margin(alpha: float, eps: float) -> int:
    """Shots needed for a Bernoulli-type estimate to be within ``eps`` at confidence ``1 - alpha``."""
    if not (0.0 < alpha < 1.0) or not (eps > 0.0) or not math.isfinite(eps):
        raise DomainError("need 0 < alpha < 1 and eps > 0")
    z = normal_quantile(1.0 - alpha / 2.0)
    # shave float noise so an exact integer ratio is not bumped up by one
    return max(1, math.ceil(z * z / (4.0 * eps * eps) * (1.0 - 1e-12)))

"""Worked examples: Delta of a European call and a correlated random walk."""
from __future__ import annotations

import json
import math
from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, fields

from scipy.special import ndtr

from .errors import DomainError
from .estimator import CharFnEstimate, estimate_ae_complex, estimate_exact, estimate_shots
from .fourier import check_periodization, delta_sum_form
from .model import DspModel, LevelSpec, char_fn_brute_force, expectation_brute_force, expectation_from_distribution

METHODS = ("exact", "shots", "ae")


def normal_cdf(x: float) -> float:
    return 0.5 * math.erfc(-x / math.sqrt(2.0))


@dataclass(frozen=True)
class MarketParams:
    mu: float
    sigma: float
    r: float
    S0: float
    t: float
    T: float
    K: float | None = None

    def __post_init__(self):
        if not self.sigma > 0:
            raise DomainError("sigma must be positive")
        if not self.S0 > 0 or (self.K is not None and not self.K > 0):
            raise DomainError("prices must be positive")
        if not self.T > self.t >= 0:
            raise DomainError("need T > t >= 0")

    @property
    def tau(self) -> float:
        return self.T - self.t

    def strike(self, K: float | None) -> float:
        K = self.K if K is None else K
        if K is None or not K > 0:
            raise DomainError("a positive strike K is required")
        return float(K)

    @classmethod
    def from_dict(cls, doc: dict) -> MarketParams:
        names = {f.name for f in fields(cls)}
        try:
            return cls(**{k: float(v) for k, v in doc.items() if k in names})
        except TypeError as exc:
            raise DomainError(f"malformed market parameters: {exc}") from exc

    @classmethod
    def load(cls, path) -> MarketParams:
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))


# Parameters of the Delta experiment
DELTA_PARAMS = MarketParams(mu=0.0, sigma=0.02, r=0.02, S0=100.0, t=1.0, T=10.0)
DELTA_STRIKES = (25, 55, 85, 105, 110, 115, 120, 125, 130, 160, 190, 220)


@dataclass(frozen=True)
class DonskerWalk:
    """Fair +-1 walk scaled to approximate ``mu_B t + sigma_B W_t`` at ``t = 1``."""

    mu_B: float
    sigma_B: float
    n: int
    x0: float = 0.0

    def __post_init__(self):
        if self.n < 1:
            raise DomainError("need n >= 1 steps")
        if not self.sigma_B > 0:
            raise DomainError("sigma_B must be positive")

    def increments(self) -> tuple[float, float]:
        drift = self.mu_B / self.n
        spread = self.sigma_B / math.sqrt(self.n)
        return drift - spread, drift + spread

    def to_model(self) -> DspModel:
        lo, hi = self.increments()
        return DspModel.independent([LevelSpec((lo, hi), (0.5, 0.5))] * self.n, self.x0)


def delta_start(params: MarketParams, K: float | None = None) -> float:
    K = params.strike(K)
    return (math.log(params.S0) - math.log(K) + (params.r + params.sigma**2 / 2) * params.tau) / (
        params.sigma * math.sqrt(params.tau))


def delta_walk(params: MarketParams, n: int, K: float | None = None) -> DonskerWalk:
    root = math.sqrt(params.tau)
    return DonskerWalk((params.mu - params.sigma**2 / 2) / (params.sigma * root), 1.0 / root, n,
                       delta_start(params, K))


def build_delta_model(params: MarketParams, n: int, K: float | None = None) -> DspModel:
    return delta_walk(params, n, K).to_model()


def black_scholes_delta(params: MarketParams, K: float | None = None) -> float:
    return normal_cdf(delta_start(params, K))


def _parallel_map(fn, items, threads: int | None):
    if threads == 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def evaluate_grid(model: DspModel, ls: Sequence[int], P: float, method: str = "exact", *,
                  shots: int = 8192, ae_m: int = 6, seed: int = 0, threads: int | None = 1) -> list[CharFnEstimate]:
    """Characteristic function at ``v_l = 2 pi l / P`` for each ``l`` in ``ls``."""
    if method not in METHODS:
        raise DomainError(f"unknown method {method!r}; choose from {METHODS}")

    def one(l: int) -> CharFnEstimate:
        v = 2 * math.pi * l / P
        if method == "exact":
            return estimate_exact(model, v)
        if method == "shots":
            return estimate_shots(model, v, shots, seed)
        return estimate_ae_complex(model, v, ae_m, seed)

    return _parallel_map(one, list(ls), threads)


@dataclass(frozen=True)
class DeltaRow:
    K: float
    estimate_re: float
    estimate_im: float
    reference: float
    brute_force: float

    HEADER = ("K", "estimate_re", "estimate_im", "reference", "brute_force")

    def csv_row(self) -> list[str]:
        return [repr(float(x)) for x in (self.K, self.estimate_re, self.estimate_im, self.reference, self.brute_force)]


def run_delta_pipeline(params: MarketParams, K_list: Sequence[float], n: int = 4, L: int = 100, P: float = 100.0,
                       method: str = "exact", seed: int = 0, *, shots: int = 8192, ae_m: int = 6,
                       explicit_negative: bool = False, threads: int | None = 1) -> list[DeltaRow]:
    """Fourier-assembled Delta per strike, next to the closed form and the enumeration oracle.

    Only ``l = 0..L`` are evaluated; negative orders come from conjugation
    unless ``explicit_negative`` is set.
    """
    rows = []
    for K in sorted(float(k) for k in K_list):
        model = build_delta_model(params, n, K)
        check_periodization(model, P)
        ls = range(-L if explicit_negative else 0, L + 1)
        ests = evaluate_grid(model, ls, P, method, shots=shots, ae_m=ae_m, seed=seed, threads=threads)
        evals = {l: e.value for l, e in zip(ls, ests)}
        est = delta_sum_form(evals, P, L, synthesize_negative=not explicit_negative)
        rows.append(DeltaRow(K, est.real, est.imag, black_scholes_delta(params, K),
                             expectation_brute_force(model, normal_cdf)))
    return rows


def build_crw_model(x0: float, x_plus: float, x_minus: float, p: Sequence[float], q: Sequence[float]) -> DspModel:
    """Index 0 steps by ``x_plus``, index 1 by ``x_minus``; see ``DspModel.correlated_walk``."""
    return DspModel.correlated_walk((x_plus, x_minus), p, q, x0)


CRW_EXAMPLE = dict(x0=0.0, x_plus=1.0, x_minus=-1.0, p=(1 / 2, 2 / 3, 5 / 6, 1.0), q=(1 / 2, 1 / 3, 1 / 6, 0.0))


def load_crw_params(path) -> DspModel:
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    try:
        return build_crw_model(float(doc.get("x0", 0.0)), float(doc["x_plus"]), float(doc["x_minus"]),
                               doc["p"], doc["q"])
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, DomainError):
            raise
        raise DomainError(f"malformed CRW parameters: {exc!r}") from exc


@dataclass(frozen=True)
class CrwRow:
    v: float
    re: float
    im: float
    oracle_re: float
    oracle_im: float

    HEADER = ("v", "re", "im", "oracle_re", "oracle_im")

    def csv_row(self) -> list[str]:
        return [repr(float(x)) for x in (self.v, self.re, self.im, self.oracle_re, self.oracle_im)]


def run_crw_pipeline(model: DspModel, L: int = 100, P: float = 100.0, method: str = "exact", seed: int = 0, *,
                     shots: int = 8192, ae_m: int = 6, threads: int | None = 1) -> list[CrwRow]:
    """Characteristic function on the symmetric grid ``l = -L..L`` with oracle columns."""
    ls = list(range(-L, L + 1))
    ests = evaluate_grid(model, ls, P, method, shots=shots, ae_m=ae_m, seed=seed, threads=threads)
    rows = []
    for l, e in zip(ls, ests):
        o = char_fn_brute_force(model, e.v)
        rows.append(CrwRow(e.v, e.value.real, e.value.imag, o.real, o.imag))
    return rows


def donsker_gaps(params: MarketParams, K: float, ns: Sequence[int]) -> list[tuple[int, float, float]]:
    """``(n, E[Phi(S_n)], gap to closed form)`` using the exact law of the walk."""
    bs = black_scholes_delta(params, K)
    out = []
    for n in ns:
        e = expectation_from_distribution(build_delta_model(params, n, K), ndtr)
        out.append((n, e, e - bs))
    return out

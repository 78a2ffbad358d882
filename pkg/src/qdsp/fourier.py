"""Fourier-series assembly of ``E[f(S_n)]`` from characteristic-function values.

With ``f_L(x) = sum_{l=-L}^{L} c_l exp(2 pi i l x / P)`` linearity gives
``E[f_L(S_n)] = sum_l c_l phi(2 pi l / P)``.

Note on the normal-CDF coefficients: the closed form
``c_l = -i exp(-2 pi^2 l^2 / P^2) / (2 pi l)`` is the coefficient sequence of
``Phi(x) - x / P`` on ``[-P/2, P/2]`` (the function that is continuous across
the period boundary), not of ``Phi`` itself, so the assembled value carries a
bias of ``-E[S_n] / P``.
"""
from __future__ import annotations

import csv
import math
import warnings
from collections.abc import Callable, Mapping
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .errors import DomainError, MissingEval, QuadratureFailure
from .model import DspModel, sum_range


@dataclass(frozen=True)
class FourierSpec:
    P: float
    L: int
    coeffs: np.ndarray  # index l + L holds c_l

    def __post_init__(self):
        if not (self.P > 0 and math.isfinite(self.P)):
            raise DomainError("period P must be positive and finite")
        if self.L < 0:
            raise DomainError("order L must be >= 0")
        if len(self.coeffs) != 2 * self.L + 1:
            raise DomainError("need 2L + 1 coefficients")

    def c(self, l: int) -> complex:
        if abs(l) > self.L:
            return 0j
        return complex(self.coeffs[l + self.L])

    def frequencies(self) -> np.ndarray:
        return 2 * np.pi * np.arange(-self.L, self.L + 1) / self.P

    def evaluate(self, x) -> np.ndarray:
        """The truncated series ``f_L`` itself."""
        x = np.asarray(x, dtype=float)
        phase = np.exp(1j * np.multiply.outer(x, self.frequencies()))
        return phase @ self.coeffs


def cdf_fourier_coeffs(P: float, L: int) -> FourierSpec:
    """Gaussian-damped sawtooth coefficients standing in for the normal CDF."""
    if not (P > 0) or L < 1:
        raise DomainError("need P > 0 and L >= 1")
    coeffs = np.zeros(2 * L + 1, dtype=complex)
    coeffs[L] = 0.5
    for n in range(1, L + 1):
        c = -1j * math.exp(-2 * math.pi**2 * n * n / P**2) / (2 * math.pi * n)
        coeffs[L + n] = c
        coeffs[L - n] = c.conjugate()
    return FourierSpec(float(P), int(L), coeffs)


def numeric_fourier_coeffs(f: Callable[[float], float], P: float, L: int, tol: float = 1e-9) -> FourierSpec:
    """``c_l = (1/P) int_{-P/2}^{P/2} f(x) exp(-2 pi i l x / P) dx`` by adaptive quadrature."""
    if not (P > 0) or L < 0:
        raise DomainError("need P > 0 and L >= 0")
    a, b = -P / 2, P / 2
    coeffs = np.zeros(2 * L + 1, dtype=complex)
    for l in range(0, L + 1):
        w = 2 * math.pi * l / P
        if l == 0:
            re, err_re = integrate.quad(f, a, b, limit=500, epsabs=tol * P / 4, epsrel=0)
            im, err_im = 0.0, 0.0
        else:
            re, err_re = integrate.quad(f, a, b, weight="cos", wvar=w, limit=500, epsabs=tol * P / 4, epsrel=0)
            im, err_im = integrate.quad(f, a, b, weight="sin", wvar=w, limit=500, epsabs=tol * P / 4, epsrel=0)
        if max(err_re, err_im) / P > tol:
            raise QuadratureFailure(f"coefficient {l}: quadrature error {max(err_re, err_im) / P:.3g} above {tol}")
        c = complex(re, -im) / P
        coeffs[L + l] = c
        coeffs[L - l] = c.conjugate() if l else c
    return FourierSpec(float(P), int(L), coeffs)


def _eval_at(evals: Mapping[int, complex], l: int, synthesize: bool) -> complex:
    if l in evals:
        return complex(evals[l])
    if synthesize and -l in evals:
        return complex(evals[-l]).conjugate()
    raise MissingEval(f"no characteristic-function value for l = {l}")


def assemble_expectation(spec: FourierSpec, evals: Mapping[int, complex], synthesize_negative: bool = True) -> complex:
    """``sum_l c_l phi(2 pi l / P)``; ``evals`` maps ``l`` to ``phi(2 pi l / P)``.

    Missing negative ``l`` are filled in as ``conj(phi(-v))`` unless
    ``synthesize_negative`` is off. Terms with ``c_l = 0`` are skipped.
    """
    total = 0j
    for l in range(-spec.L, spec.L + 1):
        c = spec.c(l)
        if c == 0:
            continue
        total += c * _eval_at(evals, l, synthesize_negative)
    return total


def delta_sum_form(evals: Mapping[int, complex], P: float, L: int, synthesize_negative: bool = True) -> complex:
    """``1/2 - sum'_{l=-L}^{L} (i / 2 pi l) exp(-2 pi^2 l^2 / P^2) phi(2 pi l / P)``."""
    if not (P > 0) or L < 0:
        raise DomainError("need P > 0 and L >= 0")
    total = 0.5 + 0j
    for n in range(1, L + 1):
        g = math.exp(-2 * math.pi**2 * n * n / P**2) / (2 * math.pi * n)
        total -= 1j * g * _eval_at(evals, n, synthesize_negative)
        total += 1j * g * _eval_at(evals, -n, synthesize_negative)
    return total


def check_periodization(model: DspModel, P: float) -> bool:
    """Warn when the model's attainable range leaves ``[-P/2, P/2]``; True when inside."""
    lo, hi = sum_range(model)
    if lo < -P / 2 or hi > P / 2:
        warnings.warn(f"attainable range [{lo:.4g}, {hi:.4g}] exits [-P/2, P/2] for P = {P:g}",
                      RuntimeWarning, stacklevel=2)
        return False
    return True


def tail_magnitude(spec: FourierSpec, tail: int = 1) -> float:
    """Largest ``|c_l|`` over the last ``tail`` orders, an empirical truncation indicator."""
    return max(abs(spec.c(l)) for l in range(spec.L - tail + 1, spec.L + 1)) if spec.L else 0.0


def write_coeffs_csv(spec: FourierSpec, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["l", "re", "im"])
        for l in range(-spec.L, spec.L + 1):
            c = spec.c(l)
            w.writerow([l, repr(c.real), repr(c.imag)])


"""Characteristic functions of discrete stochastic processes on a statevector simulator."""

__version__ = "0.1.0"

from .model import DspModel, Kind, LevelSpec, char_fn_brute_force, expectation_brute_force, load_model
from .estimator import CharFnEstimate, estimate_ae, estimate_ae_complex, estimate_exact, estimate_shots
from .fourier import FourierSpec, assemble_expectation, cdf_fourier_coeffs, delta_sum_form

__all__ = [
    "CharFnEstimate", "DspModel", "FourierSpec", "Kind", "LevelSpec", "__version__", "assemble_expectation",
    "cdf_fourier_coeffs", "char_fn_brute_force", "delta_sum_form", "estimate_ae", "estimate_ae_complex",
    "estimate_exact", "estimate_shots", "expectation_brute_force", "load_model",
]

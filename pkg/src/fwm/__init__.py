"""Degenerate-pump four-wave-mixing entanglement witnesses.

Second-order perturbative Heisenberg solution of
H = ω_a a†a + ω_b b†b + ω_c c†c + g(a²b†c† + a†²bc), closed-form moment
witnesses for every two-mode pair and three-mode cut, an exact truncated
Fock-space propagation oracle, and a sweep/certification CLI.
"""
from .fockspace import (CutoffError, FockBasis, FockStateVector, MomentSpec,
                        coherent_state, conserved_charges, cutoffs_for, moment)
from .model import (ConfigError, CoherentInput, ModelParams,
                    PerturbativeCoefficients, coefficient_derivatives,
                    coefficients, delta_omega1)
from .oracle import (ComparisonReport, CompareResult, ConvergenceError,
                     Hamiltonian, build_hamiltonian, certification_summary,
                     compare, evolve, evolve_grid, oracle_witness)
from .residuals import eom_residual, etcr_residual, residual_scaling_slope
from .sweep import (RunConfig, SweepRow, UsageError, default_compare_config,
                    presets, run_compare, run_sweep)
from .witnesses import (Criterion, InvalidWitness, WitnessId, WitnessValue,
                        duan_pair, evaluate, hz1_higher, hz1_pair, hz2_higher,
                        hz2_pair, trimodal_hz, trimodal_symmetric)

__version__ = "0.1.0"

__all__ = [
    "CutoffError", "FockBasis", "FockStateVector", "MomentSpec",
    "coherent_state", "conserved_charges", "cutoffs_for", "moment",
    "ConfigError", "CoherentInput", "ModelParams", "PerturbativeCoefficients",
    "coefficient_derivatives", "coefficients", "delta_omega1",
    "ComparisonReport", "CompareResult", "ConvergenceError", "Hamiltonian",
    "build_hamiltonian", "certification_summary", "compare", "evolve",
    "evolve_grid", "oracle_witness",
    "eom_residual", "etcr_residual", "residual_scaling_slope",
    "RunConfig", "SweepRow", "UsageError", "default_compare_config",
    "presets", "run_compare", "run_sweep",
    "Criterion", "InvalidWitness", "WitnessId", "WitnessValue",
    "duan_pair", "evaluate", "hz1_higher", "hz1_pair", "hz2_higher",
    "hz2_pair", "trimodal_hz", "trimodal_symmetric",
    "__version__",
]

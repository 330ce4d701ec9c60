"""Pole-residue self-energies, memory-kernel dynamics and rational fitting."""
from .dynamics import (
    EquivalenceReport,
    FactorizationWarning,
    PseudomodeSystem,
    TrajectoryPair,
    converged_dt,
    equivalence_report,
    solve_pseudomode,
    solve_volterra,
)
from .fitting import RationalFitter, fit_error_bound, fit_error_eta, fit_rational
from .poles import PoleResidueSet, kernel_eval, self_energy_eval

__all__ = [
    "EquivalenceReport",
    "FactorizationWarning",
    "PoleResidueSet",
    "PseudomodeSystem",
    "RationalFitter",
    "TrajectoryPair",
    "converged_dt",
    "equivalence_report",
    "fit_error_bound",
    "fit_error_eta",
    "fit_rational",
    "kernel_eval",
    "self_energy_eval",
    "solve_pseudomode",
    "solve_volterra",
]

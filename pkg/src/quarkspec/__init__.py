"""Cornell-potential quarkonium spectra and an audit of their Kratzer-Fues reduction."""

from ._kernels import BACKEND
from .model import (
    Coulomb,
    CornellSpin,
    DomainError,
    KratzerEffective,
    Oscillator,
    QuarkoniumParams,
    Tabulated,
    TruncatedOEA,
    boundedness_check,
    evaluate_potential,
    reduced_mass,
    spin_coupling,
)
from .numerov import (
    ConvergenceError,
    Eigensolution,
    NoBoundStateError,
    SolverConfig,
    find_eigenvalue,
    integrate_numerov,
    solve_spectrum,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "Coulomb",
    "CornellSpin",
    "DomainError",
    "KratzerEffective",
    "Oscillator",
    "QuarkoniumParams",
    "Tabulated",
    "TruncatedOEA",
    "boundedness_check",
    "evaluate_potential",
    "reduced_mass",
    "spin_coupling",
    "ConvergenceError",
    "Eigensolution",
    "NoBoundStateError",
    "SolverConfig",
    "find_eigenvalue",
    "integrate_numerov",
    "solve_spectrum",
]

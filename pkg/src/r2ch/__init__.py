"""Structure-preserving finite differences for the rotation two-component
Camassa-Holm system."""

from .diagnostics import conserved, energy, hamiltonian_h, mass, momentum_total
from .mesh import PeriodicGrid, apply_helmholtz, solve_helmholtz
from .scenarios import preset
from .scheme import NonConvergence, Parameters, SolverConfig, State, picard_solve, run, step

__all__ = [
    "NonConvergence", "Parameters", "PeriodicGrid", "SolverConfig", "State",
    "apply_helmholtz", "conserved", "energy", "hamiltonian_h", "mass", "momentum_total",
    "picard_solve", "preset", "run", "solve_helmholtz", "step",
]

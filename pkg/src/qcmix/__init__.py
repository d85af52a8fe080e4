"""Interpolated quantum/classical dynamics for small Ising systems."""

from .engine import (MixConfig, Trajectory, density_check, evolve_step, evolve_trajectory,
                     master_rhs, mix_update, schrodinger_rhs)
from .ising import (IsingInstance, SpectrumTable, apply_total_hamiltonian, classical_energies,
                    husimi_temperley, quantum_signature, sk_random)

__all__ = [
    "IsingInstance", "SpectrumTable", "MixConfig", "Trajectory",
    "apply_total_hamiltonian", "classical_energies", "husimi_temperley", "quantum_signature",
    "sk_random", "master_rhs", "schrodinger_rhs", "mix_update", "evolve_step",
    "evolve_trajectory", "density_check",
]

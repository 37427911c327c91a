"""Trotterized Hamiltonian simulation accelerated by simultaneous diagonalization
of commuting Pauli groups."""

from .pauli import PauliString, WeightedTerm, commutes, multiply, parse_pauli
from .hamiltonian import CommutingGroup, Hamiltonian, greedy_partition, load, loads, partition_stats
from .tableau import BinaryTableau, independent_subset
from .diagonalizer import CliffordCircuit, DiagonalGroup, diagonalize_group, find_clifford
from .statevec import StateVector, fidelity, norm
from .evolution import (EvolutionPlan, evolve, evolve_baseline, evolve_grouped, exact_evolve,
                        expectation, diagonalize_hamiltonian)
from .models import gen_syk, gen_tfim, majorana

__version__ = "0.1.0"

__all__ = [
    "PauliString", "WeightedTerm", "commutes", "multiply", "parse_pauli",
    "CommutingGroup", "Hamiltonian", "greedy_partition", "load", "loads", "partition_stats",
    "BinaryTableau", "independent_subset",
    "CliffordCircuit", "DiagonalGroup", "diagonalize_group", "find_clifford",
    "StateVector", "fidelity", "norm",
    "EvolutionPlan", "evolve", "evolve_baseline", "evolve_grouped", "exact_evolve", "expectation",
    "diagonalize_hamiltonian",
    "gen_syk", "gen_tfim", "majorana",
]

"""qaoalab: statevector laboratory for alternating-operator state
preparation, parametrized resource Hamiltonians, and their noisy and
Rydberg-dressed realizations."""

__version__ = "0.1.0"

from ._kernels import BACKEND
from .circuits import (CircuitSpec, ParameterVector, build_ansatz,
                       cross_ghz_circuit, export_digital_circuit,
                       fixed_ghz_cross_params, run_circuit)
from .groundtruth import (GroundStateResult, exact_ground_state, ghz_state,
                          improvement_ratio)
from .lattices import LatticeGeometry, build_geometry
from .lindblad import (DampingSpec, DensityMatrix, damped_ghz_run,
                       fit_power_law, lindblad_evolve)
from .optimize import (OptConfig, OptResult, gradient, make_cost, minimize,
                       multistart_minimize, symmetry_report)
from .paulis import (HamiltonianSplit, PauliString, WeightedPauliSum,
                     build_hamiltonian, split_hamiltonian)
from .rydberg import (DressedAtomArray, EchoSequence, cross_lattice_positions,
                      dressed_coupling, echo_to_ising, rydberg_ghz_protocol)
from .states import (LayerGenerator, StateVector, apply_layer, expectation,
                     overlap_fidelity, parity_expectation, prepare_initial)

__all__ = [
    "BACKEND",
    "CircuitSpec", "ParameterVector", "build_ansatz", "cross_ghz_circuit",
    "export_digital_circuit", "fixed_ghz_cross_params", "run_circuit",
    "GroundStateResult", "exact_ground_state", "ghz_state",
    "improvement_ratio",
    "LatticeGeometry", "build_geometry",
    "DampingSpec", "DensityMatrix", "damped_ghz_run", "fit_power_law",
    "lindblad_evolve",
    "OptConfig", "OptResult", "gradient", "make_cost", "minimize",
    "multistart_minimize", "symmetry_report",
    "HamiltonianSplit", "PauliString", "WeightedPauliSum",
    "build_hamiltonian", "split_hamiltonian",
    "DressedAtomArray", "EchoSequence", "cross_lattice_positions",
    "dressed_coupling", "echo_to_ising", "rydberg_ghz_protocol",
    "LayerGenerator", "StateVector", "apply_layer", "expectation",
    "overlap_fidelity", "parity_expectation", "prepare_initial",
]

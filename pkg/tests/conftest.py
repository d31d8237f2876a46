import numpy as np
import pytest
from scipy.linalg import expm

from qaoalab.paulis import WeightedPauliSum
from qaoalab.states import LayerGenerator, StateVector

PAULI = {
    "I": np.eye(2),
    "X": np.array([[0.0, 1.0], [1.0, 0.0]]),
    "Y": np.array([[0.0, -1.0j], [1.0j, 0.0]]),
    "Z": np.array([[1.0, 0.0], [0.0, -1.0]]),
}


def kron_string(letters):
    out = np.array([[1.0 + 0.0j]])
    for c in letters:
        out = np.kron(out, PAULI[c])
    return out


def dense_operator(h: WeightedPauliSum):
    """Independent dense build via Kronecker products (oracle path)."""
    dim = 1 << h.n_qubits
    out = np.zeros((dim, dim), dtype=complex)
    for t in h.terms:
        out += t.coefficient * kron_string(t.letters)
    return out


def generator_matrix(gen: LayerGenerator, n):
    """Dense matrix of a layer generator, built from Kronecker products."""
    dim = 1 << n
    out = np.zeros((dim, dim), dtype=complex)
    for sup, w in zip(gen.supports, gen.weights):
        letters = ["I"] * n
        if gen.kind == "x_field":
            letters[sup] = "X"
            out += w * kron_string(letters)
        elif gen.kind in ("zz_diagonal", "z_pair"):
            letters[sup[0]] = letters[sup[1]] = "Z"
            out += w * kron_string(letters)
        else:
            for p in ("X", "Y"):
                letters = ["I"] * n
                letters[sup[0]] = letters[sup[1]] = p
                out += w * kron_string(letters)
    return out


def dense_layer_apply(gen: LayerGenerator, n, angle, amps):
    """exp(-i angle G) via dense matrix exponential (oracle path)."""
    return expm(-1j * angle * generator_matrix(gen, n)) @ amps


def random_state(n, rng):
    amps = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
    amps /= np.linalg.norm(amps)
    return StateVector(n, amps)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)

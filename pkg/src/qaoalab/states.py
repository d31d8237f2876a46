"""Dense statevector storage and the fused layer primitives.

A StateVector owns 2^n complex amplitudes; qubit s lives on bit n-1-s of
the basis index (qubit 0 is the most significant bit).  Layer application
mutates the amplitudes in place (single-writer); read-only quantities
never do.  Global phase is never normalized away.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from . import _kernels as kernels
from .paulis import WeightedPauliSum

NORM_TOL = 1e-12
IMAG_RESIDUE_TOL = 1e-8

LAYER_KINDS = ("zz_diagonal", "x_field", "xy_pair", "z_pair")


class StateError(ValueError):
    pass


class ExpectationResidueError(ArithmeticError):
    """Imaginary part of a supposedly real expectation exceeded tolerance."""


class StateVector:
    def __init__(self, n_qubits, amplitudes):
        amplitudes = np.ascontiguousarray(amplitudes, dtype=np.complex128)
        if amplitudes.shape != (1 << n_qubits,):
            raise StateError("amplitude count must be 2^n")
        self.n_qubits = n_qubits
        self.amplitudes = amplitudes

    def copy(self):
        return StateVector(self.n_qubits, self.amplitudes.copy())

    def norm(self):
        return float(np.linalg.norm(self.amplitudes))

    def check_norm(self, tol=NORM_TOL):
        if abs(self.norm() - 1.0) > tol:
            raise StateError(f"norm drifted to {self.norm()!r}")
        return self

    def dump_amplitudes(self):
        """Little-endian binary dump: uint64 amplitude count, then
        interleaved float64 (real, imag) pairs.  Debugging aid only."""
        header = struct.pack("<Q", self.amplitudes.size)
        interleaved = np.empty(2 * self.amplitudes.size)
        interleaved[0::2] = self.amplitudes.real
        interleaved[1::2] = self.amplitudes.imag
        return header + interleaved.astype("<f8").tobytes()

    @classmethod
    def load_amplitudes(cls, blob):
        (count,) = struct.unpack_from("<Q", blob)
        flat = np.frombuffer(blob, dtype="<f8", offset=8, count=2 * count)
        amps = flat[0::2] + 1j * flat[1::2]
        n = count.bit_length() - 1
        return cls(n, amps)


@dataclass(frozen=True)
class LayerGenerator:
    """One commuting layer: kind, supports (sites or pairs) and weights.

    The generated unitary is exp(-i * angle * G) with
    G = sum_k weights[k] * P_k, P_k the Pauli term on supports[k]
    (ZZ for zz_diagonal/z_pair, X for x_field, XX+YY for xy_pair).
    """

    kind: str
    supports: tuple
    weights: tuple

    def __post_init__(self):
        if self.kind not in LAYER_KINDS:
            raise StateError(f"unknown layer kind {self.kind!r}")
        if len(self.supports) != len(self.weights):
            raise StateError("supports/weights length mismatch")
        if self.kind in ("xy_pair", "z_pair"):
            seen = set()
            for pair in self.supports:
                i, j = pair
                if i == j:
                    raise StateError("pair supports need two distinct sites")
                if i in seen or j in seen:
                    raise StateError(f"overlapping pair supports at {pair}")
                seen.update(pair)

    def pair_array(self):
        return np.asarray(self.supports, dtype=np.int64).reshape(-1, 2)

    def site_array(self):
        return np.asarray(self.supports, dtype=np.int64)

    def weight_array(self):
        return np.asarray(self.weights, dtype=np.float64)


def prepare_initial(kind, n):
    """plus_product: ground state of a negative uniform X field.
    singlet_product: singlets on pairs (0,1), (2,3), ... (needs even n),
    the ground state of the even XY + even Z chain parts."""
    if kind == "plus_product":
        amps = np.full(1 << n, 2.0 ** (-n / 2.0), dtype=np.complex128)
        return StateVector(n, amps)
    if kind == "singlet_product":
        if n % 2:
            raise StateError("singlet_product needs even n")
        one = np.array([0.0, 1.0, -1.0, 0.0], dtype=np.complex128) / np.sqrt(2.0)
        amps = np.array([1.0], dtype=np.complex128)
        for _ in range(n // 2):
            amps = np.kron(amps, one)
        return StateVector(n, amps)
    raise StateError(f"unknown initial state kind {kind!r}")


def apply_layer(state: StateVector, gen: LayerGenerator, angle: float):
    """state <- exp(-i * angle * G) state, in place; returns the state."""
    n = state.n_qubits
    for sup in gen.supports:
        flat = (sup,) if np.isscalar(sup) else sup
        for s in flat:
            if not 0 <= s < n:
                raise StateError(f"support {sup} out of range for n={n}")
    if angle == 0.0:
        return state
    a = state.amplitudes
    if gen.kind in ("zz_diagonal", "z_pair"):
        kernels.zz_phase(a, n, gen.pair_array(), gen.weight_array(), float(angle))
    elif gen.kind == "x_field":
        kernels.x_field(a, n, gen.site_array(), gen.weight_array(), float(angle))
    else:
        kernels.xy_pair(a, n, gen.pair_array(), gen.weight_array(), float(angle))
    return state


def pauli_expectation_term(amps, n, term):
    """<psi|P|psi> for one Pauli string (complex; caller handles residue)."""
    xm, zm, ny = term.masks()
    idx = np.arange(1 << n, dtype=np.int64)
    src = idx ^ xm
    phase = ((1j) ** ny) * (1.0 - 2.0 * (np.bitwise_count(src & zm) & 1))
    return np.vdot(amps, phase * amps[src])


def expectation(state: StateVector, h: WeightedPauliSum):
    """<psi|H|psi>, term by term; raises if the imaginary residue is
    beyond tolerance instead of silently truncating."""
    if h.n_qubits != state.n_qubits:
        raise StateError("dimension mismatch")
    val = 0.0 + 0.0j
    for t in h.terms:
        val += t.coefficient * pauli_expectation_term(
            state.amplitudes, state.n_qubits, t)
    if abs(val.imag) > IMAG_RESIDUE_TOL:
        raise ExpectationResidueError(
            f"imaginary residue {val.imag:.3e} exceeds {IMAG_RESIDUE_TOL}")
    return float(val.real)


def overlap_fidelity(state: StateVector, target: StateVector):
    """|<target|state>|^2 (phase-insensitive)."""
    if state.n_qubits != target.n_qubits:
        raise StateError("dimension mismatch")
    return float(abs(np.vdot(target.amplitudes, state.amplitudes)) ** 2)


def parity_expectation(state: StateVector):
    """Expectation of the global X-string (bit-complement permutation)."""
    val = np.vdot(state.amplitudes, state.amplitudes[::-1])
    return float(val.real)


def apply_pauli_rotation(state: StateVector, term, angle: float):
    """state <- exp(-i * angle * w * P) state for a single weighted Pauli
    string; used by exact gradient rules."""
    n = state.n_qubits
    xm, zm, ny = term.masks()
    idx = np.arange(1 << n, dtype=np.int64)
    src = idx ^ xm
    phase = ((1j) ** ny) * (1.0 - 2.0 * (np.bitwise_count(src & zm) & 1))
    a = state.amplitudes
    rotated = (np.cos(angle * term.coefficient) * a
               - 1j * np.sin(angle * term.coefficient) * (phase * a[src]))
    state.amplitudes = np.ascontiguousarray(rotated)
    return state

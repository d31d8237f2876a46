"""Ground-truth providers: exact ground states, analytic GHZ states and
the improvement ratio between paired optimization runs."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as la
import scipy.sparse.linalg as sla

from .paulis import WeightedPauliSum
from .states import StateVector, parity_expectation

DENSE_MAX_QUBITS = 14
DENSE_AUTO_MAX = 12
DEGENERACY_TOL = 1e-9


class OracleError(ValueError):
    pass


@dataclass(frozen=True)
class GroundStateResult:
    energy: float
    state: StateVector
    gap: float | None
    degenerate: bool
    residual: float


def ghz_state(n):
    """Equal superposition of the all-up and all-down product states."""
    if n < 1:
        raise OracleError("need n >= 1")
    amps = np.zeros(1 << n, dtype=np.complex128)
    amps[0] = amps[-1] = 1.0 / np.sqrt(2.0)
    return StateVector(n, amps)


def improvement_ratio(f_conventional, f_prh):
    """Normalized infidelity reduction (f_prh - f_c) / (1 - f_c)."""
    if not (0.0 <= f_conventional < 1.0):
        raise OracleError("conventional fidelity must lie in [0, 1); a "
                          "perfect conventional run leaves nothing to improve")
    if not (0.0 <= f_prh <= 1.0):
        raise OracleError("fidelity must lie in [0, 1]")
    return (f_prh - f_conventional) / (1.0 - f_conventional)


def _parity_orbits(n):
    """Representatives k and partners comp(k) = 2^n - 1 - k, k < comp(k)."""
    dim = 1 << n
    idx = np.arange(dim, dtype=np.int64)
    comp = dim - 1 - idx
    reps = idx[idx < comp]
    return reps, comp[reps]


def _embed_plus(n, v, reps, partners):
    psi = np.zeros(1 << n, dtype=np.complex128)
    psi[reps] = v / np.sqrt(2.0)
    psi[partners] = v / np.sqrt(2.0)
    return psi


def _lowest_two(H):
    k = min(1, H.shape[0] - 1)
    vals, vecs = la.eigh(H, subset_by_index=(0, k))
    return vals, vecs


def _dense_ground(h, sector):
    H = h.dense()
    n = h.n_qubits
    if sector == "parity_plus":
        reps, partners = _parity_orbits(n)
        blocks = (H[np.ix_(reps, reps)], H[np.ix_(reps, partners)],
                  H[np.ix_(partners, reps)], H[np.ix_(partners, partners)])
        Hp = 0.5 * (blocks[0] + blocks[1] + blocks[2] + blocks[3])
        Hm = 0.5 * (blocks[0] - blocks[1] - blocks[2] + blocks[3])
        vals, vecs = _lowest_two(Hp)
        minus_floor = la.eigh(Hm, subset_by_index=(0, 0), eigvals_only=True)[0]
        psi = _embed_plus(n, vecs[:, 0], reps, partners)
        others = [minus_floor]
        if vals.size > 1:
            others.append(vals[1])
        gap = float(min(others) - vals[0])
    else:
        vals, vecs = _lowest_two(H)
        psi = vecs[:, 0].astype(np.complex128)
        gap = float(vals[1] - vals[0]) if vals.size > 1 else None
    return float(vals[0]), psi, gap


def _iterative_ground(h, sector):
    n = h.n_qubits
    dim = 1 << n

    def eigs(op, k):
        # fixed start vector keeps the Lanczos run deterministic
        v0 = np.random.default_rng(12345).normal(size=op.shape[0])
        vals, vecs = sla.eigsh(op, k=k, which="SA", v0=v0)
        order = np.argsort(vals)
        return vals[order], vecs[:, order]

    if sector == "parity_plus":
        reps, partners = _parity_orbits(n)

        def mv_plus(v):
            psi = _embed_plus(n, v.astype(np.complex128), reps, partners)
            out = h.apply(psi)
            return ((out[reps] + out[partners]) / np.sqrt(2.0)).real

        def mv_minus(v):
            psi = np.zeros(dim, dtype=np.complex128)
            psi[reps] = v / np.sqrt(2.0)
            psi[partners] = -v / np.sqrt(2.0)
            out = h.apply(psi)
            return ((out[reps] - out[partners]) / np.sqrt(2.0)).real

        half = dim // 2
        vals, vecs = eigs(sla.LinearOperator((half, half), matvec=mv_plus,
                                             dtype=np.float64), 2)
        minus_floor = eigs(sla.LinearOperator((half, half), matvec=mv_minus,
                                              dtype=np.float64), 1)[0][0]
        psi = _embed_plus(n, vecs[:, 0], reps, partners)
        gap = float(min(vals[1], minus_floor) - vals[0])
    else:
        def mv(v):
            return h.apply(v.astype(np.complex128)).real

        vals, vecs = eigs(sla.LinearOperator((dim, dim), matvec=mv,
                                             dtype=np.float64), 2)
        psi = vecs[:, 0].astype(np.complex128)
        gap = float(vals[1] - vals[0])
    return float(vals[0]), psi, gap


def exact_ground_state(h: WeightedPauliSum, sector=None, mode="auto"):
    """Lowest eigenpair of a Pauli-sum Hamiltonian.

    mode 'dense' (n <= 14) or 'iterative' (ARPACK Lanczos matvec built on
    the term-wise Pauli action, usable up to desk scale); 'auto' switches
    at n = 12.  sector='parity_plus' restricts the search to the +1
    eigenspace of the global X-string, which selects the GHZ-type
    representative out of a degenerate ferromagnetic ground manifold;
    it presumes a parity-symmetric Hamiltonian.
    """
    if sector not in (None, "parity_plus"):
        raise OracleError(f"unknown sector {sector!r}")
    n = h.n_qubits
    if mode == "auto":
        mode = "dense" if n <= DENSE_AUTO_MAX else "iterative"
    if mode == "iterative" and (1 << n) < 16:
        mode = "dense"
    if mode == "dense":
        if n > DENSE_MAX_QUBITS:
            raise OracleError(f"dense mode supports n <= {DENSE_MAX_QUBITS}")
        energy, psi, gap = _dense_ground(h, sector)
    elif mode == "iterative":
        energy, psi, gap = _iterative_ground(h, sector)
    else:
        raise OracleError(f"unknown mode {mode!r}")

    residual = float(np.linalg.norm(h.apply(psi) - energy * psi))
    state = StateVector(n, psi)
    degenerate = gap is not None and gap <= DEGENERACY_TOL
    if sector == "parity_plus" and parity_expectation(state) < 0.0:
        raise OracleError("sector projection failed")  # pragma: no cover
    return GroundStateResult(energy, state, gap, degenerate, residual)

"""Pure-numpy statevector and density-matrix kernels.

Fallback backend; mirrors the signatures of the compiled module
``qaoalab._kernels._fast``.  All kernels mutate their first argument in
place.  Qubit ``s`` lives on bit ``n - 1 - s`` of the basis index, so
qubit 0 is the most significant bit.
"""

import numpy as np

BACKEND = "numpy"


def _indices(n):
    return np.arange(1 << n, dtype=np.int64)


def zz_parity_sum(n, edges, weights):
    """Diagonal of sum_e w_e Z_i Z_j over the computational basis."""
    idx = _indices(n)
    m = np.zeros(1 << n, dtype=np.float64)
    for (i, j), w in zip(np.asarray(edges), np.asarray(weights)):
        bi = (idx >> (n - 1 - int(i))) & 1
        bj = (idx >> (n - 1 - int(j))) & 1
        m += w * (1.0 - 2.0 * (bi ^ bj))
    return m


def phase_apply(amps, gen_diag, theta):
    """amps *= exp(-i * theta * gen_diag)."""
    amps *= np.exp(-1j * theta * gen_diag)


def zz_phase(amps, n, edges, weights, theta):
    phase_apply(amps, zz_parity_sum(n, edges, weights), theta)


def x_field(amps, n, sites, weights, theta):
    """Apply exp(-i * theta * w_s X_s) for every listed site."""
    psi = amps.reshape((2,) * n)
    for s, w in zip(np.asarray(sites), np.asarray(weights)):
        if w == 0.0:
            continue
        c = np.cos(theta * w)
        ms = -1j * np.sin(theta * w)
        view = np.moveaxis(psi, int(s), 0)
        a0 = view[0].copy()
        view[0] *= c
        view[0] += ms * view[1]
        view[1] *= c
        view[1] += ms * a0


def xy_pair(amps, n, pairs, weights, theta):
    """Apply exp(-i * theta * w * (XX+YY)) on disjoint qubit pairs.

    Rotates the {|01>, |10>} subspace of each pair by 2*theta*w.
    """
    idx = _indices(n)
    for (i, j), w in zip(np.asarray(pairs), np.asarray(weights)):
        if w == 0.0:
            continue
        bi = (idx >> (n - 1 - int(i))) & 1
        bj = (idx >> (n - 1 - int(j))) & 1
        sel01 = np.nonzero((bi == 0) & (bj == 1))[0]
        sel10 = sel01 ^ ((1 << (n - 1 - int(i))) | (1 << (n - 1 - int(j))))
        c = np.cos(2.0 * theta * w)
        ms = -1j * np.sin(2.0 * theta * w)
        a01 = amps[sel01].copy()
        a10 = amps[sel10].copy()
        amps[sel01] = c * a01 + ms * a10
        amps[sel10] = ms * a01 + c * a10


def lindblad_rhs(rho, out, ham_diag, exc_counts, g2, sites):
    """out = -i[H, rho] + damping dissipator, H diagonal.

    Collapse operators sqrt(g2) * (lowering op) on the listed sites;
    ``exc_counts`` holds the number of excited (bit = 1) qubits per basis
    state counted over those sites.
    """
    d = ham_diag
    w = exc_counts
    np.multiply(rho, (-1j) * (d[:, None] - d[None, :]), out=out)
    out -= (0.5 * g2) * (w[:, None] + w[None, :]) * rho
    n = (d.shape[0] - 1).bit_length()
    t = rho.reshape((2,) * (2 * n))
    o = out.reshape((2,) * (2 * n))
    for s in np.asarray(sites):
        src = [slice(None)] * (2 * n)
        dst = [slice(None)] * (2 * n)
        src[s] = 1
        src[n + s] = 1
        dst[s] = 0
        dst[n + s] = 0
        o[tuple(dst)] += g2 * t[tuple(src)]

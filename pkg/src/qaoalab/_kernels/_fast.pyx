# Compiled statevector and density-matrix kernels.
#
# Signatures mirror qaoalab._kernels.dense; qubit s sits on bit n - 1 - s.

import numpy as np
cimport numpy as cnp
from libc.math cimport cos, sin

cnp.import_array()

BACKEND = "cython"


def zz_parity_sum(int n, cnp.int64_t[:, ::1] edges, double[::1] weights):
    cdef Py_ssize_t dim = 1 << n
    cdef cnp.ndarray[double, ndim=1] out = np.zeros(dim, dtype=np.float64)
    cdef double[::1] m = out
    cdef Py_ssize_t k, e
    cdef Py_ssize_t ne = edges.shape[0]
    cdef int bi, bj
    cdef double w
    for e in range(ne):
        bi = n - 1 - <int>edges[e, 0]
        bj = n - 1 - <int>edges[e, 1]
        w = weights[e]
        for k in range(dim):
            if ((k >> bi) ^ (k >> bj)) & 1:
                m[k] -= w
            else:
                m[k] += w
    return out


def phase_apply(double complex[::1] amps, double[::1] gen_diag, double theta):
    cdef Py_ssize_t k, dim = amps.shape[0]
    cdef double ph
    for k in range(dim):
        ph = -theta * gen_diag[k]
        amps[k] = amps[k] * (cos(ph) + 1j * sin(ph))


def zz_phase(double complex[::1] amps, int n, cnp.int64_t[:, ::1] edges,
             double[::1] weights, double theta):
    cdef Py_ssize_t dim = amps.shape[0]
    cdef Py_ssize_t k, e
    cdef Py_ssize_t ne = edges.shape[0]
    cdef double m, ph
    cdef double w
    cdef int bi, bj
    for k in range(dim):
        m = 0.0
        for e in range(ne):
            bi = n - 1 - <int>edges[e, 0]
            bj = n - 1 - <int>edges[e, 1]
            w = weights[e]
            if ((k >> bi) ^ (k >> bj)) & 1:
                m -= w
            else:
                m += w
        ph = -theta * m
        amps[k] = amps[k] * (cos(ph) + 1j * sin(ph))


def x_field(double complex[::1] amps, int n, cnp.int64_t[::1] sites,
            double[::1] weights, double theta):
    cdef Py_ssize_t dim = amps.shape[0]
    cdef Py_ssize_t s, k, base, lo, hi, step
    cdef Py_ssize_t ns = sites.shape[0]
    cdef double c, sn
    cdef double complex a0, a1, ms
    for s in range(ns):
        if weights[s] == 0.0:
            continue
        c = cos(theta * weights[s])
        sn = sin(theta * weights[s])
        ms = -1j * sn
        step = 1 << (n - 1 - <int>sites[s])
        base = 0
        while base < dim:
            for k in range(base, base + step):
                a0 = amps[k]
                a1 = amps[k + step]
                amps[k] = c * a0 + ms * a1
                amps[k + step] = ms * a0 + c * a1
            base += 2 * step
    return None


def xy_pair(double complex[::1] amps, int n, cnp.int64_t[:, ::1] pairs,
            double[::1] weights, double theta):
    cdef Py_ssize_t dim = amps.shape[0]
    cdef Py_ssize_t e, k, partner
    cdef Py_ssize_t ne = pairs.shape[0]
    cdef Py_ssize_t mi, mj
    cdef double c, sn
    cdef double complex a01, a10, ms
    for e in range(ne):
        if weights[e] == 0.0:
            continue
        c = cos(2.0 * theta * weights[e])
        sn = sin(2.0 * theta * weights[e])
        ms = -1j * sn
        mi = 1 << (n - 1 - <int>pairs[e, 0])
        mj = 1 << (n - 1 - <int>pairs[e, 1])
        for k in range(dim):
            # k runs over |01> states of the pair (bit i clear, bit j set)
            if (k & mi) == 0 and (k & mj) != 0:
                partner = (k | mi) & ~mj
                a01 = amps[k]
                a10 = amps[partner]
                amps[k] = c * a01 + ms * a10
                amps[partner] = ms * a01 + c * a10
    return None


def lindblad_rhs(double complex[:, ::1] rho, double complex[:, ::1] out,
                 double[::1] ham_diag, double[::1] exc_counts, double g2,
                 cnp.int64_t[::1] sites):
    cdef Py_ssize_t dim = rho.shape[0]
    cdef int n = 0
    while (1 << n) < dim:
        n += 1
    cdef Py_ssize_t i, j, k, bit
    cdef Py_ssize_t ns = sites.shape[0]
    cdef cnp.ndarray[cnp.int64_t, ndim=1] bits_arr = np.empty(ns, dtype=np.int64)
    cdef cnp.int64_t[::1] bits = bits_arr
    cdef double complex acc
    cdef double hg = 0.5 * g2
    for k in range(ns):
        bits[k] = 1 << (n - 1 - <int>sites[k])
    for i in range(dim):
        for j in range(dim):
            acc = (-1j * (ham_diag[i] - ham_diag[j])
                   - hg * (exc_counts[i] + exc_counts[j])) * rho[i, j]
            for k in range(ns):
                bit = bits[k]
                if (i & bit) == 0 and (j & bit) == 0:
                    acc = acc + g2 * rho[i | bit, j | bit]
            out[i, j] = acc
    return None

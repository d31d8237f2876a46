"""Benchmark the compiled kernels against the numpy fallback.

Usage: python benchmarks/bench_kernels.py [--repeats 5]
"""

import argparse
import time

import numpy as np

from qaoalab._kernels import get_backend


def timeit(fn, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def ring_edges(n):
    return np.array([(i, (i + 1) % n) for i in range(n)], dtype=np.int64)


def bench_statevector(backend, n, repeats):
    rng = np.random.default_rng(0)
    amps = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
    amps /= np.linalg.norm(amps)
    amps = np.ascontiguousarray(amps)
    edges = ring_edges(n)
    w = np.ascontiguousarray(rng.uniform(0.5, 1.5, n))
    sites = np.arange(n, dtype=np.int64)

    out = {}
    out["zz_phase"] = timeit(lambda: backend.zz_phase(amps, n, edges, w, 0.7),
                             repeats)
    diag = backend.zz_parity_sum(n, edges, w)
    out["phase_apply"] = timeit(lambda: backend.phase_apply(amps, diag, 0.7),
                                repeats)
    out["x_field"] = timeit(lambda: backend.x_field(amps, n, sites, w, 0.3),
                            repeats)
    pairs = np.array([(2 * k, 2 * k + 1) for k in range(n // 2)],
                     dtype=np.int64)
    wp = np.ascontiguousarray(rng.uniform(0.5, 1.5, n // 2))
    out["xy_pair"] = timeit(lambda: backend.xy_pair(amps, n, pairs, wp, 0.4),
                            repeats)
    return out


def bench_lindblad(backend, n, repeats):
    rng = np.random.default_rng(1)
    dim = 1 << n
    rho = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = np.ascontiguousarray(rho + rho.conj().T)
    rho /= np.trace(rho).real
    out = np.empty_like(rho)
    diag = np.ascontiguousarray(rng.normal(size=dim))
    exc = np.bitwise_count(np.arange(dim)).astype(np.float64)
    sites = np.arange(n, dtype=np.int64)
    return timeit(lambda: backend.lindblad_rhs(rho, out, diag, exc, 1e-4,
                                               sites), repeats)


def bench_full_circuit(repeats):
    from qaoalab.circuits import cross_ghz_circuit, fixed_ghz_cross_params, run_circuit

    circuit = cross_ghz_circuit(3)  # N = 17
    params = fixed_ghz_cross_params(3)
    return timeit(lambda: run_circuit(circuit, params), repeats)


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeats", type=int, default=5)
    parser.add_argument("--n", type=int, default=16,
                        help="statevector qubit count")
    args = parser.parse_args()

    backends = {}
    for name in ("numpy", "cython"):
        try:
            backends[name] = get_backend(name)
        except ImportError:
            print(f"backend {name} unavailable, skipping")
    print(f"statevector kernels at n={args.n}:")
    results = {name: bench_statevector(b, args.n, args.repeats)
               for name, b in backends.items()}
    kernels = next(iter(results.values())).keys()
    for k in kernels:
        row = "  ".join(f"{name} {results[name][k] * 1e3:8.2f} ms"
                        for name in results)
        if len(results) == 2:
            ratio = results["numpy"][k] / results["cython"][k]
            row += f"  speedup {ratio:5.2f}x"
        print(f"  {k:12s} {row}")

    print("lindblad_rhs at n=9:")
    lb = {name: bench_lindblad(b, 9, args.repeats)
          for name, b in backends.items()}
    row = "  ".join(f"{name} {lb[name] * 1e3:8.2f} ms" for name in lb)
    if len(lb) == 2:
        row += f"  speedup {lb['numpy'] / lb['cython']:5.2f}x"
    print(f"  {'rhs':12s} {row}")

    print("full fixed-parameter cross circuit (N=17), active backend:")
    print(f"  {'run_circuit':12s} {bench_full_circuit(args.repeats) * 1e3:8.2f} ms")


if __name__ == "__main__":
    main()

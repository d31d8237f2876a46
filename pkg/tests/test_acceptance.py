"""Acceptance gate: one test per criterion, each printing a pass/fail
line (run with `pytest tests/test_acceptance.py -v -s` to see them).

Tolerances are pinned here and nowhere else.  Optimization-based checks
use fixed seeds; the underlying claims were verified to hold with wide
margins, so the seeds are a determinism convenience, not a knife edge.
"""

import os

import numpy as np
import pytest

from conftest import dense_layer_apply, random_state
from qaoalab.circuits import (ParameterVector, build_ansatz,
                              cross_ghz_circuit, fixed_ghz_cross_params,
                              run_circuit)
from qaoalab.groundtruth import (exact_ground_state, ghz_state,
                                 improvement_ratio)
from qaoalab.lattices import build_geometry
from qaoalab.lindblad import (DampingSpec, DensityMatrix, damped_ghz_run,
                              damped_ghz_sweep, lindblad_evolve)
from qaoalab.optimize import (OptConfig, gradient, make_cost,
                              multistart_minimize, symmetry_report)
from qaoalab.paulis import build_hamiltonian
from qaoalab.rydberg import (DressedAtomArray, cross_lattice_positions,
                             echo_to_ising, rydberg_ghz_protocol)
from qaoalab.states import (LayerGenerator, apply_layer, overlap_fidelity,
                            parity_expectation, prepare_initial)

CONV_OPT = dict(n_starts=20, init_scale=np.pi / 2,
                gradient_tolerance=1e-12, max_iterations=3000)


def report(label, ok, detail):
    print(f"[{'PASS' if ok else 'FAIL'}] {label}: {detail}")
    assert ok, f"{label}: {detail}"


def _optimize_ising(geometry, lam, p, seed, target=None, n_starts=None,
                    scheme="conventional_ising", center=None, init_scale=None):
    if target is None:
        h = build_hamiltonian("tfim", geometry, lam=lam)
        target = exact_ground_state(h)
    circuit = build_ansatz(geometry, scheme, p)
    cost = make_cost(circuit, "infidelity", target)
    opts = dict(CONV_OPT)
    if n_starts is not None:
        opts["n_starts"] = n_starts
    if init_scale is not None:
        opts["init_scale"] = init_scale
    res = multistart_minimize(cost, circuit, OptConfig(seed=seed, **opts),
                              center=center)
    return res, circuit, cost


# --- criterion 1: fixed-parameter GHZ generation --------------------------

def test_criterion_1_fixed_parameter_ghz():
    tols = {1: 1e-12, 2: 1e-10, 3: 1e-10}
    worst = {}
    for m, tol in tols.items():
        _, _, fid = rydberg_ghz_protocol(m)
        worst[m] = 1.0 - fid
        assert worst[m] <= tol
    report("criterion 1 (fixed GHZ m=1,2,3)", True,
           "infidelities " + ", ".join(f"N={5 + 4 * m}: {v:.2e}"
                                       for m, v in worst.items()))


# --- criteria 2 + 3: perfect-fidelity scaling and the boundary gap --------

@pytest.fixture(scope="module")
def pbc_chain_results():
    out = {}
    for n in (4, 6, 8):
        geo = build_geometry("chain", n, "periodic")
        res, _, _ = _optimize_ising(geo, 1.0, n // 2, seed=101 + n)
        out[n] = res.best_cost
    return out


def test_criterion_2_pbc_perfect_fidelity(pbc_chain_results):
    ok = all(cost <= 1e-8 for cost in pbc_chain_results.values())
    report("criterion 2 (chain PBC, p=N/2, 20 starts)", ok,
           ", ".join(f"N={n}: 1-f={c:.2e}"
                     for n, c in pbc_chain_results.items()))


@pytest.mark.skipif(not os.environ.get("QAOALAB_SLOW"),
                    reason="full-size N=12 run; set QAOALAB_SLOW=1")
def test_criterion_2_full_size_n12():
    geo = build_geometry("chain", 12, "periodic")
    res, _, _ = _optimize_ising(geo, 1.0, 6, seed=113)
    report("criterion 2 full size (N=12, p=6)", res.best_cost <= 1e-8,
           f"1-f={res.best_cost:.2e}")


def test_criterion_3_boundary_gap(pbc_chain_results):
    geo = build_geometry("chain", 8, "open")
    res, _, _ = _optimize_ising(geo, 1.0, 4, seed=77)
    pbc = pbc_chain_results[8]
    ok = res.best_cost >= 10.0 * abs(pbc)
    report("criterion 3 (OBC vs PBC floor at N=8, p=4)", ok,
           f"OBC 1-f={res.best_cost:.2e} vs PBC {pbc:.2e}")


# --- criteria 4 + 9: resource-parameter dominance and symmetric optima ----

@pytest.fixture(scope="module")
def paired_prh_runs():
    runs = {}
    for family, geo, lam, depths, seed0 in (
            ("chain", build_geometry("chain", 8, "open"), 1.0, (2, 3, 4), 200),
            ("square", build_geometry("square", (3, 3), "open"), 3.05,
             (2, 3), 300)):
        h = build_hamiltonian("tfim", geo, lam=lam)
        gs = exact_ground_state(h)
        for p in depths:
            res_c, _, _ = _optimize_ising(geo, lam, p, seed=seed0 + p,
                                          target=gs)
            circuit_p = build_ansatz(geo, "prh_ising", p)
            cost_p = make_cost(circuit_p, "infidelity", gs)
            warm = ParameterVector(res_c.best_params.x.copy(),
                                   np.ones(circuit_p.n_y))
            res_p = multistart_minimize(
                cost_p, circuit_p,
                OptConfig(seed=seed0 + p + 1, n_starts=13, init_scale=0.5,
                          gradient_tolerance=1e-12, max_iterations=3000),
                center=warm)
            ratio = improvement_ratio(1.0 - res_c.best_cost,
                                      1.0 - res_p.best_cost)
            runs[(family, p)] = {
                "geometry": geo, "conventional": res_c, "prh": res_p,
                "circuit": circuit_p, "cost": cost_p, "R": ratio,
            }
    return runs


def test_criterion_4_prh_dominance(paired_prh_runs):
    ratios = {k: v["R"] for k, v in paired_prh_runs.items()}
    nonneg = all(r >= -1e-12 for r in ratios.values())
    chain_hit = max(r for (f, _), r in ratios.items() if f == "chain") > 0.1
    square_hit = max(r for (f, _), r in ratios.items() if f == "square") > 0.1
    report("criterion 4 (warm-started PRH dominance)",
           nonneg and chain_hit and square_hit,
           ", ".join(f"{f} p={p}: R={r:.3f}" for (f, p), r in ratios.items()))


def test_criterion_9_symmetry_of_optima(paired_prh_runs):
    deltas = {}
    for key in (("chain", 4), ("square", 2)):
        run = paired_prh_runs[key]
        rep = symmetry_report(run["prh"].best_params, run["circuit"],
                              run["geometry"], cost=run["cost"])
        deltas[key] = abs(rep.cost_delta)
    ok = all(d <= 1e-6 for d in deltas.values())
    report("criterion 9 (symmetrized-y cost shift)", ok,
           ", ".join(f"{f} p={p}: |delta|={d:.2e}"
                     for (f, p), d in deltas.items()))


# --- criterion 5: GHZ depth thresholds at N=9 ------------------------------

def test_criterion_5_ghz_depth_thresholds():
    target = ghz_state(9)
    ring = build_geometry("chain", 9, "periodic")
    res_ring, _, _ = _optimize_ising(ring, None, 5, seed=401, target=target,
                                     n_starts=30)
    torus = build_geometry("square", (3, 3), "periodic")
    res_torus, _, _ = _optimize_ising(torus, None, 4, seed=402, target=target,
                                      n_starts=30)
    obc = build_geometry("square", (3, 3), "open")
    res_obc, _, _ = _optimize_ising(obc, None, 4, seed=403, target=target,
                                    n_starts=40)
    circuit = cross_ghz_circuit(1)
    fixed = run_circuit(circuit, fixed_ghz_cross_params(1))
    cross_infid = 1.0 - overlap_fidelity(fixed, target)
    ok = (res_ring.best_cost <= 1e-9 and res_torus.best_cost <= 1e-9
          and res_obc.best_cost > 1e-4 and cross_infid <= 1e-12)
    report("criterion 5 (GHZ depth thresholds at N=9)", ok,
           f"ring p=5: {res_ring.best_cost:.2e}, "
           f"2D PBC p=4: {res_torus.best_cost:.2e}, "
           f"2D OBC p=4: {res_obc.best_cost:.2e} (> 1e-4), "
           f"cross p=2: {cross_infid:.2e}")


# --- criterion 6: damping power law ----------------------------------------

def test_criterion_6_lindblad_power_law():
    gammas = np.geomspace(3e-3, 3e-2, 7)
    rows, fit = damped_ghz_sweep(gammas, m=1, dt=4e-3)
    by_gamma = dict(rows)
    anchor = damped_ghz_run(1e-2, dt=4e-3)
    exponent_ok = 1.9 <= fit.exponent <= 2.1
    anchor_ok = 1e-4 / 3.0 <= anchor <= 3e-4
    monotone = all(a[1] <= b[1] + 1e-12 for a, b in zip(rows, rows[1:]))
    report("criterion 6 (damping power law)",
           exponent_ok and anchor_ok and monotone,
           f"exponent={fit.exponent:.4f}, 1-f(1e-2)={anchor:.3e}, "
           f"R^2={fit.r_squared:.6f}, sweep min={rows[0][1]:.2e}, "
           f"max={rows[-1][1]:.2e}")


def test_criterion_6_noiseless_limit():
    infid = damped_ghz_run(0.0, dt=2e-3)
    report("criterion 6 noiseless limit", infid <= 1e-9,
           f"1-f(gamma=0)={infid:.2e}")


# --- criterion 7: spin-echo identity ---------------------------------------

def test_criterion_7_spin_echo_identity():
    rng = np.random.default_rng(500)
    full = cross_lattice_positions(1)
    fragments = [
        DressedAtomArray(np.array([[0.0, 0.0], [1.3, 0.0]]),
                         ("type1", "type1"), 1.7, 1.0),
        DressedAtomArray(full.positions[:4], full.species[:4], full.v0,
                         full.rc),
        DressedAtomArray(full.positions[:6], full.species[:6], full.v0,
                         full.rc),
    ]
    worst = 0.0
    checks = 0
    for frag in fragments:
        for _ in range(7):
            _, dev = echo_to_ising(frag, float(rng.uniform(0.05, 3.0)))
            worst = max(worst, dev)
            checks += 1
    report("criterion 7 (spin-echo identity)",
           worst <= 1e-10 and checks >= 20,
           f"{checks} random durations over n=2,4,6 fragments, "
           f"worst deviation {worst:.2e}")


# --- criterion 8: invariant bundle ------------------------------------------

def test_criterion_8_invariants():
    rng = np.random.default_rng(600)
    details = []

    # norm preservation over random layers
    worst_norm = 0.0
    for _ in range(30):
        s = random_state(6, rng)
        gens = [
            LayerGenerator("zz_diagonal", ((0, 1), (2, 3), (4, 5), (1, 2)),
                           tuple(rng.normal(size=4))),
            LayerGenerator("x_field", tuple(range(6)),
                           tuple(rng.normal(size=6))),
            LayerGenerator("xy_pair", ((0, 3), (1, 4), (2, 5)),
                           tuple(rng.normal(size=3))),
        ]
        for gen in gens:
            apply_layer(s, gen, float(rng.uniform(-3, 3)))
        worst_norm = max(worst_norm, abs(s.norm() - 1.0))
    assert worst_norm <= 1e-12
    details.append(f"norm drift {worst_norm:.1e}")

    # parity conservation on Ising-type circuits
    worst_parity = 0.0
    for geo in (build_geometry("chain", 7, "periodic"),
                build_geometry("square", (3, 3), "open")):
        circuit = build_ansatz(geo, "prh_ising", 3)
        pv = ParameterVector(rng.uniform(-2, 2, circuit.n_x),
                             rng.uniform(0.2, 1.8, circuit.n_y))
        out = run_circuit(circuit, pv)
        worst_parity = max(worst_parity, abs(parity_expectation(out) - 1.0))
    assert worst_parity <= 1e-10
    details.append(f"parity drift {worst_parity:.1e}")

    # Lindblad trace and Hermiticity at N=9 (one short damped segment)
    circuit = cross_ghz_circuit(1)
    params = fixed_ghz_cross_params(1)
    from qaoalab.lindblad import zz_layer_hamiltonian
    _, h_zz = zz_layer_hamiltonian(circuit, params)
    rho = DensityMatrix.from_state(prepare_initial("plus_product", 9))
    rho = lindblad_evolve(rho, h_zz, DampingSpec(0.05, tuple(range(9))),
                          t=0.4, dt=2e-3)
    trace_drift = abs(rho.trace() - 1.0)
    herm_drift = float(np.abs(rho.entries - rho.entries.conj().T).max())
    assert trace_drift <= 1e-9 and herm_drift <= 1e-10
    details.append(f"trace drift {trace_drift:.1e}, "
                   f"hermiticity {herm_drift:.1e}")

    # layer kernels against dense exponentials at n=6
    worst_layer = 0.0
    for gen in (LayerGenerator("zz_diagonal", ((0, 1), (1, 2), (3, 5)),
                               (0.8, -1.1, 0.4)),
                LayerGenerator("x_field", (0, 2, 4), (1.0, -0.6, 0.3)),
                LayerGenerator("xy_pair", ((0, 4), (1, 3)), (0.9, -0.5))):
        s = random_state(6, rng)
        expected = dense_layer_apply(gen, 6, 1.234, s.amplitudes.copy())
        apply_layer(s, gen, 1.234)
        worst_layer = max(worst_layer,
                          float(np.linalg.norm(s.amplitudes - expected)))
    assert worst_layer <= 1e-10
    details.append(f"layer-vs-dense {worst_layer:.1e}")

    # gradient cross-check
    geo = build_geometry("chain", 4, "periodic")
    circuit = build_ansatz(geo, "conventional_ising", 2)
    h = build_hamiltonian("tfim", geo, lam=1.0)
    cost = make_cost(circuit, "infidelity", exact_ground_state(h))
    pv = ParameterVector(rng.uniform(-1, 1, circuit.n_x), np.zeros(0))
    diff = np.max(np.abs(gradient(cost, pv, "central_difference")
                         - gradient(cost, pv, "parameter_shift")))
    assert diff <= 1e-6
    details.append(f"gradient cross-check {diff:.1e}")

    # improvement-ratio arithmetic identity on emitted records
    from qaoalab.experiments import run_experiment
    records = run_experiment({
        "experiment": "disorder",
        "geometry": {"kind": "chain", "size": 4, "boundary": "periodic"},
        "model": {"disorder": 1.0},
        "schemes": ["conventional", "prh"],
        "depths": [2],
        "samples": 2,
        "optimizer": {"n_starts": 3, "init_scale": 1.0},
        "base_seed": 21,
    })
    for r in records:
        if r.R is not None:
            conv = next(c for c in records if c.sample == r.sample
                        and c.R is None)
            assert r.R == (r.fidelity - conv.fidelity) / (1.0 - conv.fidelity)
    details.append("ratio identity exact on emitted records")

    report("criterion 8 (invariant bundle)", True, "; ".join(details))

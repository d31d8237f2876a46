import numpy as np
import pytest

from qaoalab.circuits import (ParameterVector, build_ansatz,
                              cross_ghz_circuit, fixed_ghz_cross_params)
from qaoalab.groundtruth import exact_ground_state, ghz_state
from qaoalab.lattices import build_geometry
from qaoalab.optimize import (OptConfig, OptimizerError, gradient, make_cost,
                              minimize, multistart_minimize, symmetry_report)
from qaoalab.paulis import build_hamiltonian


def quadratic_cost(pv):
    target = np.array([1.0, -2.0, 0.5, 3.0, -1.0])
    v = pv.flat()
    return float(np.sum((v - target) ** 2)) + 0.25


def test_minimize_convex_quadratic():
    init = ParameterVector(np.zeros(5), np.zeros(0))
    res = minimize(quadratic_cost, init, OptConfig(gradient_tolerance=1e-10))
    assert res.best_cost == pytest.approx(0.25, abs=1e-8)
    assert np.allclose(res.best_params.x, [1.0, -2.0, 0.5, 3.0, -1.0],
                       atol=1e-6)
    assert res.converged


def test_minimize_rejects_nonfinite_start():
    def bad(pv):
        return float("nan")

    with pytest.raises(OptimizerError):
        minimize(bad, ParameterVector(np.zeros(2), np.zeros(0)), OptConfig())


def test_gradient_of_constant_cost():
    const = lambda pv: 1.25
    g = gradient(const, ParameterVector(np.zeros(3), np.zeros(2)))
    assert np.allclose(g, 0.0)


def test_gradient_modes_agree(rng):
    geo = build_geometry("chain", 4, "periodic")
    circuit = build_ansatz(geo, "conventional_ising", 2)
    h = build_hamiltonian("tfim", geo, lam=1.0)
    gs = exact_ground_state(h)
    cost = make_cost(circuit, "infidelity", gs)
    pv = ParameterVector(rng.uniform(-1, 1, circuit.n_x), np.zeros(0))
    g_fd = gradient(cost, pv, "central_difference")
    g_ps = gradient(cost, pv, "parameter_shift")
    assert np.max(np.abs(g_fd - g_ps)) <= 1e-6

    cost_e = make_cost(circuit, "energy", h)
    ge_fd = gradient(cost_e, pv, "central_difference")
    ge_ps = gradient(cost_e, pv, "parameter_shift")
    assert np.max(np.abs(ge_fd - ge_ps)) <= 1e-6


def test_parameter_shift_rejects_resource_coordinates():
    geo = build_geometry("chain", 4, "open")
    circuit = build_ansatz(geo, "prh_ising", 1)
    cost = make_cost(circuit, "infidelity",
                     exact_ground_state(build_hamiltonian("tfim", geo, lam=1.0)))
    pv = ParameterVector(np.zeros(circuit.n_x), np.ones(circuit.n_y))
    with pytest.raises(OptimizerError):
        gradient(cost, pv, "parameter_shift")


def test_gradient_vanishes_at_cross_optimum():
    circuit = cross_ghz_circuit(1)
    cost = make_cost(circuit, "infidelity", ghz_state(9))
    pv = fixed_ghz_cross_params(1)
    assert cost(pv) <= 1e-12
    g = gradient(cost, pv, "central_difference")
    assert np.linalg.norm(g) <= 1e-5


def test_energy_cost_basics():
    geo = build_geometry("chain", 6, "periodic")
    h = build_hamiltonian("tfim", geo, lam=1.0)
    circuit = build_ansatz(geo, "conventional_ising", 2)
    cost = make_cost(circuit, "energy", h)
    zero = ParameterVector(np.zeros(circuit.n_x), np.zeros(0))
    assert cost(zero) == pytest.approx(-6.0, abs=1e-12)

    e0 = exact_ground_state(h).energy
    rng = np.random.default_rng(8)
    floor = min(cost(ParameterVector(rng.uniform(-np.pi, np.pi, circuit.n_x),
                                     np.zeros(0)))
                for _ in range(200))
    assert floor >= e0 - 1e-10


def test_make_cost_kind_checks():
    geo = build_geometry("chain", 4, "open")
    circuit = build_ansatz(geo, "conventional_ising", 1)
    h = build_hamiltonian("tfim", geo, lam=1.0)
    gs = exact_ground_state(h)
    with pytest.raises(OptimizerError):
        make_cost(circuit, "infidelity", h)
    with pytest.raises(OptimizerError):
        make_cost(circuit, "energy", gs)
    with pytest.raises(OptimizerError):
        make_cost(circuit, "overlap", gs)


def test_small_pbc_instance_reaches_perfect_fidelity():
    geo = build_geometry("chain", 4, "periodic")
    h = build_hamiltonian("tfim", geo, lam=1.0)
    gs = exact_ground_state(h)
    circuit = build_ansatz(geo, "conventional_ising", 2)
    cost = make_cost(circuit, "infidelity", gs)
    config = OptConfig(n_starts=10, init_scale=np.pi / 2, seed=3,
                       gradient_tolerance=1e-12, max_iterations=2000)
    res = multistart_minimize(cost, circuit, config)
    assert res.best_cost <= 1e-8
    assert res.best_cost == min(res.per_start_costs)


def test_multistart_determinism_and_monotonicity():
    geo = build_geometry("chain", 4, "periodic")
    h = build_hamiltonian("tfim", geo, lam=1.0)
    gs = exact_ground_state(h)
    circuit = build_ansatz(geo, "conventional_ising", 1)
    cost = make_cost(circuit, "infidelity", gs)
    cfg = OptConfig(n_starts=4, init_scale=1.0, seed=11)
    a = multistart_minimize(cost, circuit, cfg)
    b = multistart_minimize(cost, circuit, cfg)
    assert a.per_start_costs == b.per_start_costs
    assert np.array_equal(a.best_params.x, b.best_params.x)

    one = multistart_minimize(cost, circuit,
                              OptConfig(n_starts=1, init_scale=1.0, seed=11))
    assert a.best_cost <= one.best_cost
    assert one.per_start_costs[0] == a.per_start_costs[0]


def test_warm_start_center_is_used_exactly():
    geo = build_geometry("chain", 4, "open")
    h = build_hamiltonian("tfim", geo, lam=1.0)
    gs = exact_ground_state(h)
    conv = build_ansatz(geo, "conventional_ising", 1)
    cost_c = make_cost(conv, "infidelity", gs)
    res_c = multistart_minimize(cost_c, conv,
                                OptConfig(n_starts=5, init_scale=1.0, seed=5))
    prh = build_ansatz(geo, "prh_ising", 1)
    cost_p = make_cost(prh, "infidelity", gs)
    warm = ParameterVector(res_c.best_params.x.copy(), np.ones(prh.n_y))
    res_p = multistart_minimize(cost_p, prh,
                                OptConfig(n_starts=3, init_scale=0.3, seed=5),
                                center=warm)
    # the PRH search space contains the conventional slice
    assert res_p.best_cost <= res_c.best_cost + 1e-12


def test_accepted_iterates_descend():
    geo = build_geometry("chain", 4, "periodic")
    h = build_hamiltonian("tfim", geo, lam=1.0)
    gs = exact_ground_state(h)
    circuit = build_ansatz(geo, "conventional_ising", 2)
    cost = make_cost(circuit, "infidelity", gs)
    trace = []
    init = ParameterVector(np.full(circuit.n_x, 0.4), np.zeros(0))
    minimize(cost, init, OptConfig(max_iterations=200),
             callback=lambda pv: trace.append(cost(pv)))
    assert len(trace) > 2
    assert all(b <= a + 1e-15 for a, b in zip(trace, trace[1:]))


def test_symmetry_report_uniform_is_exact():
    geo = build_geometry("chain", 6, "open")
    circuit = build_ansatz(geo, "prh_ising", 1)
    pv = ParameterVector(np.array([0.3, 0.4]), np.ones(circuit.n_y))
    rep = symmetry_report(pv, circuit, geo)
    assert set(rep.deviations) == {"inversion"}
    assert rep.deviations["inversion"] == 0.0
    assert np.allclose(rep.symmetrized_params.y, 1.0)


def test_symmetry_report_detects_asymmetry():
    geo = build_geometry("chain", 4, "open")
    circuit = build_ansatz(geo, "prh_ising", 1)
    y = np.ones(circuit.n_y)
    y[0] = 2.0  # h on site 0 only
    pv = ParameterVector(np.zeros(2), y)
    rep = symmetry_report(pv, circuit, geo)
    assert rep.deviations["inversion"] > 0.1
    # averaging restores the symmetry
    ys = rep.symmetrized_params.y
    assert ys[0] == pytest.approx(ys[3])


def test_symmetry_report_cost_delta():
    geo = build_geometry("chain", 4, "open")
    h = build_hamiltonian("tfim", geo, lam=1.0)
    gs = exact_ground_state(h)
    circuit = build_ansatz(geo, "prh_ising", 1)
    cost = make_cost(circuit, "infidelity", gs)
    pv = ParameterVector(np.array([0.2, 0.5]), np.ones(circuit.n_y))
    rep = symmetry_report(pv, circuit, geo, cost=cost)
    assert rep.cost_delta == pytest.approx(0.0, abs=1e-14)

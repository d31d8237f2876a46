"""Gradient-based minimization of infidelity or energy over the time
angles x and resource parameters y.

The descent engine is quasi-Newton (BFGS with the usual cubic-interpolating
Wolfe line search); gradients come from central differences (step 1e-6) or
from exact per-Pauli parameter shifts where those apply.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize as _scipy_minimize

from .circuits import (CircuitSpec, ParameterVector, check_layout,
                       run_circuit, run_circuit_shifted)
from .groundtruth import GroundStateResult
from .paulis import WeightedPauliSum
from .states import StateVector, expectation, overlap_fidelity

CENTRAL_DIFF_STEP = 1e-6


class OptimizerError(ValueError):
    pass


@dataclass(frozen=True)
class OptConfig:
    max_iterations: int = 1000
    gradient_tolerance: float = 1e-10
    step_tolerance: float = 1e-14
    n_starts: int = 1
    init_scale: float = 0.1
    seed: int = 0
    gradient_mode: str = "central_difference"

    def __post_init__(self):
        if self.gradient_tolerance <= 0 or self.step_tolerance <= 0:
            raise OptimizerError("tolerances must be positive")
        if self.n_starts < 1:
            raise OptimizerError("n_starts must be >= 1")
        if self.gradient_mode not in ("central_difference", "parameter_shift"):
            raise OptimizerError(f"unknown gradient mode {self.gradient_mode!r}")


@dataclass
class OptResult:
    best_params: ParameterVector
    best_cost: float
    final_gradient_norm: float
    iterations: int
    converged: bool
    per_start_costs: list = field(default_factory=list)

    def to_json(self):
        return json.dumps({
            "best_cost": self.best_cost,
            "final_gradient_norm": self.final_gradient_norm,
            "iterations": self.iterations,
            "converged": self.converged,
            "per_start_costs": self.per_start_costs,
            "x": self.best_params.x.tolist(),
            "y": self.best_params.y.tolist(),
        })


class CostFunction:
    """Callable cost over ParameterVector, carrying enough circuit
    structure for exact gradients."""

    def __init__(self, circuit, objective, target_state=None, hamiltonian=None):
        self.circuit = circuit
        self.objective = objective
        self.target_state = target_state
        self.hamiltonian = hamiltonian

    def __call__(self, params: ParameterVector):
        state = run_circuit(self.circuit, params)
        return self.evaluate_state(state)

    def evaluate_state(self, state):
        if self.objective == "infidelity":
            return 1.0 - overlap_fidelity(state, self.target_state)
        return expectation(state, self.hamiltonian)


def make_cost(circuit: CircuitSpec, objective, target):
    """objective 'infidelity' takes a target StateVector (or a
    GroundStateResult, whose state is used); 'energy' takes the target
    WeightedPauliSum."""
    if objective == "infidelity":
        if isinstance(target, GroundStateResult):
            target = target.state
        if not isinstance(target, StateVector):
            raise OptimizerError("infidelity needs a target state")
        if target.n_qubits != circuit.n_qubits:
            raise OptimizerError("target dimension mismatch")
        return CostFunction(circuit, "infidelity", target_state=target)
    if objective == "energy":
        if isinstance(target, GroundStateResult):
            raise OptimizerError("energy objective needs the Hamiltonian, "
                                 "not its ground state")
        if not isinstance(target, WeightedPauliSum):
            raise OptimizerError("energy needs a target Hamiltonian")
        if target.n_qubits != circuit.n_qubits:
            raise OptimizerError("target dimension mismatch")
        return CostFunction(circuit, "energy", hamiltonian=target)
    raise OptimizerError(f"unknown objective {objective!r}")


def _central_difference(cost, params):
    v0 = params.flat()
    g = np.zeros_like(v0)
    n_x = params.x.size
    for k in range(v0.size):
        vp = v0.copy()
        vm = v0.copy()
        vp[k] += CENTRAL_DIFF_STEP
        vm[k] -= CENTRAL_DIFF_STEP
        fp = cost(ParameterVector.from_flat(vp, n_x))
        fm = cost(ParameterVector.from_flat(vm, n_x))
        g[k] = (fp - fm) / (2.0 * CENTRAL_DIFF_STEP)
    return g


def _parameter_shift(cost, params):
    circuit = getattr(cost, "circuit", None)
    if circuit is None:
        raise OptimizerError("parameter_shift needs a circuit-backed cost")
    if params.y.size:
        raise OptimizerError("parameter_shift is not defined for resource "
                             "(y) coordinates; use central_difference")
    m = circuit.layers_per_cycle
    g = np.zeros(circuit.n_x)
    for cycle in range(circuit.depth):
        for j in range(m):
            tpl = circuit.templates[j]
            acc = 0.0
            for term in tpl.terms_for(circuit.n_qubits, params.y):
                w = term.coefficient
                if w == 0.0:
                    continue
                shift = np.pi / (4.0 * w)
                fp = cost.evaluate_state(run_circuit_shifted(
                    circuit, params, cycle, j, term, shift))
                fm = cost.evaluate_state(run_circuit_shifted(
                    circuit, params, cycle, j, term, -shift))
                acc += w * (fp - fm)
            g[cycle * m + j] = acc
    return g


def gradient(cost, params: ParameterVector, mode="central_difference"):
    """Gradient over the concatenated (x, y) coordinates."""
    if mode == "central_difference":
        return _central_difference(cost, params)
    if mode == "parameter_shift":
        return _parameter_shift(cost, params)
    raise OptimizerError(f"unknown gradient mode {mode!r}")


def minimize(cost, init: ParameterVector, config: OptConfig, callback=None):
    """Quasi-Newton descent from one starting point; cost is any callable
    over ParameterVector.  The accepted-iterate costs are non-increasing
    (Wolfe line search); ``callback`` receives each accepted
    ParameterVector."""
    if isinstance(cost, CostFunction):
        check_layout(cost.circuit, init)
    v0 = init.flat()
    n_x = init.x.size
    if not np.isfinite(cost(init)):
        raise OptimizerError("cost is not finite at the initial point")

    def fun(v):
        return cost(ParameterVector.from_flat(v, n_x))

    def jac(v):
        return gradient(cost, ParameterVector.from_flat(v, n_x),
                        config.gradient_mode)

    scipy_callback = None
    if callback is not None:
        scipy_callback = lambda v: callback(ParameterVector.from_flat(v, n_x))

    res = _scipy_minimize(
        fun, v0, method="BFGS", jac=jac, callback=scipy_callback,
        options={
            "gtol": config.gradient_tolerance,
            "maxiter": config.max_iterations,
            "xrtol": config.step_tolerance,
        })
    grad_norm = float(np.linalg.norm(res.jac, ord=np.inf))
    best = ParameterVector.from_flat(res.x, n_x)
    converged = bool(res.success) or grad_norm <= config.gradient_tolerance
    return OptResult(best, float(res.fun), grad_norm, int(res.nit),
                     converged, [float(res.fun)])


def multistart_minimize(cost, layout, config: OptConfig, center=None):
    """Best of n_starts independent descents.

    Random starts draw x uniformly from [-init_scale, +init_scale] and y
    around 1 +- init_scale (stream k uses default_rng([seed, k]), x drawn
    before y).  With ``center`` given (warm start), start 0 begins exactly
    there and the remaining starts perturb it by the same uniform scale.
    """
    if isinstance(layout, CircuitSpec):
        n_x, n_y = layout.parameter_layout()
    else:
        n_x, n_y = layout
    s = config.init_scale
    best = None
    per_start = []
    for k in range(config.n_starts):
        rng = np.random.default_rng([config.seed, k])
        dx = rng.uniform(-s, s, n_x)
        dy = rng.uniform(-s, s, n_y)
        if center is None:
            init = ParameterVector(dx, 1.0 + dy)
        elif k == 0:
            init = center.copy()
        else:
            init = ParameterVector(center.x + dx, center.y + dy)
        res = minimize(cost, init, config)
        per_start.append(res.best_cost)
        if best is None or res.best_cost < best.best_cost:
            best = res
    best.per_start_costs = per_start
    return best


@dataclass(frozen=True)
class SymmetryReport:
    deviations: dict
    symmetrized_params: ParameterVector
    cost_delta: float | None


def _permute_y(circuit, geometry, y, perm):
    """y re-indexed by the site permutation acting on attachments."""
    slot_of = {}
    for k, binding in enumerate(circuit.resource_layout):
        if binding.kind == "site":
            slot_of[("site", binding.attachment[0])] = k
        elif binding.kind == "edge":
            slot_of[("edge", frozenset(binding.attachment))] = k
    out = np.empty_like(y)
    for k, binding in enumerate(circuit.resource_layout):
        if binding.kind == "site":
            key = ("site", perm[binding.attachment[0]])
        elif binding.kind == "edge":
            i, j = binding.attachment
            key = ("edge", frozenset((perm[i], perm[j])))
        else:
            # class bindings map onto themselves under lattice symmetries
            out[k] = y[k]
            continue
        if key not in slot_of:
            raise OptimizerError("symmetry op does not preserve the "
                                 "resource layout")
        out[slot_of[key]] = y[k]
    return out


def _group_closure(ops, n):
    ident = tuple(range(n))
    group = {ident}
    frontier = [tuple(op) for op in ops]
    while frontier:
        g = frontier.pop()
        if g in group:
            continue
        group.add(g)
        for h in list(group):
            for comp in (tuple(g[h[i]] for i in range(n)),
                         tuple(h[g[i]] for i in range(n))):
                if comp not in group:
                    frontier.append(comp)
        if len(group) > 64:
            raise OptimizerError("symmetry group too large")
    return sorted(group)


def symmetry_report(params: ParameterVector, circuit: CircuitSpec,
                    geometry, cost=None):
    """Per-symmetry RMS deviation of y from its permuted image, plus the
    cost change when y is replaced by its average over the symmetry
    group (when a cost is supplied)."""
    names = geometry.symmetry_names or tuple(
        f"op{k}" for k in range(len(geometry.symmetry_ops)))
    deviations = {}
    for name, op in zip(names, geometry.symmetry_ops):
        yp = _permute_y(circuit, geometry, params.y, op)
        deviations[name] = (float(np.sqrt(np.mean((params.y - yp) ** 2)))
                            if params.y.size else 0.0)
    if params.y.size:
        group = _group_closure(geometry.symmetry_ops, geometry.n_sites)
        acc = np.zeros_like(params.y)
        for op in group:
            acc += _permute_y(circuit, geometry, params.y, op)
        y_sym = acc / len(group)
    else:
        y_sym = params.y.copy()
    sym_params = ParameterVector(params.x.copy(), y_sym)
    delta = None
    if cost is not None:
        delta = float(cost(sym_params) - cost(params))
    return SymmetryReport(deviations, sym_params, delta)

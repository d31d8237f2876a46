"""Config-driven experiment runs: ground-state sweeps, GHZ sweeps,
disorder averages, the damped-GHZ sweep and the fixed-protocol check.

Each run is a JSON document validated against EXPERIMENT_SCHEMA.  Output
is a CSV table with a fixed column order plus a JSON sidecar holding the
optimized parameter vectors.  Runs are deterministic: every stochastic
ingredient derives from base_seed through documented streams (disorder
sample s draws from default_rng([base_seed, s]); optimizer start k of a
work item carrying derived seed q draws from default_rng([q, k])).
Independent (depth, sample) work items execute on a worker pool bounded
by LAB_THREADS; records merge in config order regardless of completion
order."""

from __future__ import annotations

import csv
import json
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass

import jsonschema
import numpy as np

from .circuits import (ParameterVector, build_ansatz, cross_ghz_circuit,
                       fixed_ghz_cross_params, run_circuit)
from .groundtruth import exact_ground_state, ghz_state, improvement_ratio
from .lattices import build_geometry
from .lindblad import DEFAULT_DT, damped_ghz_sweep
from .optimize import OptConfig, make_cost, multistart_minimize
from .paulis import build_hamiltonian, random_ising_weights
from .rydberg import rydberg_ghz_protocol
from .states import overlap_fidelity

CSV_COLUMNS = ("experiment", "model", "N", "boundary", "p", "sample", "seed",
               "objective", "best_cost", "fidelity", "R", "wall_ms")

EXPERIMENT_KINDS = ("gs_sweep", "ghz_sweep", "disorder", "lindblad",
                    "rydberg_check", "heisenberg_sweep")

EXPERIMENT_SCHEMA = {
    "type": "object",
    "properties": {
        "experiment": {"enum": list(EXPERIMENT_KINDS)},
        "geometry": {
            "type": "object",
            "properties": {
                "kind": {"enum": ["chain", "square", "square4x4",
                                  "triangular10", "cross"]},
                "size": {},
                "boundary": {"enum": ["open", "periodic"]},
            },
            "required": ["kind"],
        },
        "model": {
            "type": "object",
            "properties": {
                "lam": {"type": "number"},
                "disorder": {"type": "number"},
            },
        },
        "schemes": {"type": "array",
                    "items": {"enum": ["conventional", "prh"]}},
        "depths": {"type": "array", "items": {"type": "integer", "minimum": 1}},
        "objective": {"enum": ["infidelity", "energy"]},
        "optimizer": {"type": "object"},
        "warm_start_scale": {"type": "number"},
        "samples": {"type": "integer", "minimum": 1},
        "base_seed": {"type": "integer"},
        "gammas": {"type": "array", "items": {"type": "number"}},
        "dt": {"type": "number", "exclusiveMinimum": 0},
        "m": {"type": ["integer", "array"]},
        "fixed_parameters": {"type": "boolean"},
        "output": {"type": "string"},
    },
    "required": ["experiment"],
}


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentRecord:
    experiment: str
    model: str
    N: int
    boundary: str
    p: int
    sample: int
    seed: int
    objective: str
    best_cost: float
    fidelity: float
    R: float | None
    wall_ms: float
    params: dict | None = None

    def csv_row(self):
        d = asdict(self)
        d["R"] = "" if self.R is None else repr(self.R)
        d["best_cost"] = repr(self.best_cost)
        d["fidelity"] = repr(self.fidelity)
        d["wall_ms"] = f"{self.wall_ms:.3f}"
        return [d[c] for c in CSV_COLUMNS]


def validate_config(config):
    try:
        jsonschema.validate(config, EXPERIMENT_SCHEMA)
    except jsonschema.ValidationError as exc:
        raise ConfigError(str(exc)) from exc
    kind = config["experiment"]
    needs_geometry = kind in ("gs_sweep", "ghz_sweep", "disorder",
                              "heisenberg_sweep")
    if needs_geometry and "geometry" not in config:
        raise ConfigError(f"{kind} needs a geometry block")
    if kind == "lindblad" and not config.get("gammas"):
        raise ConfigError("lindblad needs a non-empty gammas list")
    return config


def _threads():
    try:
        return max(1, int(os.environ.get("LAB_THREADS", "1")))
    except ValueError:
        return 1


def _run_items(items):
    """Run callables on a bounded pool; results keep submission order."""
    workers = _threads()
    if workers == 1 or len(items) <= 1:
        return [item() for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return [f.result() for f in [pool.submit(item) for item in items]]


def _opt_config(config, seed, **overrides):
    opts = dict(config.get("optimizer", {}))
    opts.update(overrides)
    opts["seed"] = seed
    return OptConfig(**opts)


def _derive_seed(base, *indices):
    s = int(base)
    for k in indices:
        s = s * 1_000_003 + int(k) + 1
    return s & 0x7FFFFFFF


def _geometry_from(config):
    g = config["geometry"]
    return build_geometry(g["kind"], g.get("size"), g.get("boundary", "open"))


def _fidelity_of(state, fidelity_target):
    return overlap_fidelity(state, fidelity_target) if fidelity_target else None


@dataclass
class _ArmSpec:
    """Inputs of one paired (conventional, prh) work item."""

    config: dict
    geometry: object
    target: object          # cost target (state result or Hamiltonian)
    fidelity_target: object  # StateVector for the fidelity column
    objective: str
    model_desc: str
    family: str             # "ising" or "heisenberg"
    depth: int
    sample: int = -1
    target_weights: tuple | None = None


def _run_paired_item(spec: _ArmSpec):
    config = spec.config
    base_seed = config.get("base_seed", 0)
    schemes = config.get("schemes", ["conventional", "prh"])
    warm_scale = config.get("warm_start_scale", 0.5)
    conv = f"conventional_{spec.family}"
    prh = f"prh_{spec.family}"
    records = []

    seed_c = _derive_seed(base_seed, spec.depth, 0, spec.sample)
    t0 = time.perf_counter()
    circuit_c = build_ansatz(spec.geometry, conv, spec.depth,
                             spec.target_weights)
    cost_c = make_cost(circuit_c, spec.objective, spec.target)
    res_c = multistart_minimize(cost_c, circuit_c, _opt_config(config, seed_c))
    state_c = run_circuit(circuit_c, res_c.best_params)
    fid_c = (1.0 - res_c.best_cost if spec.objective == "infidelity"
             else _fidelity_of(state_c, spec.fidelity_target))
    records.append(ExperimentRecord(
        config["experiment"], f"{spec.model_desc}:{conv}",
        spec.geometry.n_sites, spec.geometry.boundary, spec.depth,
        spec.sample, seed_c, spec.objective, res_c.best_cost, fid_c, None,
        1e3 * (time.perf_counter() - t0),
        {"x": res_c.best_params.x.tolist(),
         "y": res_c.best_params.y.tolist()}))

    if "prh" in schemes:
        seed_p = _derive_seed(base_seed, spec.depth, 1, spec.sample)
        t0 = time.perf_counter()
        circuit_p = build_ansatz(spec.geometry, prh, spec.depth)
        cost_p = make_cost(circuit_p, spec.objective, spec.target)
        warm = ParameterVector(res_c.best_params.x.copy(),
                               np.ones(circuit_p.n_y))
        res_p = multistart_minimize(
            cost_p, circuit_p,
            _opt_config(config, seed_p, init_scale=warm_scale), center=warm)
        state_p = run_circuit(circuit_p, res_p.best_params)
        fid_p = (1.0 - res_p.best_cost if spec.objective == "infidelity"
                 else _fidelity_of(state_p, spec.fidelity_target))
        ratio = (improvement_ratio(fid_c, fid_p)
                 if fid_c is not None and fid_c < 1.0 else None)
        records.append(ExperimentRecord(
            config["experiment"], f"{spec.model_desc}:{prh}",
            spec.geometry.n_sites, spec.geometry.boundary, spec.depth,
            spec.sample, seed_p, spec.objective, res_p.best_cost, fid_p,
            ratio, 1e3 * (time.perf_counter() - t0),
            {"x": res_p.best_params.x.tolist(),
             "y": res_p.best_params.y.tolist()}))
    return records


def _paired_records(config, specs):
    nested = _run_items([lambda s=s: _run_paired_item(s) for s in specs])
    return [r for group in nested for r in group]


def _run_gs_sweep(config):
    geometry = _geometry_from(config)
    lam = config.get("model", {}).get("lam", 1.0)
    h = build_hamiltonian("tfim", geometry, lam=lam)
    objective = config.get("objective", "infidelity")
    gs = exact_ground_state(h)
    target = gs if objective == "infidelity" else h
    specs = [_ArmSpec(config, geometry, target, gs.state, objective,
                      f"tfim(lam={lam})", "ising", p)
             for p in config.get("depths", [1])]
    return _paired_records(config, specs)


def _run_heisenberg_sweep(config):
    geometry = _geometry_from(config)
    h = build_hamiltonian("heisenberg", geometry)
    objective = config.get("objective", "infidelity")
    gs = exact_ground_state(h)
    target = gs if objective == "infidelity" else h
    specs = [_ArmSpec(config, geometry, target, gs.state, objective,
                      "heisenberg", "heisenberg", p)
             for p in config.get("depths", [1])]
    return _paired_records(config, specs)


def _run_ghz_sweep(config):
    geometry = _geometry_from(config)
    n = geometry.n_sites
    target = ghz_state(n)
    if config.get("fixed_parameters"):
        if geometry.kind != "cross":
            raise ConfigError("fixed_parameters mode needs a cross geometry")
        m = (n - 5) // 4
        t0 = time.perf_counter()
        circuit = cross_ghz_circuit(m)
        params = fixed_ghz_cross_params(m)
        fid = overlap_fidelity(run_circuit(circuit, params), target)
        return [ExperimentRecord(
            "ghz_sweep", "ferro_cross:fixed", n, geometry.boundary,
            m + 1, -1, -1, "infidelity", 1.0 - fid, fid, None,
            1e3 * (time.perf_counter() - t0),
            {"x": params.x.tolist(), "y": params.y.tolist()})]
    specs = [_ArmSpec(config, geometry, target, target, "infidelity",
                      "ferro_ghz", "ising", p)
             for p in config.get("depths", [1])]
    return _paired_records(config, specs)


def _run_disorder(config):
    geometry = _geometry_from(config)
    d = config.get("model", {}).get("disorder", 1.0)
    base_seed = config.get("base_seed", 0)
    objective = config.get("objective", "infidelity")
    specs = []
    for s in range(config.get("samples", 10)):
        seed = [base_seed, s]
        h = build_hamiltonian("random_ising", geometry, disorder=d, seed=seed)
        couplings, fields = random_ising_weights(geometry, d, seed)
        gs = exact_ground_state(h)
        target = gs if objective == "infidelity" else h
        for p in config.get("depths", [1]):
            specs.append(_ArmSpec(config, geometry, target, gs.state,
                                  objective, f"random_ising(D={d})", "ising",
                                  p, sample=s,
                                  target_weights=(fields, couplings)))
    return _paired_records(config, specs)


def _run_lindblad(config):
    gammas = config["gammas"]
    dt = config.get("dt", DEFAULT_DT)
    rows, fit = damped_ghz_sweep(gammas, m=1, dt=dt)
    records = [ExperimentRecord(
        "lindblad", f"damped_cross_ghz(gamma={g})", 9, "open", 2, k, -1,
        "infidelity", infid, 1.0 - infid, None, 0.0, None)
        for k, (g, infid) in enumerate(rows)]
    fit_doc = {"exponent": fit.exponent, "prefactor": fit.prefactor,
               "r_squared": fit.r_squared}
    return records, fit_doc


def _run_rydberg_check(config):
    ms = config.get("m", [1, 2, 3])
    if isinstance(ms, int):
        ms = [ms]
    records = []
    for m in ms:
        t0 = time.perf_counter()
        circuit, params, fid = rydberg_ghz_protocol(m)
        records.append(ExperimentRecord(
            "rydberg_check", f"cross(m={m})", circuit.n_qubits, "open",
            circuit.depth, -1, -1, "infidelity", 1.0 - fid, fid, None,
            1e3 * (time.perf_counter() - t0),
            {"x": params.x.tolist(), "y": params.y.tolist()}))
    return records


def run_experiment(config):
    """Execute one validated experiment config; returns ExperimentRecords
    (the lindblad experiment also returns its power-law fit document)."""
    validate_config(config)
    kind = config["experiment"]
    runner = {
        "gs_sweep": _run_gs_sweep,
        "heisenberg_sweep": _run_heisenberg_sweep,
        "ghz_sweep": _run_ghz_sweep,
        "disorder": _run_disorder,
        "lindblad": _run_lindblad,
        "rydberg_check": _run_rydberg_check,
    }[kind]
    return runner(config)


def write_outputs(result, prefix):
    """CSV table (atomic rename) plus JSON sidecar with parameters."""
    if isinstance(result, tuple):
        records, fit = result
    else:
        records, fit = result, None
    csv_path = f"{prefix}.csv"
    tmp = csv_path + ".tmp"
    with open(tmp, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        for r in records:
            writer.writerow(r.csv_row())
    os.replace(tmp, csv_path)
    sidecar = {
        "records": [
            {"model": r.model, "p": r.p, "sample": r.sample,
             "params": r.params} for r in records],
    }
    if fit is not None:
        sidecar["fit"] = fit
    with open(f"{prefix}.json", "w") as fh:
        json.dump(sidecar, fh, indent=2)
    return csv_path

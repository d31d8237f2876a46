"""Command-line entry point: run experiment configs, quick acceptance
checks, the fixed Rydberg GHZ protocol, and damping sweeps.

Exit codes: 0 success, 2 config error, 3 threshold failure in check mode.
"""

from __future__ import annotations

import json
import sys

import click

from . import __version__
from ._kernels import BACKEND


@click.group()
@click.version_option(__version__)
def main():
    """Quantum-state preparation laboratory."""


@main.command("run")
@click.argument("config_path", type=click.Path(exists=True, dir_okay=False))
@click.option("-o", "--output", default=None,
              help="Output prefix (default: from config, else 'lab_run').")
def run_cmd(config_path, output):
    """Run one experiment config (JSON) and write CSV + JSON outputs."""
    from .experiments import ConfigError, run_experiment, write_outputs

    with open(config_path) as fh:
        try:
            config = json.load(fh)
        except json.JSONDecodeError as exc:
            click.echo(f"config error: {exc}", err=True)
            sys.exit(2)
    prefix = output or config.get("output", "lab_run")
    try:
        result = run_experiment(config)
    except ConfigError as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(2)
    csv_path = write_outputs(result, prefix)
    records = result[0] if isinstance(result, tuple) else result
    click.echo(f"wrote {csv_path} ({len(records)} records, backend={BACKEND})")


def _check_ghz_fixed():
    from .rydberg import rydberg_ghz_protocol

    rows = []
    for m, tol in ((1, 1e-12), (2, 1e-10), (3, 1e-10)):
        _, _, fid = rydberg_ghz_protocol(m)
        rows.append((f"cross m={m} (N={5 + 4 * m}) infidelity", 1.0 - fid, tol))
    return rows


def _check_echo():
    import numpy as np

    from .rydberg import cross_lattice_positions, echo_to_ising, DressedAtomArray

    rng = np.random.default_rng(11)
    rows = []
    for n in (2, 4):
        if n == 2:
            arr = DressedAtomArray(np.array([[0.0, 0.0], [1.0, 0.0]]),
                                   ("type1", "type1"), 1.0, 1.0)
        else:
            full = cross_lattice_positions(1)
            arr = DressedAtomArray(full.positions[:4], full.species[:4],
                                   full.v0, full.rc)
        dev = max(echo_to_ising(arr, float(rng.uniform(0.1, 3.0)))[1]
                  for _ in range(5))
        rows.append((f"echo identity n={n} max deviation", dev, 1e-10))
    return rows


def _check_smoke():
    from .experiments import run_experiment

    config = {
        "experiment": "gs_sweep",
        "geometry": {"kind": "chain", "size": 4, "boundary": "periodic"},
        "model": {"lam": 1.0},
        "schemes": ["conventional"],
        "depths": [2],
        "optimizer": {"n_starts": 10, "init_scale": 1.5},
        "base_seed": 7,
    }
    records = run_experiment(config)
    return [("chain N=4 PBC p=2 infidelity", records[0].best_cost, 1e-8)]


CHECK_SUITES = {
    "ghz-fixed": _check_ghz_fixed,
    "echo": _check_echo,
    "smoke": _check_smoke,
}


@main.command("check")
@click.argument("suite", type=click.Choice(sorted(CHECK_SUITES)))
def check_cmd(suite):
    """Run a named threshold check suite (exit 3 on failure)."""
    rows = CHECK_SUITES[suite]()
    failed = False
    for label, value, tol in rows:
        ok = value <= tol
        failed |= not ok
        click.echo(f"[{'PASS' if ok else 'FAIL'}] {label}: "
                   f"{value:.3e} (tol {tol:.0e})")
    sys.exit(3 if failed else 0)


@main.command("rydberg-check")
@click.option("-m", type=click.IntRange(1, 3), required=True,
              help="Arm extension (N = 5 + 4m).")
@click.option("-o", "--output", default=None,
              help="Write the JSON report here instead of stdout.")
def rydberg_check_cmd(m, output):
    """Fixed-parameter cross-array GHZ protocol report."""
    from .rydberg import (cross_array_couplings, cross_lattice_positions,
                          rydberg_ghz_protocol)

    circuit, params, fid = rydberg_ghz_protocol(m)
    array = cross_lattice_positions(m)
    report = {
        "m": m,
        "n_qubits": circuit.n_qubits,
        "depth": circuit.depth,
        "x": params.x.tolist(),
        "y": params.y.tolist(),
        "fidelity": fid,
        "infidelity": 1.0 - fid,
        "array": json.loads(array.to_json()),
        "couplings": cross_array_couplings(m, tuple(params.y)),
    }
    text = json.dumps(report, indent=2)
    if output:
        with open(output, "w") as fh:
            fh.write(text + "\n")
        click.echo(f"wrote {output} (infidelity {1.0 - fid:.3e})")
    else:
        click.echo(text)


@main.command("lindblad")
@click.option("--gammas", required=True,
              help="Comma-separated damping strengths, e.g. '3e-3,1e-2,3e-2'.")
@click.option("--dt", default=None, type=float, help="RK4 step size.")
@click.option("-o", "--output", default="lindblad_sweep",
              help="Output prefix for CSV and fit JSON.")
def lindblad_cmd(gammas, dt, output):
    """Damped cross-GHZ sweep with a power-law fit of the infidelity."""
    from .lindblad import (DEFAULT_DT, damped_ghz_sweep, write_fit_json,
                           write_sweep_csv)

    try:
        values = [float(tok) for tok in gammas.split(",") if tok.strip()]
    except ValueError as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(2)
    if not values:
        click.echo("config error: empty gamma list", err=True)
        sys.exit(2)
    rows, fit = damped_ghz_sweep(values, dt=DEFAULT_DT if dt is None else dt)
    write_sweep_csv(f"{output}.csv", rows)
    write_fit_json(f"{output}_fit.json", fit)
    for g, infid in rows:
        click.echo(f"gamma={g:.4e}  1-f={infid:.6e}")
    click.echo(f"power-law exponent {fit.exponent:.4f} "
               f"(prefactor {fit.prefactor:.4f}, R^2 {fit.r_squared:.6f})")
    click.echo(f"wrote {output}.csv and {output}_fit.json")


if __name__ == "__main__":
    main()

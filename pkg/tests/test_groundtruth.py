import numpy as np
import pytest

from conftest import dense_operator
from qaoalab.groundtruth import (OracleError, exact_ground_state, ghz_state,
                                 improvement_ratio)
from qaoalab.lattices import build_geometry
from qaoalab.paulis import build_hamiltonian
from qaoalab.states import expectation, overlap_fidelity, parity_expectation, prepare_initial


def test_tfim_two_site_energy():
    g = build_geometry("chain", 2, "open")
    h = build_hamiltonian("tfim", g, lam=1.0)
    res = exact_ground_state(h)
    assert res.energy == pytest.approx(-np.sqrt(5.0), abs=1e-12)
    assert res.residual <= 1e-9
    assert not res.degenerate


def test_ferro_parity_sector_gives_ghz():
    g = build_geometry("chain", 3, "periodic")
    h = build_hamiltonian("ferro_ising", g)
    res = exact_ground_state(h, sector="parity_plus")
    assert res.energy == pytest.approx(-3.0, abs=1e-12)
    assert res.degenerate  # the two fully aligned product states
    assert overlap_fidelity(res.state, ghz_state(3)) == pytest.approx(1.0, abs=1e-12)
    assert parity_expectation(res.state) >= 1.0 - 1e-10


def test_paramagnetic_limit():
    g = build_geometry("chain", 3, "open")
    h = build_hamiltonian("tfim", g, lam=100.0)
    res = exact_ground_state(h)
    assert overlap_fidelity(res.state, prepare_initial("plus_product", 3)) >= 0.999


def test_ghz_examples():
    s1 = ghz_state(1)
    assert np.allclose(s1.amplitudes, [2 ** -0.5, 2 ** -0.5])
    s2 = ghz_state(2)
    assert np.allclose(s2.amplitudes, [2 ** -0.5, 0.0, 0.0, 2 ** -0.5])
    for n in (1, 3, 6):
        assert parity_expectation(ghz_state(n)) == pytest.approx(1.0, abs=1e-13)


def test_ghz_is_ferro_eigenstate():
    for kind, size, boundary in (("chain", 7, "periodic"),
                                 ("square", (3, 3), "open"),
                                 ("cross", 1, "open")):
        g = build_geometry(kind, size, boundary)
        h = build_hamiltonian("ferro_ising", g)
        s = ghz_state(g.n_sites)
        resid = np.linalg.norm(h.apply(s.amplitudes)
                               - (-g.n_edges) * s.amplitudes)
        assert resid <= 1e-12
        assert expectation(s, h) == pytest.approx(-g.n_edges, abs=1e-12)


def test_improvement_ratio():
    assert improvement_ratio(0.9, 0.99) == pytest.approx(0.9)
    assert improvement_ratio(0.4, 0.4) == 0.0
    assert improvement_ratio(0.25, 1.0) == 1.0
    with pytest.raises(OracleError):
        improvement_ratio(1.0, 0.9)
    with pytest.raises(OracleError):
        improvement_ratio(0.5, 1.2)


def test_dense_matches_kron_and_iterative():
    g = build_geometry("chain", 8, "periodic")
    h = build_hamiltonian("tfim", g, lam=1.0)
    dense = exact_ground_state(h, mode="dense")
    evals = np.linalg.eigvalsh(dense_operator(h))
    assert dense.energy == pytest.approx(evals[0], abs=1e-10)
    assert dense.gap == pytest.approx(evals[1] - evals[0], abs=1e-8)
    iterative = exact_ground_state(h, mode="iterative")
    assert abs(iterative.energy - dense.energy) <= 1e-8
    assert 1.0 - overlap_fidelity(iterative.state, dense.state) <= 1e-8


def test_modes_agree_with_sector():
    g = build_geometry("chain", 6, "periodic")
    h = build_hamiltonian("ferro_ising", g)
    dense = exact_ground_state(h, sector="parity_plus", mode="dense")
    iterative = exact_ground_state(h, sector="parity_plus", mode="iterative")
    assert abs(dense.energy - iterative.energy) <= 1e-8
    assert overlap_fidelity(dense.state, ghz_state(6)) == pytest.approx(1.0, abs=1e-10)
    assert overlap_fidelity(iterative.state, ghz_state(6)) == pytest.approx(1.0, abs=1e-8)
    assert dense.degenerate and iterative.degenerate


def test_mode_limits():
    g = build_geometry("chain", 15, "open")
    h = build_hamiltonian("ferro_ising", g)
    with pytest.raises(OracleError):
        exact_ground_state(h, mode="dense")

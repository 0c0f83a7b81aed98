import numpy as np
import pytest

from hypomix import models
from hypomix.certifier import certify
from hypomix.errors import ModelError
from hypomix.lindblad import exact_spectrum, stationary_state
from conftest import zoo
from oracles import (
    complete_laplacian_gap,
    cycle_laplacian_gap,
    heisenberg_hamiltonian,
    site_op,
    spectral_gap_oracle,
    tfim_hamiltonian,
    Z,
)


@pytest.mark.parametrize("name", list(zoo()))
def test_recipe_invariants(name):
    m = zoo()[name]
    sigma = stationary_state(m)
    np.testing.assert_allclose(sigma, m.analytic["sigma"], atol=1e-9)
    comm = m.hamiltonian @ sigma - sigma @ m.hamiltonian
    assert np.abs(comm).max() <= 1e-10
    cert = certify(m)
    assert cert.passed
    if "lambda_m" in m.analytic:
        assert cert.lambda_m == pytest.approx(m.analytic["lambda_m"], rel=1e-8)
    if "lambda_M" in m.analytic:
        assert cert.lambda_M == pytest.approx(m.analytic["lambda_M"], rel=1e-8)
    if "cm_prime" in m.analytic:
        assert cert.cm_prime_numeric <= m.analytic["cm_prime"] * (1 + 1e-12)


def test_toy_kernel_is_diagonal():
    cert = certify(models.toy_qubit())
    frame = cert.artifacts["frame"]
    p = cert.artifacts["projector"].projector
    a = np.array([[1.0, 2.0 - 1j], [0.5j, -3.0]])
    pa = frame.from_coords(p @ frame.to_coords(a))
    np.testing.assert_allclose(pa, np.diag(np.diag(a)), atol=1e-12)
    assert cert.kernel_dim == 2


@pytest.mark.parametrize("omega", [0.5, 1.0, 2.0])
@pytest.mark.parametrize("gamma", [0.5, 1.0, 2.0])
def test_qutrit_constants_for_implemented_operators(omega, gamma):
    # hand derivation for V1 = sqrt(g)|0><1|, V2 = sqrt(g)|1><0|, H = w(|1><2| + |2><1|):
    # sigma = I/3, ker D = diagonals, lambda_m = gamma, lambda_M = 3 w^2
    m = models.qutrit(omega, gamma)
    cert = certify(m)
    np.testing.assert_allclose(cert.artifacts["sigma"], np.eye(3) / 3, atol=1e-12)
    assert cert.lambda_m == pytest.approx(gamma, rel=1e-8)
    assert cert.lambda_M == pytest.approx(3 * omega ** 2, rel=1e-8)


def test_qutrit_validation():
    with pytest.raises(ModelError):
        models.qutrit(0.0, 1.0)
    with pytest.raises(ModelError):
        models.qutrit(1.0, 0.0)


@pytest.mark.parametrize("n", [2, 3])
def test_tfim_matches_kron_oracle(n):
    m = models.tfim_dephasing(n, 0.7, 1.3)
    np.testing.assert_allclose(m.hamiltonian, tfim_hamiltonian(n, 0.7), atol=1e-14)
    jumps_sq = sum(v.conj().T @ v for v in m.jumps)
    np.testing.assert_allclose(jumps_sq, n * 1.3 / 2 * np.eye(2 ** n), atol=1e-14)
    np.testing.assert_allclose(m.jumps[0], np.sqrt(0.65) * site_op(n, 0, Z), atol=1e-14)


def test_tfim_bound_below_gap():
    m = models.tfim_dephasing(3, 1.0, 1.0)
    cert = certify(m)
    assert cert.lam <= spectral_gap_oracle(m.hamiltonian, m.jumps) + 1e-9
    assert cert.residuals["php_zero"] <= 1e-10


def test_heisenberg():
    m = models.heisenberg_dephasing(3, 1.0, 1.0, 1.0, 1.0, 1.0)
    np.testing.assert_allclose(m.hamiltonian, heisenberg_hamiltonian(3, 1, 1, 1, 1), atol=1e-14)
    cert = certify(m)
    assert cert.kernel_dim == 8
    assert cert.lambda_M >= 4 * (1 - 1e-9)
    assert cert.cm_prime_numeric <= m.analytic["cm_prime"]


def test_walk_gaps():
    c4 = models.quantum_walk_dephasing(models.cycle_graph(4), 1.0)
    k4 = models.quantum_walk_dephasing(models.complete_graph(4), 1.0)
    assert c4.params["delta"] == pytest.approx(cycle_laplacian_gap(4), abs=1e-12)
    assert k4.params["delta"] == pytest.approx(complete_laplacian_gap(4), abs=1e-12)
    c8 = models.quantum_walk_dephasing(models.cycle_graph(8), 0.5)
    cert = certify(c8)
    assert cert.lambda_M == pytest.approx(2 * cycle_laplacian_gap(8), rel=1e-8)


@pytest.mark.parametrize("adj", [
    [[0, 1, 0, 0], [1, 0, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]],  # two disjoint edges
    models.cycle_graph(3),  # 3 vertices
    [[0, 1, 1, 0], [1, 0, 0, 0], [1, 0, 0, 1], [0, 0, 1, 0]],  # path, not regular
    [[0, 2], [2, 0]],
    [[0, 1, 0, 0], [0, 0, 1, 0], [0, 1, 0, 1], [0, 0, 1, 0]],  # asymmetric
])
def test_walk_rejects_bad_graphs(adj):
    with pytest.raises(ModelError):
        models.quantum_walk_dephasing(adj, 1.0)


def test_disconnected_pair_of_cycles():
    two = np.zeros((8, 8), dtype=int)
    two[:4, :4] = models.cycle_graph(4)
    two[4:, 4:] = models.cycle_graph(4)
    with pytest.raises(ModelError, match="disconnected"):
        models.quantum_walk_dephasing(two, 1.0)


def test_chain_size_limits():
    with pytest.raises(ModelError):
        models.tfim_dephasing(1, 1.0, 1.0)
    with pytest.raises(ModelError):
        models.heisenberg_dephasing(7)


def test_recipe_registry():
    assert set(models.RECIPES) == {"toy", "qutrit", "tfim", "heisenberg", "walk"}
    m = models.build_recipe("tfim", n=2, h=0.5)
    assert m.params == {"n": 2, "h": 0.5, "gamma": 1.0}
    with pytest.raises(ModelError):
        models.build_recipe("nope")
    with pytest.raises(ModelError):
        models.build_recipe("toy", gamma=1.0)


def test_exact_gap_agrees_with_oracle_for_walk():
    m = models.quantum_walk_dephasing(models.cycle_graph(4), 0.3)
    assert exact_spectrum(m).gap == pytest.approx(spectral_gap_oracle(m.hamiltonian, m.jumps),
                                                  rel=1e-8)

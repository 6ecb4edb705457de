import numpy as np
import pytest

from probemetrics import (
    DensityMatrix,
    DimensionMismatch,
    NonHermitianInput,
    RandomSeed,
    bell_state,
    density,
    hermitian_eig,
    partial_trace,
    random_density,
    sqrtm_psd,
    swap_operator,
    tensor,
)
from probemetrics.linalg import PAULI_X, PAULI_Z, dag
from probemetrics.states import ginibre, random_local_density

SEED = RandomSeed(1001)


def test_tensor_identity_cases():
    eye2 = np.eye(2)
    assert np.array_equal(tensor(eye2, eye2), np.eye(4))
    assert np.allclose(tensor(PAULI_Z, eye2), np.diag([1, 1, -1, -1]))


def test_tensor_mixed_product_property():
    rng = SEED.child(0).rng()
    for _ in range(20):
        a, b, c, d = (rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2)) for _ in range(4))
        left = tensor(a, b) @ tensor(c, d)
        right = tensor(a @ c, b @ d)
        assert np.allclose(left, right, atol=1e-12)


def test_hermitian_eig_diagonal_and_pauli():
    w, _ = hermitian_eig(np.diag([3.0, 1.0, 2.0]).astype(complex))
    assert np.allclose(w, [1.0, 2.0, 3.0])
    w, _ = hermitian_eig(PAULI_X)
    assert np.allclose(w, [-1.0, 1.0])


def test_hermitian_eig_reconstructs():
    rng = SEED.child(1).rng()
    m = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    m = m + dag(m)
    w, v = hermitian_eig(m)
    assert np.max(np.abs((v * w) @ dag(v) - m)) < 1e-10
    assert np.max(np.abs(dag(v) @ v - np.eye(4))) < 1e-10


def test_hermitian_eig_rejects_nonhermitian():
    with pytest.raises(NonHermitianInput):
        hermitian_eig(np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex))


def test_sqrtm_diagonal():
    root = sqrtm_psd(np.diag([0.25, 0.75]).astype(complex))
    assert np.allclose(root, np.diag([0.5, np.sqrt(0.75)]))


def test_sqrtm_pure_state_is_fixed_point():
    rng = SEED.child(2).rng()
    psi = rng.standard_normal(4) + 1j * rng.standard_normal(4)
    psi /= np.linalg.norm(psi)
    proj = np.outer(psi, psi.conj())
    assert np.max(np.abs(sqrtm_psd(proj) - proj)) < 1e-12


def test_sqrtm_squaring_oracle():
    for k in range(20):
        rho = random_density(2, 2, 2, SEED.child(10 + k))
        root = sqrtm_psd(rho.matrix)
        assert np.max(np.abs(root @ root - rho.matrix)) < 1e-9


def test_sqrtm_rejects_negative():
    with pytest.raises(NonHermitianInput):
        sqrtm_psd(np.diag([1.0, -0.5]).astype(complex))


def test_partial_trace_bell_marginal():
    bell = bell_state()
    assert np.max(np.abs(bell.marginal_b() - np.eye(2) / 2)) < 1e-12
    assert np.max(np.abs(bell.marginal_a() - np.eye(2) / 2)) < 1e-12


def test_partial_trace_product_factorizes():
    rng = SEED.child(3).rng()
    ra = random_local_density(2, rng)
    rb = random_local_density(3, rng)
    rho = tensor(ra, rb)
    assert np.max(np.abs(partial_trace(rho, 2, 3, keep="A") - ra)) < 1e-12
    assert np.max(np.abs(partial_trace(rho, 2, 3, keep="B") - rb)) < 1e-12


def test_partial_trace_against_index_sum():
    rho = random_density(2, 2, 4, SEED.child(4))
    expect_a = np.zeros((2, 2), dtype=complex)
    for a in range(2):
        for c in range(2):
            for b in range(2):
                expect_a[a, c] += rho.matrix[a * 2 + b, c * 2 + b]
    assert np.max(np.abs(rho.marginal_a() - expect_a)) < 1e-14
    expect_b = np.zeros((2, 2), dtype=complex)
    for b in range(2):
        for d in range(2):
            for a in range(2):
                expect_b[b, d] += rho.matrix[a * 2 + b, a * 2 + d]
    assert np.max(np.abs(rho.marginal_b() - expect_b)) < 1e-14


def test_partial_trace_preserves_trace_and_checks_dims():
    rho = random_density(3, 2, 6, SEED.child(5))
    assert abs(np.trace(partial_trace(rho.matrix, 3, 2, keep="A")).real - 1.0) < 1e-12
    with pytest.raises(DimensionMismatch):
        partial_trace(rho.matrix, 2, 2, keep="A")


def test_swap_basis_action():
    s = swap_operator(2)
    ket01 = np.zeros(4)
    ket01[1] = 1.0
    ket10 = np.zeros(4)
    ket10[2] = 1.0
    assert np.array_equal((s @ ket01).real, ket10)


def test_swap_properties_on_random_operators():
    rng = SEED.child(6).rng()
    for n in (2, 3):
        s = swap_operator(n)
        assert np.max(np.abs(s @ s - np.eye(n * n))) < 1e-12
        for _ in range(10):
            th = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
            om = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
            assert abs(np.trace(tensor(th, om) @ s) - np.trace(th @ om)) < 1e-10
            assert np.max(np.abs(s @ tensor(th, om) @ s - tensor(om, th))) < 1e-10
            assert np.max(np.abs(tensor(th, om) @ s - s @ tensor(om, th))) < 1e-10


def test_density_matrix_validation():
    with pytest.raises(NonHermitianInput):
        density(np.array([[0.5, 0.5], [0.0, 0.5]]), 2, 1)
    with pytest.raises(DimensionMismatch):
        density(np.eye(4) / 2.0, 2, 2)  # trace 2
    with pytest.raises(NonHermitianInput):
        density(np.diag([1.2, -0.2, 0.0, 0.0]).astype(complex), 2, 2)
    with pytest.raises(DimensionMismatch):
        DensityMatrix(dim_a=2, dim_b=3, matrix=np.eye(4, dtype=complex) / 4)


def test_density_eigenvalues_sum_to_one():
    for k in range(10):
        rho = random_density(2, 3, 6, SEED.child(30 + k))
        assert abs(np.sum(np.linalg.eigvalsh(rho.matrix)) - 1.0) < 1e-10

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rdmaps.errors import DimensionMismatch, NegativeEigenvalue, NoConvergence, NotCommutingFamily, NotHermitian
from rdmaps.numerics import (
    canonical_subspace_basis,
    decode_matrix,
    degenerate_blocks,
    eig_hermitian,
    encode_matrix,
    jacobi_eigh,
    kraus_choi,
    make_rng,
    matrix_log2_on_support,
    partial_trace,
    random_density,
    random_hermitian,
    random_unitary,
    simultaneous_diagonalize,
    tensor,
    trace_norm,
    trace_norm_distance,
)


@pytest.mark.parametrize("d", [1, 2, 3, 5, 8])
def test_jacobi_matches_lapack(d):
    h = random_hermitian(d, make_rng(d))
    jac = jacobi_eigh(h)
    lap = eig_hermitian(h, method="lapack")
    np.testing.assert_allclose(jac.eigenvalues, lap.eigenvalues, atol=1e-12)
    recon = (jac.eigenvectors * jac.eigenvalues) @ jac.eigenvectors.conj().T
    np.testing.assert_allclose(recon, h, atol=1e-12)


def test_jacobi_phase_convention_agrees_with_lapack():
    h = random_hermitian(4, make_rng(3))
    a = eig_hermitian(h, "jacobi").eigenvectors
    b = eig_hermitian(h, "lapack").eigenvectors
    np.testing.assert_allclose(a, b, atol=1e-9)


def test_jacobi_reports_no_convergence():
    with pytest.raises(NoConvergence):
        jacobi_eigh(random_hermitian(6, make_rng(0)), max_sweeps=1)


def test_eig_rejects_non_hermitian():
    with pytest.raises(NotHermitian):
        eig_hermitian(np.array([[0, 1], [0, 0]]))


def test_eig_rejects_unknown_method():
    with pytest.raises(ValueError):
        eig_hermitian(np.eye(2), method="qr")


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 6), st.integers(0, 2**32 - 1))
def test_eigenvalues_sorted_nonincreasing(d, seed):
    w = eig_hermitian(random_hermitian(d, make_rng(seed))).eigenvalues
    assert np.all(np.diff(w) <= 1e-15)


def test_degenerate_blocks():
    assert degenerate_blocks([0.5, 0.5, 0.2, 0.1 + 1e-10, 0.1]) == [[0, 1], [2], [3, 4]]


def test_log_on_support_of_projector():
    log = matrix_log2_on_support(np.diag([0.5, 0.5, 0.0]))
    np.testing.assert_allclose(log.log, np.diag([-1.0, -1.0, 0.0]), atol=1e-14)
    np.testing.assert_allclose(log.support, np.diag([1.0, 1.0, 0.0]), atol=1e-14)


def test_log_rejects_negative_eigenvalue():
    with pytest.raises(NegativeEigenvalue):
        matrix_log2_on_support(np.diag([1.0, -0.1]))


def test_partial_trace_of_product():
    a, b = random_density(2, rng=make_rng(1)), random_density(3, rng=make_rng(2))
    ab = tensor(a, b)
    np.testing.assert_allclose(partial_trace(ab, (2, 3), keep="A"), a, atol=1e-14)
    np.testing.assert_allclose(partial_trace(ab, (2, 3), keep="B"), b, atol=1e-14)


def test_partial_trace_dimension_check():
    with pytest.raises(DimensionMismatch):
        partial_trace(np.eye(6), (2, 2))


def test_trace_distance_orthogonal_states_is_one():
    assert trace_norm_distance(np.diag([1, 0]), np.diag([0, 1])) == pytest.approx(1.0)
    assert trace_norm(np.diag([1.0, -2.0])) == pytest.approx(3.0)


@pytest.mark.parametrize("d", [2, 3, 4])
def test_random_unitary_is_unitary(d):
    u = random_unitary(d, make_rng(d))
    np.testing.assert_allclose(u.conj().T @ u, np.eye(d), atol=1e-12)


@pytest.mark.parametrize("rank", [1, 2, 3])
def test_random_density_properties(rank):
    rho = random_density(3, rank, make_rng(rank))
    assert np.trace(rho).real == pytest.approx(1.0)
    w = np.linalg.eigvalsh(rho)
    assert w.min() > -1e-12
    assert np.sum(w > 1e-10) == rank


def test_make_rng_streams_are_reproducible_and_distinct():
    a = make_rng(5, 1).standard_normal(3)
    np.testing.assert_array_equal(a, make_rng(5, 1).standard_normal(3))
    assert not np.allclose(a, make_rng(5, 2).standard_normal(3))


def test_simultaneous_diagonalize_with_degeneracy():
    u = random_unitary(4, make_rng(9))
    a = u @ np.diag([1, 1, 2, 2]) @ u.conj().T
    b = u @ np.diag([3, 4, 3, 4]) @ u.conj().T
    v = simultaneous_diagonalize([a, b], rng=make_rng(0))
    for m in (a, b):
        d = v.conj().T @ m @ v
        np.testing.assert_allclose(d, np.diag(np.diag(d)), atol=1e-10)


def test_simultaneous_diagonalize_rejects_noncommuting():
    with pytest.raises(NotCommutingFamily):
        simultaneous_diagonalize([np.diag([1, -1]), np.array([[0, 1], [1, 0]])])


def test_canonical_subspace_basis_depends_only_on_span():
    u = random_unitary(4, make_rng(4))
    span = u[:, :2]
    mixed = span @ random_unitary(2, make_rng(5))
    np.testing.assert_allclose(canonical_subspace_basis(span), canonical_subspace_basis(mixed), atol=1e-10)


def test_canonical_basis_of_computational_subspace():
    v = np.eye(3)[:, [2, 0]]
    np.testing.assert_allclose(canonical_subspace_basis(v), np.eye(3)[:, [0, 2]], atol=1e-14)


def test_choi_of_identity_is_maximally_entangled():
    choi = kraus_choi([np.eye(2)])
    phi = np.array([1, 0, 0, 1])
    np.testing.assert_allclose(choi, np.outer(phi, phi), atol=1e-14)


def test_matrix_encoding_round_trip():
    m = random_hermitian(3, make_rng(0))
    np.testing.assert_array_equal(decode_matrix(encode_matrix(m)), m)


def test_decode_rejects_bad_shape():
    with pytest.raises(ValueError):
        decode_matrix([[1, 2], [3, 4]])

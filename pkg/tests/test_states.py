import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rdmaps.errors import BadWeights, DimensionMismatch, NotHermitian, NotPSD, TraceNotOne
from rdmaps.numerics import make_rng, partial_trace, random_density, random_unitary
from rdmaps.states import (
    OrthonormalBasis,
    bell_state,
    correlation_operators,
    dephase_in_basis,
    hermitian_operator_basis,
    is_cq,
    is_incoherent,
    ket_density,
    make_cq,
    make_density,
    marginal_eigenbasis,
    random_cq,
    reduced,
    state_from_json,
    state_to_json,
)


def test_make_density_accepts_valid_state():
    rho = make_density(np.eye(4) / 4, dims=(2, 2))
    assert rho.dim == 4
    assert rho.dims == (2, 2)
    assert not rho.matrix.flags.writeable


@pytest.mark.parametrize(
    "m, err",
    [
        (np.array([[0.5, 0.1], [0.0, 0.5]]), NotHermitian),
        (np.diag([1.5, -0.5]), NotPSD),
        (np.diag([0.5, 0.4]), TraceNotOne),
        (np.ones((2, 3)) / 2, DimensionMismatch),
    ],
)
def test_make_density_rejects(m, err):
    with pytest.raises(err):
        make_density(m)


def test_make_density_rejects_bad_dims():
    with pytest.raises(DimensionMismatch):
        make_density(np.eye(6) / 6, dims=(2, 2))


def test_make_cq_rejects_bad_weights():
    with pytest.raises(BadWeights):
        make_cq([0.7, 0.7], OrthonormalBasis.computational(2), [np.eye(2) / 2] * 2)


def test_orthonormal_basis_rejects_nonorthogonal():
    with pytest.raises(ValueError):
        OrthonormalBasis(np.array([[1, 1], [0, 1]]))


def test_hermitian_operator_basis_is_orthogonal_and_complete():
    d = 3
    basis = hermitian_operator_basis(d)
    assert len(basis) == d * d
    gram = np.array([[np.trace(a @ b).real for b in basis] for a in basis])
    assert np.linalg.matrix_rank(gram) == d * d
    np.testing.assert_allclose(gram, np.diag(np.diag(gram)), atol=1e-12)


def test_correlation_operators_of_product_state_commute():
    rho = np.kron(random_density(2, rng=make_rng(0)), random_density(2, rng=make_rng(1)))
    fs = correlation_operators(rho, (2, 2))
    for a in fs:
        for b in fs:
            np.testing.assert_allclose(a @ b, b @ a, atol=1e-12)


@pytest.mark.parametrize("dims", [(2, 2), (2, 3), (3, 2), (3, 3)])
def test_random_cq_is_cq(dims):
    rho = random_cq(dims, make_rng(sum(dims)))
    res = is_cq(rho)
    assert res
    assert res.violation <= 1e-8
    np.testing.assert_allclose(dephase_in_basis(rho, res.basis, dims), rho.matrix, atol=1e-9)


def test_bell_state_is_not_cq():
    res = is_cq(bell_state())
    assert not res
    assert res.violation > 0.1


def test_cq_with_degenerate_marginal_is_recognized():
    # Equal weights make rho_A = I/2; the rotated basis is then only visible through B.
    u = random_unitary(2, make_rng(3))
    rho = make_cq([0.5, 0.5], OrthonormalBasis(u), [np.diag([1, 0]), np.diag([0.2, 0.8])])
    assert is_cq(rho)


def test_is_cq_needs_dims():
    with pytest.raises(DimensionMismatch):
        is_cq(np.eye(4) / 4)


def test_marginal_eigenbasis_nondegenerate():
    rho = random_density(4, rng=make_rng(2))
    basis, degenerate = marginal_eigenbasis(rho, (2, 2))
    assert not degenerate
    ra = partial_trace(rho, (2, 2), keep="A")
    d = basis.conj().T @ ra @ basis
    np.testing.assert_allclose(d, np.diag(np.diag(d)), atol=1e-12)


def test_marginal_eigenbasis_degenerate_block_refined_by_correlations():
    u = random_unitary(2, make_rng(8))
    rho = make_cq([0.5, 0.5], OrthonormalBasis(u), [np.diag([1, 0]), np.diag([0, 1])])
    basis, degenerate = marginal_eigenbasis(rho, (2, 2))
    assert degenerate
    np.testing.assert_allclose(dephase_in_basis(rho, basis, (2, 2)), rho.matrix, atol=1e-10)


def test_marginal_eigenbasis_fully_degenerate_uses_computational_basis():
    basis, degenerate = marginal_eigenbasis(np.eye(4) / 4, (2, 2))
    assert degenerate
    np.testing.assert_allclose(basis, np.eye(2), atol=1e-12)


def test_is_incoherent():
    assert is_incoherent(np.diag([0.3, 0.7]))
    assert not is_incoherent(ket_density([1, 1]))


def test_reduced_of_bell_is_maximally_mixed():
    np.testing.assert_allclose(reduced(bell_state(), "A").matrix, np.eye(2) / 2, atol=1e-14)


def test_state_json_round_trip():
    rho = make_density(random_density(4, rng=make_rng(0)), (2, 2))
    back = state_from_json(state_to_json(rho))
    np.testing.assert_allclose(back.matrix, rho.matrix, atol=1e-15)
    assert back.dims == (2, 2)


def test_state_json_rejects_inconsistent_dim():
    obj = state_to_json(bell_state())
    obj["dim"] = 3
    with pytest.raises(DimensionMismatch):
        state_from_json(obj)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_dephasing_in_any_basis_gives_cq(seed):
    rng = make_rng(seed)
    rho = random_density(4, rng=rng)
    out = dephase_in_basis(rho, random_unitary(2, rng), (2, 2))
    assert is_cq(out, dims=(2, 2))

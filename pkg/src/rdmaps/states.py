"""Density matrices, bipartite structure and the two free-state families.

The free families are incoherent states (diagonal in the computational basis)
and classical-quantum (CQ) states ``sum_i p_i |u_i><u_i| (x) rho_B^i``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .config import DEGENERACY_GAP, VALIDATION_TOL
from .errors import BadWeights, DimensionMismatch, NotCommutingFamily, NotHermitian, NotPSD, TraceNotOne
from .numerics import (
    as_matrix,
    canonical_subspace_basis,
    commutator,
    dagger,
    decode_matrix,
    degenerate_blocks,
    eig_hermitian,
    encode_matrix,
    hermiticity_residual,
    make_rng,
    partial_trace,
    random_density,
    random_probabilities,
    random_unitary,
    simultaneous_diagonalize,
    trace_norm_distance,
)

Dims = Optional[tuple]


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """A validated state, optionally carrying a bipartite factorization ``(d_A, d_B)``.

    Build through :func:`make_density`; the stored array is read-only.
    """

    matrix: np.ndarray
    dims: Dims = None

    def __array__(self, dtype=None, copy=None):
        return self.matrix if dtype is None else self.matrix.astype(dtype)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def with_matrix(self, m) -> "DensityMatrix":
        return make_density(m, self.dims)


@dataclass(frozen=True)
class OrthonormalBasis:
    """Columns of ``vectors`` are the basis kets."""

    vectors: np.ndarray = field(repr=False)

    def __post_init__(self):
        v = as_matrix(self.vectors)
        if v.shape[0] != v.shape[1]:
            raise DimensionMismatch(f"basis must be square, got {v.shape}")
        if np.max(np.abs(dagger(v) @ v - np.eye(v.shape[0]))) > 1e-10:
            raise ValueError("basis vectors are not orthonormal")
        object.__setattr__(self, "vectors", v)

    @classmethod
    def computational(cls, d: int) -> "OrthonormalBasis":
        return cls(np.eye(d, dtype=complex))

    @property
    def dim(self) -> int:
        return self.vectors.shape[0]

    def ket(self, i: int) -> np.ndarray:
        return self.vectors[:, i]

    def projector(self, i: int) -> np.ndarray:
        k = self.vectors[:, i]
        return np.outer(k, np.conj(k))


def _check_dims(dims, n: int) -> Dims:
    if dims is None:
        return None
    if len(dims) != 2:
        raise DimensionMismatch(f"dims must be a pair (d_A, d_B), got {dims}")
    da, db = int(dims[0]), int(dims[1])
    if da < 1 or db < 1 or da * db != n:
        raise DimensionMismatch(f"dims {dims} do not factor dimension {n}")
    return (da, db)


def make_density(m, dims=None, tol: float = VALIDATION_TOL) -> DensityMatrix:
    """Validate ``m`` as a density matrix.

    Raises:
        NotHermitian, NotPSD, TraceNotOne, DimensionMismatch
    """
    if isinstance(m, DensityMatrix):
        dims = m.dims if dims is None else dims
        m = m.matrix
    a = as_matrix(m)
    if a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"state must be square, got {a.shape}")
    dims = _check_dims(dims, a.shape[0])
    if hermiticity_residual(a) > tol:
        raise NotHermitian(f"state is not Hermitian (residual {hermiticity_residual(a):.3e})")
    a = 0.5 * (a + dagger(a))
    wmin = float(np.linalg.eigvalsh(a)[0])
    if wmin < -tol:
        raise NotPSD(f"state has negative eigenvalue {wmin:.3e}")
    tr = float(np.trace(a).real)
    if abs(tr - 1.0) > tol:
        raise TraceNotOne(f"state has trace {tr:.12g}")
    a = a.copy()
    a.setflags(write=False)
    return DensityMatrix(a, dims)


def ket_density(ket, dims=None) -> DensityMatrix:
    k = np.asarray(ket, dtype=complex).reshape(-1)
    k = k / np.linalg.norm(k)
    return make_density(np.outer(k, np.conj(k)), dims)


def _matrix_and_dims(rho, dims=None):
    if isinstance(rho, DensityMatrix):
        return rho.matrix, rho.dims if dims is None else dims
    return as_matrix(rho), dims


def make_cq(weights: Sequence[float], basis: OrthonormalBasis, conditionals: Sequence) -> DensityMatrix:
    """``sum_i p_i |u_i><u_i| (x) rho_B^i``; zero weights are allowed."""
    p = np.asarray(weights, dtype=float)
    if p.ndim != 1 or np.any(p < 0) or abs(p.sum() - 1.0) > 1e-12:
        raise BadWeights(f"weights must be a probability vector, got {weights}")
    if not isinstance(basis, OrthonormalBasis):
        basis = OrthonormalBasis(basis)
    if len(p) != basis.dim or len(conditionals) != basis.dim:
        raise DimensionMismatch(
            f"need {basis.dim} weights and conditionals, got {len(p)} and {len(conditionals)}"
        )
    conds = [make_density(c).matrix for c in conditionals]
    db = conds[0].shape[0]
    if any(c.shape[0] != db for c in conds):
        raise DimensionMismatch("conditional states have different dimensions")
    out = sum(pi * np.kron(basis.projector(i), c) for i, (pi, c) in enumerate(zip(p, conds)))
    return make_density(out, (basis.dim, db))


def random_cq(dims, rng=None) -> DensityMatrix:
    """CQ state in a Haar-random basis of A with random weights and full-rank conditionals."""
    rng = make_rng(rng)
    da, db = dims
    basis = OrthonormalBasis(random_unitary(da, rng))
    p = random_probabilities(da, rng)
    conds = [random_density(db, db, rng) for _ in range(da)]
    return make_cq(p, basis, conds)


def is_incoherent(rho, tol: float = VALIDATION_TOL) -> bool:
    """True iff every off-diagonal entry is at most ``tol`` in modulus."""
    m, _ = _matrix_and_dims(rho)
    off = m - np.diag(np.diag(m))
    return bool(np.max(np.abs(off), initial=0.0) <= tol)


def hermitian_operator_basis(d: int) -> list[np.ndarray]:
    """The ``d**2`` Hermitian matrices ``E_kk``, ``E_kl + E_lk``, ``i(E_kl - E_lk)``."""
    ops = []
    for k in range(d):
        e = np.zeros((d, d), dtype=complex)
        e[k, k] = 1
        ops.append(e)
    for k in range(d):
        for l in range(k + 1, d):
            e = np.zeros((d, d), dtype=complex)
            e[k, l] = e[l, k] = 1
            ops.append(e)
            f = np.zeros((d, d), dtype=complex)
            f[k, l], f[l, k] = 1j, -1j
            ops.append(f)
    return ops


def correlation_operators(rho, dims=None) -> list[np.ndarray]:
    """``F_m = tr_B[(I (x) G_m) rho]`` over the Hermitian operator basis ``G_m`` of B.

    A state is CQ exactly when these operators commute; their common
    eigenbasis is then a basis in which dephasing A leaves the state fixed.
    """
    m, dims = _matrix_and_dims(rho, dims)
    if dims is None:
        raise DimensionMismatch("bipartite dims are required")
    da, db = dims
    t = m.reshape(da, db, da, db)
    out = []
    for g in hermitian_operator_basis(db):
        f = np.einsum("ijkl,lj->ik", t, g)
        out.append(0.5 * (f + dagger(f)))
    return out


def dephase_in_basis(rho, basis: np.ndarray, dims) -> np.ndarray:
    """``sum_i (|u_i><u_i| (x) I) rho (|u_i><u_i| (x) I)`` for the columns ``u_i`` of ``basis``."""
    m, dims = _matrix_and_dims(rho, dims)
    da, db = dims
    # Rotate A into the basis, zero off-diagonal A blocks, rotate back.
    u = np.kron(np.asarray(basis, dtype=complex), np.eye(db))
    r = (dagger(u) @ m @ u).reshape(da, db, da, db)
    mask = np.eye(da)[:, None, :, None]
    return u @ (r * mask).reshape(da * db, da * db) @ dagger(u)


def marginal_eigenbasis(rho, dims, tol: float = 1e-8, gap: float = DEGENERACY_GAP):
    """Eigenbasis of ``rho_A`` used by the discord destroyer, plus a degeneracy flag.

    Eigenvectors come in order of nonincreasing eigenvalue. Inside a
    degenerate eigenspace the basis is refined by simultaneously diagonalizing
    the correlation operators restricted to it; whatever freedom remains is
    fixed with :func:`canonical_subspace_basis`.

    Returns:
        ``(basis, degenerate)`` with ``basis`` a unitary matrix.
    """
    m, dims = _matrix_and_dims(rho, dims)
    rho_a = partial_trace(m, dims, keep="A")
    w, v = eig_hermitian(0.5 * (rho_a + dagger(rho_a)))
    blocks = degenerate_blocks(w, gap)
    if all(len(b) == 1 for b in blocks):
        return v, False
    fs = None
    out = np.zeros_like(v)
    for block in blocks:
        vb = v[:, block]
        if len(block) > 1:
            if fs is None:
                fs = correlation_operators(m, dims)
            vb = _refine_block(vb, fs, tol)
        out[:, block] = vb
    return out, True


def _refine_block(vb, fs, tol):
    restricted = [dagger(vb) @ f @ vb for f in fs]
    try:
        # Fixed stream: the refinement must not depend on caller randomness.
        w = simultaneous_diagonalize(restricted, tol=tol, rng=0)
    except NotCommutingFamily:
        return canonical_subspace_basis(vb)
    # Group columns by joint eigenvalue and canonicalize each joint eigenspace.
    joint = np.array([[np.real(np.vdot(w[:, k], r @ w[:, k])) for r in restricted] for k in range(w.shape[1])])
    groups: list[list[int]] = []
    for k in range(len(joint)):
        for g in groups:
            if np.max(np.abs(joint[g[0]] - joint[k])) <= max(tol, 1e-9) * 10:
                g.append(k)
                break
        else:
            groups.append([k])
    cols = []
    for g in sorted(groups, key=lambda g: tuple(-joint[g[0]])):
        sub = vb @ w[:, g]
        cols.append(canonical_subspace_basis(sub) if len(g) > 1 else sub)
    return np.column_stack(cols)


@dataclass(frozen=True)
class CQResult:
    """Outcome of :func:`is_cq`.

    ``basis`` is a witness basis of A when the state is CQ; ``violation`` is
    the largest correlation-operator commutator when they fail to commute,
    otherwise the trace distance between the state and its dephasing in
    ``basis``.
    """

    is_cq: bool
    violation: float
    basis: Optional[np.ndarray] = field(default=None, repr=False)

    def __bool__(self):
        return self.is_cq


def is_cq(rho, tol: float = 1e-8, dims=None, rng=None) -> CQResult:
    """Decide whether a bipartite state is classical-quantum on A."""
    m, dims = _matrix_and_dims(rho, dims)
    if dims is None:
        raise DimensionMismatch("is_cq needs bipartite dims")
    dims = _check_dims(dims, m.shape[0])
    fs = correlation_operators(m, dims)
    worst = 0.0
    for i in range(len(fs)):
        for j in range(i + 1, len(fs)):
            worst = max(worst, float(np.max(np.abs(commutator(fs[i], fs[j])))))
    if worst > tol:
        return CQResult(False, worst)
    try:
        basis = simultaneous_diagonalize(fs, tol=max(tol, 1e-12), rng=make_rng(rng))
    except NotCommutingFamily:  # pragma: no cover - guarded by the loop above
        return CQResult(False, worst)
    dist = trace_norm_distance(dephase_in_basis(m, basis, dims), m)
    return CQResult(dist <= tol, dist, basis if dist <= tol else None)


def reduced(rho: DensityMatrix, which: str = "A") -> DensityMatrix:
    """Marginal state on subsystem ``which``."""
    m, dims = _matrix_and_dims(rho)
    if dims is None:
        raise DimensionMismatch("reduced() needs bipartite dims")
    return make_density(partial_trace(m, dims, keep=which))


def bell_state() -> DensityMatrix:
    """``|Phi+> = (|00> + |11>)/sqrt 2`` on two qubits."""
    return ket_density([1, 0, 0, 1], dims=(2, 2))


def state_to_json(rho: DensityMatrix) -> dict:
    out = {"dim": rho.dim, "matrix": encode_matrix(rho.matrix)}
    if rho.dims is not None:
        out["dims"] = list(rho.dims)
    return out


def state_from_json(obj: dict) -> DensityMatrix:
    """Parse the JSON state format; raises ``ValueError`` subclasses on bad input."""
    if not isinstance(obj, dict) or "matrix" not in obj:
        raise ValueError("state JSON must be an object with a 'matrix' field")
    m = decode_matrix(obj["matrix"])
    if "dim" in obj and int(obj["dim"]) != m.shape[0]:
        raise DimensionMismatch(f"'dim' is {obj['dim']} but matrix is {m.shape[0]}x{m.shape[1]}")
    dims = obj.get("dims")
    return make_density(m, tuple(dims) if dims is not None else None)

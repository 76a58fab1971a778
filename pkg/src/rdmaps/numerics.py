"""Dense complex linear algebra and seeded randomness for small Hilbert spaces.

Matrices are plain ``numpy`` arrays of dtype ``complex128``. Everything here is
a pure function of its inputs.
"""

from __future__ import annotations

from typing import NamedTuple, Sequence

import numpy as np

from .config import DEGENERACY_GAP, LOG_CUTOFF
from .errors import (
    DimensionMismatch,
    NegativeEigenvalue,
    NoConvergence,
    NotCommutingFamily,
    NotHermitian,
)

HERMITIAN_TOL = 1e-9
MAX_SWEEPS = 100
OFFDIAG_THRESHOLD = 1e-12


class HermitianEigensystem(NamedTuple):
    """Eigenvalues in nonincreasing order and matching orthonormal columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


class LogOnSupport(NamedTuple):
    log: np.ndarray
    support: np.ndarray


def as_matrix(m) -> np.ndarray:
    """Coerce ``m`` (array-like or anything with ``__array__``) to a complex 2-d array."""
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2:
        raise DimensionMismatch(f"expected a matrix, got an array of shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    return a


def dagger(m: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(m, -1, -2))


def hermiticity_residual(m: np.ndarray) -> float:
    return float(np.max(np.abs(m - dagger(m)), initial=0.0))


def _check_hermitian(m: np.ndarray, tol: float = HERMITIAN_TOL) -> np.ndarray:
    m = as_matrix(m)
    if m.shape[0] != m.shape[1]:
        raise DimensionMismatch(f"matrix must be square, got {m.shape}")
    res = hermiticity_residual(m)
    if res > tol:
        raise NotHermitian(f"Hermiticity residual {res:.3e} exceeds {tol:.1e}")
    return 0.5 * (m + dagger(m))


def _fix_phases(vecs: np.ndarray) -> np.ndarray:
    # Make the first entry of largest modulus real and positive in every column.
    out = vecs.copy()
    for k in range(out.shape[1]):
        col = out[:, k]
        mags = np.abs(col)
        j = int(np.argmax(mags >= mags.max() - 1e-12))
        if mags[j] > 0:
            out[:, k] = col * (np.conj(col[j]) / mags[j])
    return out


def jacobi_eigh(m, max_sweeps: int = MAX_SWEEPS, threshold: float = OFFDIAG_THRESHOLD):
    """Cyclic Jacobi eigendecomposition of a Hermitian matrix.

    Pairs ``(p, q)`` are visited in row-major order on every sweep. Each
    rotation first removes the phase of ``a[p, q]`` and then applies the real
    symmetric Jacobi rotation that annihilates it. Iteration stops once the
    off-diagonal Frobenius norm drops below ``threshold`` times the norm of the
    input (or absolute ``threshold`` for tiny inputs).

    Returns:
        HermitianEigensystem with eigenvalues sorted nonincreasing.

    Raises:
        NotHermitian: input fails the symmetry check.
        NoConvergence: ``max_sweeps`` sweeps were not enough.
    """
    a = _check_hermitian(m).copy()
    n = a.shape[0]
    v = np.eye(n, dtype=complex)
    scale = max(np.linalg.norm(a), 1.0)
    stop = threshold * scale

    def off_norm(x):
        return np.linalg.norm(x - np.diag(np.diag(x)))

    sweeps = 0
    while off_norm(a) > stop:
        if sweeps == max_sweeps:
            raise NoConvergence(f"Jacobi did not converge in {max_sweeps} sweeps")
        sweeps += 1
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                r = abs(apq)
                if r < 1e-300:
                    continue
                phase = apq / r
                app, aqq = a[p, p].real, a[q, q].real
                tau = (aqq - app) / (2.0 * r)
                t = (1.0 if tau >= 0 else -1.0) / (abs(tau) + np.sqrt(1.0 + tau * tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                # g = diag(1, conj(phase)) @ [[c, s], [-s, c]]
                g = np.array([[c, s], [-s * np.conj(phase), c * np.conj(phase)]])
                idx = [p, q]
                a[:, idx] = a[:, idx] @ g
                a[idx, :] = dagger(g) @ a[idx, :]
                a[p, q] = a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
                v[:, idx] = v[:, idx] @ g
    w = np.real(np.diag(a))
    order = np.argsort(-w, kind="stable")
    return HermitianEigensystem(w[order], _fix_phases(v[:, order]))


def eig_hermitian(m, method: str = "lapack") -> HermitianEigensystem:
    """Eigendecomposition of a Hermitian matrix, eigenvalues nonincreasing.

    ``method="jacobi"`` runs :func:`jacobi_eigh`; ``"lapack"`` uses
    ``numpy.linalg.eigh``. Both return the same ordering and the same phase
    convention on eigenvectors (first largest-modulus entry real positive), so
    the output is deterministic for identical input.
    """
    if method == "jacobi":
        return jacobi_eigh(m)
    if method != "lapack":
        raise ValueError(f"unknown eigensolver {method!r}")
    h = _check_hermitian(m)
    w, v = np.linalg.eigh(h)
    order = np.argsort(-w, kind="stable")
    return HermitianEigensystem(w[order], _fix_phases(v[:, order]))


def eigvals_hermitian(m) -> np.ndarray:
    """Eigenvalues only, nonincreasing."""
    h = _check_hermitian(m)
    return np.linalg.eigvalsh(h)[::-1]


def degenerate_blocks(eigenvalues: Sequence[float], gap: float = DEGENERACY_GAP) -> list[list[int]]:
    """Group indices of a sorted spectrum into runs whose neighbours are within ``gap``."""
    blocks: list[list[int]] = []
    for k, w in enumerate(eigenvalues):
        if blocks and abs(eigenvalues[blocks[-1][-1]] - w) < gap:
            blocks[-1].append(k)
        else:
            blocks.append([k])
    return blocks


def matrix_log2_on_support(m, cutoff: float = LOG_CUTOFF) -> LogOnSupport:
    """Base-2 logarithm of a PSD matrix restricted to its support.

    Eigenvalues at or below ``cutoff`` contribute zero to the log and are
    excluded from the returned support projector.
    """
    w, u = eig_hermitian(m)
    if w.size and w[-1] < -HERMITIAN_TOL:
        raise NegativeEigenvalue(f"eigenvalue {w[-1]:.3e} is negative")
    keep = w > cutoff
    logs = np.zeros_like(w)
    logs[keep] = np.log2(w[keep])
    uk = u[:, keep]
    return LogOnSupport((u * logs) @ dagger(u), uk @ dagger(uk))


def tensor(*ops) -> np.ndarray:
    """Kronecker product of any number of matrices, left to right."""
    out = np.ones((1, 1), dtype=complex)
    for op in ops:
        out = np.kron(out, as_matrix(op))
    return out


def partial_trace(m, dims: tuple[int, int], keep: str = "A") -> np.ndarray:
    """Trace out one factor of a bipartite operator.

    Args:
        m: square matrix on a space of dimension ``d_A * d_B``.
        dims: ``(d_A, d_B)``.
        keep: ``"A"`` returns ``tr_B m``, ``"B"`` returns ``tr_A m``.
    """
    m = as_matrix(m)
    da, db = int(dims[0]), int(dims[1])
    if m.shape != (da * db, da * db):
        raise DimensionMismatch(f"matrix of shape {m.shape} does not factor as {da}x{db}")
    t = m.reshape(da, db, da, db)
    if keep == "A":
        return np.einsum("ijkj->ik", t)
    if keep == "B":
        return np.einsum("ijil->jl", t)
    raise ValueError(f"keep must be 'A' or 'B', got {keep!r}")


def trace_norm(m) -> float:
    """Schatten-1 norm (sum of singular values)."""
    m = as_matrix(m)
    if hermiticity_residual(m) <= HERMITIAN_TOL:
        return float(np.sum(np.abs(eigvals_hermitian(m))))
    return float(np.sum(np.linalg.svd(m, compute_uv=False)))


def trace_norm_distance(a, b) -> float:
    """Half the trace norm of ``a - b`` for Hermitian ``a`` and ``b``."""
    a, b = as_matrix(a), as_matrix(b)
    if a.shape != b.shape:
        raise DimensionMismatch(f"shapes differ: {a.shape} vs {b.shape}")
    diff = _check_hermitian(a) - _check_hermitian(b)
    return 0.5 * float(np.sum(np.abs(np.linalg.eigvalsh(diff))))


def commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b - b @ a


def make_rng(seed=None, *stream: int) -> np.random.Generator:
    """A generator for the named sub-stream ``stream`` of ``seed``.

    Passing a ``Generator`` returns it unchanged. Distinct ``stream`` tuples
    give independent, reproducible streams from one 64-bit seed.
    """
    if isinstance(seed, np.random.Generator):
        return seed
    if seed is None:
        seed = 0
    return np.random.default_rng([int(seed), *map(int, stream)])


def _ginibre(rows: int, cols: int, rng: np.random.Generator) -> np.ndarray:
    return (rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))) / np.sqrt(2)


def random_unitary(d: int, rng=None) -> np.ndarray:
    """Haar-random unitary: QR of a Ginibre matrix with the R-diagonal phases removed."""
    if d < 1:
        raise ValueError("dimension must be at least 1")
    rng = make_rng(rng)
    q, r = np.linalg.qr(_ginibre(d, d, rng))
    diag = np.diag(r)
    return q * (diag / np.abs(diag))


def random_density(d: int, rank: int | None = None, rng=None) -> np.ndarray:
    """Random density matrix ``G G^dag / tr`` with ``G`` a ``d x rank`` Ginibre matrix."""
    rank = d if rank is None else rank
    if not 1 <= rank <= d:
        raise ValueError(f"rank must lie in [1, {d}], got {rank}")
    rng = make_rng(rng)
    g = _ginibre(d, rank, rng)
    rho = g @ dagger(g)
    rho = 0.5 * (rho + dagger(rho))
    return rho / np.trace(rho).real


def random_hermitian(d: int, rng=None) -> np.ndarray:
    rng = make_rng(rng)
    g = _ginibre(d, d, rng)
    return 0.5 * (g + dagger(g))


def random_probabilities(n: int, rng=None) -> np.ndarray:
    rng = make_rng(rng)
    return rng.dirichlet(np.ones(n))


def simultaneous_diagonalize(family: Sequence, tol: float = 1e-9, rng=None) -> np.ndarray:
    """Common eigenbasis of a commuting family of Hermitian matrices.

    A random real combination of the family is diagonalized; any degenerate
    block it leaves is handled recursively with the family restricted to that
    block. Returns a unitary whose columns diagonalize every member.

    Raises:
        NotCommutingFamily: some pairwise commutator exceeds ``tol`` in max-entry norm.
    """
    mats = [_check_hermitian(f) for f in family]
    if not mats:
        raise ValueError("empty family")
    n = mats[0].shape[0]
    for f in mats:
        if f.shape != (n, n):
            raise DimensionMismatch("family members have different shapes")
    worst = 0.0
    for i in range(len(mats)):
        for j in range(i + 1, len(mats)):
            worst = max(worst, float(np.max(np.abs(commutator(mats[i], mats[j])))))
    if worst > tol:
        raise NotCommutingFamily(f"commutator norm {worst:.3e} exceeds {tol:.1e}")
    rng = make_rng(rng)
    return _simdiag(mats, rng, tol, depth=0)


def _simdiag(mats, rng, tol, depth):
    n = mats[0].shape[0]
    if n == 1:
        return np.eye(1, dtype=complex)
    # Members proportional to the identity carry no information about the basis.
    active = [f for f in mats if np.max(np.abs(f - np.trace(f) / n * np.eye(n))) > tol]
    if not active or depth > n:
        return np.eye(n, dtype=complex)
    coeffs = rng.standard_normal(len(active))
    combo = sum(c * f for c, f in zip(coeffs, active))
    w, u = eig_hermitian(combo)
    scale = max(1.0, float(np.max(np.abs(w))))
    out = np.zeros((n, n), dtype=complex)
    for block in degenerate_blocks(w, gap=max(DEGENERACY_GAP, 10 * tol) * scale):
        ub = u[:, block]
        if len(block) > 1:
            sub = [dagger(ub) @ f @ ub for f in active]
            ub = ub @ _simdiag(sub, rng, tol, depth + 1)
        out[:, block] = ub
    return out


def canonical_subspace_basis(vectors: np.ndarray, tol: float = 1e-6) -> np.ndarray:
    """Orthonormal basis of ``span(vectors)`` built from projected computational kets.

    Computational kets are taken in order of decreasing overlap with the
    subspace (ties by index), projected and Gram-Schmidt orthonormalized. The
    result depends only on the subspace, not on the spanning vectors given,
    which makes basis choices inside degenerate eigenspaces reproducible.
    """
    vectors = np.asarray(vectors, dtype=complex)
    n, k = vectors.shape
    q, _ = np.linalg.qr(vectors)
    proj = q @ dagger(q)
    chosen: list[tuple[int, np.ndarray]] = []
    for i in sorted(range(n), key=lambda i: -round(proj[i, i].real, 9)):
        if len(chosen) == k:
            break
        v = proj[:, i].copy()
        for _, c in chosen:
            v -= c * np.vdot(c, v)
        nv = np.linalg.norm(v)
        if nv > tol:
            chosen.append((i, v / nv))
    if len(chosen) < k:
        raise NoConvergence("could not complete a canonical basis")
    chosen.sort(key=lambda t: t[0])
    return _fix_phases(np.column_stack([c for _, c in chosen]))


def kraus_choi(kraus: Sequence[np.ndarray]) -> np.ndarray:
    """Choi matrix ``sum_ij |i><j| (x) E(|i><j|)`` (input factor first)."""
    kraus = [as_matrix(k) for k in kraus]
    dout, din = kraus[0].shape
    choi = np.zeros((din * dout, din * dout), dtype=complex)
    for k in kraus:
        # vec(K) with input index slow: column |i> (x) K|i>
        v = k.T.reshape(-1)
        choi += np.outer(v, np.conj(v))
    return choi


def encode_matrix(m) -> list:
    """Nested row-major list of ``[re, im]`` pairs."""
    m = as_matrix(m)
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


def decode_matrix(rows) -> np.ndarray:
    try:
        arr = np.array(rows, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ValueError(f"matrix entries must be [re, im] pairs: {exc}") from None
    if arr.ndim != 3 or arr.shape[2] != 2:
        raise ValueError(f"matrix must be nested rows of [re, im] pairs, got shape {arr.shape}")
    return as_matrix(arr[..., 0] + 1j * arr[..., 1])

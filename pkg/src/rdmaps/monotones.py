"""Distances, the destroyer monotone ``D(rho, lambda(rho))`` and its test harnesses.

Relative entropies are in bits. A support leak makes the relative entropy
``math.inf``, which orders above every finite value.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .config import CheckConfig, LOG_CUTOFF, MONOTONE_NOISE
from .conditions import check_commuting, check_selective
from .destroyers import Destroyer, discord_apply
from .errors import DimensionMismatch, NumericalInconsistency
from .numerics import (
    as_matrix,
    dagger,
    degenerate_blocks,
    eigvals_hermitian,
    make_rng,
    matrix_log2_on_support,
    partial_trace,
    random_density,
    random_unitary,
    trace_norm_distance,
)
from .states import _matrix_and_dims, dephase_in_basis, marginal_eigenbasis

SUPPORT_LEAK = 1e-9
PINCHING_TOL = 1e-9


def von_neumann_entropy(rho) -> float:
    """``-tr rho log2 rho``."""
    w = eigvals_hermitian(_matrix_and_dims(rho)[0])
    w = w[w > LOG_CUTOFF]
    return float(-np.sum(w * np.log2(w)))


def relative_entropy(rho, sigma) -> float:
    """``tr rho (log2 rho - log2 sigma)``, or ``math.inf`` if ``rho`` leaks out of the support of ``sigma``."""
    r, _ = _matrix_and_dims(rho)
    s, _ = _matrix_and_dims(sigma)
    if r.shape != s.shape:
        raise DimensionMismatch(f"shapes {r.shape} and {s.shape} differ")
    log_s = matrix_log2_on_support(s)
    leak = float(np.real(np.trace(r) - np.trace(log_s.support @ r)))
    if leak > SUPPORT_LEAK:
        return math.inf
    cross = float(np.real(np.trace(r @ log_s.log)))
    return max(-von_neumann_entropy(r) - cross, 0.0)


def trace_distance(rho, sigma) -> float:
    r, _ = _matrix_and_dims(rho)
    s, _ = _matrix_and_dims(sigma)
    if r.shape != s.shape:
        raise DimensionMismatch(f"shapes {r.shape} and {s.shape} differ")
    return trace_norm_distance(r, s)


@dataclass(frozen=True)
class DistanceMeasure:
    id: str
    evaluator: Callable[[np.ndarray, np.ndarray], float] = field(repr=False)
    unit: str

    def __call__(self, rho, sigma) -> float:
        return self.evaluator(rho, sigma)


RELATIVE_ENTROPY = DistanceMeasure("relative-entropy", relative_entropy, "bits")
TRACE_DISTANCE = DistanceMeasure("trace-distance", trace_distance, "trace distance")
MEASURES = {m.id: m for m in (RELATIVE_ENTROPY, TRACE_DISTANCE)}


def measure_by_name(name: str) -> DistanceMeasure:
    try:
        return MEASURES[name]
    except KeyError:
        raise ValueError(f"unknown measure {name!r}; choose from {sorted(MEASURES)}") from None


def dtilde(rho, lam: Destroyer, measure: DistanceMeasure = RELATIVE_ENTROPY) -> float:
    """Distance from ``rho`` to its own destroyed image."""
    m, _ = _matrix_and_dims(rho)
    if lam.dim is not None and m.shape[0] != lam.dim:
        raise DimensionMismatch(f"state of dimension {m.shape[0]} for destroyer on {lam.dim}")
    return measure(m, lam.apply(m))


def _bipartite(rho, dims):
    m, dims = _matrix_and_dims(rho, dims)
    if dims is None:
        raise DimensionMismatch("diagonal discord needs bipartite dims")
    return m, dims


def _discord_from(m, dephased) -> float:
    value = relative_entropy(m, dephased)
    gain = von_neumann_entropy(dephased) - von_neumann_entropy(m)
    if abs(value - gain) > PINCHING_TOL:
        raise NumericalInconsistency(f"relative entropy {value:.12g} vs entropy gain {gain:.12g}")
    return value


def diagonal_discord(rho, dims=None) -> float:
    """``S(rho || pi_A(rho))`` in bits, cross-checked against ``S(pi_A rho) - S(rho)``.

    Raises:
        NumericalInconsistency: the two expressions disagree by more than 1e-9.
    """
    m, dims = _bipartite(rho, dims)
    return _discord_from(m, discord_apply(m, dims))


@dataclass(frozen=True)
class DiscordValue:
    value: float
    degenerate: bool
    minimized: Optional[float] = None


def diagonal_discord_report(rho, dims=None, basis_samples: int = 0, seed: int = 0) -> DiscordValue:
    """Diagonal discord plus, at a degenerate marginal, the minimum over random bases of the degenerate blocks.

    The marginal basis is not unique there, so the value depends on the basis
    choice; ``minimized`` shows how far the canonical choice is from the best
    sampled one.
    """
    m, dims = _bipartite(rho, dims)
    basis, degenerate = marginal_eigenbasis(m, dims)
    value = _discord_from(m, dephase_in_basis(m, basis, dims))
    if not degenerate or basis_samples <= 0:
        return DiscordValue(value, degenerate)
    w = eigvals_hermitian(partial_trace(m, dims, keep="A"))
    blocks = [b for b in degenerate_blocks(w) if len(b) > 1]
    rng = make_rng(seed, 4)
    best = value
    for _ in range(basis_samples):
        trial = basis.copy()
        for b in blocks:
            trial[:, b] = basis[:, b] @ random_unitary(len(b), rng)
        best = min(best, relative_entropy(m, dephase_in_basis(m, trial, dims)))
    return DiscordValue(value, degenerate, best)


# -- monotonicity harnesses -------------------------------------------------------


@dataclass
class MonotonicityReport:
    channel: str
    destroyer: str
    measure: str
    samples: int
    max_violation: float
    violations: int
    tol: float
    probe: bool = False

    @property
    def passed(self) -> bool:
        return self.violations == 0


def _test_states(d: int, cfg: CheckConfig, stream: int):
    rng = make_rng(cfg.seed, stream)
    for k in range(cfg.samples):
        yield random_density(d, d if k % 2 == 0 else 1, rng)


def _excess(after: float, before: float) -> float:
    if before == math.inf:
        return 0.0
    return after - before


def monotonicity_suite(ch, lam: Destroyer, measure: DistanceMeasure = RELATIVE_ENTROPY,
                       cfg: CheckConfig = CheckConfig(), tol: float = MONOTONE_NOISE) -> MonotonicityReport:
    """Check ``D~(ch(rho)) <= D~(rho)`` on seeded full-rank and pure states.

    If ``ch`` does not pass the commuting condition the run is labelled a
    probe: violations are then findings, not failures of a theorem.
    """
    probe = not check_commuting(ch, lam, cfg).passed
    worst, bad = -math.inf, 0
    for rho in _test_states(ch.dim_in, cfg, 3):
        e = _excess(dtilde(ch(rho), lam, measure), dtilde(rho, lam, measure))
        worst = max(worst, e)
        bad += e > tol
    return MonotonicityReport(getattr(ch, "label", "operation"), lam.label, measure.id, cfg.samples,
                              max(worst, 0.0), bad, tol, probe)


@dataclass
class SelectiveMonotonicityReport:
    channel: str
    destroyer: str
    samples: int
    max_violation: float
    violations: int
    tol: float
    arms_commute: bool

    @property
    def passed(self) -> bool:
        return self.violations == 0


def selective_monotonicity_suite(ch, lam: Destroyer, cfg: CheckConfig = CheckConfig(),
                                 tol: float = MONOTONE_NOISE) -> SelectiveMonotonicityReport:
    """Check ``D~(rho) >= sum_mu p_mu D~(K_mu rho K_mu^dag / p_mu)`` with relative entropy."""
    arms_commute = check_selective(ch, lam, "commuting", CheckConfig(cfg.tol, cfg.samples, 0, cfg.seed)).passed
    worst, bad = -math.inf, 0
    for rho in _test_states(ch.dim_in, cfg, 5):
        before = dtilde(rho, lam)
        after = 0.0
        for k in ch.kraus:
            out = k @ rho @ dagger(k)
            p = float(np.trace(out).real)
            if p < 1e-12:
                continue
            after += p * dtilde(out / p, lam)
        e = _excess(after, before)
        worst = max(worst, e)
        bad += e > tol
    return SelectiveMonotonicityReport(ch.label, lam.label, cfg.samples, max(worst, 0.0), bad, tol, arms_commute)


# -- degeneracy scans ---------------------------------------------------------------


def swap_family(eps: float) -> np.ndarray:
    """Two-qubit curve whose marginal eigenbasis jumps at ``eps = 0``.

    For ``eps >= 0`` the state is classical-quantum in the computational
    basis with marginal ``diag(1/2+eps, 1/2-eps)``. For ``eps < 0`` a small
    ``X (x) I`` term turns the marginal eigenbasis to ``|+>, |->`` while the
    state moves only by ``|eps|`` in trace distance.
    """
    s0 = np.diag([0.9, 0.1])
    s1 = np.diag([0.1, 0.9])
    p0 = np.diag([1.0, 0.0])
    p1 = np.diag([0.0, 1.0])
    if eps >= 0:
        return (np.kron((0.5 + eps) * p0, s0) + np.kron((0.5 - eps) * p1, s1)).astype(complex)
    x = np.array([[0, 1], [1, 0]])
    base = 0.5 * np.kron(p0, s0) + 0.5 * np.kron(p1, s1)
    return (base + abs(eps) * np.kron(x, np.eye(2)) / 2).astype(complex)


def smooth_family(eps: float) -> np.ndarray:
    """Partially entangled state mixed with noise; the marginal stays nondegenerate."""
    c, s = np.sqrt(0.8), np.sqrt(0.2)
    psi = np.array([c, 0, 0, s], dtype=complex)
    q = 0.3 + eps
    return (1 - q) * np.outer(psi, psi.conj()) + q * np.eye(4) / 4


FAMILIES = {"swap": swap_family, "smooth": smooth_family}


@dataclass
class ScanResult:
    epsilon: list
    values: list
    flags: list  # per row: jump from the previous row
    movement: list  # per row: trace distance from the previous row
    jumps: list  # (eps_left, eps_right, delta_bits, movement)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["epsilon", "value_bits", "jump_flag"])
        for e, v, f in zip(self.epsilon, self.values, self.flags):
            w.writerow([f"{e:.6g}", f"{v:.12f}", int(f)])
        return buf.getvalue()


def degeneracy_scan(family: Callable[[float], np.ndarray], grid: Sequence[float], dims=(2, 2),
                    jump: float = 0.1, move: float = 1e-3) -> ScanResult:
    """Evaluate diagonal discord along ``family`` and flag jumps between neighbouring grid points.

    A pair is flagged when the value changes by more than ``jump`` bits while
    the states are within ``move`` in trace distance.
    """
    grid = [float(e) for e in grid]
    states = [as_matrix(family(e)) for e in grid]
    values = [diagonal_discord(s, dims) for s in states]
    flags, movement, jumps = [False], [0.0], []
    for i in range(1, len(grid)):
        dist = trace_norm_distance(states[i - 1], states[i])
        delta = abs(values[i] - values[i - 1])
        flagged = delta > jump and dist <= move
        flags.append(flagged)
        movement.append(dist)
        if flagged:
            jumps.append((grid[i - 1], grid[i], delta, dist))
    return ScanResult(grid, values, flags, movement, jumps)


def default_grid(lo: float = -0.005, hi: float = 0.005, step: float = 5e-4) -> list[float]:
    n = int(round((hi - lo) / step))
    return [round(lo + k * step, 12) for k in range(n + 1)]

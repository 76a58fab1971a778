"""Resource destroying maps.

A destroyer fixes every free state and sends every other state into the free
set. Linear destroyers (dephasing, finite-group twirls) also carry a Kraus
realization; the discord destroyer and the extreme coherence destroyer are
nonlinear and are only available as evaluators.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .channels import KrausChannel, dephasing_channel
from .errors import DimensionMismatch, InputsNotFree, NotAGroup, RhoNotIncoherent
from .numerics import as_matrix, commutator, dagger, make_rng, random_density, random_probabilities, trace_norm_distance
from .states import (
    _matrix_and_dims,
    dephase_in_basis,
    is_cq,
    is_incoherent,
    marginal_eigenbasis,
    random_cq,
)

FREE_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class Destroyer:
    """A resource destroying map ``lambda``.

    Attributes:
        apply: state -> free state; works on plain arrays of the right size.
        is_free: ``(state, tol) -> bool`` membership test for the free set.
        linear: whether ``apply`` extends linearly to all operators.
        label: short name used in reports.
        dim: Hilbert-space dimension the map acts on, if fixed.
        channel: Kraus realization for linear maps.
        sample_free: ``rng -> free state`` sampler used by sampled checks.
        dims: bipartite factorization for local maps.
    """

    apply: Callable[[np.ndarray], np.ndarray]
    is_free: Callable[..., bool]
    linear: bool
    label: str
    dim: Optional[int] = None
    channel: Optional[KrausChannel] = field(default=None, repr=False)
    sample_free: Optional[Callable[[np.random.Generator], np.ndarray]] = field(default=None, repr=False)
    dims: Optional[tuple] = None

    def __call__(self, rho) -> np.ndarray:
        m, _ = _matrix_and_dims(rho)
        return self.apply(m)

    def apply_scaled(self, x: np.ndarray) -> np.ndarray:
        """Apply to an unnormalized positive operator: ``tr(x) lambda(x / tr(x))``."""
        if self.linear:
            return self.apply(x)
        t = float(np.trace(x).real)
        if t < 1e-14:
            return np.zeros_like(x)
        return t * self.apply(x / t)

    def free_sample(self, rng) -> np.ndarray:
        rng = make_rng(rng)
        if self.sample_free is not None:
            return self.sample_free(rng)
        return self.apply(random_density(self.dim, self.dim, rng))


def dephasing_destroyer(d: int) -> Destroyer:
    """Complete dephasing ``Pi`` in the computational basis."""

    def apply(rho):
        return np.diag(np.diag(rho))

    def sample(rng):
        return np.diag(random_probabilities(d, rng)).astype(complex)

    return Destroyer(
        apply=apply,
        is_free=lambda rho, tol=FREE_TOL: is_incoherent(rho, tol),
        linear=True,
        label="dephasing",
        dim=d,
        channel=dephasing_channel(d),
        sample_free=sample,
    )


def discord_apply(rho, dims) -> np.ndarray:
    """``pi_A``: dephase A in the (policy-fixed) eigenbasis of ``rho_A``."""
    m, dims = _matrix_and_dims(rho, dims)
    basis, _ = marginal_eigenbasis(m, dims)
    return dephase_in_basis(m, basis, dims)


def discord_destroyer(dims=(2, 2)) -> Destroyer:
    """The discord destroying map ``pi_A`` on states factored as ``dims``.

    Degenerate marginals are handled by :func:`rdmaps.states.marginal_eigenbasis`.
    Membership uses the full classical-quantum test, so CQ states whose
    marginal is degenerate are still recognized as free.
    """
    dims = (int(dims[0]), int(dims[1]))
    n = dims[0] * dims[1]

    def apply(rho):
        rho = as_matrix(rho)
        if rho.shape != (n, n):
            raise DimensionMismatch(f"discord destroyer for dims {dims} got a {rho.shape} matrix")
        return discord_apply(rho, dims)

    return Destroyer(
        apply=apply,
        is_free=lambda rho, tol=FREE_TOL: bool(is_cq(rho, tol, dims=dims)),
        linear=False,
        label="discord",
        dim=n,
        sample_free=lambda rng: random_cq(dims, rng).matrix,
        dims=dims,
    )


def _phase_equal(a, b, tol):
    d = a.shape[0]
    return abs(abs(np.trace(dagger(a) @ b)) - d) <= tol * d


def twirl_destroyer(unitaries: Sequence, tol: float = 1e-9) -> Destroyer:
    """Uniform twirl over a finite group given by its (projective) unitary representation.

    Closure is checked up to global phase, which the twirl cannot see.

    Raises:
        NotAGroup: the list lacks the identity or is not closed under products.
    """
    us = [as_matrix(u) for u in unitaries]
    if not us:
        raise NotAGroup("empty group")
    d = us[0].shape[0]
    eye = np.eye(d)
    for u in us:
        if u.shape != (d, d) or np.max(np.abs(dagger(u) @ u - eye)) > tol:
            raise NotAGroup("group elements must be unitaries of one dimension")
    if not any(_phase_equal(u, eye, tol) for u in us):
        raise NotAGroup("group lacks the identity")
    for a in us:
        for b in us:
            if not any(_phase_equal(a @ b, c, tol) for c in us):
                raise NotAGroup("list is not closed under multiplication")
    ks = tuple(u / np.sqrt(len(us)) for u in us)
    channel = KrausChannel(ks, "twirl")

    def is_free(rho, tol=FREE_TOL):
        m, _ = _matrix_and_dims(rho)
        return all(np.max(np.abs(commutator(u, m))) <= tol for u in us)

    return Destroyer(apply=channel, is_free=is_free, linear=True, label="twirl", dim=d, channel=channel)


def extreme_coherence_destroyer(rho0, tol: float = 1e-9) -> Destroyer:
    """Map every coherent state to the fixed incoherent state ``rho0``; fix incoherent states.

    Raises:
        RhoNotIncoherent: ``rho0`` has coherence.
    """
    r0, _ = _matrix_and_dims(rho0)
    if not is_incoherent(r0, tol):
        raise RhoNotIncoherent("rho0 must be diagonal in the incoherent basis")
    r0 = np.diag(np.diag(r0)).copy()
    d = r0.shape[0]

    def apply(rho):
        rho = as_matrix(rho)
        return rho if is_incoherent(rho, tol) else r0.copy()

    return Destroyer(
        apply=apply,
        is_free=lambda rho, tol=FREE_TOL: is_incoherent(rho, tol),
        linear=False,
        label="extreme",
        dim=d,
        sample_free=lambda rng: np.diag(random_probabilities(d, rng)).astype(complex),
    )


@dataclass(frozen=True)
class NonlinearityReport:
    gap: float
    mixture_free: bool

    @property
    def certifies_nonlinear(self) -> bool:
        return self.gap > 0


def nonlinearity_witness(lam: Destroyer, rho1, rho2, p: float = 0.5, tol: float = FREE_TOL) -> NonlinearityReport:
    """Trace distance between ``lam(p rho1 + (1-p) rho2)`` and ``p lam(rho1) + (1-p) lam(rho2)``.

    Both inputs must be free; a strictly positive gap certifies that ``lam``
    is not linear.
    """
    r1, _ = _matrix_and_dims(rho1)
    r2, _ = _matrix_and_dims(rho2)
    if not (lam.is_free(r1, tol) and lam.is_free(r2, tol)):
        raise InputsNotFree("nonlinearity witness needs two free states")
    mix = p * r1 + (1 - p) * r2
    gap = trace_norm_distance(lam(mix), p * lam(r1) + (1 - p) * lam(r2))
    return NonlinearityReport(gap, lam.is_free(mix, tol))


def destroyer_from_name(name: str, dims=None, dim=None, loader=None) -> Destroyer:
    """Resolve the command-line destroyer names.

    ``"dephasing"``, ``"discord"`` (needs ``dims``), ``"twirl:<file>"`` and
    ``"extreme:<statefile>"``; ``loader(kind, path)`` reads the referenced file.
    """
    kind, _, arg = name.partition(":")
    if kind == "dephasing":
        if dim is None:
            raise ValueError("dephasing destroyer needs a dimension")
        return dephasing_destroyer(dim)
    if kind == "discord":
        if dims is None:
            raise DimensionMismatch("discord destroyer needs --dims")
        return discord_destroyer(dims)
    if kind in ("twirl", "extreme"):
        if not arg or loader is None:
            raise ValueError(f"destroyer {kind!r} needs a file argument, e.g. {kind}:path.json")
        obj = loader(kind, arg)
        return twirl_destroyer(obj) if kind == "twirl" else extreme_coherence_destroyer(obj)
    raise ValueError(f"unknown destroyer {name!r}")

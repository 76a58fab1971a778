"""Kraus-form quantum operations and the catalog of channels used in the examples.

A :class:`KrausChannel` is callable on raw matrices (linear extension, no
validation) which is what the condition deciders use on non-PSD probes;
:func:`apply` is the validated state-to-state entry point.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .config import CHANNEL_TOL
from .errors import (
    BadKet,
    ConstraintViolated,
    DimensionMismatch,
    GammaOutOfRange,
    NotTracePreserving,
    NotUnitary,
)
from .numerics import as_matrix, dagger, decode_matrix, encode_matrix, kraus_choi
from .states import DensityMatrix, OrthonormalBasis, _matrix_and_dims, make_density, marginal_eigenbasis


@dataclass(frozen=True, eq=False)
class KrausChannel:
    """Ordered Kraus operators ``K_mu`` (all ``dim_out x dim_in``) and a label."""

    kraus: tuple = field(repr=False)
    label: str = "channel"
    linear = True

    def __post_init__(self):
        ks = tuple(as_matrix(k) for k in self.kraus)
        if not ks:
            raise ValueError("a channel needs at least one Kraus operator")
        shape = ks[0].shape
        if any(k.shape != shape for k in ks):
            raise DimensionMismatch("Kraus operators have different shapes")
        for k in ks:
            k.setflags(write=False)
        object.__setattr__(self, "kraus", ks)
        total = sum(dagger(k) @ k for k in ks)
        excess = float(np.max(np.linalg.eigvalsh(0.5 * (total + dagger(total)))))
        if excess > 1 + CHANNEL_TOL:
            raise NotTracePreserving(f"sum K^dag K has eigenvalue {excess:.12g} > 1")

    @property
    def dim_in(self) -> int:
        return self.kraus[0].shape[1]

    @property
    def dim_out(self) -> int:
        return self.kraus[0].shape[0]

    @property
    def trace_preserving(self) -> bool:
        return kraus_sum_residual(self) <= CHANNEL_TOL

    def __len__(self):
        return len(self.kraus)

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=complex)
        if x.shape != (self.dim_in, self.dim_in):
            raise DimensionMismatch(f"{self.label} expects {self.dim_in}x{self.dim_in} input, got {x.shape}")
        return sum(k @ x @ dagger(k) for k in self.kraus)

    def arm(self, mu: int) -> "KrausChannel":
        return KrausChannel((self.kraus[mu],), f"{self.label}[{mu}]")

    def arms(self) -> list["KrausChannel"]:
        return [self.arm(mu) for mu in range(len(self.kraus))]

    def relabel(self, label: str) -> "KrausChannel":
        return KrausChannel(self.kraus, label)


@dataclass(frozen=True)
class ArmOutcome:
    unnormalized_state: np.ndarray = field(repr=False)
    probability: float


@dataclass(frozen=True)
class CPTPReport:
    kraus_sum_residual: float
    choi_min_eigenvalue: float
    trace_preserving: bool
    completely_positive: bool

    @property
    def passed(self) -> bool:
        return self.trace_preserving and self.completely_positive


def kraus_sum_residual(ch: KrausChannel) -> float:
    total = sum(dagger(k) @ k for k in ch.kraus)
    return float(np.max(np.abs(total - np.eye(ch.dim_in))))


def is_cptp(ch: KrausChannel, tol: float = CHANNEL_TOL) -> CPTPReport:
    """Check ``sum K^dag K = I`` and Choi positivity, reporting both residuals."""
    res = kraus_sum_residual(ch)
    choi = kraus_choi(ch.kraus)
    wmin = float(np.linalg.eigvalsh(0.5 * (choi + dagger(choi)))[0])
    return CPTPReport(res, wmin, res <= tol, wmin >= -tol)


def apply(ch: KrausChannel, rho) -> DensityMatrix:
    """Apply a CPTP channel to a state, returning a validated state.

    Bipartite dims are kept when the channel preserves dimension.
    """
    m, dims = _matrix_and_dims(rho)
    if m.shape != (ch.dim_in, ch.dim_in):
        raise DimensionMismatch(f"{ch.label} expects dimension {ch.dim_in}, got {m.shape[0]}")
    if not ch.trace_preserving:
        raise NotTracePreserving(f"{ch.label} is not trace preserving")
    out = ch(m)
    return make_density(out, dims if ch.dim_out == ch.dim_in else None)


def apply_arms(ch: KrausChannel, rho) -> list[ArmOutcome]:
    """Unnormalized post-measurement states and probabilities, one per Kraus arm."""
    m, _ = _matrix_and_dims(rho)
    if m.shape != (ch.dim_in, ch.dim_in):
        raise DimensionMismatch(f"{ch.label} expects dimension {ch.dim_in}, got {m.shape[0]}")
    outs = []
    for k in ch.kraus:
        s = k @ m @ dagger(k)
        outs.append(ArmOutcome(s, float(np.trace(s).real)))
    return outs


def compose(a: KrausChannel, b: KrausChannel, label: str | None = None) -> KrausChannel:
    """``a o b`` (apply ``b`` first): Kraus operators ``A_i B_j``."""
    if a.dim_in != b.dim_out:
        raise DimensionMismatch(f"cannot compose {a.label} (in {a.dim_in}) after {b.label} (out {b.dim_out})")
    ks = [ka @ kb for ka in a.kraus for kb in b.kraus]
    return KrausChannel(tuple(ks), label or f"{a.label}o{b.label}")


def convex_combine(p: float, a: KrausChannel, b: KrausChannel, label: str | None = None) -> KrausChannel:
    """``p a + (1-p) b`` with Kraus operators ``sqrt(p) A_i`` and ``sqrt(1-p) B_j``."""
    if not 0 <= p <= 1:
        raise ValueError(f"mixing weight must lie in [0, 1], got {p}")
    if (a.dim_in, a.dim_out) != (b.dim_in, b.dim_out):
        raise DimensionMismatch("channels act on different spaces")
    ks = [np.sqrt(p) * k for k in a.kraus] if p > 0 else []
    ks += [np.sqrt(1 - p) * k for k in b.kraus] if p < 1 else []
    return KrausChannel(tuple(ks), label or f"{p:g}*{a.label}+{1 - p:g}*{b.label}")


def embed_local(ch: KrausChannel, d_other: int, side: str = "A") -> KrausChannel:
    """``ch (x) id`` (side A) or ``id (x) ch`` (side B)."""
    eye = np.eye(d_other)
    if side == "A":
        ks = [np.kron(k, eye) for k in ch.kraus]
    elif side == "B":
        ks = [np.kron(eye, k) for k in ch.kraus]
    else:
        raise ValueError(f"side must be 'A' or 'B', got {side!r}")
    return KrausChannel(tuple(ks), f"{ch.label}_{side}")


def identity_channel(d: int) -> KrausChannel:
    return KrausChannel((np.eye(d),), "id")


def unitary_channel(u, label: str = "U") -> KrausChannel:
    u = as_matrix(u)
    _check_unitary(u)
    return KrausChannel((u,), label)


def _check_unitary(u: np.ndarray, tol: float = 1e-10):
    if u.shape[0] != u.shape[1] or np.max(np.abs(dagger(u) @ u - np.eye(u.shape[0]))) > tol:
        raise NotUnitary("matrix is not unitary")


def dephasing_channel(d: int) -> KrausChannel:
    """Complete dephasing in the computational basis."""
    ks = []
    for i in range(d):
        p = np.zeros((d, d), dtype=complex)
        p[i, i] = 1
        ks.append(p)
    return KrausChannel(tuple(ks), "dephasing")


def hw_operators(d: int) -> list[np.ndarray]:
    """Heisenberg-Weyl operators ``X^i Z^j`` ordered by ``(i, j)``.

    ``X|k> = |k+1 mod d>`` and ``Z|k> = exp(2 pi i k/d)|k>``.
    """
    if d < 2:
        raise ValueError("Heisenberg-Weyl operators need d >= 2")
    x = np.roll(np.eye(d, dtype=complex), 1, axis=0)
    z = np.diag(np.exp(2j * np.pi * np.arange(d) / d))
    return [np.linalg.matrix_power(x, i) @ np.linalg.matrix_power(z, j) for i in range(d) for j in range(d)]


def _gamma_max(d: int) -> float:
    return d * d / (d * d - 1)


def hw_twirl_decomposition(u, gamma: float) -> KrausChannel:
    """Mixed-unitary Kraus form of the unitary-isotropic channel.

    Arms are ``sqrt(1 - gamma (d^2-1)/d^2) U`` and ``(sqrt(gamma)/d) U X^i Z^j``
    for ``(i, j) != (0, 0)``; arms with zero weight are dropped.
    """
    u = as_matrix(u)
    _check_unitary(u)
    d = u.shape[0]
    gmax = _gamma_max(d) if d > 1 else 0.0
    if not -1e-12 <= gamma <= gmax + 1e-12:
        raise GammaOutOfRange(f"gamma={gamma} outside [0, {gmax:.6g}]")
    gamma = min(max(gamma, 0.0), gmax)
    w0 = 1 - gamma * (d * d - 1) / (d * d)
    ks = []
    if w0 > 1e-15:
        ks.append(np.sqrt(w0) * u)
    if gamma > 0:
        ks += [np.sqrt(gamma) / d * u @ w for w in hw_operators(d)[1:]]
    return KrausChannel(tuple(ks), f"uiso(g={gamma:g})")


def unitary_isotropic(u, gamma: float) -> KrausChannel:
    """``(1 - gamma) U rho U^dag + gamma tr(rho) I/d`` for ``gamma`` in ``[0, d^2/(d^2-1)]``."""
    return hw_twirl_decomposition(u, gamma)


def projective_measurement(basis) -> KrausChannel:
    """Nonselective measurement with Kraus operators ``|psi_j><psi_j|``."""
    if not isinstance(basis, OrthonormalBasis):
        basis = OrthonormalBasis(basis)
    return KrausChannel(tuple(basis.projector(j) for j in range(basis.dim)), "projective")


def _normalized_kets(kets, d=None) -> list[np.ndarray]:
    out = []
    for k in kets:
        v = np.asarray(k, dtype=complex).reshape(-1)
        if d is not None and v.size != d:
            raise BadKet(f"ket has dimension {v.size}, expected {d}")
        n = np.linalg.norm(v)
        if abs(n - 1) > 1e-9:
            raise BadKet(f"ket has norm {n:.12g}, expected 1")
        out.append(v / n)
    return out


def measure_prepare(prepared: Sequence) -> KrausChannel:
    """Measure in the computational basis, prepare ``|f_i>`` on outcome ``i``."""
    kets = _normalized_kets(prepared)
    d = len(kets)
    ks = []
    for i, f in enumerate(kets):
        e = np.zeros(d, dtype=complex)
        e[i] = 1
        ks.append(np.outer(f, e))
    return KrausChannel(tuple(ks), "measure-prepare")


def example_e1() -> KrausChannel:
    """Qubit channel with arms ``|0><+|`` and ``|1><-|``."""
    plus = np.array([1, 1]) / np.sqrt(2)
    minus = np.array([1, -1]) / np.sqrt(2)
    return KrausChannel((np.outer([1, 0], plus), np.outer([0, 1], minus)), "E1")


E2_DEFAULTS = dict(a=0.5, b=0.5, c=0.0, x1=np.sqrt(3) / 2, x2=1 / np.sqrt(2), x3=1 / np.sqrt(2))


def e2_constraint_residuals(a, b, c, x1, x2, x3) -> tuple[float, float, float]:
    """Residuals of the three normalization constraints of :func:`example_e2`."""
    return (
        abs(x1) ** 2 + abs(c) ** 2 + abs(a) ** 2 - 1,
        2 * abs(a) ** 2 + 2 * abs(b) ** 2 + abs(c) ** 2 - 1,
        abs(x2) ** 2 + abs(x3) ** 2 - 1,
    )


def example_e2(a=E2_DEFAULTS["a"], b=E2_DEFAULTS["b"], c=E2_DEFAULTS["c"],
               x1=E2_DEFAULTS["x1"], x2=E2_DEFAULTS["x2"], x3=E2_DEFAULTS["x3"]) -> KrausChannel:
    """Qutrit channel that commutes with dephasing yet has no incoherent Kraus form."""
    worst = max(abs(r) for r in e2_constraint_residuals(a, b, c, x1, x2, x3))
    if worst > 1e-12:
        raise ConstraintViolated(f"E2 parameters violate the normalization constraints by {worst:.3e}")
    cj = np.conj
    k1 = np.array([[x1, 0, 0], [0, a, 0], [0, -b, 0]], dtype=complex)
    k2 = np.array([[0, 0, x2], [0, cj(b), 0], [cj(c), cj(a), 0]], dtype=complex)
    k3 = np.array([[0, 0, 0], [0, 0, x3], [a, -c, 0]], dtype=complex)
    return KrausChannel((k1, k2, k3), "E2")


def qutrit_mu() -> KrausChannel:
    """``X rho X^dag / 2 + X^2 rho X^2dag / 2`` on a qutrit."""
    x = np.roll(np.eye(3, dtype=complex), 1, axis=0)
    return KrausChannel((x / np.sqrt(2), x @ x / np.sqrt(2)), "mu")


def gio_channel(diagonals: Sequence) -> KrausChannel:
    """Channel with diagonal Kraus operators ``diag(alpha_mu)``; columns must be normalized."""
    diags = [np.asarray(a, dtype=complex).reshape(-1) for a in diagonals]
    d = diags[0].size
    if any(a.size != d for a in diags):
        raise DimensionMismatch("diagonals have different lengths")
    norms = sum(np.abs(a) ** 2 for a in diags)
    worst = float(np.max(np.abs(norms - 1)))
    if worst > 1e-12:
        raise ConstraintViolated(f"sum_mu |alpha_i,mu|^2 deviates from 1 by {worst:.3e}")
    return KrausChannel(tuple(np.diag(a) for a in diags), "GIO")


def erasure_channel(d: int = 2) -> KrausChannel:
    """Reset to ``|0><0|``: measure-and-prepare with every target ``|0>``."""
    zero = np.zeros(d)
    zero[0] = 1
    return measure_prepare([zero] * d).relabel("erasure")


def partial_depolarizing(d: int, tau: float) -> KrausChannel:
    """``tau rho + (1 - tau) I/d``."""
    return hw_twirl_decomposition(np.eye(d), 1 - tau).relabel(f"depol(tau={tau:g})")


@dataclass(frozen=True, eq=False)
class MeasurePrepareMap:
    """State-dependent measure-and-prepare map on the A side of a bipartite state.

    Measures A in the (policy-fixed) eigenbasis ``{|i>}`` of ``rho_A`` and
    prepares ``|g_i>``: ``sum_i (|g_i><i| (x) I) rho (|i><g_i| (x) I)``. Its
    Kraus operators depend on the input, so it is not a :class:`KrausChannel`.
    """

    prepared: tuple = field(repr=False)
    dims: tuple = (2, 2)
    label: str = "xi"
    linear = False

    @property
    def dim_in(self) -> int:
        return self.dims[0] * self.dims[1]

    dim_out = dim_in

    def kraus_for(self, rho) -> list[np.ndarray]:
        basis, _ = marginal_eigenbasis(rho, self.dims)
        db = self.dims[1]
        return [np.kron(np.outer(g, np.conj(basis[:, i])), np.eye(db)) for i, g in enumerate(self.prepared)]

    def __call__(self, rho) -> np.ndarray:
        m, _ = _matrix_and_dims(rho)
        return sum(k @ m @ dagger(k) for k in self.kraus_for(m))

    def kraus_arms(self, rho) -> list[np.ndarray]:
        return self.kraus_for(rho)


def discord_mp_xi(prepared: Sequence, d_b: int = 2) -> MeasurePrepareMap:
    """Build the nonlinear measure-and-prepare map with targets ``prepared`` on A."""
    kets = _normalized_kets(prepared)
    da = len(kets)
    if any(k.size != da for k in kets):
        raise BadKet("need one target ket of dimension d_A per basis index")
    return MeasurePrepareMap(tuple(kets), (da, int(d_b)))


def channel_to_json(ch: KrausChannel) -> dict:
    return {
        "label": ch.label,
        "dim_in": ch.dim_in,
        "dim_out": ch.dim_out,
        "kraus": [encode_matrix(k) for k in ch.kraus],
    }


def channel_from_json(obj: dict) -> KrausChannel:
    if not isinstance(obj, dict) or "kraus" not in obj:
        raise ValueError("channel JSON must be an object with a 'kraus' list")
    ks = [decode_matrix(k) for k in obj["kraus"]]
    if not ks:
        raise ValueError("channel JSON has no Kraus operators")
    ch = KrausChannel(tuple(ks), str(obj.get("label", "channel")))
    if "dim_in" in obj and int(obj["dim_in"]) != ch.dim_in:
        raise DimensionMismatch(f"dim_in is {obj['dim_in']} but Kraus operators have {ch.dim_in} columns")
    if "dim_out" in obj and int(obj["dim_out"]) != ch.dim_out:
        raise DimensionMismatch(f"dim_out is {obj['dim_out']} but Kraus operators have {ch.dim_out} rows")
    return ch

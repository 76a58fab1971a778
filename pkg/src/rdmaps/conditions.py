"""Deciders for the resource-free conditions of an operation relative to a destroyer.

For a destroyer ``lam`` and an operation ``E``:

* nongenerating: ``E o lam == lam o E o lam``
* nonactivating: ``lam o E == lam o E o lam``
* commuting:     ``lam o E == E o lam``

When both ``lam`` and ``E`` are linear the conditions are decided exactly on
a set of ``d**2`` pure probe states that spans all operators. Otherwise they
are tested on seeded random states (alternating generic full-rank states and
samples from the free set). Residuals are trace distances.

The selective variants ask for a Kraus decomposition whose every arm
satisfies the condition. The given arms are tried first, then random unitary
remixings of them; failing to find one is reported as ``"not-witnessed"``,
which is not a proof that none exists.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .channels import KrausChannel, compose, convex_combine, partial_depolarizing
from .config import CheckConfig
from .destroyers import Destroyer, dephasing_destroyer, extreme_coherence_destroyer
from .errors import DimensionMismatch, NotLinearDestroyer
from .numerics import dagger, encode_matrix, make_rng, random_density, random_unitary, trace_norm_distance

CONDITIONS = ("nongenerating", "nonactivating", "commuting")
SELECTIVE = tuple(f"selective_{c}" for c in CONDITIONS)

# Sub-stream ids of the run seed; all three conditions share the state stream.
_STATE_STREAM = 1
_REMIX_STREAM = 2


@dataclass
class Verdict:
    """Outcome of one condition check.

    ``verdict`` is ``"pass"``/``"fail"`` for plain conditions and
    ``"witnessed"``/``"not-witnessed"``/``"fail-on-given"`` for selective ones.
    ``witness`` is the input state with the largest (or first failing)
    residual; ``arm`` is the failing Kraus index for selective checks.
    """

    condition: str
    verdict: str
    max_residual: float
    tol: float
    samples: int = 0
    method: str = "exact"
    witness: Optional[np.ndarray] = field(default=None, repr=False)
    arm: Optional[int] = None
    note: str = ""

    @property
    def passed(self) -> bool:
        return self.verdict in ("pass", "witnessed")

    def to_json(self) -> dict:
        out = {
            "verdict": self.verdict,
            "max_residual": float(self.max_residual),
            "tol": self.tol,
            "samples": self.samples,
            "method": self.method,
        }
        if self.witness is not None:
            out["witness"] = encode_matrix(self.witness)
        if self.arm is not None:
            out["arm"] = self.arm
        if self.note:
            out["note"] = self.note
        return out


class _Arm:
    """Single Kraus arm ``x -> K x K^dag`` without channel validation."""

    linear = True

    def __init__(self, k: np.ndarray):
        self.k = k
        self.kd = dagger(k)
        self.dim_in = k.shape[1]

    def __call__(self, x):
        return self.k @ x @ self.kd


def probe_states(d: int) -> list[np.ndarray]:
    """Pure states ``|i>``, ``(|i>+|j>)/sqrt2`` and ``(|i>+i|j>)/sqrt2``: a spanning set of operators."""
    kets = []
    for i in range(d):
        e = np.zeros(d, dtype=complex)
        e[i] = 1
        kets.append(e)
    for i in range(d):
        for j in range(i + 1, d):
            for phase in (1, 1j):
                v = np.zeros(d, dtype=complex)
                v[i], v[j] = 1 / np.sqrt(2), phase / np.sqrt(2)
                kets.append(v)
    return [np.outer(k, np.conj(k)) for k in kets]


def residual(condition: str, op, lam: Destroyer, rho: np.ndarray) -> float:
    """Trace-distance residual of ``condition`` at input ``rho``."""
    lap = lam.apply_scaled
    if condition == "nongenerating":
        x = op(lap(rho))
        return trace_norm_distance(lap(x), x)
    if condition == "nonactivating":
        return trace_norm_distance(lap(op(rho)), lap(op(lap(rho))))
    if condition == "commuting":
        return trace_norm_distance(lap(op(rho)), op(lap(rho)))
    raise ValueError(f"unknown condition {condition!r}")


def _dim(op) -> int:
    return op.dim_in


def _check_dims(op, lam: Destroyer):
    if lam.dim is not None and _dim(op) != lam.dim:
        raise DimensionMismatch(
            f"operation acts on dimension {_dim(op)} but destroyer {lam.label} on {lam.dim}"
        )
    if getattr(op, "dim_out", _dim(op)) != _dim(op):
        raise DimensionMismatch("conditions need operations with equal input and output dimension")


def is_exact(op, lam: Destroyer) -> bool:
    return lam.linear and getattr(op, "linear", True)


def sample_inputs(lam: Destroyer, d: int, cfg: CheckConfig):
    """Seeded test inputs: even indices generic full-rank states, odd indices free states."""
    rng = make_rng(cfg.seed, _STATE_STREAM)
    for k in range(cfg.samples):
        if k % 2 == 0 or lam.dim is None:
            yield random_density(d, d, rng)
        else:
            yield lam.free_sample(rng)


def _evaluate(condition: str, op, lam: Destroyer, cfg: CheckConfig) -> Verdict:
    if is_exact(op, lam):
        worst, witness = -1.0, None
        probes = probe_states(_dim(op))
        for rho in probes:
            r = residual(condition, op, lam, rho)
            if r > worst:
                worst, witness = r, rho
        ok = worst <= cfg.tol
        return Verdict(condition, "pass" if ok else "fail", worst, cfg.tol, len(probes), "exact",
                       None if ok else witness)
    worst = 0.0
    used = 0
    for rho in sample_inputs(lam, _dim(op), cfg):
        used += 1
        r = residual(condition, op, lam, rho)
        worst = max(worst, r)
        if r > cfg.tol:
            if condition == "nongenerating":
                rho = lam.apply_scaled(rho)
            return Verdict(condition, "fail", r, cfg.tol, used, "sampled", rho)
    return Verdict(condition, "pass", worst, cfg.tol, used, "sampled")


def check_nongenerating(ch, lam: Destroyer, cfg: CheckConfig = CheckConfig()) -> Verdict:
    """Does ``ch`` keep the free set closed?"""
    _check_dims(ch, lam)
    return _evaluate("nongenerating", ch, lam, cfg)


def check_nonactivating(ch, lam: Destroyer, cfg: CheckConfig = CheckConfig()) -> Verdict:
    """Is the free part of the output independent of the resource in the input?"""
    _check_dims(ch, lam)
    return _evaluate("nonactivating", ch, lam, cfg)


def check_commuting(ch, lam: Destroyer, cfg: CheckConfig = CheckConfig()) -> Verdict:
    _check_dims(ch, lam)
    return _evaluate("commuting", ch, lam, cfg)


def check_condition(condition: str, ch, lam: Destroyer, cfg: CheckConfig = CheckConfig()) -> Verdict:
    if condition.startswith("selective_"):
        return check_selective(ch, lam, condition[len("selective_"):], cfg)
    if condition not in CONDITIONS:
        raise ValueError(f"unknown condition {condition!r}")
    _check_dims(ch, lam)
    return _evaluate(condition, ch, lam, cfg)


def _arms_verdict(condition, kraus, lam, cfg):
    """(all arms pass, failing arm index, its verdict)."""
    for mu, k in enumerate(kraus):
        v = _evaluate(condition, _Arm(k), lam, cfg)
        if not v.passed:
            return False, mu, v
    return True, None, None


def check_selective(ch: KrausChannel, lam: Destroyer, condition: str, cfg: CheckConfig = CheckConfig()) -> Verdict:
    """Search for a Kraus decomposition of ``ch`` whose every arm satisfies ``condition``."""
    if not isinstance(ch, KrausChannel):
        raise TypeError("selective conditions need a channel with a fixed Kraus decomposition")
    if condition not in CONDITIONS:
        raise ValueError(f"unknown condition {condition!r}")
    _check_dims(ch, lam)
    name = f"selective_{condition}"
    ok, mu, fail = _arms_verdict(condition, ch.kraus, lam, cfg)
    if ok:
        return Verdict(name, "witnessed", 0.0, cfg.tol, 0, "given-arms")
    if cfg.remixes == 0:
        return Verdict(name, "fail-on-given", fail.max_residual, cfg.tol, 0, "given-arms", fail.witness, mu)
    rng = make_rng(cfg.seed, _REMIX_STREAM)
    stack = np.array(ch.kraus)
    n = len(ch.kraus)
    for r in range(cfg.remixes):
        w = random_unitary(n, rng)
        remixed = np.tensordot(w, stack, axes=(1, 0))
        ok_r, _, _ = _arms_verdict(condition, remixed, lam, cfg)
        if ok_r:
            return Verdict(name, "witnessed", 0.0, cfg.tol, r + 1, "remix", note=f"found at remix {r + 1}")
    return Verdict(name, "not-witnessed", fail.max_residual, cfg.tol, cfg.remixes, "remix", fail.witness, mu,
                   note=f"given arm {mu} fails; no passing remix in {cfg.remixes} tries")


# -- Kraus-level coherence criteria ------------------------------------------------


@dataclass(frozen=True)
class KrausTest:
    passed: bool
    violation: float
    witness: Optional[int] = None


def _column_violation(k: np.ndarray) -> float:
    # max_{i, k != l} |K_ki K_li^*|: a column with two nonzero entries maps |i> to a coherent state.
    a = np.abs(k)
    worst = 0.0
    for i in range(a.shape[1]):
        col = np.sort(a[:, i])
        if col.size > 1:
            worst = max(worst, float(col[-1] * col[-2]))
    return worst


def io_arm_test(k, tol: float = 1e-8) -> KrausTest:
    """Incoherent arm: at most one nonzero entry in every column."""
    v = _column_violation(np.asarray(k, dtype=complex))
    return KrausTest(v <= tol, v)


def sio_arm_test(k, tol: float = 1e-8) -> KrausTest:
    """Strictly incoherent arm: at most one nonzero entry per column and per row."""
    k = np.asarray(k, dtype=complex)
    v = max(_column_violation(k), _column_violation(k.T))
    return KrausTest(v <= tol, v)


def io_test(ch: KrausChannel, tol: float = 1e-8) -> KrausTest:
    """All given arms incoherent; ``witness`` is the worst arm."""
    vs = [io_arm_test(k, tol).violation for k in ch.kraus]
    mu = int(np.argmax(vs))
    return KrausTest(vs[mu] <= tol, vs[mu], None if vs[mu] <= tol else mu)


def sio_test(ch: KrausChannel, tol: float = 1e-8) -> KrausTest:
    vs = [sio_arm_test(k, tol).violation for k in ch.kraus]
    mu = int(np.argmax(vs))
    return KrausTest(vs[mu] <= tol, vs[mu], None if vs[mu] <= tol else mu)


def dio_kraus_test(ch: KrausChannel, tol: float = 1e-8) -> KrausTest:
    """Commutation with dephasing at the Kraus level.

    Requires ``sum_mu K_ki K_li^* = 0`` for ``k != l`` (dephased inputs stay
    incoherent) and ``sum_mu K_ki K_kj^* = 0`` for ``i != j`` (off-diagonal
    inputs leave no diagonal trace).
    """
    ks = np.array(ch.kraus)
    # cols[i][k, l] = sum_mu K_ki K_li^*
    cols = np.einsum("mki,mli->ikl", ks, np.conj(ks))
    rows = np.einsum("mki,mkj->kij", ks, np.conj(ks))
    d_out, d_in = ks.shape[1], ks.shape[2]
    off_out = ~np.eye(d_out, dtype=bool)
    off_in = ~np.eye(d_in, dtype=bool)
    v1 = float(np.max(np.abs(cols[:, off_out]), initial=0.0))
    v2 = float(np.max(np.abs(rows[:, off_in]), initial=0.0))
    v = max(v1, v2)
    return KrausTest(v <= tol, v)


@dataclass(frozen=True)
class GIOReport:
    """Genuinely incoherent test: diagonal arms and every incoherent basis state fixed."""

    diagonal: bool
    diagonal_violation: float
    fixes_incoherent: bool
    fix_residual: float
    witness: Optional[np.ndarray] = field(default=None, repr=False)

    @property
    def passed(self) -> bool:
        return self.diagonal and self.fixes_incoherent


def gio_test(ch: KrausChannel, tol: float = 1e-8) -> GIOReport:
    ks = np.array(ch.kraus)
    off = ks.copy()
    for k in off:
        np.fill_diagonal(k, 0)
    dv = float(np.max(np.abs(off), initial=0.0))
    worst, witness = 0.0, None
    for i in range(ch.dim_in):
        e = np.zeros((ch.dim_in, ch.dim_in), dtype=complex)
        e[i, i] = 1
        r = trace_norm_distance(ch(e), e)
        if r > worst:
            worst, witness = r, e
    fixes = worst <= tol
    return GIOReport(dv <= tol, dv, fixes, worst, None if fixes else witness)


# -- reports -------------------------------------------------------------------------


@dataclass
class ClassificationReport:
    channel: str
    destroyer: str
    conditions: dict
    config: CheckConfig
    consistent: bool = True

    def to_json(self) -> dict:
        return {
            "channel": self.channel,
            "destroyer": self.destroyer,
            "conditions": {k: v.to_json() for k, v in self.conditions.items()},
            "consistent": self.consistent,
            "seed": self.config.seed,
            "tol": self.config.tol,
            "samples": self.config.samples,
            "remixes": self.config.remixes,
        }


def _reconcile(conds: dict, op, lam: Destroyer, cfg: CheckConfig) -> bool:
    """Enforce ``commuting == nongenerating and nonactivating`` using each side's witnesses."""
    comm, ng, na = conds["commuting"], conds["nongenerating"], conds["nonactivating"]
    if comm.passed and not (ng.passed and na.passed):
        for v in (ng, na):
            if v.witness is None:
                continue
            for rho in (v.witness, lam.apply_scaled(v.witness)):
                r = residual("commuting", op, lam, rho)
                if r > cfg.tol:
                    conds["commuting"] = Verdict("commuting", "fail", r, cfg.tol, comm.samples, comm.method, rho,
                                                 note=f"witness taken from {v.condition}")
                    return True
        return False
    if not comm.passed and ng.passed and na.passed:
        rho = comm.witness
        for name in ("nongenerating", "nonactivating"):
            r = residual(name, op, lam, rho)
            if r > cfg.tol:
                conds[name] = Verdict(name, "fail", r, cfg.tol, conds[name].samples, conds[name].method, rho,
                                      note="witness taken from commuting")
                return True
        return False
    return True


def classify(ch, lam: Destroyer, cfg: CheckConfig = CheckConfig(), selective: bool = True) -> ClassificationReport:
    """Run the three conditions (and, for Kraus channels, their selective versions)."""
    conds = {c: check_condition(c, ch, lam, cfg) for c in CONDITIONS}
    consistent = _reconcile(conds, ch, lam, cfg)
    if selective and isinstance(ch, KrausChannel):
        for c in CONDITIONS:
            conds[f"selective_{c}"] = check_selective(ch, lam, c, cfg)
    return ClassificationReport(getattr(ch, "label", "operation"), lam.label, conds, cfg, consistent)


# -- closure and construction harnesses --------------------------------------------


@dataclass
class ClosureReport:
    members: list
    excluded: list
    compositions: list  # (label, Verdict)
    convex: list  # (label, Verdict)
    asserted_convex: bool

    @property
    def composition_closed(self) -> bool:
        return all(v.passed for _, v in self.compositions)

    @property
    def convex_closed(self) -> bool:
        return all(v.passed for _, v in self.convex)

    @property
    def counterexamples(self) -> list:
        return [label for label, v in self.convex if not v.passed]

    @property
    def passed(self) -> bool:
        if not self.composition_closed:
            return False
        return self.convex_closed if self.asserted_convex else True

    def summary(self) -> str:
        found = self.counterexamples
        tail = f"convex counterexamples: {', '.join(found)}" if found else "convex counterexamples: none found"
        return f"{len(self.compositions)} compositions closed={self.composition_closed}; {tail}"


def closure_suite(lam: Destroyer, pool: Sequence[KrausChannel], cfg: CheckConfig = CheckConfig(),
                  weights: Sequence[float] = (0.5,)) -> ClosureReport:
    """Check closure of the commuting class under composition and mixing.

    Composition closure holds for any destroyer. Mixing closure is a theorem
    only for linear destroyers; for nonlinear ones the mixtures are searched
    for counterexamples and whatever turns up is reported.
    """
    members, excluded = [], []
    for ch in pool:
        (members if check_commuting(ch, lam, cfg).passed else excluded).append(ch)
    comps = []
    for a, b in itertools.product(members, repeat=2):
        c = compose(a, b)
        comps.append((c.label, check_commuting(c, lam, cfg)))
    mixes = []
    for a, b in itertools.combinations(members, 2):
        for p in weights:
            c = convex_combine(p, a, b)
            mixes.append((c.label, check_commuting(c, lam, cfg)))
    return ClosureReport([m.label for m in members], [e.label for e in excluded], comps, mixes, lam.linear)


@dataclass
class ConstructionReport:
    verdicts: dict

    @property
    def passed(self) -> bool:
        return all(v.passed for v in self.verdicts.values())


def construction_suite(lam: Destroyer, omega: KrausChannel, cfg: CheckConfig = CheckConfig()) -> ConstructionReport:
    """Build ``L o O``, ``O o L`` and ``L o O o L`` from a linear destroyer ``L``.

    They must be nongenerating, nonactivating and commuting respectively; the
    arm-wise builds ``L o O_mu`` etc. must satisfy each condition arm by arm.
    """
    if not lam.linear or lam.channel is None:
        raise NotLinearDestroyer(f"{lam.label} has no channel realization")
    big = lam.channel
    out = {
        "nongenerating[LoO]": check_nongenerating(compose(big, omega), lam, cfg),
        "nonactivating[OoL]": check_nonactivating(compose(omega, big), lam, cfg),
        "commuting[LoOoL]": check_commuting(compose(big, compose(omega, big)), lam, cfg),
    }
    for mu in range(len(omega)):
        arm = omega.arm(mu)
        out[f"nongenerating[LoO_{mu}]"] = check_nongenerating(compose(big, arm), lam, cfg)
        out[f"nonactivating[O_{mu}oL]"] = check_nonactivating(compose(arm, big), lam, cfg)
        out[f"commuting[LoO_{mu}oL]"] = check_commuting(compose(big, compose(arm, big)), lam, cfg)
    return ConstructionReport(out)


@dataclass
class RobustnessReport:
    tau: float
    versus_dephasing: Verdict
    selective_versus_dephasing: Verdict
    versus_extreme: Verdict
    rho0: np.ndarray = field(repr=False)
    rho0_image: np.ndarray = field(repr=False)

    @property
    def free_witness(self) -> Optional[np.ndarray]:
        """The free state the failing input collapses to; for the extreme destroyer this is ``rho0``."""
        w = self.versus_extreme.witness
        if w is None:
            return None
        return extreme_coherence_destroyer(self.rho0)(w)

    @property
    def image_matches(self) -> bool:
        d = self.rho0.shape[0]
        expected = self.tau * self.rho0 + (1 - self.tau) * np.eye(d) / d
        return bool(np.max(np.abs(self.rho0_image - expected)) < 1e-12)


def robustness_demo(tau: float = 0.5, rho0=None, d: int = 2, cfg: CheckConfig = CheckConfig()) -> RobustnessReport:
    """Partial depolarizing ``tau rho + (1-tau) I/d`` against dephasing and the extreme destroyer.

    Against dephasing the channel is (selectively) nonactivating. Against the
    destroyer that sends all coherent states to ``rho0`` it is not: ``rho0``
    is mapped to a different incoherent state while coherent inputs stay
    coherent and collapse back to ``rho0``.
    """
    if rho0 is None:
        rho0 = np.zeros((d, d), dtype=complex)
        rho0[0, 0] = 1
    rho0 = np.asarray(rho0, dtype=complex)
    ch = partial_depolarizing(d, tau)
    pi = dephasing_destroyer(d)
    lam0 = extreme_coherence_destroyer(rho0)
    return RobustnessReport(
        tau,
        check_nonactivating(ch, pi, cfg),
        check_selective(ch, pi, "nonactivating", cfg),
        check_nonactivating(ch, lam0, cfg),
        rho0,
        ch(rho0),
    )

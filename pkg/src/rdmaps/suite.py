"""The reproducible example catalog: one function per acceptance check, each returning result rows."""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .channels import (
    KrausChannel,
    dephasing_channel,
    discord_mp_xi,
    e2_constraint_residuals,
    embed_local,
    erasure_channel,
    example_e1,
    example_e2,
    gio_channel,
    hw_twirl_decomposition,
    is_cptp,
    measure_prepare,
    partial_depolarizing,
    projective_measurement,
    qutrit_mu,
    unitary_channel,
    unitary_isotropic,
)
from .conditions import (
    check_commuting,
    check_nonactivating,
    check_nongenerating,
    check_selective,
    closure_suite,
    dio_kraus_test,
    gio_test,
    robustness_demo,
)
from .config import CheckConfig
from .destroyers import (
    dephasing_destroyer,
    discord_destroyer,
    extreme_coherence_destroyer,
    nonlinearity_witness,
    twirl_destroyer,
)
from .monotones import (
    MEASURES,
    degeneracy_scan,
    default_grid,
    diagonal_discord,
    monotonicity_suite,
    relative_entropy,
    selective_monotonicity_suite,
    smooth_family,
    swap_family,
    von_neumann_entropy,
)
from .numerics import make_rng, random_density, random_unitary, trace_norm_distance
from .states import OrthonormalBasis, bell_state, is_cq

AXIOM_TOL = 1e-9
RUNTIME_BUDGET = 60.0

PLUS = np.array([1, 1], dtype=complex) / np.sqrt(2)
KET0 = np.array([1, 0], dtype=complex)
KET1 = np.array([0, 1], dtype=complex)


@dataclass
class Row:
    criterion: int
    check: str
    expected: str
    observed: str
    residual: float
    passed: bool

    def line(self) -> str:
        mark = "PASS" if self.passed else "FAIL"
        return f"{mark} {self.criterion:>2} {self.check:<44} expected={self.expected:<22} observed={self.observed:<22} residual={self.residual:.3e}"

    def to_json(self) -> dict:
        return {
            "criterion": self.criterion,
            "check": self.check,
            "expected": self.expected,
            "observed": self.observed,
            "residual": float(self.residual),
            "pass": bool(self.passed),
        }


def _proj(ket) -> np.ndarray:
    ket = np.asarray(ket, dtype=complex)
    return np.outer(ket, ket.conj())


def sio_example() -> KrausChannel:
    """Strictly incoherent qutrit channel: a diagonal arm and a permuted diagonal arm."""
    x = np.roll(np.eye(3), 1, axis=0)
    k1 = np.diag(np.sqrt([0.6, 0.3, 0.5]))
    k2 = x @ np.diag(np.sqrt([0.4, 0.7, 0.5]))
    return KrausChannel((k1.astype(complex), k2.astype(complex)), "SIO")


def gio_example() -> KrausChannel:
    return gio_channel([np.array([1, 1, 1j]) / np.sqrt(2), np.array([1, -1, 1]) / np.sqrt(2)])


def coherence_catalog() -> list[KrausChannel]:
    return [
        example_e1(),
        example_e2(),
        measure_prepare([PLUS, KET1]).relabel("MP(+,1)"),
        gio_example(),
        erasure_channel(),
        dephasing_channel(2),
        dephasing_channel(3),
        sio_example(),
        partial_depolarizing(2, 0.5),
    ]


def _local_isotropic(cfg: CheckConfig, n: int, gammas=(0.0, 0.5, 1.0)):
    rng = make_rng(cfg.seed, 10)
    us = [random_unitary(2, rng) for _ in range(n)]
    return [(u, g, embed_local(unitary_isotropic(u, g), 2, "A")) for u in us for g in gammas]


def criterion_1(cfg: CheckConfig) -> list[Row]:
    """Idempotence, destruction and fixed-point laws."""
    n = max(cfg.samples // 2, 10)
    z = np.diag([1.0, -1.0]).astype(complex)
    cases = [(f"dephasing d={d}", dephasing_destroyer(d)) for d in (2, 3, 4)]
    cases += [(f"discord dims={dims}", discord_destroyer(dims)) for dims in ((2, 2), (2, 3), (3, 3))]
    cases += [("twirl {I,Z}", twirl_destroyer([np.eye(2), z])), ("extreme rho0=|0><0|", extreme_coherence_destroyer(_proj(KET0)))]
    rows = []
    for name, lam in cases:
        rng = make_rng(cfg.seed, 11)
        worst, destroyed = 0.0, True
        for k in range(n):
            rho = random_density(lam.dim, lam.dim if k % 2 == 0 else 1 + k % lam.dim, rng)
            out = lam(rho)
            worst = max(worst, trace_norm_distance(lam(out), out))
            destroyed &= lam.is_free(out, 1e-8)
            free = lam.free_sample(rng)
            worst = max(worst, trace_norm_distance(lam(free), free))
        ok = worst <= AXIOM_TOL and destroyed
        rows.append(Row(1, f"axioms {name}", "idempotent+free", "ok" if ok else "violated", worst, ok))
    return rows


def criterion_2(cfg: CheckConfig) -> list[Row]:
    pa = discord_destroyer((2, 2))
    r1 = np.kron(_proj(KET0), _proj(KET0))
    r2 = np.kron(_proj(PLUS), _proj(KET1))
    gap = nonlinearity_witness(pa, r1, r2).gap
    lin = nonlinearity_witness(dephasing_destroyer(2), _proj(KET0), np.eye(2) / 2).gap
    return [
        Row(2, "nonlinearity gap discord |0>/|+> pair", "> 0.05", f"{gap:.4f}", gap, gap > 0.05),
        Row(2, "nonlinearity gap dephasing", "<= 1e-12", f"{lin:.1e}", lin, lin <= 1e-12),
    ]


def criterion_3(cfg: CheckConfig) -> list[Row]:
    rows = []
    pi2, pi3 = dephasing_destroyer(2), dephasing_destroyer(3)
    e1 = example_e1()
    sel = check_selective(e1, pi2, "nongenerating", cfg)
    rows.append(Row(3, "E1 IO (selective nongenerating)", "witnessed", sel.verdict, sel.max_residual, sel.verdict == "witnessed"))
    comm = check_commuting(e1, pi2, cfg)
    wit_ok = comm.witness is not None and np.max(np.abs(comm.witness - _proj(PLUS))) < 1e-12
    res_ok = abs(comm.max_residual - 0.5) <= 1e-10
    rows.append(Row(3, "E1 DIO (commuting)", "fail @|+><+|, 0.5", f"{comm.verdict} witness={'|+><+|' if wit_ok else 'other'}",
                    abs(comm.max_residual - 0.5), comm.verdict == "fail" and wit_ok and res_ok))

    e2 = example_e2()
    cp = is_cptp(e2)
    con = max(abs(x) for x in e2_constraint_residuals(0.5, 0.5, 0.0, np.sqrt(3) / 2, 1 / np.sqrt(2), 1 / np.sqrt(2)))
    rows.append(Row(3, "E2 CPTP", "pass", "pass" if cp.passed else "fail", max(cp.kraus_sum_residual, con), cp.passed and con < 1e-12))
    comm = check_commuting(e2, pi3, cfg)
    dio = dio_kraus_test(e2, cfg.tol)
    rows.append(Row(3, "E2 DIO (commuting + Kraus sums)", "pass", f"{comm.verdict}/{'pass' if dio.passed else 'fail'}",
                    max(comm.max_residual, dio.violation), comm.passed and dio.passed))
    sel = check_selective(e2, pi3, "nongenerating", cfg)
    rows.append(Row(3, f"E2 IO after {cfg.remixes} remixes", "not-witnessed", sel.verdict, sel.max_residual,
                    sel.verdict == "not-witnessed"))

    mp = measure_prepare([PLUS, KET1])
    sel = check_selective(mp, pi2, "nonactivating", cfg)
    rows.append(Row(3, "MP(|+>) selective nonactivating", "witnessed", sel.verdict, sel.max_residual, sel.verdict == "witnessed"))
    ng = check_nongenerating(mp, pi2, cfg)
    rows.append(Row(3, "MP(|+>) nongenerating", "fail", ng.verdict, ng.max_residual, ng.verdict == "fail"))

    g = gio_example()
    sel = check_selective(g, pi3, "commuting", cfg)
    rows.append(Row(3, "GIO channel SIO", "witnessed", sel.verdict, sel.max_residual, sel.verdict == "witnessed"))

    er = erasure_channel()
    sel = check_selective(er, pi2, "commuting", cfg)
    rows.append(Row(3, "erasure SIO", "witnessed", sel.verdict, sel.max_residual, sel.verdict == "witnessed"))
    gt = gio_test(er, cfg.tol)
    wit_ok = gt.witness is not None and np.allclose(gt.witness, _proj(KET1))
    rows.append(Row(3, "erasure GIO fixedness", "fail @|1><1|", "fail" if not gt.fixes_incoherent else "pass",
                    gt.fix_residual, (not gt.fixes_incoherent) and wit_ok))
    return rows


def criterion_4(cfg: CheckConfig) -> list[Row]:
    rows = []
    pa = discord_destroyer((2, 2))
    worst, all_pass, arms_ok = 0.0, True, True
    for u, g, ch in _local_isotropic(cfg, 5):
        v = check_commuting(ch, pa, cfg)
        worst = max(worst, v.max_residual)
        all_pass &= v.passed and v.max_residual <= 1e-8
        hw = embed_local(hw_twirl_decomposition(u, g), 2, "A")
        arms_ok &= check_selective(hw, pa, "commuting", CheckConfig(cfg.tol, cfg.samples, 0, cfg.seed)).verdict == "witnessed"
    rows.append(Row(4, "unitary-isotropic x15 commuting", "pass", "pass" if all_pass else "fail", worst, all_pass))
    rows.append(Row(4, "HW decomposition selective commuting", "witnessed", "witnessed" if arms_ok else "fail", 0.0, arms_ok))

    u = random_unitary(2, make_rng(cfg.seed, 12))
    pm = embed_local(projective_measurement(OrthonormalBasis(u)), 2, "A")
    sel = check_selective(pm, pa, "nongenerating", cfg)
    rows.append(Row(4, "rotated projective selective nongenerating", "witnessed", sel.verdict, sel.max_residual, sel.verdict == "witnessed"))
    c100 = CheckConfig(cfg.tol, min(cfg.samples, 100), cfg.remixes, cfg.seed)
    comm = check_commuting(pm, pa, c100)
    rows.append(Row(4, "rotated projective commuting", "fail <=100 samples", f"{comm.verdict} @{comm.samples}",
                    comm.max_residual, comm.verdict == "fail"))

    p3 = discord_destroyer((3, 2))
    mu = embed_local(qutrit_mu(), 2, "A")
    ng = check_nongenerating(mu, p3, c100)
    cq_wit = ng.witness is not None and bool(is_cq(ng.witness, 1e-8, dims=(3, 2)))
    rows.append(Row(4, "qutrit mu nongenerating", "fail, CQ witness", f"{ng.verdict} @{ng.samples}",
                    ng.max_residual, ng.verdict == "fail" and cq_wit))
    arm_ok = all(check_commuting(KrausChannel((k * np.sqrt(2),)), p3, cfg).passed for k in mu.kraus)
    rows.append(Row(4, "qutrit mu arms commuting", "pass", "pass" if arm_ok else "fail", 0.0, arm_ok))

    xi = discord_mp_xi([KET0, PLUS], 2)
    na = check_nonactivating(xi, pa, cfg)
    rows.append(Row(4, "xi nonactivating", "pass", f"{na.verdict} @{na.samples}", na.max_residual, na.passed and na.max_residual <= 1e-8))
    ng = check_nongenerating(xi, pa, cfg)
    rows.append(Row(4, "xi nongenerating", "fail", ng.verdict, ng.max_residual, ng.verdict == "fail"))
    return rows


def criterion_5(cfg: CheckConfig) -> list[Row]:
    rows = []
    pi3 = dephasing_destroyer(3)
    pa = discord_destroyer((2, 2))
    cases = [(example_e2(), pi3), (dephasing_channel(3), pi3)]
    cases += [(ch.relabel(f"iso(g={g:g})"), pa) for _, g, ch in _local_isotropic(cfg, 1)]
    for ch, lam in cases:
        for m in MEASURES.values():
            r = monotonicity_suite(ch, lam, m, cfg)
            rows.append(Row(5, f"monotone {ch.label} / {m.id}", "0 violations", f"{r.violations} violations",
                            r.max_violation, r.passed and not r.probe))
    return rows


def criterion_6(cfg: CheckConfig) -> list[Row]:
    u = random_unitary(2, make_rng(cfg.seed, 13))
    cases = [(sio_example(), dephasing_destroyer(3)),
             (embed_local(hw_twirl_decomposition(u, 0.7), 2, "A").relabel("HW twirl arms"), discord_destroyer((2, 2)))]
    rows = []
    for ch, lam in cases:
        r = selective_monotonicity_suite(ch, lam, cfg)
        rows.append(Row(6, f"selective monotone {ch.label}", "0 violations", f"{r.violations} violations",
                        r.max_violation, r.passed and r.arms_commute))
    return rows


def criterion_7(cfg: CheckConfig) -> list[Row]:
    rows = []
    for name, lam, d in (("dephasing d=3", dephasing_destroyer(3), 3), ("discord (2,2)", discord_destroyer((2, 2)), 4)):
        rng = make_rng(cfg.seed, 14)
        worst = 0.0
        for k in range(cfg.samples):
            rho = random_density(d, d if k % 2 == 0 else 1 + k % d, rng)
            out = lam(rho)
            worst = max(worst, abs(relative_entropy(rho, out) - (von_neumann_entropy(out) - von_neumann_entropy(rho))))
        rows.append(Row(7, f"pinching identity {name}", "<= 1e-9", f"{worst:.1e}", worst, worst <= 1e-9))
    b = diagonal_discord(bell_state())
    rows.append(Row(7, "Bell diagonal discord", "1.000 bits", f"{b:.12f}", abs(b - 1), abs(b - 1) <= 1e-9))
    return rows


def criterion_8(cfg: CheckConfig) -> list[Row]:
    rep = robustness_demo(0.5, cfg=cfg)
    wit_ok = rep.free_witness is not None and np.allclose(rep.free_witness, rep.rho0)
    rows = [
        Row(8, "depolarizing nonactivating vs dephasing", "pass", rep.versus_dephasing.verdict,
            rep.versus_dephasing.max_residual, rep.versus_dephasing.passed),
        Row(8, "depolarizing nonactivating vs extreme", "fail @rho0", rep.versus_extreme.verdict,
            rep.versus_extreme.max_residual, rep.versus_extreme.verdict == "fail" and wit_ok and rep.image_matches),
    ]
    mismatches = []
    for ch in coherence_catalog():
        d = ch.dim_in
        rho0 = np.zeros((d, d), dtype=complex)
        rho0[0, 0] = 1
        a = check_nongenerating(ch, dephasing_destroyer(d), cfg).verdict
        b = check_nongenerating(ch, extreme_coherence_destroyer(rho0), cfg).verdict
        if a != b:
            mismatches.append(ch.label)
    rows.append(Row(8, "nongenerating dephasing == extreme", "identical", ",".join(mismatches) or "identical",
                    float(len(mismatches)), not mismatches))
    return rows


def criterion_9(cfg: CheckConfig) -> list[Row]:
    pi3 = dephasing_destroyer(3)
    pool = [ch for ch in coherence_catalog() if ch.dim_in == 3]
    rep = closure_suite(pi3, pool, cfg)
    rows = [Row(9, "closure dephasing (composition+convex)", "closed", rep.summary(), 0.0,
                rep.composition_closed and rep.convex_closed)]
    pa = discord_destroyer((2, 2))
    rng = make_rng(cfg.seed, 15)
    local = [embed_local(unitary_channel(random_unitary(2, rng), f"U{k}"), 2, "A") for k in range(2)]
    iso = embed_local(unitary_isotropic(random_unitary(2, rng), 0.5), 2, "A").relabel("iso")
    rep = closure_suite(pa, local + [iso], CheckConfig(cfg.tol, min(cfg.samples, 50), cfg.remixes, cfg.seed))
    rows.append(Row(9, "closure discord (composition; convex reported)", "composition closed", rep.summary(), 0.0,
                    rep.composition_closed))
    return rows


def criterion_10(cfg: CheckConfig) -> list[Row]:
    scan = degeneracy_scan(swap_family, default_grid())
    across = [j for j in scan.jumps if j[0] < 0 <= j[1]]
    ok = len(scan.jumps) == 1 and len(across) == 1 and across[0][2] >= 0.1 and across[0][3] <= 1e-3
    obs = f"jump {across[0][2]:.3f} bits" if across else f"{len(scan.jumps)} flags"
    rows = [Row(10, "swap family jump across eps=0", ">=0.1 bits, 1 flag", obs, across[0][3] if across else 1.0, ok)]
    smooth = degeneracy_scan(smooth_family, default_grid())
    rows.append(Row(10, "smooth family", "no flags", f"{len(smooth.jumps)} flags", 0.0, not smooth.jumps))
    return rows


CRITERIA = {
    1: criterion_1,
    2: criterion_2,
    3: criterion_3,
    4: criterion_4,
    5: criterion_5,
    6: criterion_6,
    7: criterion_7,
    8: criterion_8,
    9: criterion_9,
    10: criterion_10,
}


def run_paper_suite(cfg: CheckConfig = CheckConfig(), only=None) -> tuple[list[Row], float]:
    """Run every catalog check; the last row records total runtime against the 60 s budget."""
    start = time.perf_counter()
    rows = []
    for cid, fn in CRITERIA.items():
        if only is None or cid in only:
            rows.extend(fn(cfg))
    elapsed = time.perf_counter() - start
    if only is None:
        rows.append(Row(10, "suite runtime", f"< {RUNTIME_BUDGET:.0f} s", f"{elapsed:.1f} s", elapsed, elapsed < RUNTIME_BUDGET))
    return rows, elapsed

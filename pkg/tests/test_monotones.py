import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rdmaps.channels import (
    dephasing_channel,
    embed_local,
    example_e1,
    example_e2,
    hw_twirl_decomposition,
    partial_depolarizing,
    unitary_channel,
    unitary_isotropic,
)
from rdmaps.config import CheckConfig
from rdmaps.destroyers import dephasing_destroyer, discord_destroyer
from rdmaps.errors import DimensionMismatch
from rdmaps.monotones import (
    RELATIVE_ENTROPY,
    TRACE_DISTANCE,
    default_grid,
    degeneracy_scan,
    diagonal_discord,
    diagonal_discord_report,
    dtilde,
    measure_by_name,
    monotonicity_suite,
    relative_entropy,
    selective_monotonicity_suite,
    smooth_family,
    swap_family,
    von_neumann_entropy,
)
from rdmaps.numerics import make_rng, random_density, random_unitary
from rdmaps.states import OrthonormalBasis, bell_state, make_cq, random_cq

PLUS = np.array([1, 1]) / np.sqrt(2)
FAST = CheckConfig(samples=60)


def _proj(v):
    v = np.asarray(v, dtype=complex)
    return np.outer(v, v.conj())


def _entropy_oracle(rho):
    w = np.linalg.eigvalsh(rho)
    w = w[w > 1e-15]
    return float(-np.sum(w * np.log2(w)))


def test_relative_entropy_basic_values():
    rho = random_density(3, rng=make_rng(0))
    assert relative_entropy(rho, rho) == pytest.approx(0.0, abs=1e-12)
    assert relative_entropy(np.diag([1, 0]), np.eye(2) / 2) == pytest.approx(1.0, abs=1e-12)
    assert relative_entropy(np.diag([1, 0]), np.diag([0, 1])) == math.inf


def test_relative_entropy_dimension_check():
    with pytest.raises(DimensionMismatch):
        relative_entropy(np.eye(2) / 2, np.eye(3) / 3)


def test_entropy_of_maximally_mixed():
    assert von_neumann_entropy(np.eye(4) / 4) == pytest.approx(2.0)


def test_measure_lookup():
    assert measure_by_name("trace-distance") is TRACE_DISTANCE
    with pytest.raises(ValueError):
        measure_by_name("fidelity")


@pytest.mark.parametrize("measure", [RELATIVE_ENTROPY, TRACE_DISTANCE], ids=lambda m: m.id)
def test_data_processing(measure):
    rng = make_rng(1)
    channels = [dephasing_channel(2), example_e1(), partial_depolarizing(2, 0.3),
                unitary_isotropic(random_unitary(2, rng), 0.7)]
    for k in range(50):
        rho, sigma = random_density(2, rng=rng), random_density(2, rng=rng)
        ch = channels[k % len(channels)]
        assert measure(ch(rho), ch(sigma)) <= measure(rho, sigma) + 1e-9


def test_dtilde_values():
    pi = dephasing_destroyer(2)
    assert dtilde(_proj(PLUS), pi) == pytest.approx(1.0, abs=1e-12)
    assert dtilde(np.diag([0.3, 0.7]), pi) == 0.0
    assert dtilde(_proj(PLUS), pi, TRACE_DISTANCE) == pytest.approx(0.5)


def test_dtilde_dimension_check():
    with pytest.raises(DimensionMismatch):
        dtilde(np.eye(3) / 3, dephasing_destroyer(2))


def test_dtilde_zero_iff_free():
    pi = dephasing_destroyer(3)
    rng = make_rng(2)
    for _ in range(20):
        rho = random_density(3, rng=rng)
        assert dtilde(rho, pi) > 1e-7
        assert dtilde(pi(rho), pi) <= 1e-12


def test_bell_diagonal_discord_is_one_bit():
    assert diagonal_discord(bell_state()) == pytest.approx(1.0, abs=1e-9)


def test_bell_value_independent_of_local_basis():
    # Every local basis gives 1 bit for the Bell state.
    rho = bell_state().matrix
    for seed in range(5):
        u = random_unitary(2, make_rng(seed))
        deph = sum(np.kron(_proj(u[:, i]), np.eye(2)) @ rho @ np.kron(_proj(u[:, i]), np.eye(2)) for i in range(2))
        assert _entropy_oracle(deph) - _entropy_oracle(rho) == pytest.approx(1.0, abs=1e-12)


def test_cq_state_has_zero_discord():
    assert diagonal_discord(random_cq((2, 3), make_rng(4))) == pytest.approx(0.0, abs=1e-9)


def test_discord_of_nonorthogonal_cq_mixture():
    rho = 0.5 * (np.kron(_proj([1, 0]), _proj([1, 0])) + np.kron(_proj(PLUS), _proj([0, 1])))
    # Oracle: the marginal eigenbasis is the rotation by pi/8; entropies from numpy.
    c, s = np.cos(np.pi / 8), np.sin(np.pi / 8)
    deph = sum(np.kron(_proj(v), np.eye(2)) @ rho @ np.kron(_proj(v), np.eye(2))
               for v in (np.array([c, s]), np.array([-s, c])))
    oracle = _entropy_oracle(deph) - _entropy_oracle(rho)
    assert oracle == pytest.approx(0.6008760366928558, abs=1e-12)
    assert diagonal_discord(rho, (2, 2)) == pytest.approx(oracle, abs=1e-10)


def test_discord_needs_dims():
    with pytest.raises(DimensionMismatch):
        diagonal_discord(np.eye(4) / 4)


def test_discord_report_minimizes_over_degenerate_block():
    rep = diagonal_discord_report(bell_state(), basis_samples=10)
    assert rep.degenerate
    assert rep.minimized == pytest.approx(1.0, abs=1e-9)
    rho = make_cq([0.5, 0.5], OrthonormalBasis(random_unitary(2, make_rng(5))), [np.diag([1, 0]), np.diag([0, 1])])
    assert diagonal_discord_report(rho, basis_samples=5).value == pytest.approx(0.0, abs=1e-9)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from([(2, 2), (2, 3), (3, 2)]))
def test_pinching_identity_discord(seed, dims):
    rho = random_density(dims[0] * dims[1], rng=make_rng(seed))
    lam = discord_destroyer(dims)
    out = lam(rho)
    assert abs(relative_entropy(rho, out) - (von_neumann_entropy(out) - von_neumann_entropy(rho))) <= 1e-9


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(2, 4))
def test_pinching_identity_dephasing(seed, d):
    rho = random_density(d, rng=make_rng(seed))
    out = np.diag(np.diag(rho))
    assert abs(relative_entropy(rho, out) - (von_neumann_entropy(out) - von_neumann_entropy(rho))) <= 1e-9


@pytest.mark.parametrize("measure", [RELATIVE_ENTROPY, TRACE_DISTANCE], ids=lambda m: m.id)
def test_monotonicity_under_commuting_channels(measure):
    assert monotonicity_suite(dephasing_channel(3), dephasing_destroyer(3), measure, FAST).passed
    assert monotonicity_suite(example_e2(), dephasing_destroyer(3), measure, FAST).passed
    ch = embed_local(unitary_isotropic(random_unitary(2, make_rng(3)), 0.4), 2, "A")
    rep = monotonicity_suite(ch, discord_destroyer((2, 2)), measure, FAST)
    assert rep.passed and not rep.probe


def test_monotonicity_probe_flags_violation_for_noncommuting_channel():
    # A Hadamard turns incoherent inputs into maximally coherent outputs.
    h = np.array([[1, 1], [1, -1]]) / np.sqrt(2)
    rep = monotonicity_suite(unitary_channel(h), dephasing_destroyer(2), RELATIVE_ENTROPY, FAST)
    assert rep.probe
    assert rep.violations > 0


def test_selective_monotonicity():
    pi = dephasing_destroyer(2)
    rep = selective_monotonicity_suite(dephasing_channel(2), pi, FAST)
    assert rep.passed and rep.arms_commute
    hw = embed_local(hw_twirl_decomposition(random_unitary(2, make_rng(6)), 0.9), 2, "A")
    rep = selective_monotonicity_suite(hw, discord_destroyer((2, 2)), FAST)
    assert rep.passed and rep.arms_commute


def test_selective_monotonicity_single_unitary_arm():
    u = unitary_channel(np.diag([1, 1j]))
    assert selective_monotonicity_suite(u, dephasing_destroyer(2), FAST).passed


def test_swap_family_states_are_valid():
    for eps in default_grid():
        rho = swap_family(eps)
        assert np.trace(rho).real == pytest.approx(1.0)
        assert np.linalg.eigvalsh(rho).min() > 0


def test_swap_family_jump():
    scan = degeneracy_scan(swap_family, default_grid())
    assert len(scan.jumps) == 1
    left, right, delta, move = scan.jumps[0]
    assert left < 0 <= right
    # Oracle value just below the crossing: dephasing in |+>,|-> computed directly.
    assert delta == pytest.approx(0.5310046756650364, abs=1e-9)
    assert move <= 1e-3


def test_smooth_family_has_no_flags():
    assert not degeneracy_scan(smooth_family, default_grid()).jumps


def test_scan_with_constant_nondegenerate_marginal():
    base = random_density(4, rng=make_rng(7))

    def family(eps):
        u = np.kron(np.array([[np.cos(eps), -np.sin(eps)], [np.sin(eps), np.cos(eps)]]), np.eye(2))
        return u @ base @ u.T

    scan = degeneracy_scan(family, default_grid(-0.5, 0.5, 0.05))
    assert not scan.jumps
    assert np.ptp(scan.values) < 1e-9


def test_scan_csv_columns():
    csv_text = degeneracy_scan(swap_family, default_grid()).to_csv()
    lines = csv_text.strip().splitlines()
    assert lines[0] == "epsilon,value_bits,jump_flag"
    assert len(lines) == 22
    assert lines[11].endswith(",1")

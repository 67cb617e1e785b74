"""Tests for the Monte Carlo G-computation engine."""

from __future__ import annotations

import numpy as np
import pytest

from survgc.dgp import ExactStack, preset
from survgc.gcomp import (
    EstimateConfig,
    Regime,
    chi,
    estimate_sace,
    exposed_at,
    mc_integrate,
    never_exposed,
    phi,
    resolution_factor,
    sample_pseudo,
    tau_draw,
)
from survgc.rng import stream
from survgc.sensitivity import SensitivityDraw, point_mass

from conftest import make_cohort


class FlatStack:
    """Constant-probability stack with a noiseless wave-valued outcome mean."""

    def __init__(
        self,
        last_wave: int = 1,
        n_levels: int = 2,
        pi_s: float = 1.0,
        pi_r: float = 1.0,
        pi_z: float = 0.5,
        pi_w: float = 0.5,
        z_slope: float = 0.0,
    ):
        self.last_wave = last_wave
        self.n_levels = n_levels
        self.pi = {"S": pi_s, "R": pi_r, "Z": pi_z, "W": pi_w}
        self.z_slope = z_slope

    def prob(self, model: str, wave: int, matrix: np.ndarray) -> np.ndarray:
        return np.full(matrix.shape[0], self.pi[model])

    def mean_y(self, wave: int, matrix: np.ndarray) -> np.ndarray:
        # Current exposure is the last column of the z block; locate it
        # by the known layout: y lags (wave cols), then z_0..z_wave.
        z_now = matrix[:, wave + wave] if wave >= 1 else np.zeros(matrix.shape[0])
        return float(wave) + self.z_slope * z_now

    def sigma_y(self, wave: int) -> float:
        return 0.0

    def draw_x0(self, n: int, rng: np.random.Generator) -> np.ndarray:
        return rng.choice(self.n_levels, size=n)


def _zero_sens(last_wave: int) -> SensitivityDraw:
    return point_mass(last_wave)


# ---------------------------------------------------------------------------
# Regimes


def test_regime_values():
    arm = exposed_at(2)
    assert [arm.value_at(k) for k in range(4)] == [0, 0, 1, 1]
    assert np.array_equal(arm.values(3), [0.0, 0.0, 1.0, 1.0])
    never = never_exposed()
    assert [never.value_at(k) for k in range(3)] == [0, 0, 0]
    assert not never.is_exposed_arm and arm.is_exposed_arm
    with pytest.raises(ValueError, match="onset"):
        Regime(onset=0)


# ---------------------------------------------------------------------------
# Pseudo sampling


def test_pseudo_full_retention():
    stack = FlatStack(last_wave=2)
    pseudo = sample_pseudo(stack, never_exposed(), _zero_sens(2), 64, stream(1, 3))
    assert np.all(pseudo.r == 1)
    assert np.all(pseudo.s == 1)
    assert np.all(pseudo.first_missing == -1)
    # Noiseless outcome mean equals the wave index.
    for k in range(3):
        assert np.allclose(pseudo.y[:, k], float(k), atol=1e-12)


def test_pseudo_gamma_shift_first_and_all():
    stack = FlatStack(last_wave=2, pi_r=0.0)  # everyone unobserved from wave 1
    sens = point_mass(2, gamma=-0.75)
    pseudo = sample_pseudo(stack, never_exposed(), sens, 50, stream(2, 3))
    assert np.all(pseudo.first_missing == 1)
    assert np.allclose(pseudo.y[:, 1], 1.0 - 0.75, atol=1e-12)
    assert np.allclose(pseudo.y[:, 2], 2.0, atol=1e-12)  # only the first miss shifts
    pseudo_all = sample_pseudo(
        stack, never_exposed(), sens, 50, stream(2, 3), gamma_mode="all"
    )
    assert np.allclose(pseudo_all.y[:, 1], 0.25, atol=1e-12)
    assert np.allclose(pseudo_all.y[:, 2], 1.25, atol=1e-12)


def test_pseudo_paths_continue_past_death():
    cfg = preset("survival-selection")
    stack = ExactStack(cfg)
    sens = _zero_sens(1)
    pseudo = sample_pseudo(stack, never_exposed(), sens, 4000, stream(3, 3))
    assert np.any(pseudo.s[:, 1] == 0)
    assert np.all(np.isfinite(pseudo.y))
    assert np.all(np.isfinite(pseudo.w))
    assert np.all(pseudo.r <= pseudo.s)


def test_pseudo_deterministic():
    stack = FlatStack(last_wave=1, pi_r=0.8, pi_s=0.9)
    a = sample_pseudo(stack, never_exposed(), _zero_sens(1), 100, stream(7, 3))
    b = sample_pseudo(stack, never_exposed(), _zero_sens(1), 100, stream(7, 3))
    assert np.array_equal(a.y, b.y)
    assert np.array_equal(a.r, b.r)
    assert np.array_equal(a.x0, b.x0)


def test_pseudo_rejects_bad_args():
    stack = FlatStack()
    with pytest.raises(ValueError, match=">= 1"):
        sample_pseudo(stack, never_exposed(), _zero_sens(1), 0, stream(1, 3))
    with pytest.raises(ValueError, match="gamma_mode"):
        sample_pseudo(stack, never_exposed(), _zero_sens(1), 5, stream(1, 3), gamma_mode="x")


# ---------------------------------------------------------------------------
# Resolution factor and chi


def test_resolution_factor_frozen_values():
    # pi = 2/5, A = 27/37, nu = 1/5.
    pi, a, nu = 0.4, 27.0 / 37.0, 0.2
    assert resolution_factor(pi, a, 1, nu, "FirstPrinciples") == pytest.approx(
        9.0 / 14.0, abs=1e-12
    )
    assert resolution_factor(pi, a, 0, nu, "FirstPrinciples") == pytest.approx(
        81.0 / 101.0, abs=1e-12
    )
    # The A3 denominator cancels the arm value entirely.
    assert resolution_factor(pi, a, 1, nu, "A3") == pytest.approx(27.0 / 29.0, abs=1e-12)
    assert resolution_factor(pi, a, 0, nu, "A3") == pytest.approx(27.0 / 29.0, abs=1e-12)


def test_resolution_factor_zero_excess():
    # Without excess the A3 variant degenerates to 1 while the
    # first-principles variant returns the no-information survival A.
    for value in (0, 1):
        assert resolution_factor(0.4, 0.3, value, 0.0, "A3") == pytest.approx(1.0, abs=1e-12)
        assert resolution_factor(0.4, 0.3, value, 0.0, "FirstPrinciples") == pytest.approx(
            0.3, abs=1e-12
        )
    with pytest.raises(ValueError, match="variant"):
        resolution_factor(0.4, 0.3, 1, 0.0, "other")


def test_resolution_factor_caps_excess():
    # nu above the admissible bound is capped, so the factor matches
    # the bound value exactly.
    capped = resolution_factor(0.4, 0.3, 1, 0.99, "FirstPrinciples")
    bound = resolution_factor(0.4, 0.3, 1, 0.6, "FirstPrinciples")
    assert capped == pytest.approx(bound, abs=1e-15)


def test_chi_identity_under_full_retention():
    stack = FlatStack(last_wave=2)
    sens = point_mass(2, nu=0.3)
    pseudo = sample_pseudo(stack, never_exposed(), sens, 40, stream(4, 3))
    for j in (1, 2):
        for regime in (exposed_at(j), never_exposed()):
            assert np.all(chi(stack, pseudo, regime, sens, j) == 1.0)


def test_chi_frozen_dropout_factor():
    stack = FlatStack(last_wave=1, pi_s=0.9, pi_r=0.7, pi_z=0.4)
    sens = point_mass(1, nu=0.2)
    pseudo = sample_pseudo(stack, never_exposed(), sens, 4000, stream(5, 3))
    dropped = pseudo.r[:, 1] == 0
    assert np.any(dropped)
    # A = (0.3*0.9) / (0.3*0.9 + 0.1) = 27/37.
    c_fp = chi(stack, pseudo, exposed_at(1), sens, 1, "FirstPrinciples")
    assert np.allclose(c_fp[dropped], 9.0 / 14.0, atol=1e-12)
    assert np.all(c_fp[~dropped] == 1.0)
    c_fp0 = chi(stack, pseudo, never_exposed(), sens, 1, "FirstPrinciples")
    assert np.allclose(c_fp0[dropped], 81.0 / 101.0, atol=1e-12)
    c_a3 = chi(stack, pseudo, exposed_at(1), sens, 1, "A3")
    assert np.allclose(c_a3[dropped], 27.0 / 29.0, atol=1e-12)


def test_phi_and_chi_reject_foreign_regime():
    stack = FlatStack(last_wave=2)
    pseudo = sample_pseudo(stack, never_exposed(), _zero_sens(2), 10, stream(6, 3))
    with pytest.raises(ValueError, match="evaluation wave"):
        phi(stack, pseudo, exposed_at(1), _zero_sens(2), 2)
    with pytest.raises(ValueError, match="evaluation wave"):
        chi(stack, pseudo, exposed_at(1), _zero_sens(2), 2)
    with pytest.raises(ValueError, match="wave must be"):
        phi(stack, pseudo, exposed_at(1), _zero_sens(2), 0)


# ---------------------------------------------------------------------------
# phi


def test_phi_exposure_and_confounding_terms():
    stack = FlatStack(last_wave=1, pi_z=0.4, z_slope=2.0)
    sens = point_mass(1, xi=0.5)
    pseudo = sample_pseudo(stack, never_exposed(), sens, 30, stream(8, 3))
    # Exposed arm: mu = 1 + 2, correction -c(1-pi) with c = -xi.
    val_z = phi(stack, pseudo, exposed_at(1), sens, 1)
    assert np.allclose(val_z, 3.0 + 0.5 * (1 - 0.4), atol=1e-12)
    # Never arm: mu = 1, c = +xi, pi_val = 1 - pi_z.
    val_n = phi(stack, pseudo, never_exposed(), sens, 1)
    assert np.allclose(val_n, 1.0 - 0.5 * (1 - 0.6), atol=1e-12)


def test_phi_gamma_indicator_modes():
    stack = FlatStack(last_wave=2, pi_r=0.0)
    sens = point_mass(2, gamma=-1.0)
    pseudo = sample_pseudo(stack, never_exposed(), sens, 20, stream(9, 3))
    # Every row's first unobserved wave is 1.
    v1 = phi(stack, pseudo, never_exposed(), sens, 1)
    v2 = phi(stack, pseudo, never_exposed(), sens, 2)
    assert np.allclose(v1, 1.0 - 1.0, atol=1e-12)
    assert np.allclose(v2, 2.0, atol=1e-12)
    v2_all = phi(stack, pseudo, never_exposed(), sens, 2, gamma_mode="all")
    assert np.allclose(v2_all, 1.0, atol=1e-12)


# ---------------------------------------------------------------------------
# Monte Carlo integration


def test_mc_integrate_frozen_example():
    p_hat, mu_hat = mc_integrate(np.array([5.0, 7.0]), np.array([1.0, 0.0]))
    assert p_hat == pytest.approx(0.5, abs=1e-15)
    assert mu_hat == pytest.approx(2.5, abs=1e-15)


def test_mc_integrate_block_invariance():
    rng = np.random.default_rng(11)
    phi_vec = rng.normal(size=10_007)
    chi_vec = rng.random(10_007)
    ref = mc_integrate(phi_vec, chi_vec, n_blocks=1)
    for blocks in (2, 3, 7, 25, 100):
        got = mc_integrate(phi_vec, chi_vec, n_blocks=blocks)
        assert got[0] == pytest.approx(ref[0], abs=1e-12)
        assert got[1] == pytest.approx(ref[1], abs=1e-12)


def test_mc_integrate_errors():
    with pytest.raises(ValueError, match="empty"):
        mc_integrate(np.array([]), np.array([]))
    with pytest.raises(ValueError, match="lengths differ"):
        mc_integrate(np.ones(3), np.ones(4))
    with pytest.raises(ValueError, match="n_blocks"):
        mc_integrate(np.ones(3), np.ones(3), n_blocks=4)


# ---------------------------------------------------------------------------
# tau assembly


def test_tau_draw_frozen_example():
    sens = point_mass(1, delta=1.0)
    tau = tau_draw(
        mu_z=np.array([0.0, 3.0]),
        p_z=np.array([0.0, 0.5]),
        mu_zp=np.array([0.0, 2.0]),
        p_zp=np.array([0.0, 0.8]),
        sens=sens,
    )
    assert tau == pytest.approx(3.125, abs=1e-12)


def test_tau_draw_delta_term_vanishes_under_equal_survival():
    mu_z = np.array([0.0, 3.0, 1.0])
    p = np.array([0.0, 0.5, 0.4])
    mu_zp = np.array([0.0, 2.0, 0.5])
    with_delta = tau_draw(mu_z, p, mu_zp, p, point_mass(2, delta=5.0))
    without = tau_draw(mu_z, p, mu_zp, p, point_mass(2, delta=0.0))
    assert with_delta == pytest.approx(without, abs=1e-15)


def test_tau_draw_weights_sum_and_pooling():
    # Two waves with equal contrasts pool to the same value for any
    # survival profile.
    sens = point_mass(2)
    tau = tau_draw(
        mu_z=np.array([0.0, 2.0 * 0.5, 2.0 * 0.125]),
        p_z=np.array([0.0, 0.5, 0.125]),
        mu_zp=np.array([0.0, 1.0 * 0.6, 1.0 * 0.25]),
        p_zp=np.array([0.0, 0.6, 0.25]),
        sens=sens,
    )
    assert tau == pytest.approx(1.0, abs=1e-12)


def test_tau_draw_degenerate_survival():
    sens = point_mass(1)
    with pytest.raises(ValueError, match="degenerate survival"):
        tau_draw(np.array([0.0, 1.0]), np.array([0.0, 0.0]), np.array([0.0, 1.0]), np.array([0.0, 0.5]), sens)


# ---------------------------------------------------------------------------
# EstimateConfig


def test_estimate_config_defaults_and_validation():
    cfg = EstimateConfig()
    assert cfg.n_chains == 204
    assert cfg.n_keep_per_chain == 10
    assert cfg.n_burn == 1000
    assert cfg.n_pseudo == 25_000
    assert cfg.n_blocks == 25
    assert cfg.chi_variant == "A3"
    assert cfg.gamma_mode == "first"
    with pytest.raises(ValueError, match="chi_variant"):
        EstimateConfig(chi_variant="other")
    with pytest.raises(ValueError, match="n_chains"):
        EstimateConfig(n_chains=0)
    with pytest.raises(ValueError, match="n_burn"):
        EstimateConfig(n_burn=-1)


# ---------------------------------------------------------------------------
# End-to-end estimation (small scale)


def _toy_config(**overrides) -> EstimateConfig:
    base = dict(
        master_seed=17,
        n_chains=2,
        n_keep_per_chain=2,
        n_burn=10,
        n_pseudo=400,
        n_blocks=4,
        sensitivity=point_mass(1, gamma=-0.2),
    )
    base.update(overrides)
    return EstimateConfig(**base)


def test_estimate_sace_shapes_and_determinism():
    ds = make_cohort(n=80, last_wave=1, seed=21)
    res1 = estimate_sace(ds, _toy_config())
    res2 = estimate_sace(ds, _toy_config())
    assert res1.n_draws == 4
    assert res1.last_wave == 1
    assert np.array_equal(res1.chain_index, [0, 0, 1, 1])
    assert np.all(np.isfinite(res1.tau))
    assert np.allclose(np.sum(res1.weights[:, 1:], axis=1), 1.0, atol=1e-12)
    assert np.array_equal(res1.tau, res2.tau)  # bit-identical rerun
    assert np.array_equal(res1.p_z, res2.p_z)
    # Point-mass sensitivity is recorded per draw.
    assert np.allclose(res1.sens_gamma[:, 1], -0.2, atol=1e-15)
    assert np.allclose(res1.sens_xi, 0.0, atol=1e-15)


def test_estimate_sace_block_invariance():
    ds = make_cohort(n=80, last_wave=1, seed=22)
    res_a = estimate_sace(ds, _toy_config(n_blocks=1))
    res_b = estimate_sace(ds, _toy_config(n_blocks=8))
    assert np.allclose(res_a.tau, res_b.tau, atol=1e-12)


def test_estimate_sace_worker_count_invariance():
    ds = make_cohort(n=80, last_wave=1, seed=26)
    serial = estimate_sace(ds, _toy_config(n_workers=1))
    pooled = estimate_sace(ds, _toy_config(n_workers=2))
    assert np.array_equal(serial.tau, pooled.tau)
    assert np.array_equal(serial.p_z, pooled.p_z)
    assert np.array_equal(serial.weights, pooled.weights)


def test_estimate_sace_seed_sensitivity_and_sampled_sensitivity():
    ds = make_cohort(n=80, last_wave=1, seed=23)
    res_a = estimate_sace(ds, _toy_config(master_seed=1, sensitivity=None))
    res_b = estimate_sace(ds, _toy_config(master_seed=2, sensitivity=None))
    assert not np.array_equal(res_a.tau, res_b.tau)
    # Sampled sensitivity draws vary across draws and respect signs.
    assert np.all(res_a.sens_gamma[:, 1] <= 0)
    assert np.all(res_a.sens_nu[:, 1] >= 0)
    assert np.all(res_a.sens_delta[:, 1] >= 0)
    assert np.ptp(res_a.sens_xi[:, 1]) > 0


def test_estimate_sace_rejects_bad_inputs():
    ds = make_cohort(n=40, last_wave=1, seed=24)
    with pytest.raises(ValueError, match="waves"):
        estimate_sace(ds, _toy_config(sensitivity=point_mass(3)))
    bad = make_cohort(n=40, last_wave=1, seed=25)
    bad.z[:, 0] = 1.0  # exposure at wave 0 violates the cohort contract
    with pytest.raises(ValueError, match="validation"):
        estimate_sace(bad, _toy_config())

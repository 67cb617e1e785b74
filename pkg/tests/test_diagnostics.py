"""Tests for fit scoring, posterior summaries, and chain agreement."""

from __future__ import annotations

import numpy as np
import pytest

from survgc.baselines import GlmConfig, fit_glm_stack
from survgc.cohort import CohortDataset
from survgc.diagnostics import lpml, summarize, trace_stats
from survgc.obsmodels import fit_stack
from survgc import bart

from conftest import make_cohort


class _DegenerateStack:
    """Zero-variance outcome model: densities blow up, lpml must refuse."""

    last_wave = 1
    n_levels = 1
    pi_x0 = np.array([1.0])

    def mean_y(self, wave, X):
        return np.zeros(X.shape[0])

    def prob(self, factor, wave, X):
        return np.full(X.shape[0], 0.5)

    def sigma_y(self, wave):
        return 0.0

    def draw_x0(self, n, rng):
        return np.zeros(n, dtype=np.int64)


# ---------------------------------------------------------------------------
# summarize


def test_summarize_frozen_percentiles():
    s = summarize(np.arange(1.0, 101.0))
    assert s.mean == pytest.approx(50.5)
    assert s.q2_5 == pytest.approx(3.475, abs=1e-12)
    assert s.q97_5 == pytest.approx(97.525, abs=1e-12)
    assert s.q2_5 <= s.q97_5


def test_summarize_degenerate_and_errors():
    s = summarize(np.full(7, 3.25))
    assert s.sd == 0.0
    assert s.q2_5 == s.q97_5 == 3.25
    single = summarize(np.array([1.5]))
    assert single.sd == 0.0 and single.mean == 1.5
    with pytest.raises(ValueError, match="empty"):
        summarize(np.array([]))


# ---------------------------------------------------------------------------
# trace_stats


def test_trace_stats_agreeing_chains():
    rng = np.random.default_rng(0)
    base = rng.standard_normal(400)
    stat = trace_stats(np.vstack([base, base, base]))
    assert abs(stat.psr - 1.0) < 0.05
    assert not stat.flagged
    assert stat.n_sequences == 6


def test_trace_stats_disjoint_chains_flagged():
    rng = np.random.default_rng(1)
    a = rng.standard_normal(200)
    b = rng.standard_normal(200) + 50.0
    stat = trace_stats(np.vstack([a, b]))
    assert stat.psr > 5.0
    assert stat.flagged


def test_trace_stats_single_chain_and_constant():
    rng = np.random.default_rng(2)
    stat = trace_stats(rng.standard_normal(300))
    assert stat.n_sequences == 2
    assert abs(stat.psr - 1.0) < 0.2
    const = trace_stats(np.ones((2, 50)))
    assert const.psr == 1.0 and not const.flagged
    with pytest.raises(ValueError, match="at least 4"):
        trace_stats(np.ones((2, 3)))


# ---------------------------------------------------------------------------
# lpml


def test_lpml_report_on_glm_stack():
    ds = make_cohort(n=100, last_wave=1, seed=41)
    stacks = fit_glm_stack(ds, GlmConfig(n_burn=30, n_keep=4), master_seed=2)
    report = lpml(stacks, ds)
    assert report.n_draws == 4
    assert np.isfinite(report.total)
    assert report.log_cpo.shape == (100,)
    assert np.all(report.cpo > 0)
    assert set(report.factor_totals) == {"Y", "Z", "W", "R", "S", "x0"}
    assert all(np.isfinite(v) for v in report.factor_totals.values())
    # Permutation over draws leaves the harmonic means unchanged.
    again = lpml(list(reversed(stacks)), ds)
    assert again.total == pytest.approx(report.total, rel=1e-12)


def test_lpml_on_tree_stack():
    ds = make_cohort(n=60, last_wave=1, seed=42)
    stacks = fit_stack(ds, bart.BartConfig(n_burn=10, n_keep=3), master_seed=3)
    report = lpml(stacks, ds)
    assert np.isfinite(report.total)
    assert report.total == pytest.approx(float(np.sum(report.log_cpo)), rel=1e-12)


def test_lpml_requires_two_draws():
    ds = make_cohort(n=50, last_wave=1, seed=43)
    stacks = fit_glm_stack(ds, GlmConfig(n_burn=5, n_keep=1), master_seed=4)
    with pytest.raises(ValueError, match="need >= 2 draws"):
        lpml(stacks, ds)


def test_lpml_doubles_under_duplication():
    ds = make_cohort(n=80, last_wave=1, seed=44)
    stacks = fit_glm_stack(ds, GlmConfig(n_burn=20, n_keep=3), master_seed=5)
    dup = CohortDataset(
        y=np.concatenate([ds.y, ds.y]),
        z=np.concatenate([ds.z, ds.z]),
        w=np.concatenate([ds.w, ds.w]),
        r=np.concatenate([ds.r, ds.r]),
        s=np.concatenate([ds.s, ds.s]),
        x0=np.concatenate([ds.x0, ds.x0]),
        n_levels=ds.n_levels,
    )
    single = lpml(stacks, ds)
    doubled = lpml(stacks, dup)
    assert doubled.total == pytest.approx(2.0 * single.total, rel=1e-12)
    assert np.allclose(doubled.log_cpo[:80], single.log_cpo, atol=1e-12)


def test_lpml_record_permutation_invariance():
    ds = make_cohort(n=70, last_wave=1, seed=45)
    stacks = fit_glm_stack(ds, GlmConfig(n_burn=20, n_keep=3), master_seed=6)
    perm = np.random.default_rng(7).permutation(70)
    shuffled = CohortDataset(
        y=ds.y[perm],
        z=ds.z[perm],
        w=ds.w[perm],
        r=ds.r[perm],
        s=ds.s[perm],
        x0=ds.x0[perm],
        n_levels=ds.n_levels,
    )
    a = lpml(stacks, ds)
    b = lpml(stacks, shuffled)
    assert b.total == pytest.approx(a.total, rel=1e-10)
    assert np.allclose(np.sort(b.log_cpo), np.sort(a.log_cpo), atol=1e-10)


def test_lpml_nonfinite_likelihood_names_factor():
    ds = make_cohort(n=30, last_wave=1, seed=46)
    stacks = [_DegenerateStack(), _DegenerateStack()]
    with pytest.raises(ValueError, match="factor Y at wave 0"):
        lpml(stacks, ds)

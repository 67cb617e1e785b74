"""Survivor-average effect estimation by Monte Carlo G-computation.

For each posterior draw of the observed-data models the engine simulates
a pseudo cohort under the never-exposed history, evaluates per-wave
survivor-weighted outcome integrals under both exposure arms (newly
exposed at the evaluation wave versus never exposed), corrects them with
the sensitivity parameters, and assembles one posterior sample of the
aggregated effect

``tau = sum_j w_j [ mu_z/p_z - mu_z'/p_z' - delta_j (1 - p_z/p_z') ]``

with weights ``w_j = p_z_j / sum_k p_z_k``.  Truncation by death enters
through the survivor probabilities ``p``; non-ignorable dropout through
the per-wave retention factors ``chi``; unmeasured confounding, outcome
shifts among dropouts, strata outcome gaps, and non-survivor exposure
excess through ``xi``, ``gamma``, ``delta``, and ``nu``.

Both exposure arms share one simulated pseudo cohort: with exposure
onset at the evaluation wave, the two arms' histories coincide through
the previous wave, and the arms differ only in the evaluation-wave
exposure value entering the outcome mean, the exposure-probability
terms, and the sign of the confounding and excess-exposure corrections.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from . import bart
from .cohort import CohortDataset, validate_cohort
from .obsmodels import fit_stack
from .rng import stream
from .sensitivity import (
    SensitivityBounds,
    SensitivityDraw,
    compute_bounds,
    sample_sensitivity,
)

__all__ = [
    "PROB_FLOOR",
    "EstimateConfig",
    "PseudoSample",
    "Regime",
    "SaceResult",
    "chi",
    "estimate_sace",
    "exposed_at",
    "mc_integrate",
    "never_exposed",
    "phi",
    "resolution_factor",
    "sample_pseudo",
    "tau_draw",
]

PROB_FLOOR = 1e-12

_DOMAIN_PSEUDO = 3
_PURPOSE_SENS = 0
_PURPOSE_PSEUDO = 1


@dataclass(frozen=True)
class Regime:
    """A monotone exposure regime: unexposed, then exposed from one wave on.

    ``onset`` is the first exposed wave (1-based), or ``None`` for the
    never-exposed regime.  Wave-``j`` contrasts use onset ``j`` against
    never exposed.
    """

    onset: int | None

    def __post_init__(self) -> None:
        if self.onset is not None and self.onset < 1:
            raise ValueError("exposure onset must be >= 1 (wave 0 is unexposed)")

    def value_at(self, wave: int) -> int:
        """Exposure value prescribed at ``wave`` (0 or 1)."""
        return int(self.onset is not None and wave >= self.onset)

    def values(self, through_wave: int) -> np.ndarray:
        """Exposure vector ``z_0..z_through_wave`` under this regime."""
        return np.array([self.value_at(k) for k in range(through_wave + 1)], dtype=float)

    @property
    def is_exposed_arm(self) -> bool:
        return self.onset is not None


def exposed_at(wave: int) -> Regime:
    """Regime newly exposed at ``wave`` (exposed from there on)."""
    return Regime(onset=wave)


def never_exposed() -> Regime:
    """The all-zero exposure regime."""
    return Regime(onset=None)


@dataclass
class PseudoSample:
    """Simulated cohort under a fixed regime for one model-stack draw.

    Outcome and covariate paths continue for every pseudo-individual
    (including past simulated death) because the survivor-branch models
    define them at every history and the weighting factors evaluate
    them there; death enters only by forcing non-retention.
    """

    regime: Regime
    x0: np.ndarray
    y: np.ndarray
    w: np.ndarray
    r: np.ndarray
    s: np.ndarray
    first_missing: np.ndarray  # first wave with r*=0, or -1 if fully retained

    @property
    def n(self) -> int:
        return self.x0.size

    @property
    def last_wave(self) -> int:
        return self.y.shape[1] - 1


def _onehot(x0: np.ndarray, n_levels: int) -> np.ndarray:
    out = np.zeros((x0.size, n_levels))
    out[np.arange(x0.size), x0.astype(int)] = 1.0
    return out


def _pseudo_features(
    pseudo: PseudoSample, regime: Regime, factor: str, wave: int, n_levels: int
) -> np.ndarray:
    """History matrix in the factor's training column order."""
    j = wave
    if factor == "Y":
        z_hi, w_hi = j + 1, j + 1
    elif factor == "Z":
        z_hi, w_hi = j, j + 1
    else:
        z_hi, w_hi = j, j
    n = pseudo.n
    z_cols = np.broadcast_to(regime.values(z_hi - 1), (n, z_hi)) if z_hi else np.zeros((n, 0))
    blocks = [pseudo.y[:, :j], z_cols, pseudo.w[:, :w_hi], _onehot(pseudo.x0, n_levels)]
    return np.hstack([np.asarray(b, dtype=float) for b in blocks])


def _check_history_match(pseudo: PseudoSample, regime: Regime, wave: int) -> None:
    """The arm must share the pseudo sample's exposure history before ``wave``."""
    for k in range(wave):
        if regime.value_at(k) != pseudo.regime.value_at(k):
            raise ValueError(
                f"regime disagrees with the pseudo sample's exposure history at wave {k}; "
                "arms may differ only at the evaluation wave"
            )


def sample_pseudo(
    stack,
    regime: Regime,
    sens: SensitivityDraw,
    n: int,
    rng: np.random.Generator,
    gamma_mode: str = "first",
) -> PseudoSample:
    """Simulate ``n`` pseudo-individuals from one model-stack draw.

    Per wave the sampler draws survival (absorbing), retention among the
    alive and retained (so the retention coin compounds the survival
    probability), the covariate, and the outcome, with the regime's
    exposure values fixed as features.  The outcome mean is shifted by
    ``gamma`` at a pseudo-individual's first unobserved wave
    (``gamma_mode="first"``) or at every unobserved wave
    (``gamma_mode="all"``).

    One random vector of length ``n`` is consumed per wave and purpose
    in a fixed order, so row slices of the output are reproducible
    independently of how they are later partitioned into blocks.
    """
    if n < 1:
        raise ValueError("pseudo sample size must be >= 1")
    if gamma_mode not in ("first", "all"):
        raise ValueError(f"gamma_mode must be 'first' or 'all', got {gamma_mode!r}")
    J = stack.last_wave
    x0 = stack.draw_x0(n, rng)
    y = np.zeros((n, J + 1))
    w = np.zeros((n, J + 1))
    r = np.ones((n, J + 1), dtype=np.int64)
    s = np.ones((n, J + 1), dtype=np.int64)
    first_missing = np.full(n, -1, dtype=np.int64)
    pseudo = PseudoSample(
        regime=regime, x0=x0, y=y, w=w, r=r, s=s, first_missing=first_missing
    )
    n_levels = stack.n_levels
    for k in range(J + 1):
        if k >= 1:
            lagged = _pseudo_features(pseudo, regime, "S", k, n_levels)
            u_s = rng.random(n)
            s[:, k] = (s[:, k - 1] == 1) & (u_s < stack.prob("S", k, lagged))
            u_r = rng.random(n)
            r[:, k] = (r[:, k - 1] == 1) & (s[:, k] == 1) & (u_r < stack.prob("R", k, lagged))
            newly_missing = (r[:, k] == 0) & (first_missing == -1)
            first_missing[newly_missing] = k
        w_feats = _pseudo_features(pseudo, regime, "W", k, n_levels)
        u_w = rng.random(n)
        w[:, k] = (u_w < stack.prob("W", k, w_feats)).astype(float)
        y_feats = _pseudo_features(pseudo, regime, "Y", k, n_levels)
        mu = stack.mean_y(k, y_feats)
        if gamma_mode == "first":
            shift = np.where(first_missing == k, sens.gamma[k], 0.0)
        else:
            shift = np.where(r[:, k] == 0, sens.gamma[k], 0.0)
        y[:, k] = mu + shift + stack.sigma_y(k) * rng.standard_normal(n)
    return pseudo


def phi(
    stack,
    pseudo: PseudoSample,
    regime: Regime,
    sens: SensitivityDraw,
    wave: int,
    gamma_mode: str = "first",
) -> np.ndarray:
    """Per-row corrected outcome mean at ``wave`` under the arm ``regime``.

    ``phi_j = mu_j(history with the arm's exposure values) + gamma_j``
    at rows whose first unobserved wave is ``j`` (or any unobserved
    wave, under ``gamma_mode="all"``), minus ``c(arm) * (1 - pi)``
    where ``pi`` is the model probability of the arm's exposure value
    at ``wave`` and ``c`` is ``-xi_j`` for the exposed arm and
    ``+xi_j`` for the never-exposed arm.
    """
    if not 1 <= wave <= pseudo.last_wave:
        raise ValueError(f"wave must be in 1..{pseudo.last_wave}")
    if gamma_mode not in ("first", "all"):
        raise ValueError(f"gamma_mode must be 'first' or 'all', got {gamma_mode!r}")
    _check_history_match(pseudo, regime, wave)
    n_levels = stack.n_levels
    mu = stack.mean_y(wave, _pseudo_features(pseudo, regime, "Y", wave, n_levels))
    if gamma_mode == "first":
        shifted = pseudo.first_missing == wave
    else:
        shifted = pseudo.r[:, wave] == 0
    shift = np.where(shifted, sens.gamma[wave], 0.0)
    pi_one = stack.prob("Z", wave, _pseudo_features(pseudo, regime, "Z", wave, n_levels))
    value = regime.value_at(wave)
    pi_val = pi_one if value == 1 else 1.0 - pi_one
    c = -sens.xi[wave] if value == 1 else sens.xi[wave]
    return mu + shift - c * (1.0 - pi_val)


def resolution_factor(
    pi_one: np.ndarray | float,
    a_surv: np.ndarray | float,
    value: int,
    nu: float,
    variant: str,
) -> np.ndarray | float:
    """Identified survival probability for a non-retained wave.

    ``pi_one`` is the model probability of exposure value 1 given the
    history, ``a_surv`` the no-exposure-information survival probability
    ``A`` for the wave, ``value`` the arm's exposure value, and ``nu``
    the non-survivor exposure excess.  Variant ``"A3"`` uses the
    denominator ``pi * (nu - nu A + A)``; variant ``"FirstPrinciples"``
    uses the total-probability denominator
    ``(pi + nu_signed)(1-A) + pi A`` where the excess enters with
    positive sign for value 1 and negative sign for value 0, as a
    single non-survivor exposure law implies.  ``nu`` is capped at the
    admissible upper bound for the history before use; denominators are
    floored at ``PROB_FLOOR``.
    """
    if variant not in ("A3", "FirstPrinciples"):
        raise ValueError(f"variant must be 'A3' or 'FirstPrinciples', got {variant!r}")
    pi_one = np.asarray(pi_one, dtype=float)
    a = np.asarray(a_surv, dtype=float)
    pi_val = pi_one if value == 1 else 1.0 - pi_one
    if variant == "A3":
        nu_eff = np.minimum(nu, 1.0 - pi_val)
        den = pi_val * (nu_eff - nu_eff * a + a)
    else:
        nu_eff = np.minimum(nu, 1.0 - pi_one)
        sign = 1.0 if value == 1 else -1.0
        den = (pi_val + sign * nu_eff) * (1.0 - a) + pi_val * a
    return pi_val * a / np.maximum(den, PROB_FLOOR)


def chi(
    stack,
    pseudo: PseudoSample,
    regime: Regime,
    sens: SensitivityDraw,
    wave: int,
    variant: str = "A3",
) -> np.ndarray:
    """Per-row survival resolution weight through ``wave`` under an arm.

    Retained waves contribute factor 1.  A wave with ``r*=0``
    contributes the identified probability of being alive given
    non-retention: the exposure probability of the arm's value among
    survivors, times the no-exposure-information survival probability
    ``A_k = (1-pi_R) pi_S / [(1-pi_R) pi_S + (1-pi_S)]``, divided by a
    variant-specific total-probability denominator.  Variant ``"A3"``
    divides by ``pi * (nu - nu A + A)``; variant ``"FirstPrinciples"``
    divides by ``(pi + nu_signed) (1-A) + pi A`` where the excess
    ``nu`` applies with positive sign to the exposure value 1 and
    negative sign to the value 0, as a single exposure law among
    non-survivors implies.  ``nu`` is capped at each row's admissible
    upper bound before use, and denominators are floored at
    ``PROB_FLOOR``.
    """
    if variant not in ("A3", "FirstPrinciples"):
        raise ValueError(f"variant must be 'A3' or 'FirstPrinciples', got {variant!r}")
    if not 1 <= wave <= pseudo.last_wave:
        raise ValueError(f"wave must be in 1..{pseudo.last_wave}")
    _check_history_match(pseudo, regime, wave)
    n_levels = stack.n_levels
    out = np.ones(pseudo.n)
    for k in range(1, wave + 1):
        dropped = pseudo.r[:, k] == 0
        if not np.any(dropped):
            continue
        lagged = _pseudo_features(pseudo, regime, "S", k, n_levels)
        pi_r = stack.prob("R", k, lagged)
        pi_s = stack.prob("S", k, lagged)
        a_num = (1.0 - pi_r) * pi_s
        a = a_num / np.maximum(a_num + (1.0 - pi_s), PROB_FLOOR)
        pi_one = stack.prob("Z", k, _pseudo_features(pseudo, regime, "Z", k, n_levels))
        f = resolution_factor(pi_one, a, regime.value_at(k), float(sens.nu[k]), variant)
        out = np.where(dropped, out * f, out)
    return out


def mc_integrate(
    phi_vec: np.ndarray, chi_vec: np.ndarray, n_blocks: int = 1
) -> tuple[float, float]:
    """Monte Carlo integrals ``(p_hat, mu_hat) = (mean chi, mean phi*chi)``.

    Rows are split into ``n_blocks`` contiguous blocks whose partial
    means are recombined weighted by block size; the result is
    independent of the partition up to rounding.
    """
    phi_vec = np.asarray(phi_vec, dtype=float)
    chi_vec = np.asarray(chi_vec, dtype=float)
    if phi_vec.size == 0 or chi_vec.size == 0:
        raise ValueError("empty integrand")
    if phi_vec.shape != chi_vec.shape:
        raise ValueError("phi and chi lengths differ")
    if not 1 <= n_blocks <= phi_vec.size:
        raise ValueError("n_blocks must be in 1..n")
    p_hat = 0.0
    mu_hat = 0.0
    n = phi_vec.size
    for b in range(n_blocks):
        sl = slice(b * n // n_blocks, (b + 1) * n // n_blocks)
        w_b = (sl.stop - sl.start) / n
        p_hat += w_b * float(np.mean(chi_vec[sl]))
        mu_hat += w_b * float(np.mean(phi_vec[sl] * chi_vec[sl]))
    return p_hat, mu_hat


def _wave_components(
    mu_z: np.ndarray,
    p_z: np.ndarray,
    mu_zp: np.ndarray,
    p_zp: np.ndarray,
    delta: np.ndarray,
) -> tuple[np.ndarray, np.ndarray]:
    """Per-wave contrasts and weights from wave-indexed arrays (entry 0 unused)."""
    J = mu_z.size - 1
    if J < 1:
        raise ValueError("need at least one wave")
    if np.any(p_z[1:] <= 0) or np.any(p_zp[1:] <= 0):
        raise ValueError("degenerate survival probability")
    contrasts = np.zeros(J + 1)
    contrasts[1:] = (
        mu_z[1:] / p_z[1:]
        - mu_zp[1:] / p_zp[1:]
        - delta[1:] * (1.0 - p_z[1:] / p_zp[1:])
    )
    weights = np.zeros(J + 1)
    weights[1:] = p_z[1:] / np.sum(p_z[1:])
    return contrasts, weights


def tau_draw(
    mu_z: np.ndarray,
    p_z: np.ndarray,
    mu_zp: np.ndarray,
    p_zp: np.ndarray,
    sens: SensitivityDraw,
) -> float:
    """One posterior sample of the aggregated survivor effect.

    Inputs are wave-indexed arrays (entry 0 unused): survivor-weighted
    outcome integrals ``mu`` and survival probabilities ``p`` under the
    exposed (``_z``) and never-exposed (``_zp``) arms.
    """
    contrasts, weights = _wave_components(
        np.asarray(mu_z, dtype=float),
        np.asarray(p_z, dtype=float),
        np.asarray(mu_zp, dtype=float),
        np.asarray(p_zp, dtype=float),
        sens.delta,
    )
    return float(np.sum(weights[1:] * contrasts[1:]))


@dataclass
class EstimateConfig:
    """Settings for :func:`estimate_sace`.

    Defaults mirror the reference analysis scale: 204 chains of 10 kept
    draws after 1000 burn-in iterations, pseudo samples of 25000 rows in
    25 blocks.  Tests and small runs should pass smaller values.
    """

    master_seed: int = 0
    n_chains: int = 204
    n_keep_per_chain: int = 10
    n_burn: int = 1000
    n_pseudo: int = 25_000
    n_blocks: int = 25
    chi_variant: str = "A3"
    gamma_mode: str = "first"
    sensitivity: SensitivityDraw | None = None
    bounds: SensitivityBounds | None = None
    bart_config: bart.BartConfig | dict[str, bart.BartConfig] | None = None
    validate: bool = True
    n_workers: int = 1

    def __post_init__(self) -> None:
        for name in ("n_chains", "n_keep_per_chain", "n_pseudo", "n_blocks", "n_workers"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        if self.n_burn < 0:
            raise ValueError("n_burn must be >= 0")
        if self.chi_variant not in ("A3", "FirstPrinciples"):
            raise ValueError("chi_variant must be 'A3' or 'FirstPrinciples'")
        if self.gamma_mode not in ("first", "all"):
            raise ValueError("gamma_mode must be 'first' or 'all'")


@dataclass
class SaceResult:
    """Posterior samples of the aggregated effect and its components.

    Arrays are indexed ``(draw, wave)`` with wave entry 0 unused; one
    draw per kept model-stack draw per chain.
    """

    tau: np.ndarray
    contrasts: np.ndarray
    weights: np.ndarray
    p_z: np.ndarray
    p_zp: np.ndarray
    mu_z: np.ndarray
    mu_zp: np.ndarray
    sens_xi: np.ndarray
    sens_gamma: np.ndarray
    sens_delta: np.ndarray
    sens_nu: np.ndarray
    chain_index: np.ndarray
    config: EstimateConfig = field(repr=False)
    chain_seeds: list[int] = field(default_factory=list)

    @property
    def n_draws(self) -> int:
        return self.tau.size

    @property
    def last_wave(self) -> int:
        return self.contrasts.shape[1] - 1


def _effective_bart_config(config: EstimateConfig):
    base = config.bart_config
    if base is None:
        return bart.BartConfig(n_burn=config.n_burn, n_keep=config.n_keep_per_chain)
    if isinstance(base, dict):
        return {
            fac: replace(c, n_burn=config.n_burn, n_keep=config.n_keep_per_chain)
            for fac, c in base.items()
        }
    return replace(base, n_burn=config.n_burn, n_keep=config.n_keep_per_chain)


def _run_chain(
    dataset: CohortDataset,
    config: EstimateConfig,
    bounds: SensitivityBounds | None,
    chain: int,
    stacks=None,
) -> dict[str, np.ndarray]:
    """Every kept draw's integrals and tau for one chain, as stacked arrays."""
    J = dataset.last_wave
    if stacks is None:
        eff_cfg = _effective_bart_config(config)
        stacks = fit_stack(dataset, eff_cfg, config.master_seed, chain=chain, validate=False)
    n_d = len(stacks)
    out = {
        k: np.zeros((n_d, J + 1))
        for k in ("contrasts", "weights", "p_z", "p_zp", "mu_z", "mu_zp",
                  "xi", "gamma", "delta", "nu")
    }
    out["tau"] = np.zeros(n_d)
    never = never_exposed()
    for d, stack in enumerate(stacks):
        if config.sensitivity is not None:
            sens = config.sensitivity
        else:
            sens = sample_sensitivity(
                bounds,
                stream(config.master_seed, _DOMAIN_PSEUDO, chain, d, _PURPOSE_SENS),
            )
        pseudo = sample_pseudo(
            stack,
            never,
            sens,
            config.n_pseudo,
            stream(config.master_seed, _DOMAIN_PSEUDO, chain, d, _PURPOSE_PSEUDO),
            gamma_mode=config.gamma_mode,
        )
        for j in range(1, J + 1):
            arm = exposed_at(j)
            for regime, p_key, m_key in ((arm, "p_z", "mu_z"), (never, "p_zp", "mu_zp")):
                phi_vec = phi(stack, pseudo, regime, sens, j, config.gamma_mode)
                chi_vec = chi(stack, pseudo, regime, sens, j, config.chi_variant)
                p_hat, mu_hat = mc_integrate(phi_vec, chi_vec, config.n_blocks)
                out[p_key][d, j] = p_hat
                out[m_key][d, j] = mu_hat
        out["contrasts"][d], out["weights"][d] = _wave_components(
            out["mu_z"][d], out["p_z"][d], out["mu_zp"][d], out["p_zp"][d], sens.delta
        )
        out["tau"][d] = float(np.sum(out["weights"][d, 1:] * out["contrasts"][d, 1:]))
        for name in ("xi", "gamma", "delta", "nu"):
            out[name][d] = getattr(sens, name)
    return out


def estimate_sace(dataset: CohortDataset, config: EstimateConfig, fit_chain=None) -> SaceResult:
    """Full posterior of the survivor-average effect for one dataset.

    Per chain, fits the factor models, then per kept draw samples
    sensitivity parameters (unless fixed in the config), simulates one
    shared pseudo cohort, evaluates both arms' integrals at every wave,
    and assembles one ``tau`` sample.  Chains are independent given the
    master seed; a failing chain aborts the run with a report naming
    every failed chain.

    ``fit_chain``, if given, is a callable mapping a chain index to that
    chain's list of model-stack draws, replacing the default sum-of-trees
    fit — used for alternative factor models and for resuming from saved
    fits.  Chains run serially unless ``config.n_workers > 1`` (default
    fitter only), in which case they are distributed over a process
    pool; results are identical either way because every chain draws
    from its own seed stream.
    """
    if config.validate:
        report = validate_cohort(dataset)
        if report.violations:
            raise ValueError(
                "dataset fails validation:\n" + "\n".join(report.as_lines()[:20])
            )
    J = dataset.last_wave
    if J < 1:
        raise ValueError("need at least one follow-up wave")
    sens_fixed = config.sensitivity
    if sens_fixed is not None and sens_fixed.last_wave != J:
        raise ValueError(
            f"fixed sensitivity draw covers waves 0..{sens_fixed.last_wave}, dataset has 0..{J}"
        )
    bounds = None
    if sens_fixed is None:
        bounds = config.bounds if config.bounds is not None else compute_bounds(dataset)
    n_total = config.n_chains * config.n_keep_per_chain
    tau = np.zeros(n_total)
    contrasts = np.zeros((n_total, J + 1))
    weights = np.zeros((n_total, J + 1))
    p_z = np.zeros((n_total, J + 1))
    p_zp = np.zeros((n_total, J + 1))
    mu_z = np.zeros((n_total, J + 1))
    mu_zp = np.zeros((n_total, J + 1))
    sens_arrays = {k: np.zeros((n_total, J + 1)) for k in ("xi", "gamma", "delta", "nu")}
    chain_index = np.zeros(n_total, dtype=np.int64)
    failures: list[str] = []
    results: dict[int, dict[str, np.ndarray]] = {}
    if config.n_workers > 1 and fit_chain is None:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=config.n_workers) as pool:
            futures = {
                pool.submit(_run_chain, dataset, config, bounds, chain): chain
                for chain in range(config.n_chains)
            }
            for fut, chain in futures.items():
                try:
                    results[chain] = fut.result()
                except Exception as exc:  # noqa: BLE001 - aggregated into the chain report
                    failures.append(f"chain {chain}: {type(exc).__name__}: {exc}")
    else:
        for chain in range(config.n_chains):
            try:
                stacks = fit_chain(chain) if fit_chain is not None else None
                results[chain] = _run_chain(dataset, config, bounds, chain, stacks=stacks)
            except Exception as exc:  # noqa: BLE001 - aggregated into the chain report
                failures.append(f"chain {chain}: {type(exc).__name__}: {exc}")
    if failures:
        raise RuntimeError("chain failures aborted the run:\n" + "\n".join(failures))
    for chain in range(config.n_chains):
        res = results[chain]
        n_d = res["tau"].size
        if n_d != config.n_keep_per_chain:
            raise RuntimeError(
                f"chain {chain} produced {n_d} draws, expected {config.n_keep_per_chain}"
            )
        sl = slice(chain * n_d, (chain + 1) * n_d)
        tau[sl] = res["tau"]
        contrasts[sl] = res["contrasts"]
        weights[sl] = res["weights"]
        p_z[sl] = res["p_z"]
        p_zp[sl] = res["p_zp"]
        mu_z[sl] = res["mu_z"]
        mu_zp[sl] = res["mu_zp"]
        for name in sens_arrays:
            sens_arrays[name][sl] = res[name]
        chain_index[sl] = chain
    return SaceResult(
        tau=tau,
        contrasts=contrasts,
        weights=weights,
        p_z=p_z,
        p_zp=p_zp,
        mu_z=mu_z,
        mu_zp=mu_zp,
        sens_xi=sens_arrays["xi"],
        sens_gamma=sens_arrays["gamma"],
        sens_delta=sens_arrays["delta"],
        sens_nu=sens_arrays["nu"],
        chain_index=chain_index,
        config=config,
        chain_seeds=list(range(config.n_chains)),
    )

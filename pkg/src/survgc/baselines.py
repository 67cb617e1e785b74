"""Comparison estimators: parametric G-computation and inverse-probability weighting.

Two families of alternatives to the sum-of-trees pipeline, sharing the
cohort data model and result schema:

* ``bpgc_estimate`` — the identical G-computation pipeline with every
  factor replaced by a Bayesian generalized linear model (normal-linear
  outcome, logit binary factors) under weakly-informative normal
  coefficient priors, ``N(0, 10^2)`` on standardized features.  A
  simplified mode drops the dropout, strata, and confounding corrections
  (``gamma = delta = c = 0``) and estimates the per-wave contrasts as
  plain pseudo-sample means of the outcome model, with pooling weights
  from averaged survival-probability products.
* ``iptw_estimate`` — a frequentist estimator weighting each observed
  survivor by inverse cumulative treatment and retention probabilities
  (optionally stabilized by marginal numerators), pooling per-wave
  contrasts by empirical survival fractions, with percentile bootstrap
  intervals.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.linalg import solve_triangular
from scipy.special import expit

from .cohort import CohortDataset, model_subset, validate_cohort
from .gcomp import (
    _DOMAIN_PSEUDO,
    _PURPOSE_PSEUDO,
    EstimateConfig,
    PROB_FLOOR,
    SaceResult,
    _pseudo_features,  # package-internal: pseudo-row history matrices
    estimate_sace,
    exposed_at,
    never_exposed,
    sample_pseudo,
)
from .obsmodels import factor_waves
from .rng import stream
from .sensitivity import point_mass

__all__ = [
    "GlmConfig",
    "GlmDraw",
    "GlmStackDraw",
    "IptwResult",
    "WeightTable",
    "bpgc_estimate",
    "fit_glm_stack",
    "iptw_estimate",
    "iptw_weights",
    "pooled_effect",
]

# stream domain codes
_DOMAIN_GLM_FIT = 4
_DOMAIN_IPTW_BOOT = 5

_FACTOR_CODES = {"Y": 0, "Z": 1, "W": 2, "R": 3, "S": 4}
_BASELINE_CODE = 5

#: Linear-predictor margin beyond which a perfectly split training set
#: is reported as separated.
SEPARATION_MARGIN = 4.0


@dataclass
class GlmConfig:
    """Sampler settings and priors for the generalized linear factor models.

    Slope coefficients get independent ``N(0, prior_sd^2)`` priors on
    standardized features; the intercept gets ``N(0,
    intercept_prior_sd^2)``.  The outcome variance gets an inverse-gamma
    prior with shape ``sigma_prior_shape`` and scale set to the response
    variance (prior mean equal to the marginal spread).
    """

    n_burn: int = 200
    n_keep: int = 50
    prior_sd: float = 10.0
    intercept_prior_sd: float = 100.0
    sigma_prior_shape: float = 2.0

    def __post_init__(self) -> None:
        if self.n_keep < 1:
            raise ValueError("n_keep must be >= 1")
        if self.n_burn < 0:
            raise ValueError("n_burn must be >= 0")
        if self.prior_sd <= 0 or self.intercept_prior_sd <= 0:
            raise ValueError("prior scales must be positive")


def _standardize(X: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Center and scale columns, dropping those without variation.

    Returns the reduced standardized matrix, per-kept-column centers and
    scales, and the kept column indices.  A feature constant in the
    training rows carries no information, so its coefficient is pinned
    at zero rather than sampled from the prior; predictions at other
    feature values then fall back to the intercept region.
    """
    centers = X.mean(axis=0)
    scales = X.std(axis=0)
    kept = np.flatnonzero(scales > 0)
    Xs = (X[:, kept] - centers[kept]) / scales[kept]
    return Xs, centers[kept], scales[kept], kept


def _design(Xs: np.ndarray) -> np.ndarray:
    return np.hstack([np.ones((Xs.shape[0], 1)), Xs])


@dataclass
class GlmDraw:
    """One posterior draw of one factor's coefficients.

    ``beta`` is on the standardized scale with the intercept first;
    ``centers``/``scales``/``kept`` record the training standardization
    so prediction applies the same transform.  ``sigma`` is the residual
    scale (outcome factor only).
    """

    beta: np.ndarray
    centers: np.ndarray
    scales: np.ndarray
    kept: np.ndarray
    sigma: float | None = None

    def linear_predictor(self, X: np.ndarray) -> np.ndarray:
        Xs = (X[:, self.kept] - self.centers) / self.scales
        return self.beta[0] + Xs @ self.beta[1:]


def _prior_precision(p_slopes: int, cfg: GlmConfig) -> np.ndarray:
    prec = np.full(p_slopes + 1, 1.0 / cfg.prior_sd**2)
    prec[0] = 1.0 / cfg.intercept_prior_sd**2
    return np.diag(prec)


def _linear_gibbs(
    X: np.ndarray, y: np.ndarray, cfg: GlmConfig, rng: np.random.Generator
) -> list[GlmDraw]:
    """Conjugate Gibbs sampler for the normal-linear outcome factor."""
    Xs, centers, scales, kept = _standardize(X)
    D = _design(Xs)
    n, p = D.shape
    P = _prior_precision(p - 1, cfg)
    a0 = cfg.sigma_prior_shape
    b0 = max(float(np.var(y)), 1e-6)
    xtx = D.T @ D
    xty = D.T @ y
    sigma2 = b0
    draws: list[GlmDraw] = []
    for it in range(cfg.n_burn + cfg.n_keep):
        prec = xtx / sigma2 + P
        low = np.linalg.cholesky(prec)
        # prec = L L': two triangular solves give the mean, and solving
        # L' x = eta gives a deviate with covariance prec^-1.
        mean = solve_triangular(
            low.T, solve_triangular(low, xty / sigma2, lower=True), lower=False
        )
        eta = rng.standard_normal(p)
        beta = mean + solve_triangular(low.T, eta, lower=False)
        resid = y - D @ beta
        shape = a0 + 0.5 * n
        scale = b0 + 0.5 * float(resid @ resid)
        sigma2 = scale / rng.gamma(shape)
        if it >= cfg.n_burn:
            draws.append(
                GlmDraw(
                    beta=beta.copy(),
                    centers=centers,
                    scales=scales,
                    kept=kept,
                    sigma=float(np.sqrt(sigma2)),
                )
            )
    return draws


def _logit_log_posterior(D: np.ndarray, y: np.ndarray, P: np.ndarray, beta: np.ndarray) -> float:
    eta = D @ beta
    # log Bernoulli likelihood written stably: y*eta - log(1 + exp(eta)).
    ll = float(np.sum(y * eta - np.logaddexp(0.0, eta)))
    return ll - 0.5 * float(beta @ P @ beta)


def _logit_map(
    D: np.ndarray, y: np.ndarray, P: np.ndarray, max_iter: int = 100
) -> tuple[np.ndarray, np.ndarray]:
    """Penalized Newton ascent; returns the mode and its Hessian."""
    beta = np.zeros(D.shape[1])
    obj = _logit_log_posterior(D, y, P, beta)
    for _ in range(max_iter):
        p = expit(D @ beta)
        grad = D.T @ (y - p) - P @ beta
        w = np.maximum(p * (1.0 - p), 1e-10)
        hess = D.T @ (D * w[:, None]) + P
        step = np.linalg.solve(hess, grad)
        scale_step = 1.0
        for _ in range(30):
            cand = beta + scale_step * step
            cand_obj = _logit_log_posterior(D, y, P, cand)
            if cand_obj >= obj:
                break
            scale_step *= 0.5
        beta = beta + scale_step * step
        new_obj = _logit_log_posterior(D, y, P, beta)
        if abs(new_obj - obj) < 1e-12 and float(np.max(np.abs(grad))) < 1e-8:
            obj = new_obj
            break
        obj = new_obj
    p = expit(D @ beta)
    w = np.maximum(p * (1.0 - p), 1e-10)
    hess = D.T @ (D * w[:, None]) + P
    return beta, hess


def _check_separation(D: np.ndarray, y: np.ndarray, beta: np.ndarray, label: str) -> None:
    eta = D @ beta
    ones = y == 1
    if not (np.any(ones) and np.any(~ones)):
        warnings.warn(
            f"factor {label} has a constant response; probabilities will be prior-tempered",
            stacklevel=4,
        )
        return
    if float(np.min(eta[ones])) > SEPARATION_MARGIN and float(np.max(eta[~ones])) < -SEPARATION_MARGIN:
        warnings.warn(
            f"separation in logit factor {label}; estimates are regularized by the prior",
            stacklevel=4,
        )


def _logit_mh(
    X: np.ndarray,
    y: np.ndarray,
    cfg: GlmConfig,
    rng: np.random.Generator,
    label: str,
) -> list[GlmDraw]:
    """Independence Metropolis-Hastings around the posterior mode.

    The proposal is the Laplace approximation ``N(mode, H^-1)``; for
    these near-Gaussian posteriors it accepts most moves, so short
    chains already decorrelate.
    """
    Xs, centers, scales, kept = _standardize(X)
    D = _design(Xs)
    P = _prior_precision(D.shape[1] - 1, cfg)
    mode, hess = _logit_map(D, y, P)
    _check_separation(D, y, mode, label)
    chol = np.linalg.cholesky(hess)

    def propose() -> np.ndarray:
        return mode + np.linalg.solve(chol.T, rng.standard_normal(D.shape[1]))

    def log_q(b: np.ndarray) -> float:
        d = b - mode
        return -0.5 * float(d @ hess @ d)

    beta = mode.copy()
    lt = _logit_log_posterior(D, y, P, beta)
    lq = log_q(beta)
    draws: list[GlmDraw] = []
    for it in range(cfg.n_burn + cfg.n_keep):
        cand = propose()
        cand_lt = _logit_log_posterior(D, y, P, cand)
        cand_lq = log_q(cand)
        if np.log(rng.random()) < (cand_lt - lt) - (cand_lq - lq):
            beta, lt, lq = cand, cand_lt, cand_lq
        if it >= cfg.n_burn:
            draws.append(GlmDraw(beta=beta.copy(), centers=centers, scales=scales, kept=kept))
    return draws


@dataclass
class GlmStackDraw:
    """One aligned draw of every generalized-linear factor plus baseline cells.

    Implements the model-stack protocol used by the G-computation
    engine (``mean_y``, ``prob``, ``sigma_y``, ``draw_x0``,
    ``last_wave``, ``n_levels``).
    """

    models: dict[tuple[str, int], GlmDraw]
    pi_x0: np.ndarray
    n_levels: int = 0
    last_wave: int = 0

    def sigma_y(self, wave: int) -> float:
        return float(self.models[("Y", wave)].sigma)

    def mean_y(self, wave: int, history: np.ndarray) -> np.ndarray:
        return self.models[("Y", wave)].linear_predictor(history)

    def prob(self, factor: str, wave: int, history: np.ndarray) -> np.ndarray:
        if factor not in ("Z", "W", "R", "S"):
            raise ValueError(f"factor must be one of Z, W, R, S, got {factor!r}")
        eta = self.models[(factor, wave)].linear_predictor(history)
        return np.clip(expit(eta), PROB_FLOOR, 1.0 - PROB_FLOOR)

    def draw_x0(self, n: int, rng: np.random.Generator) -> np.ndarray:
        if n == 0:
            return np.zeros(0, dtype=np.int64)
        return rng.choice(self.pi_x0.size, size=n, p=self.pi_x0)


def fit_glm_stack(
    dataset: CohortDataset,
    cfg: GlmConfig,
    master_seed: int,
    chain: int = 0,
    validate: bool = True,
) -> list[GlmStackDraw]:
    """Fit every factor as a Bayesian generalized linear model.

    Mirrors the sum-of-trees stack fit: one independent stream per
    factor and wave keyed by ``(master_seed, chain, factor, wave)``,
    draws aligned index-by-index across factors, baseline cells from a
    conjugate Dirichlet(1) update.
    """
    if validate:
        report = validate_cohort(dataset)
        if not report.ok:
            raise ValueError(f"inadmissible dataset: {report.as_lines()[:5]}")
    J = dataset.last_wave
    models: dict[tuple[str, int], list[GlmDraw]] = {}
    for factor, code in _FACTOR_CODES.items():
        for wave in factor_waves(factor, J):
            data = model_subset(dataset, factor, wave)
            fit_rng = stream(master_seed, _DOMAIN_GLM_FIT, chain, code, wave)
            label = f"{factor} at wave {wave}"
            if factor == "Y":
                models[(factor, wave)] = _linear_gibbs(data.X, data.response, cfg, fit_rng)
            else:
                models[(factor, wave)] = _logit_mh(data.X, data.response, cfg, fit_rng, label)
    counts = np.bincount(dataset.x0.astype(int), minlength=dataset.n_levels)
    dir_rng = stream(master_seed, _DOMAIN_GLM_FIT, chain, _BASELINE_CODE, 0)
    pi_draws = dir_rng.dirichlet(1.0 + counts, size=cfg.n_keep)
    return [
        GlmStackDraw(
            models={key: seq[m] for key, seq in models.items()},
            pi_x0=pi_draws[m],
            n_levels=dataset.n_levels,
            last_wave=J,
        )
        for m in range(cfg.n_keep)
    ]


def _effective_glm_config(config: EstimateConfig, glm_config: GlmConfig | None) -> GlmConfig:
    base = glm_config if glm_config is not None else GlmConfig()
    return replace(base, n_burn=config.n_burn, n_keep=config.n_keep_per_chain)


def _simplified_run(
    dataset: CohortDataset, config: EstimateConfig, glm_cfg: GlmConfig
) -> SaceResult:
    J = dataset.last_wave
    sens = point_mass(J)
    never = never_exposed()
    n_total = config.n_chains * config.n_keep_per_chain
    tau = np.zeros(n_total)
    contrasts = np.zeros((n_total, J + 1))
    weights = np.zeros((n_total, J + 1))
    p_surv = np.zeros((n_total, J + 1))
    mu_z = np.zeros((n_total, J + 1))
    mu_zp = np.zeros((n_total, J + 1))
    chain_index = np.zeros(n_total, dtype=np.int64)
    failures: list[str] = []
    idx = 0
    for chain in range(config.n_chains):
        try:
            stacks = fit_glm_stack(
                dataset, glm_cfg, config.master_seed, chain=chain, validate=False
            )
            for d, stack in enumerate(stacks):
                pseudo = sample_pseudo(
                    stack,
                    never,
                    sens,
                    config.n_pseudo,
                    stream(config.master_seed, _DOMAIN_PSEUDO, chain, d, _PURPOSE_PSEUDO),
                )
                surv_prod = np.ones(config.n_pseudo)
                for j in range(1, J + 1):
                    feats_z = _pseudo_features(pseudo, exposed_at(j), "Y", j, stack.n_levels)
                    feats_zp = _pseudo_features(pseudo, never, "Y", j, stack.n_levels)
                    mu_z[idx, j] = float(np.mean(stack.mean_y(j, feats_z)))
                    mu_zp[idx, j] = float(np.mean(stack.mean_y(j, feats_zp)))
                    lagged = _pseudo_features(pseudo, never, "S", j, stack.n_levels)
                    surv_prod = surv_prod * stack.prob("S", j, lagged)
                    p_surv[idx, j] = float(np.mean(surv_prod))
                contrasts[idx, 1:] = mu_z[idx, 1:] - mu_zp[idx, 1:]
                total = float(np.sum(p_surv[idx, 1:]))
                if total <= 0:
                    raise ValueError("degenerate survival probability")
                weights[idx, 1:] = p_surv[idx, 1:] / total
                tau[idx] = float(np.sum(weights[idx, 1:] * contrasts[idx, 1:]))
                chain_index[idx] = chain
                idx += 1
        except Exception as exc:  # noqa: BLE001 - aggregated into the chain report
            failures.append(f"chain {chain}: {type(exc).__name__}: {exc}")
    if failures:
        raise RuntimeError("chain failures aborted the run:\n" + "\n".join(failures))
    zeros = np.zeros((n_total, J + 1))
    return SaceResult(
        tau=tau,
        contrasts=contrasts,
        weights=weights,
        p_z=p_surv,
        p_zp=p_surv.copy(),
        mu_z=mu_z,
        mu_zp=mu_zp,
        sens_xi=zeros,
        sens_gamma=zeros.copy(),
        sens_delta=zeros.copy(),
        sens_nu=zeros.copy(),
        chain_index=chain_index,
        config=config,
        chain_seeds=list(range(config.n_chains)),
    )


def bpgc_estimate(
    dataset: CohortDataset,
    config: EstimateConfig,
    glm_config: GlmConfig | None = None,
    simplified: bool = False,
) -> SaceResult:
    """Parametric Bayesian G-computation.

    Runs the same pipeline as :func:`survgc.gcomp.estimate_sace` with
    generalized linear factor models in place of the sum-of-trees
    models.  With ``simplified=True`` all sensitivity corrections are
    fixed at zero and the per-wave contrast is the plain pseudo-sample
    mean difference of the outcome model under the two arms, pooled by
    averaged survival-probability products — the reduced estimand used
    for cross-method comparisons.
    """
    glm_cfg = _effective_glm_config(config, glm_config)
    if not simplified:
        return estimate_sace(
            dataset,
            config,
            fit_chain=lambda chain: fit_glm_stack(
                dataset, glm_cfg, config.master_seed, chain=chain, validate=False
            ),
        )
    if config.sensitivity is not None and (
        np.any(config.sensitivity.xi != 0)
        or np.any(config.sensitivity.gamma != 0)
        or np.any(config.sensitivity.delta != 0)
        or np.any(config.sensitivity.nu != 0)
    ):
        raise ValueError("simplified mode fixes all sensitivity parameters at zero")
    if config.validate:
        report = validate_cohort(dataset)
        if report.violations:
            raise ValueError(
                "dataset fails validation:\n" + "\n".join(report.as_lines()[:20])
            )
    if dataset.last_wave < 1:
        raise ValueError("need at least one follow-up wave")
    return _simplified_run(dataset, config, glm_cfg)


# ---------------------------------------------------------------------------
# Inverse-probability weighting


@dataclass
class WeightTable:
    """Per-individual, per-wave weights for the weighting estimator.

    Entries are defined (finite) exactly for individuals retained
    through the wave; all defined weights are positive and the combined
    weight is the product of the treatment and censoring components.
    Wave 0 is 1 for everyone.
    """

    treatment: np.ndarray
    censoring: np.ndarray
    combined: np.ndarray
    stabilized: bool

    def __post_init__(self) -> None:
        defined = np.isfinite(self.combined)
        if not np.array_equal(defined, np.isfinite(self.treatment)):
            raise ValueError("treatment and combined weights defined on different entries")
        if np.any(self.combined[defined] <= 0):
            raise ValueError("weights must be positive")
        prod = self.treatment[defined] * self.censoring[defined]
        if not np.allclose(prod, self.combined[defined], rtol=1e-12, atol=0):
            raise ValueError("combined weight is not the product of its components")


def _logit_point(X: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Fitted probabilities on the training rows, maximum likelihood.

    Degenerate designs short-circuit exactly: a constant response gives
    that constant, and an all-constant feature matrix gives the response
    mean — so weights built from them cancel without rounding error.  A
    vanishing ridge (1e-8) keeps the Newton steps defined under
    separation.
    """
    if np.all(y == y[0]):
        return np.full(y.size, float(y[0]))
    Xs, _, _, kept = _standardize(X)
    if kept.size == 0:
        return np.full(y.size, float(np.mean(y)))
    D = _design(Xs)
    P = np.eye(D.shape[1]) * 1e-8
    beta, _ = _logit_map(D, y, P)
    return expit(D @ beta)


def iptw_weights(dataset: CohortDataset, stabilized: bool) -> WeightTable:
    """Cumulative treatment and retention weights for every observed wave.

    Per wave the treatment term is the inverse fitted probability of the
    individual's own exposure value among the still-unexposed (already
    exposed individuals continue deterministically and contribute 1),
    and the censoring term is the inverse fitted retention probability
    among surviving retained individuals.  Stabilization multiplies each
    term by the marginal probability of the same event.  Terms compound
    across waves; entries after dropout or death are undefined.
    """
    J = dataset.last_wave
    n = dataset.n_individuals
    tw = np.full((n, J + 1), np.nan)
    cw = np.full((n, J + 1), np.nan)
    tw[:, 0] = 1.0
    cw[:, 0] = 1.0
    cur_t = np.ones(n)
    cur_c = np.ones(n)
    for k in range(1, J + 1):
        retained = dataset.r[:, k] == 1
        # Retention among surviving previously-retained individuals.
        data_r = model_subset(dataset, "R", k)
        p_ret = _logit_point(data_r.X, data_r.response)
        num_r = float(np.mean(data_r.response)) if stabilized else 1.0
        term_c = np.ones(n)
        term_c[data_r.rows] = num_r / np.clip(p_ret, PROB_FLOOR, None)
        # Exposure among retained, still-unexposed individuals.
        data_z = model_subset(dataset, "Z", k)
        at_risk_local = dataset.z[data_z.rows, k - 1] == 0
        rows_risk = data_z.rows[at_risk_local]
        term_t = np.ones(n)
        if rows_risk.size:
            p_one = _logit_point(data_z.X[at_risk_local], data_z.response[at_risk_local])
            z_now = data_z.response[at_risk_local]
            den = np.where(z_now == 1, p_one, 1.0 - p_one)
            if stabilized:
                marg = float(np.mean(z_now))
                num_t = np.where(z_now == 1, marg, 1.0 - marg)
            else:
                num_t = np.ones(z_now.size)
            term_t[rows_risk] = num_t / np.clip(den, PROB_FLOOR, None)
        cur_t = cur_t * term_t
        cur_c = cur_c * term_c
        tw[retained, k] = cur_t[retained]
        cw[retained, k] = cur_c[retained]
    return WeightTable(
        treatment=tw, censoring=cw, combined=tw * cw, stabilized=stabilized
    )


def _iptw_point(
    dataset: CohortDataset, stabilized: bool
) -> tuple[float, np.ndarray, np.ndarray, WeightTable]:
    J = dataset.last_wave
    table = iptw_weights(dataset, stabilized)
    contrasts = np.zeros(J + 1)
    surv = np.zeros(J + 1)
    for j in range(1, J + 1):
        obs = dataset.r[:, j] == 1
        newly = obs & (dataset.z[:, j] == 1) & (dataset.z[:, j - 1] == 0)
        never = obs & (dataset.z[:, j] == 0)
        if not (np.any(newly) and np.any(never)):
            raise ValueError(f"positivity failure at wave {j}")
        w = table.combined[:, j]
        y = dataset.y[:, j]
        mean_z = float(np.sum(w[newly] * y[newly]) / np.sum(w[newly]))
        mean_zp = float(np.sum(w[never] * y[never]) / np.sum(w[never]))
        contrasts[j] = mean_z - mean_zp
        surv[j] = float(np.mean(dataset.s[:, j]))
    tau = pooled_effect(contrasts[1:], surv[1:])
    return tau, contrasts, surv, table


@dataclass
class IptwResult:
    """Point estimate, per-wave components, and bootstrap interval."""

    tau: float
    contrasts: np.ndarray
    surv_fractions: np.ndarray
    stabilized: bool
    weights: WeightTable = field(repr=False)
    ci: tuple[float, float] | None = None
    boot_estimates: np.ndarray | None = None

    @property
    def method(self) -> str:
        return "IPTW-SW" if self.stabilized else "IPTW-W"


def iptw_estimate(
    dataset: CohortDataset,
    stabilized: bool,
    bootstrap_B: int = 5000,
    master_seed: int = 0,
    validate: bool = True,
) -> IptwResult:
    """Weighting estimator of the pooled survivor contrast.

    ``bootstrap_B`` resamples individuals with replacement and re-runs
    the whole fit per replicate; the interval is the 2.5th and 97.5th
    percentile of the replicate estimates.  ``bootstrap_B=0`` skips the
    interval.  Replicates draw from per-replicate seed streams and are
    reproducible independently of each other.
    """
    if bootstrap_B < 0:
        raise ValueError("bootstrap_B must be >= 0")
    if validate:
        report = validate_cohort(dataset)
        if report.violations:
            raise ValueError(
                "dataset fails validation:\n" + "\n".join(report.as_lines()[:20])
            )
    tau, contrasts, surv, table = _iptw_point(dataset, stabilized)
    ci = None
    boot = None
    if bootstrap_B:
        n = dataset.n_individuals
        boot = np.zeros(bootstrap_B)
        for b in range(bootstrap_B):
            idx = stream(master_seed, _DOMAIN_IPTW_BOOT, b).integers(0, n, size=n)
            ds_b = CohortDataset(
                y=dataset.y[idx],
                z=dataset.z[idx],
                w=dataset.w[idx],
                r=dataset.r[idx],
                s=dataset.s[idx],
                x0=dataset.x0[idx],
                n_levels=dataset.n_levels,
            )
            boot[b] = _iptw_point(ds_b, stabilized)[0]
        ci = (float(np.percentile(boot, 2.5)), float(np.percentile(boot, 97.5)))
    return IptwResult(
        tau=tau,
        contrasts=contrasts,
        surv_fractions=surv,
        stabilized=stabilized,
        weights=table,
        ci=ci,
        boot_estimates=boot,
    )


def pooled_effect(contrasts: np.ndarray, surv: np.ndarray) -> float:
    """Survival-weighted pooling ``sum_j c_j s_j / sum_k s_k``."""
    contrasts = np.asarray(contrasts, dtype=float)
    surv = np.asarray(surv, dtype=float)
    if contrasts.shape != surv.shape:
        raise ValueError("contrasts and surv lengths differ")
    if contrasts.size == 0:
        raise ValueError("need at least one wave")
    if np.any(surv <= 0) or np.any(surv > 1):
        raise ValueError("surv entries must be in (0, 1]")
    return float(np.sum(contrasts * surv) / np.sum(surv))

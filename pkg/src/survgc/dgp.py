"""Synthetic longitudinal cohorts with known causal truth.

The generator simulates exposure, survival, dropout, covariate, and
outcome processes wave by wave.  Potential trajectories under the two
regime families (exposure starting at a wave versus never exposed)
share all exogenous noise, so each individual's potential survival
indicators and potential outcomes coexist with the factual record and
the survivor-stratum contrast can be evaluated directly.

Per wave, among individuals alive and still unexposed, the factual
exposure/survival pair is drawn from three primitives: the marginal
survival probability ``m`` given history, the exposure probability
``a`` among survivors, and the excess exposure probability ``nu``
among non-survivors.  These determine the exposure onset probability
``q = a + nu (1 - m)`` and the survival probabilities given exposure
value ``p1 = a m / q`` and ``p0 = (1 - a) m / (1 - q)``; a shared
uniform with thresholds ``p1 <= p0`` realises monotone potential
survival that is independent of the factual exposure given history.
Dropout is drawn among survivors, so non-participation mixes the dead
with retained-eligible survivors exactly as the observed-data
factorization assumes.

Discrete configurations keep the outcome noiseless and the survival /
retention / exposure mechanisms free of the outcome history, so the
observed-data functional and the survivor-stratum truth can both be
computed by exhaustive enumeration and compared at machine precision.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .cohort import CohortDataset, feature_layout
from .gcomp import PROB_FLOOR, resolution_factor
from .rng import stream

__all__ = [
    "DgpConfig",
    "ExactStack",
    "History",
    "LatentTruth",
    "PRESETS",
    "exposure_survival_split",
    "generate_cohort",
    "make_all_dials",
    "make_confounded_exposure",
    "make_informative_dropout",
    "make_linear",
    "make_nonlinear",
    "make_recovery",
    "make_survival_selection",
    "oracle_identified",
    "oracle_sace",
    "oracle_sace_exact",
    "preset",
]

_DOMAIN_DGP = 6

Mechanism = Callable[[int, "History"], np.ndarray]
OutcomeMean = Callable[[int, "History", np.ndarray, np.ndarray], np.ndarray]


@dataclass
class History:
    """Wave-``k`` conditioning history handed to mechanism callables.

    Arrays ``w``, ``y``, ``z`` hold waves ``0..k-1`` column-wise (zero
    columns at wave 0); ``x0`` is the baseline cell index and ``u`` the
    latent binary confounder (all zeros unless the configuration uses
    one).
    """

    x0: np.ndarray
    u: np.ndarray
    w: np.ndarray
    y: np.ndarray
    z: np.ndarray

    @property
    def n(self) -> int:
        return self.x0.shape[0]


@dataclass
class DgpConfig:
    """Mechanisms and truth dials for one synthetic cohort design.

    Parameters
    ----------
    last_wave : int
        Final wave index ``J``.
    cell_probs : numpy.ndarray
        Baseline cell probabilities, length ``L``.
    surv : callable
        ``(wave, hist) -> (n,)`` marginal survival probability between
        waves among alive, never-exposed histories.
    propensity : callable
        ``(wave, hist) -> (n,)`` exposure onset probability among
        survivors (may read ``hist.u``).
    retention : callable
        ``(wave, hist) -> (n,)`` retention probability among survivors
        still enrolled.
    w_prob : callable
        ``(wave, hist) -> (n,)`` covariate probability; wave 0 included.
    y_mean : callable
        ``(wave, hist, z_now, w_now) -> (n,)`` outcome mean before the
        stratum, dropout, and noise terms; wave 0 is called with
        ``z_now = 0``.  Must be linear in ``hist.u`` when a latent
        confounder is used.
    y_sd : numpy.ndarray
        Per-wave outcome noise standard deviations (all zero for
        discrete configurations).
    surv_exposed : callable, optional
        Survival mechanism for already-exposed histories; defaults to
        ``surv``.
    theta : float
        Latent binary confounder prevalence.  When positive the
        confounder may enter only the final-wave propensity and outcome
        mean, and the design must have no death or dropout, so the
        confounding is invisible in the observed history; the implied
        history-free outcome-confounding offset is stored in ``xi``.
    nu, delta, gamma, xi : numpy.ndarray
        True per-wave sensitivity values: excess exposure among
        non-survivors, always-survivor outcome advantage, first
        unobserved wave outcome shift, and outcome-confounding offset.
        Entry 0 is unused.
    discrete : bool
        Marks an exhaustively enumerable design: noiseless outcomes,
        mechanisms free of the outcome history, outcome means linear in
        lagged outcomes.
    name : str
        Preset label.
    """

    last_wave: int
    cell_probs: np.ndarray
    surv: Mechanism
    propensity: Mechanism
    retention: Mechanism
    w_prob: Mechanism
    y_mean: OutcomeMean
    y_sd: np.ndarray
    surv_exposed: Mechanism | None = None
    theta: float = 0.0
    nu: np.ndarray = None  # type: ignore[assignment]
    delta: np.ndarray = None  # type: ignore[assignment]
    gamma: np.ndarray = None  # type: ignore[assignment]
    xi: np.ndarray = None  # type: ignore[assignment]
    discrete: bool = False
    name: str = ""

    def __post_init__(self) -> None:
        if self.last_wave < 1:
            raise ValueError("last_wave must be at least 1")
        self.cell_probs = np.asarray(self.cell_probs, dtype=float)
        if self.cell_probs.ndim != 1 or self.cell_probs.size < 1:
            raise ValueError("cell_probs must be a 1-d array")
        if np.any(self.cell_probs < 0) or abs(self.cell_probs.sum() - 1.0) > 1e-9:
            raise ValueError("cell_probs must be a probability vector")
        m = self.last_wave + 1
        for name in ("nu", "delta", "gamma", "xi"):
            value = getattr(self, name)
            value = np.zeros(m) if value is None else np.asarray(value, dtype=float)
            if value.shape != (m,):
                raise ValueError(f"{name} must have one entry per wave 0..{self.last_wave}")
            setattr(self, name, value)
        self.y_sd = np.asarray(self.y_sd, dtype=float)
        if self.y_sd.shape != (m,):
            raise ValueError(f"y_sd must have one entry per wave 0..{self.last_wave}")
        if np.any(self.y_sd < 0):
            raise ValueError("y_sd entries must be non-negative")
        if np.any(self.nu < 0):
            raise ValueError("nu entries must be non-negative")
        if not 0.0 <= self.theta < 1.0:
            raise ValueError("theta must be in [0, 1)")
        if self.theta > 0 and self.last_wave != 1:
            raise ValueError("a latent confounder requires a single post-baseline wave")
        if self.discrete and np.any(self.y_sd != 0):
            raise ValueError("discrete configurations must have zero outcome noise")
        if self.surv_exposed is None:
            self.surv_exposed = self.surv

    @property
    def n_levels(self) -> int:
        return self.cell_probs.size


@dataclass
class LatentTruth:
    """Per-individual potential trajectories under both regime families.

    Column ``j >= 1`` of ``surv_exposed`` / ``y_exposed`` refers to the
    regime with exposure starting at wave ``j``; ``surv_never`` /
    ``y_never`` to the never-exposed regime.  Wave-0 survival columns
    are 1 and outcome columns ``nan``.
    """

    surv_exposed: np.ndarray
    surv_never: np.ndarray
    y_exposed: np.ndarray
    y_never: np.ndarray

    @property
    def last_wave(self) -> int:
        return self.surv_exposed.shape[1] - 1

    def wave_components(self) -> tuple[np.ndarray, np.ndarray]:
        """Per-wave always-survivor contrasts and survival probabilities.

        Returns arrays indexed by wave with entry 0 unused (``nan``).
        Raises if some wave has no always-survivors.
        """
        m = self.last_wave + 1
        contrasts = np.full(m, np.nan)
        p_exposed = np.full(m, np.nan)
        for j in range(1, m):
            stratum = self.surv_exposed[:, j] == 1
            if not np.any(stratum):
                raise ValueError(f"empty always-survivor stratum at wave {j}")
            diff = self.y_exposed[stratum, j] - self.y_never[stratum, j]
            contrasts[j] = float(np.mean(diff))
            p_exposed[j] = float(np.mean(self.surv_exposed[:, j]))
        return contrasts, p_exposed

    def sace(self) -> float:
        """Survivor average causal effect implied by the latent arrays."""
        contrasts, p_exposed = self.wave_components()
        weights = p_exposed[1:] / p_exposed[1:].sum()
        return float(np.sum(weights * contrasts[1:]))


def exposure_survival_split(
    m: np.ndarray | float, a: np.ndarray | float, nu: float
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Factual onset probability and survival split implied by ``(m, a, nu)``.

    Returns ``(q, p1, p0)`` where ``q = a + nu (1 - m)`` is the exposure
    onset probability, ``p1 = a m / q`` survival given onset, and
    ``p0 = (1 - a) m / (1 - q)`` survival given no onset.  With
    ``nu >= 0`` the split is monotone (``p1 <= m <= p0``).
    """
    m = np.asarray(m, dtype=float)
    a = np.asarray(a, dtype=float)
    q = a + nu * (1.0 - m)
    p1 = np.where(q > 0, a * m / np.maximum(q, PROB_FLOOR), m)
    p0 = np.where(q < 1, (1.0 - a) * m / np.maximum(1.0 - q, PROB_FLOOR), m)
    return q, p1, p0


def _check_prob(p: np.ndarray, mask: np.ndarray | None, what: str, wave: int) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    use = p if mask is None else p[mask]
    if use.size and (np.any(use < -1e-12) or np.any(use > 1.0 + 1e-12)):
        raise ValueError(f"mechanism probability outside [0, 1] for {what} at wave {wave}")
    return np.clip(p, 0.0, 1.0)


def generate_cohort(
    cfg: DgpConfig, n: int, master_seed: int = 0
) -> tuple[CohortDataset, LatentTruth]:
    """Simulate a factual cohort together with its latent potential truth.

    Exogenous noise (strata, retention, covariate, and outcome draws)
    is shared between the factual world and the regime worlds, so the
    returned :class:`LatentTruth` is consistent with the dataset:
    whenever the factual exposure path matches a regime, the factual
    record equals the corresponding potential one.

    Parameters
    ----------
    cfg : DgpConfig
    n : int
        Number of individuals.
    master_seed : int
        Seed for the generation stream.

    Returns
    -------
    (CohortDataset, LatentTruth)
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    rng = stream(master_seed, _DOMAIN_DGP)
    m_waves = cfg.last_wave + 1

    x0 = rng.choice(cfg.n_levels, size=n, p=cfg.cell_probs)
    u = (rng.random(n) < cfg.theta).astype(float)

    h0 = History(x0=x0, u=u, w=np.zeros((n, 0)), y=np.zeros((n, 0)), z=np.zeros((n, 0)))
    pw0 = _check_prob(cfg.w_prob(0, h0), None, "covariate", 0)
    w0 = (rng.random(n) < pw0).astype(float)
    eps0 = rng.standard_normal(n)
    y0 = np.asarray(cfg.y_mean(0, h0, np.zeros(n), w0), dtype=float) + cfg.y_sd[0] * eps0

    z_f = np.zeros((n, m_waves))
    w_f = np.zeros((n, m_waves))
    y_f = np.zeros((n, m_waves))
    s_f = np.ones((n, m_waves), dtype=int)
    r_f = np.ones((n, m_waves), dtype=int)
    w_f[:, 0] = w0
    y_f[:, 0] = y0
    first_miss_f = np.full(n, -1)

    w_nv = w_f.copy()
    y_nv = y_f.copy()
    surv_never = np.ones((n, m_waves), dtype=int)
    surv_exposed = np.ones((n, m_waves), dtype=int)
    ret_nv = np.ones(n, dtype=bool)
    first_miss_nv = np.full(n, -1)
    y_pot_exposed = np.full((n, m_waves), np.nan)
    y_pot_never = np.full((n, m_waves), np.nan)

    zeros_n = np.zeros(n)
    ones_n = np.ones(n)

    for k in range(1, m_waves):
        u_z = rng.random(n)
        u_strat = rng.random(n)
        u_r = rng.random(n)
        u_w = rng.random(n)
        eps = rng.standard_normal(n)

        # Factual world.
        hist_f = History(x0=x0, u=u, w=w_f[:, :k], y=y_f[:, :k], z=z_f[:, :k])
        alive_prev = s_f[:, k - 1] == 1
        exposed_prev = z_f[:, k - 1] == 1
        fresh = alive_prev & ~exposed_prev
        m_k = _check_prob(cfg.surv(k, hist_f), fresh, "survival", k)
        a_k = _check_prob(cfg.propensity(k, hist_f), fresh, "exposure", k)
        if np.any((a_k[fresh] + cfg.nu[k]) > 1.0 + 1e-12):
            raise ValueError(
                f"exposure probability among non-survivors exceeds 1 at wave {k}"
            )
        rho_k = _check_prob(cfg.retention(k, hist_f), alive_prev, "retention", k)
        q_k, p1_k, p0_k = exposure_survival_split(m_k, a_k, cfg.nu[k])
        _check_prob(q_k, fresh, "exposure onset", k)
        _check_prob(p1_k, fresh, "survival given exposure", k)
        _check_prob(p0_k, fresh, "survival given no exposure", k)
        m_exp_k = _check_prob(
            cfg.surv_exposed(k, hist_f), alive_prev & exposed_prev, "survival", k
        )

        z_f[:, k] = np.where(exposed_prev, 1.0, (u_z < q_k).astype(float))
        threshold = np.where(exposed_prev, m_exp_k, np.where(z_f[:, k] == 1, p1_k, p0_k))
        s_f[:, k] = (alive_prev & (u_strat < threshold)).astype(int)
        r_f[:, k] = ((r_f[:, k - 1] == 1) & (s_f[:, k] == 1) & (u_r < rho_k)).astype(int)
        first_miss_f = np.where((r_f[:, k] == 0) & (r_f[:, k - 1] == 1), k, first_miss_f)
        pw_k = _check_prob(cfg.w_prob(k, hist_f), alive_prev, "covariate", k)
        w_f[:, k] = (u_w < pw_k).astype(float)
        both_f = (u_strat < p1_k).astype(float)
        stratum_term = cfg.delta[k] * np.where(exposed_prev, 0.0, both_f)
        y_f[:, k] = (
            np.asarray(cfg.y_mean(k, hist_f, z_f[:, k], w_f[:, k]), dtype=float)
            + stratum_term
            + cfg.gamma[k] * (first_miss_f == k)
            + cfg.y_sd[k] * eps
        )

        # Never-exposed regime world (shared noise, exposure forced to 0).
        hist_nv = History(
            x0=x0, u=u, w=w_nv[:, :k], y=y_nv[:, :k], z=np.zeros((n, k))
        )
        alive_prev_nv = surv_never[:, k - 1] == 1
        m_nv = _check_prob(cfg.surv(k, hist_nv), alive_prev_nv, "survival", k)
        a_nv = _check_prob(cfg.propensity(k, hist_nv), alive_prev_nv, "exposure", k)
        rho_nv = _check_prob(cfg.retention(k, hist_nv), alive_prev_nv, "retention", k)
        _, p1_nv, p0_nv = exposure_survival_split(m_nv, a_nv, cfg.nu[k])
        surv_never[:, k] = (alive_prev_nv & (u_strat < p0_nv)).astype(int)
        surv_exposed[:, k] = (alive_prev_nv & (u_strat < p1_nv)).astype(int)
        ret_now = ret_nv & (surv_never[:, k] == 1) & (u_r < rho_nv)
        first_miss_nv = np.where(~ret_now & ret_nv, k, first_miss_nv)
        ret_nv = ret_now
        pw_nv = _check_prob(cfg.w_prob(k, hist_nv), alive_prev_nv, "covariate", k)
        w_nv[:, k] = (u_w < pw_nv).astype(float)
        both_nv = (u_strat < p1_nv).astype(float)
        shift = (
            cfg.delta[k] * both_nv
            + cfg.gamma[k] * (first_miss_nv == k)
            + cfg.y_sd[k] * eps
        )
        base_never = np.asarray(cfg.y_mean(k, hist_nv, zeros_n, w_nv[:, k]), dtype=float)
        base_exposed = np.asarray(cfg.y_mean(k, hist_nv, ones_n, w_nv[:, k]), dtype=float)
        y_pot_never[:, k] = base_never + shift
        y_pot_exposed[:, k] = base_exposed + shift
        y_nv[:, k] = y_pot_never[:, k]

    observed = r_f == 1
    dataset = CohortDataset(
        y=np.where(observed, y_f, np.nan),
        z=np.where(observed, z_f, np.nan),
        w=np.where(observed, w_f, np.nan),
        r=r_f,
        s=s_f,
        x0=x0,
        n_levels=cfg.n_levels,
    )
    truth = LatentTruth(
        surv_exposed=surv_exposed,
        surv_never=surv_never,
        y_exposed=y_pot_exposed,
        y_never=y_pot_never,
    )
    return dataset, truth


def oracle_sace(
    cfg: DgpConfig, n_draws: int = 200_000, master_seed: int = 0, n_groups: int = 100
) -> tuple[float, float]:
    """Monte Carlo truth for the survivor average causal effect.

    Simulates ``n_draws`` latent trajectories and evaluates the
    survivor-stratum contrast directly, with a grouped jackknife
    standard error over ``n_groups`` contiguous blocks.

    Returns
    -------
    (tau, se)
    """
    if n_draws < n_groups or n_groups < 2:
        raise ValueError("need n_draws >= n_groups >= 2")
    _, truth = generate_cohort(cfg, n_draws, master_seed)
    m = truth.last_wave + 1
    group = (np.arange(n_draws) * n_groups) // n_draws

    stratum = truth.surv_exposed[:, 1:m].astype(float)
    diff = np.where(
        stratum == 1.0, truth.y_exposed[:, 1:m] - truth.y_never[:, 1:m], 0.0
    )
    count_g = np.zeros((n_groups, m - 1))
    diff_g = np.zeros((n_groups, m - 1))
    np.add.at(count_g, group, stratum)
    np.add.at(diff_g, group, diff)
    count_tot = count_g.sum(axis=0)
    diff_tot = diff_g.sum(axis=0)
    if np.any(count_tot == 0):
        j = int(np.argmax(count_tot == 0)) + 1
        raise ValueError(f"empty always-survivor stratum at wave {j}")

    def tau_from(counts: np.ndarray, diffs: np.ndarray, n_eff: int) -> float:
        p = counts / n_eff
        contrasts = diffs / counts
        weights = p / p.sum()
        return float(np.sum(weights * contrasts))

    tau = tau_from(count_tot, diff_tot, n_draws)
    sizes = np.bincount(group, minlength=n_groups)
    taus = np.empty(n_groups)
    for g in range(n_groups):
        counts = count_tot - count_g[g]
        if np.any(counts == 0):
            j = int(np.argmax(counts == 0)) + 1
            raise ValueError(f"empty always-survivor stratum at wave {j}")
        taus[g] = tau_from(counts, diff_tot - diff_g[g], n_draws - int(sizes[g]))
    se = float(np.sqrt((n_groups - 1) / n_groups * np.sum((taus - taus.mean()) ** 2)))
    return tau, se


# ---------------------------------------------------------------------------
# Exact enumeration for discrete configurations


def _hist1(x0: int, u: float, w: tuple, y: tuple, z_cols: int = 0) -> History:
    k = len(w)
    return History(
        x0=np.array([x0]),
        u=np.array([u]),
        w=np.array([w], dtype=float).reshape(1, k),
        y=np.array([y], dtype=float).reshape(1, k),
        z=np.zeros((1, k)),
    )


def _scalar(fn_value: np.ndarray, what: str, wave: int) -> float:
    value = float(np.asarray(fn_value, dtype=float).reshape(-1)[0])
    if not -1e-12 <= value <= 1.0 + 1e-12:
        raise ValueError(f"mechanism probability outside [0, 1] for {what} at wave {wave}")
    return min(max(value, 0.0), 1.0)


def _require_discrete(cfg: DgpConfig) -> None:
    if not cfg.discrete:
        raise ValueError("exact enumeration requires a discrete configuration")


def _wave0_paths(cfg: DgpConfig, marginal_u: bool) -> list[dict]:
    """Initial path set: baseline cell, latent confounder, covariate, outcome.

    With ``marginal_u`` the latent confounder is integrated out (its
    prevalence substituted), matching what observed-data models see.
    """
    paths = []
    if cfg.theta > 0 and not marginal_u:
        u_branches = [(1.0, cfg.theta), (0.0, 1.0 - cfg.theta)]
    else:
        u_branches = [(cfg.theta if marginal_u else 0.0, 1.0)]
    for cell in range(cfg.n_levels):
        pc = float(cfg.cell_probs[cell])
        if pc == 0.0:
            continue
        for u_val, pu in u_branches:
            h = _hist1(cell, u_val, (), ())
            pw = _scalar(cfg.w_prob(0, h), "covariate", 0)
            for w0, pwv in ((1.0, pw), (0.0, 1.0 - pw)):
                if pwv == 0.0:
                    continue
                y0 = float(np.asarray(cfg.y_mean(0, h, np.zeros(1), np.full(1, w0)))[0])
                paths.append(
                    {
                        "prob": pc * pu * pwv,
                        "x0": cell,
                        "u": u_val,
                        "w": (w0,),
                        "y": (y0,),
                    }
                )
    return paths


def _check_support(n_paths: int, max_paths: int) -> None:
    if n_paths > max_paths:
        raise ValueError(
            f"enumeration support too large: {n_paths} paths exceed cap {max_paths}"
        )


def oracle_sace_exact(cfg: DgpConfig, max_paths: int = 200_000) -> dict:
    """Exhaustively enumerated survivor-stratum truth for a discrete design.

    Walks every never-exposed trajectory (covariate paths, dropout
    patterns, and, where the always-survivor advantage is non-zero,
    stratum labels), accumulating per-wave always-survivor masses and
    potential-outcome contrasts.

    Returns
    -------
    dict
        ``tau``, per-wave ``contrasts``, ``p_exposed``, and ``weights``.
    """
    _require_discrete(cfg)
    m_waves = cfg.last_wave + 1
    num = np.zeros(m_waves)
    den = np.zeros(m_waves)

    paths = _wave0_paths(cfg, marginal_u=False)
    for path in paths:
        path["ret"] = 1
        path["fm"] = -1

    for k in range(1, m_waves):
        new_paths: list[dict] = []
        for path in paths:
            h = _hist1(path["x0"], path["u"], path["w"], path["y"])
            m_k = _scalar(cfg.surv(k, h), "survival", k)
            a_u = _scalar(cfg.propensity(k, h), "exposure", k)
            rho_k = _scalar(cfg.retention(k, h), "retention", k)
            _, p1_k, p0_k = exposure_survival_split(m_k, a_u, float(cfg.nu[k]))
            p1_k, p0_k = float(p1_k), float(p0_k)
            pw = _scalar(cfg.w_prob(k, h), "covariate", k)

            if path["ret"] == 1:
                r_branches = [(1, rho_k), (0, 1.0 - rho_k)]
            else:
                r_branches = [(0, 1.0)]
            for r_now, pr in r_branches:
                if pr == 0.0:
                    continue
                fm = path["fm"]
                if r_now == 0 and path["ret"] == 1:
                    fm = k
                for w_now, pwv in ((1.0, pw), (0.0, 1.0 - pw)):
                    if pwv == 0.0:
                        continue
                    base_prob = path["prob"] * pr * pwv
                    h_eval = h
                    mu1 = float(
                        np.asarray(cfg.y_mean(k, h_eval, np.ones(1), np.full(1, w_now)))[0]
                    )
                    mu0 = float(
                        np.asarray(cfg.y_mean(k, h_eval, np.zeros(1), np.full(1, w_now)))[0]
                    )
                    # Always-survivor accumulation at this wave: the
                    # stratum has probability p1 among those alive
                    # through k-1; the potential-outcome difference is
                    # free of the shared stratum/dropout/noise shifts.
                    num[k] += base_prob * p1_k * (mu1 - mu0)
                    den[k] += base_prob * p1_k
                    # Continue the never-exposed trajectory among
                    # survivors; branch on the stratum label only when
                    # it shifts the carried outcome.
                    if p0_k == 0.0:
                        continue
                    if cfg.delta[k] != 0.0 and p0_k > p1_k:
                        strata = [
                            (cfg.delta[k], p1_k),
                            (0.0, p0_k - p1_k),
                        ]
                    else:
                        strata = [(cfg.delta[k], p0_k)]
                    for shift, mass in strata:
                        if mass == 0.0:
                            continue
                        y_now = mu0 + shift + (cfg.gamma[k] if fm == k else 0.0)
                        new_paths.append(
                            {
                                "prob": base_prob * mass,
                                "x0": path["x0"],
                                "u": path["u"],
                                "w": path["w"] + (w_now,),
                                "y": path["y"] + (y_now,),
                                "ret": r_now,
                                "fm": fm,
                            }
                        )
        _check_support(len(new_paths), max_paths)
        paths = new_paths

    if np.any(den[1:] == 0.0):
        j = int(np.argmax(den[1:] == 0.0)) + 1
        raise ValueError(f"empty always-survivor stratum at wave {j}")
    contrasts = np.full(m_waves, np.nan)
    contrasts[1:] = num[1:] / den[1:]
    weights = np.full(m_waves, np.nan)
    weights[1:] = den[1:] / den[1:].sum()
    tau = float(np.sum(weights[1:] * contrasts[1:]))
    return {
        "tau": tau,
        "contrasts": contrasts,
        "p_exposed": den.copy(),
        "weights": weights,
    }


def _observed_propensity(cfg: DgpConfig, k: int, h: History) -> tuple[float, float, float]:
    """Exposure probability visible to the observed models, with the
    latent confounder integrated out; returns ``(a_bar, u_z1, u_z0)``
    where the last two are the confounder means given exposure value."""
    if cfg.theta == 0.0:
        a_bar = _scalar(cfg.propensity(k, h), "exposure", k)
        return a_bar, 0.0, 0.0
    h1 = History(x0=h.x0, u=np.ones(1), w=h.w, y=h.y, z=h.z)
    h0 = History(x0=h.x0, u=np.zeros(1), w=h.w, y=h.y, z=h.z)
    a1 = _scalar(cfg.propensity(k, h1), "exposure", k)
    a0 = _scalar(cfg.propensity(k, h0), "exposure", k)
    a_bar = cfg.theta * a1 + (1.0 - cfg.theta) * a0
    u_z1 = cfg.theta * a1 / max(a_bar, PROB_FLOOR)
    u_z0 = cfg.theta * (1.0 - a1) / max(1.0 - a_bar, PROB_FLOOR)
    return a_bar, u_z1, u_z0


def _observed_y_mean(
    cfg: DgpConfig, k: int, h: History, z_now: float, w_now: float, u_mean: float
) -> float:
    """Observed-model outcome mean: the structural mean with the latent
    confounder replaced by its conditional mean (valid by linearity)."""
    h_sub = History(x0=h.x0, u=np.full(1, u_mean), w=h.w, y=h.y, z=h.z)
    return float(
        np.asarray(cfg.y_mean(k, h_sub, np.full(1, z_now), np.full(1, w_now)))[0]
    )


def oracle_identified(cfg: DgpConfig, max_paths: int = 200_000) -> dict:
    """Exact value of the identified estimand for a discrete design.

    Substitutes the true conditional laws for fitted models and the
    true sensitivity values for posterior draws, then evaluates the
    observed-data functional by exhaustive enumeration of the pseudo
    trajectory measure — no Monte Carlo anywhere.  Both non-retention
    resolution variants are computed.

    Returns
    -------
    dict
        Keys ``"A3"`` and ``"FirstPrinciples"``, each with ``tau``,
        per-wave ``contrasts``, ``weights``, ``p_z``, ``p_zp``,
        ``mu_z``, ``mu_zp``.
    """
    _require_discrete(cfg)
    m_waves = cfg.last_wave + 1
    variants = ("A3", "FirstPrinciples")
    p_z = {v: np.zeros(m_waves) for v in variants}
    p_zp = {v: np.zeros(m_waves) for v in variants}
    mu_z = {v: np.zeros(m_waves) for v in variants}
    mu_zp = {v: np.zeros(m_waves) for v in variants}

    paths = _wave0_paths(cfg, marginal_u=True)
    for path in paths:
        path["ret"] = 1
        path["fm"] = -1
        path["chi"] = {v: 1.0 for v in variants}

    theta = cfg.theta
    for k in range(1, m_waves):
        new_paths: list[dict] = []
        for path in paths:
            h = _hist1(path["x0"], path["u"], path["w"], path["y"])
            m_k = _scalar(cfg.surv(k, h), "survival", k)
            rho_k = _scalar(cfg.retention(k, h), "retention", k)
            a_bar, u_z1, u_z0 = _observed_propensity(cfg, k, h)
            a_num = (1.0 - rho_k) * m_k
            a_surv = a_num / max(a_num + (1.0 - m_k), PROB_FLOOR)
            _, p1_k, p0_k = exposure_survival_split(m_k, a_bar, float(cfg.nu[k]))
            ratio = float(p1_k) / max(float(p0_k), PROB_FLOOR) if p0_k > 0 else 1.0
            pw = _scalar(cfg.w_prob(k, h), "covariate", k)

            compound = m_k * rho_k
            if path["ret"] == 1:
                r_branches = [(1, compound), (0, 1.0 - compound)]
            else:
                r_branches = [(0, 1.0)]
            for r_now, pr in r_branches:
                if pr == 0.0:
                    continue
                fm = path["fm"]
                if r_now == 0 and path["ret"] == 1:
                    fm = k
                for w_now, pwv in ((1.0, pw), (0.0, 1.0 - pw)):
                    if pwv == 0.0:
                        continue
                    prob = path["prob"] * pr * pwv
                    gam = cfg.gamma[k] if fm == k else 0.0
                    # Evaluation at wave j = k for both arms.
                    for variant in variants:
                        prefix = path["chi"][variant]
                        for value in (1, 0):
                            if r_now == 1:
                                chi = prefix
                            else:
                                f_k = float(
                                    resolution_factor(
                                        a_bar, a_surv, value, float(cfg.nu[k]), variant
                                    )
                                )
                                chi = prefix * f_k
                            u_mean = (u_z1 if value == 1 else u_z0) if theta > 0 else 0.0
                            mu_obs = _observed_y_mean(
                                cfg, k, h, float(value), w_now, u_mean
                            )
                            stratum_term = cfg.delta[k] * (1.0 if value == 1 else ratio)
                            pi_val = a_bar if value == 1 else 1.0 - a_bar
                            c_term = (-cfg.xi[k] if value == 1 else cfg.xi[k]) * (
                                1.0 - pi_val
                            )
                            phi_val = mu_obs + stratum_term + gam - c_term
                            if value == 1:
                                p_z[variant][k] += prob * chi
                                mu_z[variant][k] += prob * chi * phi_val
                            else:
                                p_zp[variant][k] += prob * chi
                                mu_zp[variant][k] += prob * chi * phi_val
                    # Continue the pseudo trajectory under the
                    # never-exposed values: carried outcome from the
                    # observed model (stratum mixture included), first
                    # unobserved wave shift added once.
                    u_mean0 = u_z0 if theta > 0 else 0.0
                    y_now = (
                        _observed_y_mean(cfg, k, h, 0.0, w_now, u_mean0)
                        + cfg.delta[k] * ratio
                        + gam
                    )
                    chi_next = dict(path["chi"])
                    if r_now == 0:
                        for variant in variants:
                            chi_next[variant] *= float(
                                resolution_factor(
                                    a_bar, a_surv, 0, float(cfg.nu[k]), variant
                                )
                            )
                    new_paths.append(
                        {
                            "prob": prob,
                            "x0": path["x0"],
                            "u": path["u"],
                            "w": path["w"] + (w_now,),
                            "y": path["y"] + (y_now,),
                            "ret": r_now,
                            "fm": fm,
                            "chi": chi_next,
                        }
                    )
        _check_support(len(new_paths), max_paths)
        paths = new_paths

    out: dict = {}
    for variant in variants:
        contrasts = np.full(m_waves, np.nan)
        weights = np.full(m_waves, np.nan)
        for j in range(1, m_waves):
            pz, pzp = p_z[variant][j], p_zp[variant][j]
            if pz <= 0 or pzp <= 0:
                raise ValueError(f"degenerate survival probability at wave {j}")
            contrasts[j] = (
                mu_z[variant][j] / pz
                - mu_zp[variant][j] / pzp
                - cfg.delta[j] * (1.0 - pz / pzp)
            )
        weights[1:] = p_z[variant][1:] / p_z[variant][1:].sum()
        out[variant] = {
            "tau": float(np.sum(weights[1:] * contrasts[1:])),
            "contrasts": contrasts,
            "weights": weights,
            "p_z": p_z[variant].copy(),
            "p_zp": p_zp[variant].copy(),
            "mu_z": mu_z[variant].copy(),
            "mu_zp": mu_zp[variant].copy(),
        }
    return out


# ---------------------------------------------------------------------------
# Exact model stack (true conditional laws exposed through the stack protocol)


class ExactStack:
    """True conditional laws of a configuration, as a model stack.

    Implements the same protocol as a fitted posterior draw
    (``mean_y``, ``prob``, ``draw_x0``, ``sigma_y``, ``last_wave``,
    ``n_levels``), so the G-computation engine can be driven by exact
    models instead of fitted ones.
    """

    def __init__(self, cfg: DgpConfig):
        _require_discrete(cfg)
        self.cfg = cfg
        self.last_wave = cfg.last_wave
        self.n_levels = cfg.n_levels

    def _decode(self, model: str, wave: int, matrix: np.ndarray) -> tuple[History, np.ndarray, np.ndarray]:
        names = feature_layout(model, wave, self.n_levels)
        matrix = np.asarray(matrix, dtype=float)
        if matrix.ndim != 2 or matrix.shape[1] != len(names):
            raise ValueError(
                f"feature matrix has {matrix.shape[1] if matrix.ndim == 2 else 'bad'}"
                f" columns, expected {len(names)}"
            )
        n_y = sum(1 for s in names if s.startswith("y"))
        n_z = sum(1 for s in names if s.startswith("z"))
        n_w = sum(1 for s in names if s.startswith("w") and not s.startswith("w0_"))
        y = matrix[:, :n_y]
        z = matrix[:, n_y : n_y + n_z]
        w = matrix[:, n_y + n_z : n_y + n_z + n_w]
        onehot = matrix[:, n_y + n_z + n_w :]
        x0 = np.argmax(onehot, axis=1)
        z_now = z[:, wave] if z.shape[1] > wave else None
        w_now = w[:, wave] if w.shape[1] > wave else None
        hist = History(
            x0=x0,
            u=np.zeros(matrix.shape[0]),
            w=w[:, :wave],
            y=y[:, :wave],
            z=z[:, :wave],
        )
        return hist, z_now, w_now

    def mean_y(self, wave: int, matrix: np.ndarray) -> np.ndarray:
        cfg = self.cfg
        hist, z_now, w_now = self._decode("Y", wave, matrix)
        if wave == 0:
            z_now = np.zeros(hist.n)
        n = hist.n
        if cfg.theta > 0 and wave == cfg.last_wave:
            a_bar, u_z1, u_z0 = _observed_propensity(
                cfg, wave, History(hist.x0, np.zeros(n), hist.w, hist.y, hist.z)
            )
            u_mean = np.where(z_now == 1, u_z1, u_z0)
        else:
            u_mean = np.zeros(n)
        hist_u = History(hist.x0, u_mean, hist.w, hist.y, hist.z)
        base = np.asarray(cfg.y_mean(wave, hist_u, z_now, w_now), dtype=float)
        if wave >= 1 and cfg.delta[wave] != 0.0:
            m_k = np.asarray(cfg.surv(wave, hist), dtype=float)
            a_bar = self.prob("Z", wave, _zdrop(matrix, wave, self.n_levels))
            _, p1, p0 = exposure_survival_split(m_k, a_bar, float(cfg.nu[wave]))
            ratio = np.where(p0 > 0, p1 / np.maximum(p0, PROB_FLOOR), 1.0)
            newly = hist.z[:, -1] == 0 if wave >= 2 else np.ones(n, dtype=bool)
            term = np.where(z_now == 1, 1.0, ratio)
            base = base + cfg.delta[wave] * np.where(newly, term, 0.0)
        return base

    def prob(self, model: str, wave: int, matrix: np.ndarray) -> np.ndarray:
        cfg = self.cfg
        if model not in ("Z", "W", "R", "S"):
            raise ValueError(f"unknown probability factor {model!r}")
        hist, _, _ = self._decode(model, wave, matrix)
        if model == "W":
            return np.clip(np.asarray(cfg.w_prob(wave, hist), dtype=float), 0.0, 1.0)
        if model == "R":
            return np.clip(np.asarray(cfg.retention(wave, hist), dtype=float), 0.0, 1.0)
        if model == "S":
            exposed = hist.z[:, -1] == 1 if wave >= 2 else np.zeros(hist.n, dtype=bool)
            m_fresh = np.asarray(cfg.surv(wave, hist), dtype=float)
            m_exp = np.asarray(cfg.surv_exposed(wave, hist), dtype=float)
            return np.clip(np.where(exposed, m_exp, m_fresh), 0.0, 1.0)
        if cfg.theta > 0:
            h1 = History(hist.x0, np.ones(hist.n), hist.w, hist.y, hist.z)
            h0 = History(hist.x0, np.zeros(hist.n), hist.w, hist.y, hist.z)
            a1 = np.asarray(cfg.propensity(wave, h1), dtype=float)
            a0 = np.asarray(cfg.propensity(wave, h0), dtype=float)
            return np.clip(cfg.theta * a1 + (1.0 - cfg.theta) * a0, 0.0, 1.0)
        return np.clip(np.asarray(cfg.propensity(wave, hist), dtype=float), 0.0, 1.0)

    def sigma_y(self, wave: int) -> float:
        return float(self.cfg.y_sd[wave])

    def draw_x0(self, n: int, rng: np.random.Generator) -> np.ndarray:
        if n == 0:
            return np.zeros(0, dtype=int)
        return rng.choice(self.n_levels, size=n, p=self.cfg.cell_probs)


def _zdrop(matrix: np.ndarray, wave: int, n_levels: int) -> np.ndarray:
    """Convert Y-layout features at a wave into Z-layout features by
    dropping the current exposure column."""
    names = feature_layout("Y", wave, n_levels)
    keep = [i for i, s in enumerate(names) if s != f"z{wave}"]
    return np.asarray(matrix, dtype=float)[:, keep]


# ---------------------------------------------------------------------------
# Preset designs


def _const(value: float) -> Mechanism:
    return lambda wave, hist: np.full(hist.n, value)


def _cell_ind(hist: History, cell: int) -> np.ndarray:
    return (hist.x0 == cell).astype(float)


def _expit(x: np.ndarray) -> np.ndarray:
    return 1.0 / (1.0 + np.exp(-np.asarray(x, dtype=float)))


def make_confounded_exposure() -> DgpConfig:
    """Single post-baseline wave with a latent exposure–outcome confounder.

    No death or dropout; the latent binary trait lowers the exposure
    probability and raises the outcome, producing a known history-free
    outcome-confounding offset.  The survivor-stratum effect equals the
    structural exposure coefficient.
    """
    theta, a1, a0, kappa = 0.4, 0.30, 0.55, 1.5
    a_bar = theta * a1 + (1.0 - theta) * a0
    xi_true = kappa * theta * (1.0 - theta) * (a0 - a1) / (a_bar * (1.0 - a_bar))

    def w_prob(wave: int, hist: History) -> np.ndarray:
        if wave == 0:
            return 0.4 + 0.2 * _cell_ind(hist, 1)
        return 0.3 + 0.3 * hist.w[:, -1]

    def propensity(wave: int, hist: History) -> np.ndarray:
        return a0 + (a1 - a0) * hist.u

    def y_mean(wave: int, hist: History, z_now, w_now) -> np.ndarray:
        if wave == 0:
            return 0.5 + 0.4 * np.asarray(w_now) + 0.2 * _cell_ind(hist, 1)
        return (
            1.0
            + 1.25 * np.asarray(z_now)
            + 0.6 * np.asarray(w_now)
            + 0.3 * hist.y[:, -1]
            + kappa * hist.u
        )

    return DgpConfig(
        last_wave=1,
        cell_probs=np.array([0.6, 0.4]),
        surv=_const(1.0),
        propensity=propensity,
        retention=_const(1.0),
        w_prob=w_prob,
        y_mean=y_mean,
        y_sd=np.zeros(2),
        theta=theta,
        xi=np.array([0.0, xi_true]),
        discrete=True,
        name="confounded-exposure",
    )


def make_survival_selection() -> DgpConfig:
    """Single post-baseline wave with death and exposure–death dependence.

    No dropout.  Exposure raises mortality through the non-survivor
    exposure excess; survival and exposure probabilities are history
    free (outcome means are not), which keeps the identified functional
    exactly equal to the survivor-stratum truth.
    """

    def w_prob(wave: int, hist: History) -> np.ndarray:
        if wave == 0:
            return 0.45 + 0.15 * _cell_ind(hist, 1)
        return 0.35 + 0.25 * hist.w[:, -1]

    def y_mean(wave: int, hist: History, z_now, w_now) -> np.ndarray:
        if wave == 0:
            return 0.4 + 0.5 * np.asarray(w_now) + 0.3 * _cell_ind(hist, 1)
        return (
            1.2
            + 0.9 * np.asarray(z_now)
            + 0.7 * np.asarray(w_now)
            + 0.25 * hist.y[:, -1]
            + 0.4 * hist.w[:, 0]
        )

    return DgpConfig(
        last_wave=1,
        cell_probs=np.array([0.55, 0.45]),
        surv=_const(0.78),
        propensity=_const(0.45),
        retention=_const(1.0),
        w_prob=w_prob,
        y_mean=y_mean,
        y_sd=np.zeros(2),
        nu=np.array([0.0, 0.30]),
        discrete=True,
        name="survival-selection",
    )


def make_informative_dropout() -> DgpConfig:
    """Two post-baseline waves with death, dropout, and outcome-shifted
    missingness.

    Exposure does not alter mortality (no non-survivor exposure
    excess), so every survivor is an always-survivor and the
    always-survivor advantage dial is inert; the first unobserved wave
    carries a negative outcome shift.  Mechanisms vary with the
    covariate history.  The exposure effect is the same at both waves,
    so the estimand does not depend on the pooling weights.
    """

    def w_prob(wave: int, hist: History) -> np.ndarray:
        if wave == 0:
            return np.full(hist.n, 0.5)
        return 0.3 + 0.35 * hist.w[:, -1] + 0.1 * _cell_ind(hist, 1)

    def surv(wave: int, hist: History) -> np.ndarray:
        return (0.85 if wave == 1 else 0.8) + 0.06 * hist.w[:, -1]

    def retention(wave: int, hist: History) -> np.ndarray:
        return (0.8 if wave == 1 else 0.75) + 0.1 * hist.w[:, -1]

    def propensity(wave: int, hist: History) -> np.ndarray:
        return (0.35 if wave == 1 else 0.3) + 0.2 * hist.w[:, -1]

    def y_mean(wave: int, hist: History, z_now, w_now) -> np.ndarray:
        if wave == 0:
            return 0.8 + 0.6 * np.asarray(w_now) + 0.2 * _cell_ind(hist, 1)
        lag = 0.2 * hist.z[:, -1] if wave >= 2 else 0.0
        return (
            0.5
            + 1.1 * np.asarray(z_now)
            + lag
            + 0.8 * np.asarray(w_now)
            + 0.3 * hist.y[:, -1]
        )

    return DgpConfig(
        last_wave=2,
        cell_probs=np.array([0.5, 0.5]),
        surv=surv,
        propensity=propensity,
        retention=retention,
        w_prob=w_prob,
        y_mean=y_mean,
        y_sd=np.zeros(3),
        delta=np.array([0.0, 0.6, 0.5]),
        gamma=np.array([0.0, -0.8, -1.1]),
        discrete=True,
        name="informative-dropout",
    )


def make_all_dials() -> DgpConfig:
    """Two post-baseline waves with every sensitivity dial active.

    Death, dropout, non-survivor exposure excess, a biting
    always-survivor advantage, and a missingness shift together; the
    identified functional is not exactly equal to the truth here, and
    the deviation of each resolution variant is reported rather than
    asserted away.
    """

    def w_prob(wave: int, hist: History) -> np.ndarray:
        if wave == 0:
            return np.full(hist.n, 0.5)
        return 0.35 + 0.3 * hist.w[:, -1]

    def y_mean(wave: int, hist: History, z_now, w_now) -> np.ndarray:
        if wave == 0:
            return 0.6 + 0.5 * np.asarray(w_now) + 0.25 * _cell_ind(hist, 1)
        return (
            0.7
            + 1.0 * np.asarray(z_now)
            + 0.7 * np.asarray(w_now)
            + 0.3 * hist.y[:, -1]
        )

    return DgpConfig(
        last_wave=2,
        cell_probs=np.array([0.5, 0.5]),
        surv=_const(0.85),
        propensity=_const(0.4),
        retention=_const(0.8),
        w_prob=w_prob,
        y_mean=y_mean,
        y_sd=np.zeros(3),
        nu=np.array([0.0, 0.2, 0.2]),
        delta=np.array([0.0, 0.5, 0.5]),
        gamma=np.array([0.0, -0.7, -0.7]),
        discrete=True,
        name="mixed-dials",
    )


def make_linear() -> DgpConfig:
    """Two post-baseline waves, no death or dropout, linear outcomes.

    Exposure is confounded by the covariate and outcome history, so
    weighting and outcome-model estimators must adjust, but with every
    sensitivity dial zero they all target the same plain contrast
    (equal to 1 by construction).
    """

    def w_prob(wave: int, hist: History) -> np.ndarray:
        if wave == 0:
            return np.full(hist.n, 0.5)
        return _expit(-0.4 + 1.0 * hist.w[:, -1] + 0.5 * hist.z[:, -1] + 0.3 * _cell_ind(hist, 1))

    def propensity(wave: int, hist: History) -> np.ndarray:
        return _expit(-0.5 + 0.8 * hist.w[:, -1] + 0.15 * (hist.y[:, -1] - 1.0) + 0.3 * _cell_ind(hist, 1))

    def y_mean(wave: int, hist: History, z_now, w_now) -> np.ndarray:
        if wave == 0:
            return 1.0 + 0.8 * np.asarray(w_now) + 0.4 * _cell_ind(hist, 1)
        return (
            0.8
            + 1.0 * np.asarray(z_now)
            + 0.3 * hist.z[:, -1]
            + 0.9 * np.asarray(w_now)
            + 0.6 * hist.y[:, -1]
        )

    return DgpConfig(
        last_wave=2,
        cell_probs=np.array([0.55, 0.45]),
        surv=_const(1.0),
        propensity=propensity,
        retention=_const(1.0),
        w_prob=w_prob,
        y_mean=y_mean,
        y_sd=np.array([1.0, 1.0, 1.0]),
        name="linear",
    )


def make_nonlinear() -> DgpConfig:
    """One post-baseline wave with strongly non-linear outcome surfaces.

    No death or dropout; the outcome mean bends and interacts in the
    lagged outcome and covariate, so a linear observed-data model is
    misspecified while a sum-of-trees model is not.
    """

    def w_prob(wave: int, hist: History) -> np.ndarray:
        return np.full(hist.n, 0.5)

    def propensity(wave: int, hist: History) -> np.ndarray:
        return _expit(-0.3 + 0.5 * np.sin(1.2 * hist.y[:, -1]) + 0.6 * hist.w[:, -1])

    def y_mean(wave: int, hist: History, z_now, w_now) -> np.ndarray:
        if wave == 0:
            return 1.2 * np.asarray(w_now) + 0.6 * _cell_ind(hist, 1)
        y0 = hist.y[:, -1]
        return (
            0.5
            + 1.0 * np.asarray(z_now)
            + 2.0 * np.sin(1.6 * y0)
            + 1.5 * (np.asarray(w_now) - 0.5) * y0
            + 0.8 * _cell_ind(hist, 1) * np.asarray(w_now)
        )

    return DgpConfig(
        last_wave=1,
        cell_probs=np.array([0.5, 0.5]),
        surv=_const(1.0),
        propensity=propensity,
        retention=_const(1.0),
        w_prob=w_prob,
        y_mean=y_mean,
        y_sd=np.array([1.0, 0.7]),
        name="nonlinear",
    )


def make_recovery() -> DgpConfig:
    """Two post-baseline waves with death, dropout, and a missingness
    shift, built for estimator recovery runs.

    Exposure does not alter mortality, so the identified functional is
    exact under the true sensitivity values and fitted-model error is
    the only bias source.  Outcome surfaces are smooth with mild
    non-linearity and interactions.
    """

    def w_prob(wave: int, hist: History) -> np.ndarray:
        if wave == 0:
            return np.full(hist.n, 0.5)
        return _expit(-0.4 + 1.1 * hist.w[:, -1] + 0.5 * hist.z[:, -1] + 0.3 * _cell_ind(hist, 1))

    def surv(wave: int, hist: History) -> np.ndarray:
        return _expit(1.7 + 0.7 * hist.w[:, -1])

    def retention(wave: int, hist: History) -> np.ndarray:
        return _expit(1.3 + 0.5 * hist.w[:, -1])

    def propensity(wave: int, hist: History) -> np.ndarray:
        return _expit(-0.7 + 0.9 * hist.w[:, -1] + 0.35 * _cell_ind(hist, 1))

    def y_mean(wave: int, hist: History, z_now, w_now) -> np.ndarray:
        if wave == 0:
            return 1.5 + 0.8 * np.asarray(w_now) + 0.4 * _cell_ind(hist, 1)
        y_last = hist.y[:, -1]
        return (
            0.6
            + 0.7 * np.asarray(z_now)
            + 0.3 * hist.z[:, -1]
            + 0.9 * np.asarray(w_now)
            + 0.5 * y_last
            + 0.35 * np.sin(y_last)
            + 0.4 * np.asarray(w_now) * np.asarray(z_now)
        )

    return DgpConfig(
        last_wave=2,
        cell_probs=np.array([0.5, 0.5]),
        surv=surv,
        propensity=propensity,
        retention=retention,
        w_prob=w_prob,
        y_mean=y_mean,
        y_sd=np.array([0.9, 0.8, 0.8]),
        gamma=np.array([0.0, -0.9, -0.9]),
        name="recovery",
    )


PRESETS: dict[str, Callable[[], DgpConfig]] = {
    "confounded-exposure": make_confounded_exposure,
    "survival-selection": make_survival_selection,
    "informative-dropout": make_informative_dropout,
    "mixed-dials": make_all_dials,
    "linear": make_linear,
    "nonlinear": make_nonlinear,
    "recovery": make_recovery,
}


def preset(name: str) -> DgpConfig:
    """Build a preset configuration by name."""
    if name not in PRESETS:
        known = ", ".join(sorted(PRESETS))
        raise KeyError(f"unknown preset {name!r}; available: {known}")
    return PRESETS[name]()

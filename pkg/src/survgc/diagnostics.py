"""Model-fit scoring and posterior summaries.

Fit comparison uses the log pseudo marginal likelihood: each record's
conditional predictive ordinate (CPO) is the harmonic mean, over
posterior draws, of its observed-data likelihood — the product of the
factor densities the record identifies (observed outcome, exposure,
covariate, retention, and survival terms plus the baseline-cell
probability; factors a record never enters, such as survival terms
after dropout, are excluded to mirror the fitting subsets).  Summaries
are percentile-based, and chain agreement is scored with a split-chain
potential-scale-reduction statistic.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np
from scipy.special import logsumexp

from .cohort import CohortDataset, model_subset
from .obsmodels import factor_waves

__all__ = [
    "LpmlReport",
    "Summary",
    "TraceStat",
    "lpml",
    "summarize",
    "trace_stats",
]

PSR_FLAG_THRESHOLD = 1.1

_FACTORS = ("Y", "Z", "W", "R", "S")


@dataclass
class LpmlReport:
    """Pseudo-marginal-likelihood scores for one fitted model stack.

    ``total`` is the sum of per-record log conditional predictive
    ordinates; ``cpo`` holds the per-record ordinates themselves (all
    positive).  ``factor_totals`` scores each factor separately by the
    same construction restricted to that factor's likelihood terms;
    because harmonic means do not factor, these subtotals need not sum
    to ``total``.
    """

    total: float
    log_cpo: np.ndarray
    factor_totals: dict[str, float]
    n_draws: int
    cpo: np.ndarray = field(init=False)

    def __post_init__(self) -> None:
        self.cpo = np.exp(self.log_cpo)


def _log_cpo(loglik: np.ndarray) -> np.ndarray:
    """Per-record log harmonic mean of likelihoods from a (n, M) log matrix."""
    m = loglik.shape[1]
    return -(logsumexp(-loglik, axis=1) - np.log(m))


def lpml(stacks: Sequence, dataset: CohortDataset) -> LpmlReport:
    """Log pseudo marginal likelihood of a stack of posterior draws.

    ``stacks`` is a list of aligned model-stack draws (as returned by
    the stack fitters); at least two draws are required for the
    harmonic mean to measure predictive spread.  Likelihood terms are
    computed in log space and the harmonic mean with a max-shift, so
    the report is exact up to rounding even for very small densities.
    """
    if len(stacks) < 2:
        raise ValueError("need >= 2 draws")
    n = dataset.n_individuals
    m = len(stacks)
    J = dataset.last_wave
    total_ll = np.zeros((n, m))
    factor_lls: dict[str, np.ndarray] = {f: np.zeros((n, m)) for f in _FACTORS}
    factor_rows: dict[str, np.ndarray] = {f: np.zeros(n, dtype=bool) for f in _FACTORS}
    for factor in _FACTORS:
        for wave in factor_waves(factor, J):
            data = model_subset(dataset, factor, wave)
            rows = data.rows
            factor_rows[factor][rows] = True
            for d, stack in enumerate(stacks):
                if factor == "Y":
                    sd = stack.sigma_y(wave)
                    if not np.isfinite(sd) or sd <= 0:
                        raise ValueError(
                            f"non-finite likelihood for record {rows[0]} in factor Y at wave {wave}"
                        )
                    mu = stack.mean_y(wave, data.X)
                    resid = (data.response - mu) / sd
                    ll = -0.5 * resid**2 - np.log(sd) - 0.5 * np.log(2.0 * np.pi)
                else:
                    p = stack.prob(factor, wave, data.X)
                    ll = np.where(data.response == 1, np.log(p), np.log1p(-p))
                if not np.all(np.isfinite(ll)):
                    bad = rows[int(np.flatnonzero(~np.isfinite(ll))[0])]
                    raise ValueError(
                        f"non-finite likelihood for record {bad} in factor {factor} at wave {wave}"
                    )
                total_ll[rows, d] += ll
                factor_lls[factor][rows, d] += ll
    # Baseline-cell probability, identified by every record.
    x0 = dataset.x0.astype(int)
    base_ll = np.zeros((n, m))
    for d, stack in enumerate(stacks):
        base_ll[:, d] = np.log(stack.pi_x0[x0])
    if not np.all(np.isfinite(base_ll)):
        bad = int(np.flatnonzero(~np.isfinite(base_ll))[0] // m)
        raise ValueError(f"non-finite likelihood for record {bad} in factor x0")
    total_ll += base_ll
    log_cpo = _log_cpo(total_ll)
    factor_totals = {
        f: float(np.sum(_log_cpo(factor_lls[f][factor_rows[f]])))
        for f in _FACTORS
        if np.any(factor_rows[f])
    }
    factor_totals["x0"] = float(np.sum(_log_cpo(base_ll)))
    return LpmlReport(
        total=float(np.sum(log_cpo)),
        log_cpo=log_cpo,
        factor_totals=factor_totals,
        n_draws=m,
    )


class Summary(NamedTuple):
    """Mean, spread, and central 95% interval of a sample vector."""

    mean: float
    sd: float
    q2_5: float
    q97_5: float


def summarize(samples: np.ndarray) -> Summary:
    """Posterior summary: mean, sample SD, and percentile 95% interval.

    Quantiles are order statistics with linear interpolation, so for
    samples ``1..100`` the interval is ``(3.475, 97.525)``.
    """
    samples = np.asarray(samples, dtype=float).ravel()
    if samples.size == 0:
        raise ValueError("empty sample vector")
    sd = float(np.std(samples, ddof=1)) if samples.size > 1 else 0.0
    lo, hi = np.percentile(samples, [2.5, 97.5])
    return Summary(mean=float(np.mean(samples)), sd=sd, q2_5=float(lo), q97_5=float(hi))


@dataclass
class TraceStat:
    """Split-chain dispersion statistic for one scalar quantity."""

    psr: float
    flagged: bool
    n_sequences: int


def trace_stats(chains: np.ndarray | Sequence[np.ndarray]) -> TraceStat:
    """Split-chain potential scale reduction of per-chain sample paths.

    ``chains`` is a matrix with one row per chain (or a sequence of
    equal-length vectors; a single vector is treated as one chain).
    Every chain is split in half, and the statistic compares
    between-sequence to within-sequence variance; values above 1.1 are
    flagged as disagreement between chains or non-stationarity within
    them.
    """
    arr = np.atleast_2d(np.asarray(chains, dtype=float))
    if arr.ndim != 2:
        raise ValueError("chains must form a matrix of equal-length rows")
    half = arr.shape[1] // 2
    if half < 2:
        raise ValueError("need at least 4 samples per chain to split")
    seqs = np.vstack([arr[:, :half], arr[:, half : 2 * half]])
    n = seqs.shape[1]
    means = seqs.mean(axis=1)
    within = float(np.mean(np.var(seqs, axis=1, ddof=1)))
    between_over_n = float(np.var(means, ddof=1))
    if within <= 0:
        psr = 1.0 if between_over_n <= 0 else np.inf
    else:
        var_plus = (n - 1) / n * within + between_over_n
        psr = float(np.sqrt(var_plus / within))
    return TraceStat(psr=psr, flagged=psr > PSR_FLAG_THRESHOLD, n_sequences=seqs.shape[0])

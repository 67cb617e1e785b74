"""Factorized observed-data model: per-wave regressions plus baseline cells.

The observed data factor into, at each wave ``j``: a survival
probability, a retention probability, a covariate probability, an
exposure propensity, and an outcome mean — each conditional on the
flattened observed history — together with a saturated multinomial over
baseline cells.  Binary factors are probit sum-of-trees models, the
outcome is a continuous sum-of-trees model, and the baseline cell
probabilities get a conjugate Dirichlet(1) update.  Factor posteriors
are sampled independently and aligned draw-by-draw into
:class:`ModelStackDraw` objects, which is valid because the factors
share no parameters.

Wave-0 survival and retention are identically 1 and never modeled;
wave-0 exposure is identically 0.
"""

from __future__ import annotations

import hashlib
import json
import os
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import bart
from .cohort import CohortDataset, feature_layout, model_subset, validate_cohort
from .rng import stream

__all__ = [
    "ModelStackDraw",
    "cond_mean_y",
    "cond_prob",
    "factor_waves",
    "fit_stack",
    "load_stack",
    "sample_baseline",
    "save_stack",
]

# stream domain codes (master_seed, DOMAIN, chain, factor, wave)
_DOMAIN_FACTOR_FIT = 1
_DOMAIN_BASELINE = 2

_FACTOR_CODES = {"Y": 0, "Z": 1, "W": 2, "R": 3, "S": 4}


def factor_waves(factor: str, last_wave: int) -> range:
    """Waves at which a factor is modeled (``Z``, ``R``, ``S`` start at 1)."""
    start = 0 if factor in ("Y", "W") else 1
    return range(start, last_wave + 1)


@dataclass
class ModelStackDraw:
    """One aligned posterior draw of every factor plus baseline cells.

    ``forests[(factor, wave)]`` holds the factor's forest draw;
    ``pi_x0`` is a point on the ``L``-simplex.  ``layouts`` records the
    conditioning feature names per factor and wave, identical across
    draws of one fit.
    """

    forests: dict[tuple[str, int], bart.ForestDraw]
    pi_x0: np.ndarray
    layouts: dict[tuple[str, int], list[str]] = field(repr=False)
    n_levels: int = 0
    last_wave: int = 0

    def __post_init__(self) -> None:
        total = float(np.sum(self.pi_x0))
        if abs(total - 1.0) > 1e-12:
            raise ValueError(f"baseline probabilities sum to {total}, not 1")

    def sigma_y(self, wave: int) -> float:
        """Residual scale of the outcome factor at ``wave``."""
        return float(self.forests[("Y", wave)].sigma)

    # Stack protocol used by the G-computation engine; any object with
    # these methods plus ``last_wave``/``n_levels`` can drive it.
    def mean_y(self, wave: int, history: np.ndarray) -> np.ndarray:
        """Outcome conditional mean at ``wave`` for history feature rows."""
        return bart.predict_mean(self.forests[("Y", wave)], history)

    def prob(self, factor: str, wave: int, history: np.ndarray) -> np.ndarray:
        """Conditional probability of a binary factor at ``wave``."""
        if factor not in ("Z", "W", "R", "S"):
            raise ValueError(f"factor must be one of Z, W, R, S, got {factor!r}")
        return bart.predict_prob(self.forests[(factor, wave)], history)

    def draw_x0(self, n: int, rng: np.random.Generator) -> np.ndarray:
        """Sample ``n`` baseline cell indices from this draw's probabilities."""
        if n == 0:
            return np.zeros(0, dtype=np.int64)
        return rng.choice(self.pi_x0.size, size=n, p=self.pi_x0)


def cond_mean_y(draw: ModelStackDraw, wave: int, history: np.ndarray) -> np.ndarray:
    """Outcome conditional mean at ``wave`` for history feature rows.

    ``history`` must match the wave's conditioning layout: lagged
    outcomes, exposures through the wave, covariates through the wave,
    one-hot baseline cells.
    """
    return draw.mean_y(wave, history)


def cond_prob(draw: ModelStackDraw, factor: str, wave: int, history: np.ndarray) -> np.ndarray:
    """Conditional probability of a binary factor at ``wave``, in (0, 1)."""
    return draw.prob(factor, wave, history)


def sample_baseline(draw: ModelStackDraw, n: int, rng: np.random.Generator) -> np.ndarray:
    """Sample ``n`` baseline cell indices from this draw's cell probabilities."""
    return draw.draw_x0(n, rng)


def fit_stack(
    dataset: CohortDataset,
    cfg: bart.BartConfig | dict[str, bart.BartConfig],
    master_seed: int,
    chain: int = 0,
    validate: bool = True,
) -> list[ModelStackDraw]:
    """Fit every factor of the observed-data model and align the draws.

    Each factor-wave sampler gets an independent stream keyed by
    ``(master_seed, chain, factor, wave)``, so the draw sequence of one
    factor is unchanged by adding, removing, or reordering the others,
    and chains are reproducible in parallel.

    Parameters
    ----------
    dataset : CohortDataset
    cfg : BartConfig or dict
        One configuration for all factors, or a mapping from factor
        letter (``"Y" .. "S"``) to its configuration.  All
        configurations must keep the same number of draws.
    master_seed : int
    chain : int
        Chain index mixed into every stream key.
    validate : bool
        Validate the dataset first and refuse on violations.

    Returns
    -------
    list of ModelStackDraw
    """
    if validate:
        report = validate_cohort(dataset)
        if not report.ok:
            raise ValueError(f"inadmissible dataset: {report.as_lines()[:5]}")

    def cfg_for(factor: str) -> bart.BartConfig:
        if isinstance(cfg, dict):
            return cfg[factor]
        return cfg

    n_keep = {cfg_for(f).n_keep for f in _FACTOR_CODES}
    if len(n_keep) != 1:
        raise ValueError("all factor configurations must share n_keep")
    n_draws = n_keep.pop()

    J = dataset.last_wave
    forests: dict[tuple[str, int], list[bart.ForestDraw]] = {}
    layouts: dict[tuple[str, int], list[str]] = {}
    for factor, code in _FACTOR_CODES.items():
        for wave in factor_waves(factor, J):
            data = model_subset(dataset, factor, wave)
            layouts[(factor, wave)] = data.feature_names
            fit_rng = stream(master_seed, _DOMAIN_FACTOR_FIT, chain, code, wave)
            if factor == "Y":
                draws = bart.fit_continuous(data.X, data.response, cfg_for(factor), fit_rng)
            else:
                if np.all(data.response == data.response[0]):
                    warnings.warn(
                        f"factor {factor} at wave {wave} has a constant response; "
                        "probabilities will be prior-tempered",
                        stacklevel=2,
                    )
                with warnings.catch_warnings():
                    warnings.simplefilter("ignore", UserWarning)
                    draws = bart.fit_probit(data.X, data.response, cfg_for(factor), fit_rng)
            forests[(factor, wave)] = draws

    counts = np.bincount(dataset.x0.astype(int), minlength=dataset.n_levels)
    dir_rng = stream(master_seed, _DOMAIN_BASELINE, chain)
    pi_draws = dir_rng.dirichlet(1.0 + counts, size=n_draws)

    stack = []
    for m in range(n_draws):
        stack.append(
            ModelStackDraw(
                forests={key: seq[m] for key, seq in forests.items()},
                pi_x0=pi_draws[m],
                layouts=layouts,
                n_levels=dataset.n_levels,
                last_wave=J,
            )
        )
    return stack


# ---------------------------------------------------------------------------
# Persistence


def dataset_fingerprint(dataset: CohortDataset) -> str:
    """Content hash of a cohort, used to bind fits to their data."""
    digest = hashlib.sha256()
    for arr in (dataset.y, dataset.z, dataset.w, dataset.r, dataset.s, dataset.x0):
        digest.update(np.ascontiguousarray(np.asarray(arr, dtype=float)).tobytes())
    digest.update(str(dataset.n_levels).encode())
    return digest.hexdigest()


def save_stack(directory: str, draws: list[ModelStackDraw], meta: dict | None = None) -> None:
    """Persist aligned stack draws: one archive per factor-wave plus a manifest."""
    if not draws:
        raise ValueError("no draws to save")
    os.makedirs(directory, exist_ok=True)
    first = draws[0]
    for (factor, wave), _ in first.forests.items():
        seq = [d.forests[(factor, wave)] for d in draws]
        bart.save_forest_draws(
            os.path.join(directory, f"factor_{factor}_{wave}.npz"),
            seq,
            meta={"factor": factor, "wave": wave},
        )
    np.save(os.path.join(directory, "pi_x0.npy"), np.stack([d.pi_x0 for d in draws]))
    manifest = {
        "n_draws": len(draws),
        "n_levels": first.n_levels,
        "last_wave": first.last_wave,
        "layouts": {f"{f}:{w}": names for (f, w), names in first.layouts.items()},
        "meta": meta or {},
    }
    with open(os.path.join(directory, "manifest.json"), "w", encoding="utf-8") as handle:
        json.dump(manifest, handle, indent=2, sort_keys=True)


def load_stack(directory: str) -> tuple[list[ModelStackDraw], dict]:
    """Load stack draws written by :func:`save_stack`; returns (draws, manifest)."""
    with open(os.path.join(directory, "manifest.json"), encoding="utf-8") as handle:
        manifest = json.load(handle)
    layouts: dict[tuple[str, int], list[str]] = {}
    for key, names in manifest["layouts"].items():
        factor, wave = key.split(":")
        layouts[(factor, int(wave))] = names
    pi_x0 = np.load(os.path.join(directory, "pi_x0.npy"))
    forests: dict[tuple[str, int], list[bart.ForestDraw]] = {}
    for factor, wave in layouts:
        seq, _ = bart.load_forest_draws(os.path.join(directory, f"factor_{factor}_{wave}.npz"))
        forests[(factor, wave)] = seq
    n_draws = manifest["n_draws"]
    draws = []
    for m in range(n_draws):
        draws.append(
            ModelStackDraw(
                forests={key: seq[m] for key, seq in forests.items()},
                pi_x0=pi_x0[m],
                layouts=layouts,
                n_levels=int(manifest["n_levels"]),
                last_wave=int(manifest["last_wave"]),
            )
        )
    return draws, manifest

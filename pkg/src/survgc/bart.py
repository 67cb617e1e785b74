"""Sum-of-trees Bayesian regression with continuous and probit links.

Implements a Metropolis-within-Gibbs sampler over a fixed-size ensemble
of regression trees with the usual regularizing priors: a depth-decaying
split prior ``alpha * (1 + depth) ** -beta``, shrinking Gaussian leaf
values, and (for the continuous link) a scaled inverse-chi-square noise
variance calibrated to the sample variance.  Binary responses use
truncated-normal latent augmentation so every leaf update stays
conjugate.

Trees are stored as flat heap arrays (node ``i`` has children ``2i+1``
and ``2i+2``), which keeps both sampling and prediction vectorized.
Proposals are drawn only from splits with non-empty children, so no
empty-leaf bookkeeping is needed.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr, ndtri
from scipy.stats import invgamma

__all__ = [
    "BartConfig",
    "ForestDraw",
    "fit_continuous",
    "fit_probit",
    "load_forest_draws",
    "predict_latent",
    "predict_mean",
    "predict_prob",
    "save_forest_draws",
    "split_prior_prob",
]

LEAF = -1
UNUSED = -2
PROB_EPS = 1e-12
_CDF_EPS = 1e-15


@dataclass
class BartConfig:
    """Sampler settings: ensemble size, priors, and MCMC schedule.

    Parameters
    ----------
    n_trees : int
        Ensemble size ``K``.
    alpha, beta : float
        Split prior ``alpha * (1 + depth) ** -beta``.
    k_mu : float
        Leaf-value shrinkage; prior scale is ``0.5 / (k_mu * sqrt(K))``
        on the standardized continuous scale and ``3 / (k_mu * sqrt(K))``
        on the probit latent scale.
    nu_df, q : float
        Noise-variance prior: scaled inverse-chi-square with ``nu_df``
        degrees of freedom, scaled so that the prior puts mass ``q``
        below the sample variance.
    n_burn, n_keep, thin : int
        MCMC schedule; ``n_keep`` draws are recorded every ``thin``
        iterations after ``n_burn`` burn-in iterations.
    prior_only : bool
        If True, likelihood terms are dropped: tree structures follow
        the prior (restricted to data-supported split rules) and leaf
        values are drawn from their prior.  Used for prior-conformance
        checks.
    """

    n_trees: int = 50
    alpha: float = 0.95
    beta: float = 2.0
    k_mu: float = 2.0
    nu_df: float = 3.0
    q: float = 0.9
    p_grow: float = 0.28
    p_prune: float = 0.28
    p_change: float = 0.44
    n_burn: int = 100
    n_keep: int = 100
    thin: int = 1
    prior_only: bool = False

    def __post_init__(self) -> None:
        if self.n_trees < 1:
            raise ValueError("n_trees must be >= 1")
        if not 0.0 < self.alpha < 1.0:
            raise ValueError("alpha must be in (0, 1)")
        if self.beta < 0.0:
            raise ValueError("beta must be >= 0")
        if self.nu_df <= 0.0:
            raise ValueError("nu_df must be > 0")
        if not 0.0 < self.q < 1.0:
            raise ValueError("q must be in (0, 1)")
        if min(self.p_grow, self.p_prune, self.p_change) < 0.0:
            raise ValueError("move probabilities must be non-negative")
        total = self.p_grow + self.p_prune + self.p_change
        if abs(total - 1.0) > 1e-9:
            raise ValueError("move probabilities must sum to 1")
        if self.n_keep < 1:
            raise ValueError("n_keep must be >= 1")


@dataclass(frozen=True)
class ForestDraw:
    """One posterior draw of the ensemble.

    ``feature[k, i]`` is the split feature of node ``i`` of tree ``k``
    (``-1`` for a leaf, ``-2`` for an unused slot), ``threshold`` the
    split point (routing is ``x <= threshold`` to child ``2i+1``), and
    ``value`` the leaf value on the standardized scale.  Predictions
    are de-standardized with ``offset + scale * sum_of_trees``; probit
    draws have ``scale = 1``, ``offset = 0``, and ``sigma = None``.
    """

    feature: np.ndarray
    threshold: np.ndarray
    value: np.ndarray
    offset: float
    scale: float
    sigma: float | None
    link: str
    n_features: int


def split_prior_prob(depth: int, alpha: float, beta: float) -> float:
    """Prior probability that a node at ``depth`` is split."""
    return float(alpha * (1.0 + depth) ** (-beta))


def _node_depths(cap: int) -> np.ndarray:
    return np.int64(np.log2(np.arange(1, cap + 1)))


class _TreeEnsembleSampler:
    """Internal mutable sampler state for one fit."""

    def __init__(self, X: np.ndarray, y_work: np.ndarray, cfg: BartConfig, link: str):
        self.X = X
        self.n, self.p = X.shape
        self.cfg = cfg
        self.link = link
        self.cap = 63
        K = cfg.n_trees
        self.feature = np.full((K, self.cap), UNUSED, dtype=np.int32)
        self.threshold = np.zeros((K, self.cap))
        self.value = np.zeros((K, self.cap))
        self.feature[:, 0] = LEAF
        self.node_of = np.zeros((K, self.n), dtype=np.int64)
        # per-tree caches of leaf point sets and per-leaf available split
        # features; invalidated only when a proposal is accepted
        all_pts = np.arange(self.n)
        self.pts_cache: list[dict[int, np.ndarray]] = [{0: all_pts} for _ in range(K)]
        self.avail_cache: list[dict[int, np.ndarray]] = [{} for _ in range(K)]
        self.total = np.zeros(self.n)
        self.y_work = y_work
        self.depths = _node_depths(self.cap)
        if link == "probit":
            self.sigma_mu = 3.0 / (cfg.k_mu * np.sqrt(K))
        else:
            self.sigma_mu = 0.5 / (cfg.k_mu * np.sqrt(K))
        self.sigma2 = 1.0

    # -- structural helpers -------------------------------------------------

    def _grow_capacity(self, needed: int) -> None:
        while needed >= self.cap:
            new_cap = 2 * self.cap + 1
            K = self.cfg.n_trees
            feature = np.full((K, new_cap), UNUSED, dtype=np.int32)
            threshold = np.zeros((K, new_cap))
            value = np.zeros((K, new_cap))
            feature[:, : self.cap] = self.feature
            threshold[:, : self.cap] = self.threshold
            value[:, : self.cap] = self.value
            self.feature, self.threshold, self.value = feature, threshold, value
            self.cap = new_cap
            self.depths = _node_depths(self.cap)

    def _leaves(self, k: int) -> np.ndarray:
        return np.flatnonzero(self.feature[k] == LEAF)

    def _prunable(self, k: int) -> np.ndarray:
        feat = self.feature[k]
        internal = np.flatnonzero(feat >= 0)
        if internal.size == 0:
            return internal
        keep = (feat[2 * internal + 1] == LEAF) & (feat[2 * internal + 2] == LEAF)
        return internal[keep]

    def _pts(self, k: int, node: int) -> np.ndarray:
        cache = self.pts_cache[k]
        pts = cache.get(node)
        if pts is None:
            pts = np.flatnonzero(self.node_of[k] == node)
            cache[node] = pts
        return pts

    def _avail(self, k: int, node: int, pts: np.ndarray | None = None) -> np.ndarray:
        # valid for a node's whole lifetime: structural moves never change
        # the point set of an existing node, only create or remove slots
        cache = self.avail_cache[k]
        avail = cache.get(node)
        if avail is None:
            sub = self.X[self._pts(k, node) if pts is None else pts]
            avail = np.flatnonzero(sub.min(axis=0) != sub.max(axis=0))
            cache[node] = avail
        return avail

    def _growable_leaves(self, k: int) -> list[int]:
        out = []
        for leaf in self._leaves(k):
            if self._pts(k, int(leaf)).size >= 2 and self._avail(k, int(leaf)).size > 0:
                out.append(int(leaf))
        return out

    def _move_probs(self, singleton: bool) -> tuple[float, float, float]:
        if singleton:
            return 1.0, 0.0, 0.0
        return self.cfg.p_grow, self.cfg.p_prune, self.cfg.p_change

    # -- marginal likelihood ------------------------------------------------

    def _log_ml(self, s: float, n_pts: float) -> float:
        """Leaf-marginal terms that do not cancel between tree states."""
        if self.cfg.prior_only:
            return 0.0
        denom = self.sigma2 + n_pts * self.sigma_mu**2
        return 0.5 * np.log(self.sigma2 / denom) + self.sigma_mu**2 * s * s / (2.0 * self.sigma2 * denom)

    # -- Metropolis moves ----------------------------------------------------

    def _update_tree(self, k: int, rng: np.random.Generator) -> None:
        g_before = self.value[k][self.node_of[k]]
        resid = self.y_work - self.total + g_before
        feat = self.feature[k]
        singleton = feat[0] == LEAF
        p_grow, p_prune, _ = self._move_probs(bool(singleton))
        u_move = rng.random()
        if u_move < p_grow:
            self._try_grow(k, resid, rng, p_grow)
        elif u_move < p_grow + p_prune:
            self._try_prune(k, resid, rng, p_prune)
        else:
            self._try_change(k, resid, rng)
        self._draw_leaf_values(k, resid, rng)
        self.total += self.value[k][self.node_of[k]] - g_before

    def _try_grow(self, k: int, resid: np.ndarray, rng: np.random.Generator, p_grow_cur: float) -> None:
        growable = self._growable_leaves(k)
        if not growable:
            return
        leaf = int(growable[rng.integers(len(growable))])
        pts = self._pts(k, leaf)
        avail = self._avail(k, leaf)
        f = int(avail[rng.integers(avail.size)])
        uniq = np.unique(self.X[pts, f])
        cut = float(uniq[rng.integers(uniq.size - 1)])
        left_child, right_child = 2 * leaf + 1, 2 * leaf + 2
        self._grow_capacity(right_child)

        go_left = self.X[pts, f] <= cut
        n_left = int(go_left.sum())
        s_left = float(resid[pts[go_left]].sum())
        s_all = float(resid[pts].sum())
        n_all = pts.size

        depth = int(self.depths[leaf])
        ps_here = split_prior_prob(depth, self.cfg.alpha, self.cfg.beta)
        ps_child = split_prior_prob(depth + 1, self.cfg.alpha, self.cfg.beta)

        # count prunable nodes of the proposed tree: current prunable set
        # loses the parent of `leaf` iff its sibling is a leaf, gains `leaf`
        feat = self.feature[k]
        prunable_new = set(self._prunable(k).tolist())
        if leaf > 0:
            parent = (leaf - 1) // 2
            prunable_new.discard(parent)
        prunable_new.add(leaf)
        singleton_after = False  # grown tree always has an internal node
        p_prune_new = self._move_probs(singleton_after)[1]

        log_accept = (
            np.log(p_prune_new)
            - np.log(p_grow_cur)
            + np.log(len(growable))
            - np.log(len(prunable_new))
            + np.log(ps_here)
            + 2.0 * np.log1p(-ps_child)
            - np.log1p(-ps_here)
            + self._log_ml(s_left, n_left)
            + self._log_ml(s_all - s_left, n_all - n_left)
            - self._log_ml(s_all, n_all)
        )
        if np.log(rng.random()) < log_accept:
            feat[leaf] = f
            self.threshold[k, leaf] = cut
            feat[left_child] = LEAF
            feat[right_child] = LEAF
            left_pts, right_pts = pts[go_left], pts[~go_left]
            self.node_of[k][left_pts] = left_child
            self.node_of[k][right_pts] = right_child
            cache = self.pts_cache[k]
            cache[left_child] = left_pts
            cache[right_child] = right_pts

    def _try_prune(self, k: int, resid: np.ndarray, rng: np.random.Generator, p_prune_cur: float) -> None:
        prunable = self._prunable(k)
        if prunable.size == 0:
            return
        node = int(prunable[rng.integers(prunable.size)])
        left_child, right_child = 2 * node + 1, 2 * node + 2
        lp = self._pts(k, left_child)
        rp = self._pts(k, right_child)
        n_left = lp.size
        s_left = float(resid[lp].sum())
        s_all = s_left + float(resid[rp].sum())
        n_all = lp.size + rp.size

        depth = int(self.depths[node]) if node > 0 else 0
        ps_here = split_prior_prob(depth, self.cfg.alpha, self.cfg.beta)
        ps_child = split_prior_prob(depth + 1, self.cfg.alpha, self.cfg.beta)

        # proposed tree: merge children into `node`
        feat = self.feature[k]
        singleton_after = node == 0
        p_grow_new = self._move_probs(singleton_after)[0]
        # growable leaves in the proposed tree: current growable leaves
        # minus the two children plus the merged node (always growable:
        # it was split on some feature, so it has >= 2 distinct values)
        growable_new = [g for g in self._growable_leaves(k) if g not in (left_child, right_child)]
        growable_new.append(node)

        log_accept = (
            np.log(p_grow_new)
            - np.log(p_prune_cur)
            + np.log(prunable.size)
            - np.log(len(growable_new))
            - np.log(ps_here)
            - 2.0 * np.log1p(-ps_child)
            + np.log1p(-ps_here)
            + self._log_ml(s_all, n_all)
            - self._log_ml(s_left, n_left)
            - self._log_ml(s_all - s_left, n_all - n_left)
        )
        if np.log(rng.random()) < log_accept:
            feat[node] = LEAF
            feat[left_child] = UNUSED
            feat[right_child] = UNUSED
            merged = np.concatenate([lp, rp])
            self.node_of[k][merged] = node
            cache = self.pts_cache[k]
            cache.pop(left_child, None)
            cache.pop(right_child, None)
            cache[node] = merged
            avail = self.avail_cache[k]
            avail.pop(left_child, None)
            avail.pop(right_child, None)

    def _try_change(self, k: int, resid: np.ndarray, rng: np.random.Generator) -> None:
        prunable = self._prunable(k)
        if prunable.size == 0:
            return
        node = int(prunable[rng.integers(prunable.size)])
        left_child, right_child = 2 * node + 1, 2 * node + 2
        lp = self._pts(k, left_child)
        rp = self._pts(k, right_child)
        pts = np.concatenate([lp, rp])
        avail = self._avail(k, node, pts)
        f_new = int(avail[rng.integers(avail.size)])
        uniq = np.unique(self.X[pts, f_new])
        cut_new = float(uniq[rng.integers(uniq.size - 1)])

        new_left = self.X[pts, f_new] <= cut_new
        s_all = float(resid[pts].sum())
        n_all = pts.size
        s_old_l = float(resid[lp].sum())
        n_old_l = lp.size
        s_new_l = float(resid[pts[new_left]].sum())
        n_new_l = int(new_left.sum())

        log_accept = (
            self._log_ml(s_new_l, n_new_l)
            + self._log_ml(s_all - s_new_l, n_all - n_new_l)
            - self._log_ml(s_old_l, n_old_l)
            - self._log_ml(s_all - s_old_l, n_all - n_old_l)
        )
        if np.log(rng.random()) < log_accept:
            self.feature[k, node] = f_new
            self.threshold[k, node] = cut_new
            left_pts, right_pts = pts[new_left], pts[~new_left]
            self.node_of[k][left_pts] = left_child
            self.node_of[k][right_pts] = right_child
            cache = self.pts_cache[k]
            cache[left_child] = left_pts
            cache[right_child] = right_pts
            avail = self.avail_cache[k]
            avail.pop(left_child, None)
            avail.pop(right_child, None)

    # -- conjugate updates ----------------------------------------------------

    def _draw_leaf_values(self, k: int, resid: np.ndarray, rng: np.random.Generator) -> None:
        leaves = self._leaves(k)
        if self.cfg.prior_only:
            self.value[k, leaves] = rng.normal(0.0, self.sigma_mu, size=leaves.size)
            return
        counts = np.bincount(self.node_of[k], minlength=self.cap)
        sums = np.bincount(self.node_of[k], weights=resid, minlength=self.cap)
        post_var = 1.0 / (1.0 / self.sigma_mu**2 + counts[leaves] / self.sigma2)
        post_mean = post_var * sums[leaves] / self.sigma2
        self.value[k, leaves] = post_mean + np.sqrt(post_var) * rng.standard_normal(leaves.size)

    def draw_sigma2(self, prior_a: float, prior_scale: float, rng: np.random.Generator) -> None:
        if self.cfg.prior_only:
            self.sigma2 = prior_scale / rng.gamma(prior_a)
            return
        resid = self.y_work - self.total
        a_post = prior_a + 0.5 * self.n
        scale_post = prior_scale + 0.5 * float(resid @ resid)
        self.sigma2 = scale_post / rng.gamma(a_post)

    def draw_latents(self, b: np.ndarray, rng: np.random.Generator) -> None:
        mu = self.total
        u = rng.random(self.n)
        p_below_zero = ndtr(-mu)
        cdf = np.where(b == 1.0, p_below_zero + u * (1.0 - p_below_zero), u * p_below_zero)
        cdf = np.clip(cdf, _CDF_EPS, 1.0 - _CDF_EPS)
        self.y_work = mu + ndtri(cdf)

    def snapshot(self, offset: float, scale: float) -> ForestDraw:
        used = int(np.max(np.nonzero((self.feature != UNUSED).any(axis=0))[0])) + 1
        sigma = None
        if self.link == "continuous":
            sigma = float(np.sqrt(self.sigma2) * scale)
        return ForestDraw(
            feature=self.feature[:, :used].copy(),
            threshold=self.threshold[:, :used].copy(),
            value=self.value[:, :used].copy(),
            offset=offset,
            scale=scale,
            sigma=sigma,
            link=self.link,
            n_features=self.p,
        )


def _check_training_inputs(X: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if X.ndim != 2:
        raise ValueError("X must be 2-d")
    if y.shape != (X.shape[0],):
        raise ValueError("y length must match rows of X")
    if X.shape[0] == 0:
        raise ValueError("empty training set")
    if np.isnan(X).any() or np.isnan(y).any():
        raise ValueError("training data contain absent values")
    return X, y


def fit_continuous(
    X: np.ndarray, y: np.ndarray, cfg: BartConfig, rng: np.random.Generator | int
) -> list[ForestDraw]:
    """Posterior draws of a continuous-response sum-of-trees model.

    The response is standardized to ``[-0.5, 0.5]`` before fitting and
    draws carry the de-standardization, so predictions and ``sigma``
    are on the original scale.

    Parameters
    ----------
    X : numpy.ndarray, shape (n, p)
    y : numpy.ndarray, shape (n,)
    cfg : BartConfig
    rng : numpy.random.Generator or int
        Generator (or seed) owning all randomness of this fit.

    Returns
    -------
    list of ForestDraw
        ``cfg.n_keep`` posterior draws.
    """
    X, y = _check_training_inputs(X, y)
    if isinstance(rng, (int, np.integer)):
        rng = np.random.default_rng(int(rng))
    y_min, y_max = float(y.min()), float(y.max())
    scale = y_max - y_min
    if scale <= 0.0:
        scale = 1.0
    offset = 0.5 * (y_min + y_max)
    y_std = (y - offset) / scale

    sampler = _TreeEnsembleSampler(X, y_std, cfg, "continuous")
    hat_sigma2 = max(float(np.var(y_std)), 1e-12)
    prior_a = cfg.nu_df / 2.0
    prior_scale = hat_sigma2 / float(invgamma.ppf(cfg.q, a=prior_a))
    sampler.sigma2 = hat_sigma2

    draws: list[ForestDraw] = []
    total_iters = cfg.n_burn + cfg.n_keep * cfg.thin
    for it in range(total_iters):
        for k in range(cfg.n_trees):
            sampler._update_tree(k, rng)
        sampler.draw_sigma2(prior_a, prior_scale, rng)
        if it >= cfg.n_burn and (it - cfg.n_burn) % cfg.thin == 0:
            draws.append(sampler.snapshot(offset, scale))
    return draws


def fit_probit(
    X: np.ndarray, b: np.ndarray, cfg: BartConfig, rng: np.random.Generator | int
) -> list[ForestDraw]:
    """Posterior draws of a binary-response sum-of-trees probit model.

    The latent-variable representation keeps the leaf updates conjugate:
    each iteration redraws truncated-normal latents around the current
    ensemble value, then updates trees against the latents with unit
    noise.

    Parameters
    ----------
    X : numpy.ndarray, shape (n, p)
    b : numpy.ndarray, shape (n,)
        Binary responses.
    cfg : BartConfig
    rng : numpy.random.Generator or int

    Returns
    -------
    list of ForestDraw
    """
    X, b = _check_training_inputs(X, b)
    if isinstance(rng, (int, np.integer)):
        rng = np.random.default_rng(int(rng))
    if not set(np.unique(b)) <= {0.0, 1.0}:
        raise ValueError("probit response must be binary")
    if np.all(b == b[0]):
        warnings.warn(
            "probit response is constant; predicted probabilities will saturate toward the prior-tempered extreme",
            stacklevel=2,
        )

    sampler = _TreeEnsembleSampler(X, np.zeros(X.shape[0]), cfg, "probit")
    sampler.sigma2 = 1.0
    sampler.draw_latents(b, rng)

    draws: list[ForestDraw] = []
    total_iters = cfg.n_burn + cfg.n_keep * cfg.thin
    for it in range(total_iters):
        for k in range(cfg.n_trees):
            sampler._update_tree(k, rng)
        sampler.draw_latents(b, rng)
        if it >= cfg.n_burn and (it - cfg.n_burn) % cfg.thin == 0:
            draws.append(sampler.snapshot(0.0, 1.0))
    return draws


# ---------------------------------------------------------------------------
# Prediction


def _tree_route(feature: np.ndarray, threshold: np.ndarray, X: np.ndarray) -> np.ndarray:
    idx = np.zeros(X.shape[0], dtype=np.int64)
    while True:
        f = feature[idx]
        rows = np.flatnonzero(f >= 0)
        if rows.size == 0:
            return idx
        cur = idx[rows]
        go_left = X[rows, f[rows]] <= threshold[cur]
        idx[rows] = np.where(go_left, 2 * cur + 1, 2 * cur + 2)


def predict_latent(draw: ForestDraw, X: np.ndarray) -> np.ndarray:
    """Sum-of-trees value on the standardized/latent scale."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if X.shape[1] != draw.n_features:
        raise ValueError(f"expected {draw.n_features} features, got {X.shape[1]}")
    out = np.zeros(X.shape[0])
    for k in range(draw.feature.shape[0]):
        idx = _tree_route(draw.feature[k], draw.threshold[k], X)
        out += draw.value[k][idx]
    return out


def predict_mean(draw: ForestDraw, X: np.ndarray) -> np.ndarray:
    """De-standardized conditional mean for a continuous-link draw."""
    return draw.offset + draw.scale * predict_latent(draw, X)


def predict_prob(draw: ForestDraw, X: np.ndarray) -> np.ndarray:
    """Event probability for a probit-link draw, clamped inside (0, 1)."""
    g = predict_latent(draw, X)
    return np.clip(ndtr(g), PROB_EPS, 1.0 - PROB_EPS)


# ---------------------------------------------------------------------------
# Serialization


def save_forest_draws(path: str, draws: list[ForestDraw], meta: dict | None = None) -> None:
    """Persist a draw sequence to a compressed archive.

    The layout is self-describing: stacked heap arrays padded to a
    common capacity plus per-draw noise scales and the link metadata.
    """
    if not draws:
        raise ValueError("no draws to save")
    cap = max(d.feature.shape[1] for d in draws)
    n_draws = len(draws)
    K = draws[0].feature.shape[0]
    feature = np.full((n_draws, K, cap), UNUSED, dtype=np.int32)
    threshold = np.zeros((n_draws, K, cap))
    value = np.zeros((n_draws, K, cap))
    sigma = np.full(n_draws, np.nan)
    for m, d in enumerate(draws):
        c = d.feature.shape[1]
        feature[m, :, :c] = d.feature
        threshold[m, :, :c] = d.threshold
        value[m, :, :c] = d.value
        if d.sigma is not None:
            sigma[m] = d.sigma
    header = {
        "link": draws[0].link,
        "n_features": draws[0].n_features,
        "offset": draws[0].offset,
        "scale": draws[0].scale,
        "meta": meta or {},
    }
    np.savez_compressed(
        path,
        feature=feature,
        threshold=threshold,
        value=value,
        sigma=sigma,
        header=np.frombuffer(json.dumps(header).encode("utf-8"), dtype=np.uint8),
    )


def load_forest_draws(path: str) -> tuple[list[ForestDraw], dict]:
    """Load a draw sequence written by :func:`save_forest_draws`."""
    with np.load(path) as archive:
        header = json.loads(bytes(archive["header"]).decode("utf-8"))
        feature = archive["feature"]
        threshold = archive["threshold"]
        value = archive["value"]
        sigma = archive["sigma"]
    draws = []
    for m in range(feature.shape[0]):
        draws.append(
            ForestDraw(
                feature=feature[m],
                threshold=threshold[m],
                value=value[m],
                offset=float(header["offset"]),
                scale=float(header["scale"]),
                sigma=None if np.isnan(sigma[m]) else float(sigma[m]),
                link=header["link"],
                n_features=int(header["n_features"]),
            )
        )
    return draws, header.get("meta", {})

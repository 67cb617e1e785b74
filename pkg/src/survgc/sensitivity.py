"""Bounds and priors for the four sensitivity parameters.

Four kinds of untestable departures enter the estimator, each with a
wave-specific parameter and a bounded uniform prior:

* ``xi_j >= 0`` — unmeasured exposure-outcome confounding; the bias of
  the exposed-history outcome mean is ``-xi_j`` and of the
  never-exposed history ``+xi_j``.
* ``gamma_j <= 0`` — shift of the outcome mean at the first unobserved
  wave among survivors (missingness not at random among survivors).
* ``delta_j >= 0`` — gap in never-exposed outcome means between
  survivors under both regimes and survivors under the never-exposed
  regime only.
* ``nu_j in [0, 1 - pi_z]`` — excess exposure probability among
  non-survivors relative to survivors with the same history.

Outcome-scale bounds are set from the per-wave standard deviation of
observed outcomes; the ``nu`` bound is history-specific and enforced at
evaluation time, with the marginal cap ``1 - mean(propensity)``
reported here.  The covariate analogue of ``nu`` is identically zero
(covariates are taken to be distributed the same among survivors and
non-survivors) and is exposed only as the constant ``NU_W``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cohort import CohortDataset

__all__ = [
    "NU_W",
    "SensitivityBounds",
    "SensitivityDraw",
    "compute_bounds",
    "nu_upper",
    "point_mass",
    "sample_sensitivity",
]

#: Excess covariate probability among non-survivors (hard-coded zero).
NU_W = 0.0

XI_SD_SCALE = 0.5
GAMMA_SD_SCALE = 1.0
DELTA_SD_SCALE = 1.0


@dataclass
class SensitivityBounds:
    """Per-wave bounds; arrays are indexed by wave, entry 0 unused."""

    u_xi: np.ndarray
    l_gamma: np.ndarray
    u_delta: np.ndarray
    u_nu: np.ndarray

    def __post_init__(self) -> None:
        for name in ("u_xi", "l_gamma", "u_delta", "u_nu"):
            arr = np.asarray(getattr(self, name), dtype=float)
            setattr(self, name, arr)
            if np.any(arr < 0):
                raise ValueError(f"{name} must be non-negative")
        if np.any(self.u_nu > 1):
            raise ValueError("u_nu must be <= 1")

    @property
    def last_wave(self) -> int:
        return self.u_xi.size - 1


@dataclass
class SensitivityDraw:
    """One draw of every sensitivity parameter, indexed by wave."""

    xi: np.ndarray
    gamma: np.ndarray
    delta: np.ndarray
    nu: np.ndarray

    def c_exposed(self, wave: int) -> float:
        """Confounding bias of the exposed-at-``wave`` outcome mean."""
        return -float(self.xi[wave])

    def c_never(self, wave: int) -> float:
        """Confounding bias of the never-exposed outcome mean."""
        return float(self.xi[wave])

    @property
    def last_wave(self) -> int:
        return self.xi.size - 1


def compute_bounds(
    dataset: CohortDataset,
    xi_scale: float = XI_SD_SCALE,
    gamma_scale: float = GAMMA_SD_SCALE,
    delta_scale: float = DELTA_SD_SCALE,
) -> SensitivityBounds:
    """Outcome-scale bounds from per-wave observed-outcome spread.

    At each wave ``1..J`` the standard deviation of observed outcomes
    (retained survivors; dropouts' outcomes are unobservable, so the
    survivor spread is computed on the same records) scales the bounds:
    ``U_xi = xi_scale * SD``, ``L_gamma = gamma_scale * SD``,
    ``U_delta = delta_scale * SD``.  The ``nu`` cap is the marginal
    ``1 - mean(z_j | observed)``; the history-specific cap is enforced
    where ``nu`` is used.

    Raises
    ------
    ValueError
        If any wave has fewer than two observed outcomes.
    """
    J = dataset.last_wave
    u_xi = np.zeros(J + 1)
    l_gamma = np.zeros(J + 1)
    u_delta = np.zeros(J + 1)
    u_nu = np.zeros(J + 1)
    for j in range(1, J + 1):
        obs = dataset.y[:, j]
        obs = obs[~np.isnan(obs)]
        if obs.size < 2:
            raise ValueError(f"fewer than 2 observed outcomes at wave {j}")
        sd = float(np.std(obs, ddof=1))
        u_xi[j] = xi_scale * sd
        l_gamma[j] = gamma_scale * sd
        u_delta[j] = delta_scale * sd
        z_obs = dataset.z[:, j]
        z_obs = z_obs[~np.isnan(z_obs)]
        u_nu[j] = nu_upper(float(z_obs.mean())) if z_obs.size else 0.0
    return SensitivityBounds(u_xi=u_xi, l_gamma=l_gamma, u_delta=u_delta, u_nu=u_nu)


def nu_upper(pi_z: float) -> float:
    """Upper bound of the non-survivor exposure excess: ``1 - pi_z``."""
    if not 0.0 <= pi_z <= 1.0:
        raise ValueError("pi_z must be a probability")
    return 1.0 - pi_z


def sample_sensitivity(bounds: SensitivityBounds, rng: np.random.Generator) -> SensitivityDraw:
    """Independent bounded uniforms for every parameter and wave.

    ``nu`` is drawn against the marginal cap; evaluation sites re-clamp
    it to the history-specific cap ``1 - pi_z(history)``.
    """
    m = bounds.u_xi.size
    u = rng.random((4, m))
    return SensitivityDraw(
        xi=u[0] * bounds.u_xi,
        gamma=-u[1] * bounds.l_gamma,
        delta=u[2] * bounds.u_delta,
        nu=u[3] * bounds.u_nu,
    )


def point_mass(
    last_wave: int,
    xi: float | np.ndarray = 0.0,
    gamma: float | np.ndarray = 0.0,
    delta: float | np.ndarray = 0.0,
    nu: float | np.ndarray = 0.0,
) -> SensitivityDraw:
    """Degenerate draw holding every wave at fixed values (wave 0 is zero)."""

    def expand(v) -> np.ndarray:
        arr = np.zeros(last_wave + 1)
        arr[1:] = v
        return arr

    return SensitivityDraw(xi=expand(xi), gamma=expand(gamma), delta=expand(delta), nu=expand(nu))

"""Shared helpers for the test suite."""

from __future__ import annotations

import numpy as np

from survgc.cohort import CohortDataset


def make_cohort(
    n: int,
    last_wave: int,
    seed: int,
    n_levels: int = 2,
    death: bool = True,
    dropout: bool = True,
    y_rule=None,
) -> CohortDataset:
    """Simple admissible cohort for unit tests (not the simulation module).

    Outcomes follow ``y_rule(y_prev, z, w, x0, rng)`` when given, else a
    mildly autoregressive linear rule with noise.
    """
    rng = np.random.default_rng(seed)
    m = last_wave + 1
    y = np.full((n, m), np.nan)
    z = np.full((n, m), np.nan)
    w = np.full((n, m), np.nan)
    r = np.zeros((n, m), dtype=int)
    s = np.zeros((n, m), dtype=int)
    x0 = rng.integers(n_levels, size=n)

    if y_rule is None:

        def y_rule(y_prev, zv, wv, cell, gen):
            return 1.0 + 1.5 * zv + 0.5 * wv + 0.3 * y_prev + 0.2 * cell + 0.3 * gen.standard_normal()

    for i in range(n):
        alive, retained = True, True
        y_prev, z_prev = 0.0, 0.0
        for j in range(m):
            if j > 0 and alive and death:
                alive = rng.random() < 0.92
            s[i, j] = int(alive)
            if j > 0 and alive and retained and dropout:
                retained = rng.random() < 0.88
            retained = retained and alive
            r[i, j] = int(retained and alive)
            if not (alive and retained):
                continue
            w[i, j] = float(rng.random() < 0.5)
            if j == 0:
                z[i, j] = 0.0
            else:
                z[i, j] = 1.0 if z_prev == 1.0 else float(rng.random() < 0.25 + 0.2 * w[i, j])
            y[i, j] = y_rule(y_prev, z[i, j], w[i, j], x0[i], rng)
            y_prev, z_prev = y[i, j], z[i, j]
    return CohortDataset(y=y, z=z, w=w, r=r, s=s, x0=x0, n_levels=n_levels)

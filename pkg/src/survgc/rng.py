"""Deterministic random-number streams for parallel, reproducible sampling.

Every stochastic component of the package draws from a counter-based
generator (Philox) keyed by a master seed plus a tuple of integer
sub-keys identifying the consumer (for example ``(chain, draw, wave,
purpose)``).  Streams with distinct keys are statistically independent,
and a stream's output depends only on ``(master_seed, key)`` — never on
execution order, thread scheduling, or how work is split across
processes.  That is what makes chain-level parallelism and blocked
Monte-Carlo integration bit-reproducible.
"""

from __future__ import annotations

import numpy as np

__all__ = ["stream"]


def stream(master_seed: int, *key: int) -> np.random.Generator:
    """Return an independent generator for ``(master_seed, key)``.

    Parameters
    ----------
    master_seed : int
        Non-negative master seed shared by the whole run.
    *key : int
        Integer sub-keys naming the consumer.  The same
        ``(master_seed, key)`` always yields the same stream; distinct
        keys yield independent streams.

    Returns
    -------
    numpy.random.Generator
        Generator backed by the counter-based Philox bit generator.
    """
    seq = np.random.SeedSequence(int(master_seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.Philox(seq))

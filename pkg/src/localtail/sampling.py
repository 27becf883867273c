"""Seeded Monte Carlo sampling split into fixed blocks.

Block ``b`` always draws from ``default_rng([seed, b])`` and blocks are
concatenated in order, so the sample is identical for any worker count.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from ._validation import check_int

BLOCK_SIZE = 8192


def _run_block(args):
    sampler, seed, block, size = args
    rng = np.random.default_rng([seed, block])
    return np.asarray(sampler(rng, size))


def sample_values(sampler, N, seed, workers=1, block_size=BLOCK_SIZE):
    """Draw ``N`` realizations from ``sampler(rng, size)``.

    ``sampler`` returns an array whose first axis has length ``size``.  With
    ``workers > 1`` blocks are evaluated in a process pool, so ``sampler``
    must be picklable.
    """
    N = check_int(N, "N", minimum=1)
    seed = check_int(seed, "seed", minimum=0)
    workers = check_int(workers, "workers", minimum=1)
    blocks = math.ceil(N / block_size)
    jobs = [(sampler, seed, b, min(block_size, N - b * block_size)) for b in range(blocks)]
    if workers == 1 or blocks == 1:
        parts = [_run_block(job) for job in jobs]
    else:
        with ProcessPoolExecutor(max_workers=min(workers, blocks)) as pool:
            parts = list(pool.map(_run_block, jobs))
    return np.concatenate(parts, axis=0)

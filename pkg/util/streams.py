# util/streams.py
# Counter-based random streams.
# Split rule: the stream for (seed, block) is Philox keyed by
# SeedSequence([seed, block]). Blocks, not workers, own streams, so any worker
# count reproduces a serial run bit for bit.

from typing import Iterator, Tuple

import numpy as np


def block_stream(seed: int, block: int, *extra: int) -> np.random.Generator:
    entropy = [int(seed), int(block), *(int(x) for x in extra)]
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(entropy)))


def trial_blocks(trials: int, block_size: int) -> Iterator[Tuple[int, int, int]]:
    """Yield (block_id, first_trial, block_length) covering range(trials)."""
    block = 0
    for start in range(0, trials, block_size):
        yield block, start, min(block_size, trials - start)
        block += 1

"""Counter-based random streams.

Every Monte Carlo batch draws from its own Philox stream keyed by the run
seed and addressed by ``(stream, batch)`` in the counter, so a batch's
numbers never depend on which worker ran it or in what order.
"""

from __future__ import annotations

import numpy as np

from .exceptions import DomainError

#: Stream ids used by the samplers; distinct ids never share numbers.
FORWARD_STREAM = 0
REVERSED_STREAM = 1
PILOT_STREAM = 2


def batch_generator(
    seed: int, batch: int, stream: int = FORWARD_STREAM
) -> np.random.Generator:
    """Generator for batch *batch* of *stream* under *seed*."""
    if not 0 <= seed < 2**64:
        raise DomainError("seed", seed, "must be an unsigned 64-bit integer")
    if batch < 0 or stream < 0:
        raise DomainError("batch/stream", (batch, stream), "must be >= 0")
    bit_gen = np.random.Philox(key=seed, counter=[0, 0, stream, batch])
    return np.random.Generator(bit_gen)

"""Counter-based random streams.

Every stream is a Philox generator keyed by ``(seed, stream_id)`` with its
counter starting at zero, so a stream's draws depend only on those two
integers and never on which worker consumes it or in what order.
"""
from dataclasses import dataclass

import numpy as np

_U64 = (1 << 64) - 1

# stream_id layout: namespace | scan point | block
_BLOCK_BITS = 24
_POINT_BITS = 16


@dataclass(frozen=True)
class RngStream:
    seed: int
    stream_id: int = 0

    def __post_init__(self):
        if not 0 <= self.seed <= _U64:
            raise ValueError(f"seed must fit in 64 bits, got {self.seed}")
        if not 0 <= self.stream_id <= _U64:
            raise ValueError(f"stream_id must fit in 64 bits, got {self.stream_id}")

    def generator(self) -> np.random.Generator:
        """A fresh generator positioned at the start of this stream."""
        key = (self.stream_id << 64) | self.seed
        return np.random.Generator(np.random.Philox(key=key))


def stream_id(namespace: int, point: int, block: int) -> int:
    if not 0 <= block < (1 << _BLOCK_BITS):
        raise ValueError(f"block index {block} out of range")
    if not 0 <= point < (1 << _POINT_BITS):
        raise ValueError(f"scan point index {point} out of range")
    if not 0 <= namespace < (1 << (64 - _BLOCK_BITS - _POINT_BITS)):
        raise ValueError(f"namespace {namespace} out of range")
    return (namespace << (_BLOCK_BITS + _POINT_BITS)) | (point << _BLOCK_BITS) | block


def as_generator(rng) -> np.random.Generator:
    """Accept an RngStream, a Generator, or an int seed."""
    if isinstance(rng, RngStream):
        return rng.generator()
    if isinstance(rng, np.random.Generator):
        return rng
    return RngStream(int(rng)).generator()

"""
Counter-based random streams for reproducible, parallel-safe sampling.

Every (seed, block, step, purpose) key gets its own Philox generator.
Trajectory i belongs to block i // MC_BLOCK_SIZE and reads position
i % MC_BLOCK_SIZE of that block's draws, so its randomness depends only on
(seed, i, step).
"""
from dataclasses import dataclass
from enum import IntEnum

import numpy as np

from jumpwass.core.config import MC_BLOCK_SIZE

MAX_SEED = 2 ** 64 - 1


class StreamPurpose(IntEnum):
    INITIAL_STATE = 0
    MODE_DRAW = 1


def check_seed(seed: int) -> int:
    if int(seed) != seed or not 0 <= seed <= MAX_SEED:
        raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed!r}")
    return int(seed)


def block_generator(seed: int, block: int, step: int, purpose: StreamPurpose) -> np.random.Generator:
    sequence = np.random.SeedSequence(entropy=check_seed(seed), spawn_key=(int(block), int(step), int(purpose)))
    return np.random.Generator(np.random.Philox(sequence))


@dataclass(frozen=True)
class TrajectoryStream:
    """Named substream for one trajectory"""

    seed: int
    index: int

    def __post_init__(self):
        check_seed(self.seed)
        if int(self.index) != self.index or self.index < 0:
            raise ValueError(f"trajectory index must be a non-negative integer, got {self.index!r}")

    @property
    def block(self) -> int:
        return self.index // MC_BLOCK_SIZE

    @property
    def offset(self) -> int:
        return self.index % MC_BLOCK_SIZE

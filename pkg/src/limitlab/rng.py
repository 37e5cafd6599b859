"""Counter-based random streams.

Generator (pinned)
------------------
All arithmetic is on unsigned 64-bit words, ``mix64`` is the SplitMix64
finaliser::

    mix64(z) = z ^= z >> 30; z *= 0xBF58476D1CE4E5B9
               z ^= z >> 27; z *= 0x94D049BB133111EB
               z ^= z >> 31

    stream key  K        = mix64(mix64(seed) ^ mix64(stream_id ^ 0x5851F42D4C957F2D))
    block key   K_b      = mix64(K ^ b * 0xD1B54A32D192ED03)
    word        w(b, j)  = mix64(K_b + (j + 1) * 0x9E3779B97F4A7C15)

Block ``b`` is the b-th sample drawn from the stream; ``j`` indexes the draws
that sample makes.  A stream is therefore fully determined by
``(seed, stream_id, position)`` and holds no other state.  Test vectors live in
``tests/test_rng.py``.
"""

from dataclasses import dataclass

import numpy as np

from ._kernels import mix64_np

STREAM_SALT = 0x5851F42D4C957F2D
_MASK = (1 << 64) - 1


def _u64(x: int) -> np.uint64:
    return np.uint64(int(x) & _MASK)


def stream_key(seed: int, stream_id: int) -> np.uint64:
    a = mix64_np(_u64(seed))
    b = mix64_np(_u64(stream_id) ^ np.uint64(STREAM_SALT))
    return np.uint64(mix64_np(a ^ b))


@dataclass
class RngStream:
    """A seekable stream of sample blocks.

    ``position`` counts blocks already handed out; :meth:`take` reserves the
    next ``count`` blocks and returns the first one's index.
    """

    seed: int
    stream_id: int = 0
    position: int = 0

    def __post_init__(self):
        if not (0 <= self.seed <= _MASK and 0 <= self.stream_id <= _MASK):
            raise ValueError("seed and stream_id must fit in 64 unsigned bits")

    @property
    def key(self) -> np.uint64:
        return stream_key(self.seed, self.stream_id)

    def take(self, count: int = 1) -> int:
        if count < 0:
            raise ValueError("count must be non-negative")
        start = self.position
        self.position += count
        return start

    def spawn(self, stream_id: int) -> "RngStream":
        """Fresh stream sharing this seed."""
        return RngStream(self.seed, stream_id)

    def words(self, block: int, count: int) -> np.ndarray:
        """Raw words ``w(block, 0..count-1)``; used for test vectors."""
        from ._kernels import block_keys_np, words_np

        bk = block_keys_np(self.key, [block])[0]
        return words_np(np.full(count, bk, dtype=np.uint64), np.arange(count, dtype=np.uint64))

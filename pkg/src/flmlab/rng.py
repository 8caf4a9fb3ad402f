"""Counter-based seeding.

Every random stream is addressed by ``(seed, stream label, block index)``,
so results do not depend on how blocks are grouped into chunks or
scheduled across workers.
"""
from __future__ import annotations

import numpy as np

BLOCK = 4096

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3
_MASK = (1 << 64) - 1


def fnv1a64(data: bytes | str) -> int:
    if isinstance(data, str):
        data = data.encode("utf-8")
    h = _FNV_OFFSET
    for byte in data:
        h ^= byte
        h = (h * _FNV_PRIME) & _MASK
    return h


def derive_seed(master: int, *parts) -> int:
    """64-bit sub-seed: FNV-1a over ``"master/part1/part2/..."``."""
    return fnv1a64("/".join(str(p) for p in (master, *parts)))


def block_rng(seed: int, block: int, stream: int = 0) -> np.random.Generator:
    ss = np.random.SeedSequence(entropy=int(seed) & _MASK, spawn_key=(int(stream), int(block)))
    return np.random.Generator(np.random.PCG64(ss))


def blocks(start: int, count: int, size: int = BLOCK):
    """Yield (block index, offset within block, length) covering [start, start+count)."""
    end = start + count
    i = start
    while i < end:
        b = i // size
        off = i - b * size
        length = min(size - off, end - i)
        yield b, off, length
        i += length

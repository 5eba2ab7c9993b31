"""Deterministic random number generation.

All randomness in this package flows through splitmix64 / xoshiro256**,
which are publicly specified bit-exact generators.  This guarantees that
shuffles, splits and bootstrap draws are reproducible across platforms
and Python versions, unlike library-specific shuffle implementations.
"""

from __future__ import annotations

MASK64 = 0xFFFFFFFFFFFFFFFF


def splitmix64_next(state: int) -> tuple[int, int]:
    """Advance a splitmix64 state, returning (new_state, output)."""
    state = (state + 0x9E3779B97F4A7C15) & MASK64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return state, (z ^ (z >> 31)) & MASK64


def derive_seeds(master: int, n: int) -> list[int]:
    """Derive n independent 64-bit seeds from a master seed via splitmix64."""
    state = master & MASK64
    seeds = []
    for _ in range(n):
        state, out = splitmix64_next(state)
        seeds.append(out)
    return seeds


def _rotl(x: int, k: int) -> int:
    return ((x << k) | (x >> (64 - k))) & MASK64


class Xoshiro256StarStar:
    """xoshiro256** generator, seeded from a 64-bit seed via splitmix64."""

    def __init__(self, seed: int):
        self.s = derive_seeds(seed, 4)

    def next_u64(self) -> int:
        s = self.s
        result = (_rotl((s[1] * 5) & MASK64, 7) * 9) & MASK64
        t = (s[1] << 17) & MASK64
        s[2] ^= s[0]
        s[3] ^= s[1]
        s[1] ^= s[2]
        s[0] ^= s[3]
        s[2] ^= t
        s[3] = _rotl(s[3], 45)
        return result

    def randbelow(self, n: int) -> int:
        """Unbiased draw from {0, ..., n-1} by rejection sampling."""
        if n <= 0:
            raise ValueError("randbelow requires n >= 1")
        limit = (2**64 // n) * n
        while True:
            u = self.next_u64()
            if u < limit:
                return u % n

    def shuffle(self, items: list) -> None:
        """In-place Fisher-Yates shuffle."""
        for i in range(len(items) - 1, 0, -1):
            j = self.randbelow(i + 1)
            items[i], items[j] = items[j], items[i]

    def sample_indices(self, n: int, k: int) -> list[int]:
        """k distinct indices from range(n), via partial Fisher-Yates."""
        if not 0 <= k <= n:
            raise ValueError("need 0 <= k <= n")
        pool = list(range(n))
        for i in range(k):
            j = i + self.randbelow(n - i)
            pool[i], pool[j] = pool[j], pool[i]
        return pool[:k]

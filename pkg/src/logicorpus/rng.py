"""Counter-based randomness for masking decisions.

Every decision draws a 64-bit value from a splitmix-style hash of
``(seed, paragraph id, channel, position)``. There is no sequential stream:
the draw for one position never depends on any other draw, so results are
independent of processing order, worker count and scheduling.

The scalar functions here are the reference implementation; the array kernels
in ``logicorpus._kernels`` must reproduce them bit-for-bit.
"""

from __future__ import annotations

MASK64 = (1 << 64) - 1

# splitmix64 finalizer multipliers
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB

# Domain-separation salt folded into the seed before anything else.
SEED_SALT = 0x6C62272E07BB0142

# Channel tags (shifted into the top byte of the counter word).
CH_LG = 1  # indicator-span [LGMASK] selection, keyed by match start position
CH_LUI = 2  # logic-unrelated [LGMASK] selection, keyed by token position
CH_MLM = 3  # MLM position selection
CH_MLM_BRANCH = 4  # mask/random/keep split
CH_MLM_RANDOM = 5  # replacement-token draw

# Polynomial token-hash constants (FNV-1 flavored), shared with the kernels.
FNV_OFFSET = 0xCBF29CE484222325
FNV_PRIME = 0x100000001B3


def mix64(x: int) -> int:
    """splitmix64 finalizer over a 64-bit lane."""
    x &= MASK64
    x = ((x ^ (x >> 30)) * _M1) & MASK64
    x = ((x ^ (x >> 27)) * _M2) & MASK64
    return x ^ (x >> 31)


def paragraph_base(seed: int, pid: int) -> int:
    """Per-paragraph hash state all channel draws start from."""
    return mix64(mix64((seed & MASK64) ^ SEED_SALT) ^ (pid & MASK64))


def channel_u64(base: int, channel: int, k: int) -> int:
    """Uniform 64-bit draw for (paragraph base, channel, counter k)."""
    return mix64(base ^ ((channel & 0xFF) << 56) ^ (k & MASK64))


def bernoulli_threshold(p: float) -> tuple[bool, int]:
    """Encode probability ``p`` as (nonzero, inclusive uint64 upper bound).

    A draw ``u`` succeeds iff ``nonzero and u <= bound``. ``p >= 1`` always
    succeeds and ``p <= 0`` never does, exactly.
    """
    if p <= 0.0:
        return False, 0
    if p >= 1.0:
        return True, MASK64
    t = int(p * 2.0**64)
    if t <= 0:
        return False, 0
    if t > MASK64:
        return True, MASK64
    return True, t - 1


def bernoulli(base: int, channel: int, k: int, p: float) -> bool:
    nonzero, bound = bernoulli_threshold(p)
    return nonzero and channel_u64(base, channel, k) <= bound


def token_hash(codepoints) -> int:
    """Polynomial hash of a codepoint sequence; the token-interning key."""
    h = FNV_OFFSET
    for c in codepoints:
        h = (h * FNV_PRIME + int(c)) & MASK64
    return h

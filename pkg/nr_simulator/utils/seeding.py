"""
Seeding - Deterministic per-replication seeds

Replication r of an experiment with base seed B draws from
default_rng(derive_seed(B, r)). The mix is SplitMix64:

    z = (B * 0x9E3779B97F4A7C15 + r) mod 2^64
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9 mod 2^64
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB mod 2^64
    seed = z ^ (z >> 31)

Every step is a bijection of 64-bit words, so distinct r give distinct seeds.
"""

MASK_64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15
MIX_1 = 0xBF58476D1CE4E5B9
MIX_2 = 0x94D049BB133111EB


def splitmix64(x: int) -> int:
    """SplitMix64 finalizer on a 64-bit word"""
    z = x & MASK_64
    z = ((z ^ (z >> 30)) * MIX_1) & MASK_64
    z = ((z ^ (z >> 27)) * MIX_2) & MASK_64
    return z ^ (z >> 31)


def derive_seed(base_seed: int, rep: int) -> int:
    """
    Seed of replication rep

    Args:
        base_seed: Experiment base seed, 0 <= base_seed < 2^64
        rep: Replication index

    Returns:
        64-bit seed
    """
    return splitmix64((base_seed * GOLDEN_GAMMA + rep) & MASK_64)

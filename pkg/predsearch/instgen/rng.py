import numpy as np

PRNG_NAME = "numpy.PCG64/SeedSequence"


def instance_rng(seed: int, index: int) -> np.random.Generator:
    """Independent stream per (seed, index) so instances can be generated in any order."""
    seq = np.random.SeedSequence([seed & 0xFFFFFFFFFFFFFFFF, index])
    return np.random.Generator(np.random.PCG64(seq))

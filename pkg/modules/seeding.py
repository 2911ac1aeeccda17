import zlib

import numpy as np


def get_seed_entropy(seed, *keys):
    """
    Returns the entropy list for a derived seed sequence.

    String keys are hashed with CRC32 so that a cell label such as
    ``"commutator|n=3|s=1"`` always maps to the same integer.

    Returns:
        list: ``[seed, key_1, ..., key_m]`` as non-negative integers.
    """
    entropy = [int(seed)]
    for key in keys:
        if isinstance(key, str):
            entropy.append(zlib.crc32(key.encode("utf-8")))
        else:
            entropy.append(int(key))
    return entropy


def create_seed_sequence(seed, *keys):
    return np.random.SeedSequence(get_seed_entropy(seed, *keys))


def create_rng(seed, *keys):
    """
    Creates a numpy Generator that depends only on ``seed`` and ``keys``.

    Returns:
        numpy.random.Generator: A PCG64 generator.
    """
    return np.random.default_rng(create_seed_sequence(seed, *keys))


def derive_seed(seed, *keys):
    """Integer seed for (seed, keys), for APIs that take plain ints."""
    return int(create_seed_sequence(seed, *keys).generate_state(1)[0])


def ensure_rng(seed_or_rng):
    if isinstance(seed_or_rng, np.random.Generator):
        return seed_or_rng
    return create_rng(0 if seed_or_rng is None else seed_or_rng)

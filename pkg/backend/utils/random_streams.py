"""
Random Streams
Seedable, splittable numpy generators for reproducible runs
"""

import numpy as np


def make_stream(seed=None):
    """
    Create a generator from an integer seed, a SeedSequence or an existing Generator.

    Args:
        seed: None, int, np.random.SeedSequence or np.random.Generator

    Returns:
        np.random.Generator: The stream (returned unchanged if already a Generator)
    """
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.Generator(np.random.PCG64(seed))


def spawn_streams(source, count):
    """
    Independent child streams derived from a seed or a generator.

    The children depend only on the source seed and their position,
    never on how many draws were made elsewhere.

    Args:
        source: int seed, SeedSequence or Generator
        count (int): Number of children

    Returns:
        list: `count` np.random.Generator objects
    """
    if isinstance(source, np.random.Generator):
        return source.spawn(count)
    seq = source if isinstance(source, np.random.SeedSequence) else np.random.SeedSequence(source)
    return [np.random.Generator(np.random.PCG64(child)) for child in seq.spawn(count)]


def keyed_stream(seed, *key):
    """
    Stream for a fixed position in the seed tree, e.g. (purpose, d, repeat).

    Equivalent to walking SeedSequence(seed).spawn(...) down to `key`, so the
    same key always gives the same draws regardless of which other streams exist.
    """
    if seed is None:
        raise ValueError("keyed_stream needs an explicit seed")
    seq = np.random.SeedSequence(seed, spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.PCG64(seq))


def fresh_seed():
    """A new root seed drawn from OS entropy, small enough to record and pass back via --seed."""
    return int(np.random.SeedSequence().entropy % (2 ** 63))

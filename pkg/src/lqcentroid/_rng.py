"""Counter-based, splittable random streams.

Every random draw in the package goes through :func:`make_rng`, keyed by a
master seed and a tuple of stream indices, so that independent chains,
search starts and direction batches are reproducible regardless of the
order in which they are executed.
"""
import numpy as np

__all__ = ["make_rng", "check_seed"]

_MAX_SEED = 2**64 - 1


def check_seed(seed):
    if isinstance(seed, (bool, np.bool_)) or not isinstance(seed, (int, np.integer)):
        raise TypeError(f"seed must be an integer, got {type(seed).__name__}")
    seed = int(seed)
    if not 0 <= seed <= _MAX_SEED:
        raise ValueError(f"seed must fit in an unsigned 64-bit integer, got {seed}")
    return seed


def make_rng(seed, *stream):
    """Return a Philox generator for ``(seed, *stream)``.

    Parameters
    ----------
    seed : int
        Unsigned 64-bit master seed.
    *stream : int
        Stream indices (chain id, start id, ...). Distinct index tuples give
        statistically independent streams.
    """
    ss = np.random.SeedSequence(check_seed(seed), spawn_key=tuple(int(s) for s in stream))
    return np.random.Generator(np.random.Philox(ss))

"""Seedable random streams shared by every optimizer in the package."""

import hashlib

import numpy as np


class RngStream:
    """Thin wrapper over :class:`numpy.random.Generator`.

    Optimizers only draw through :meth:`uniform`, :meth:`integers` and
    :meth:`normal`, so a test double overriding these three methods can pin
    every random quantity of a run.
    """

    def __init__(self, seed=None):
        self.seed = seed
        self._gen = np.random.default_rng(seed)

    def uniform(self, size=None):
        """Draws on [0, 1)."""
        return self._gen.random(size)

    def integers(self, low, high, size=None):
        """Draws on [low, high)."""
        return self._gen.integers(low, high, size=size)

    def normal(self, size=None):
        return self._gen.standard_normal(size)


def check_rng(random_state):
    """Turn ``None``, an int or an existing stream into an :class:`RngStream`."""
    if isinstance(random_state, RngStream):
        return random_state
    if random_state is None or isinstance(random_state, (int, np.integer)):
        return RngStream(None if random_state is None else int(random_state))
    raise TypeError(f"cannot build a random stream from {random_state!r}")


def derive_seed(base_seed, *keys):
    """Stable 63-bit seed from a base seed and any number of string-able keys.

    Uses blake2b so the result does not depend on ``PYTHONHASHSEED``.
    """
    digest = hashlib.blake2b(
        "\x1f".join(str(k) for k in keys).encode(), digest_size=8
    ).digest()
    return (int(base_seed) ^ int.from_bytes(digest, "little")) & (2**63 - 1)

import numpy as np
import pytest

from mdbo.rng import RngStream


class PinnedRng(RngStream):
    """Test double returning constant draws.

    ``uniforms`` is consumed one value per ``uniform`` call (the whole
    requested array is filled with it); ``integer`` is returned for every
    integer draw.
    """

    def __init__(self, uniforms, integer=0):
        super().__init__(0)
        self.uniforms = list(uniforms)
        self.integer = integer
        self.calls = []

    def uniform(self, size=None):
        value = self.uniforms.pop(0)
        self.calls.append(("uniform", size, value))
        return np.full(size, value) if size is not None else value

    def integers(self, low, high, size=None):
        self.calls.append(("integers", size, self.integer))
        return np.full(size, self.integer) if size is not None else self.integer


@pytest.fixture
def pinned_rng():
    return PinnedRng

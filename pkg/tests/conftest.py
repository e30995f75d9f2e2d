from __future__ import annotations

import numpy as np
import pytest


class ConstantRng:
    """Stand-in for a Generator whose uniform draws all return one value."""

    def __init__(self, value: float):
        self.value = value
        self.calls: list[tuple | int | None] = []

    def random(self, size=None):
        self.calls.append(size)
        if size is None:
            return self.value
        return np.full(size, self.value)


@pytest.fixture
def stub_rng():
    return ConstantRng


def make_rng(seed: int = 0) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))


@pytest.fixture
def rng():
    return make_rng()

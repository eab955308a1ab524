import numpy as np
import pytest

from cmvscatter import CircleGrid, VerblunskySeq


@pytest.fixture(scope="session")
def grid():
    return CircleGrid(1024)


@pytest.fixture(scope="session")
def grid4096():
    return CircleGrid(4096)


@pytest.fixture(scope="session")
def seq_half():
    return VerblunskySeq(a_minus1=1.0, a=(0.5,))


@pytest.fixture(scope="session")
def corpus():
    """The named acceptance sequences plus seeded random ones, all with the
    calibration normalization a_minus1 = -1 and real coefficients."""
    named = [
        VerblunskySeq(a_minus1=-1.0, a=(0.5,)),
        VerblunskySeq(a_minus1=-1.0, a=(0.5, 1.0 / 3.0)),
        VerblunskySeq(a_minus1=-1.0, a=(0.5, 1.0 / 3.0, -0.25)),
    ]
    rng = np.random.default_rng(20260808)
    random = []
    for _ in range(10):
        m = int(rng.integers(1, 7))
        a = rng.uniform(-0.7, 0.7, m)
        random.append(VerblunskySeq(a_minus1=-1.0, a=tuple(a)))
    return named + random


def random_complex_seq(rng, m, max_mod=0.7):
    mod = rng.uniform(0.0, max_mod, m)
    phase = rng.uniform(0.0, 2.0 * np.pi, m)
    am1 = np.exp(1j * rng.uniform(0.0, 2.0 * np.pi))
    return VerblunskySeq(a_minus1=am1, a=tuple(mod * np.exp(1j * phase)))

import numpy as np
import pytest

from ising_ebic import RngSeed


def test_same_seed_stream_identical():
    a = RngSeed(42, 7).generator().random(1000)
    b = RngSeed(42, 7).generator().random(1000)
    assert np.array_equal(a, b)


def test_distinct_streams_differ():
    a = RngSeed(42, 0).generator().random(100)
    b = RngSeed(42, 1).generator().random(100)
    assert not np.array_equal(a, b)


def test_subkeys_fork_independent_streams():
    base = RngSeed(3, 5)
    assert not np.array_equal(base.generator().random(50), base.generator(0).random(50))
    assert not np.array_equal(base.generator(0).random(50), base.generator(1).random(50))
    assert np.array_equal(base.generator(2, 9).random(50), base.generator(2, 9).random(50))


def test_with_stream():
    assert RngSeed(1).with_stream(4) == RngSeed(1, 4)


@pytest.mark.parametrize("seed,stream", [(-1, 0), (0, -1), (1 << 64, 0), (0, 1 << 64)])
def test_rejects_out_of_range(seed, stream):
    with pytest.raises(ValueError):
        RngSeed(seed, stream)

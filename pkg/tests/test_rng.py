import numpy as np
import pytest

from dyninfer.exceptions import InvalidParams
from dyninfer.rng import SeededRNG


def test_same_seed_same_stream():
    assert np.array_equal(SeededRNG(42).random(10), SeededRNG(42).random(10))
    assert not np.array_equal(SeededRNG(42).random(10), SeededRNG(43).random(10))


def test_rollout_blocks_follow_the_stream():
    blocks = list(SeededRNG(1).rollout_blocks(10, 4, chunk_size=3))
    assert [start for start, _ in blocks] == [0, 3, 6, 9]
    stacked = np.vstack([u for _, u in blocks])
    assert np.array_equal(stacked, SeededRNG(1).random((10, 4)))


def test_fork_is_independent_and_reproducible():
    root = SeededRNG(9)
    assert np.array_equal(root.fork(1).random(5), SeededRNG(9).fork(1).random(5))
    assert not np.array_equal(root.fork(1).random(5), root.fork(2).random(5))
    assert root.fork(3).seed == 9


@pytest.mark.parametrize("seed", [-1, 2 ** 64, 1.5, True, "42"])
def test_seed_range(seed):
    with pytest.raises(InvalidParams):
        SeededRNG(seed)


def test_largest_seed():
    assert SeededRNG(2 ** 64 - 1).seed == 2 ** 64 - 1

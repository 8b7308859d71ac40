import numpy as np
import pytest

from steinlab.parallel import (
    ENV_THREADS,
    ordered_map,
    resolve_threads,
    row_blocks,
    tree_reduce_sum,
)


class TestResolveThreads:
    def test_explicit_wins(self, monkeypatch):
        monkeypatch.setenv(ENV_THREADS, "4")
        assert resolve_threads(2) == 2

    def test_env_fallback(self, monkeypatch):
        monkeypatch.setenv(ENV_THREADS, "6")
        assert resolve_threads(None) == 6

    def test_default_is_one(self, monkeypatch):
        monkeypatch.delenv(ENV_THREADS, raising=False)
        assert resolve_threads(None) == 1

    def test_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            resolve_threads(0)


class TestBlocksAndReduction:
    def test_row_blocks_cover_range(self):
        assert row_blocks(5) == [(0, 5)]
        blocks = row_blocks(600)
        assert blocks == [(0, 256), (256, 512), (512, 600)]

    def test_ordered_map_preserves_order(self):
        items = list(range(37))
        assert ordered_map(lambda v: v * v, items, workers=4) == [
            v * v for v in items
        ]

    def test_tree_reduction_is_shape_deterministic(self):
        rng = np.random.default_rng(0)
        parts = [rng.standard_normal(3) * 10.0 ** rng.integers(-6, 6)
                 for _ in range(11)]
        first = tree_reduce_sum(parts)
        again = tree_reduce_sum(list(parts))
        assert np.array_equal(first, again)
        with pytest.raises(ValueError):
            tree_reduce_sum([])

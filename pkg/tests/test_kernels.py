"""Parity between the compiled kernels and the numpy fallback.

Both backends must agree bit for bit, including tie-breaking, since
experiment outputs are part of the determinism contract.
"""

import numpy as np
import pytest

from shallowpack import _pykernels
from shallowpack import kernels

try:
    from shallowpack import _ckernels
except ImportError:  # pragma: no cover
    _ckernels = None

needs_compiled = pytest.mark.skipif(_ckernels is None, reason="compiled kernels not built")


def random_words(rng, m, w):
    return rng.integers(0, np.iinfo(np.uint64).max, size=(m, w), dtype=np.uint64)


def reference_distance(a: np.ndarray, b: np.ndarray) -> int:
    return int(sum(int(x ^ y).bit_count() for x, y in zip(a.tolist(), b.tolist())))


class TestFallbackAgainstPython:
    def test_popcounts_and_distances(self, rng):
        words = random_words(rng, 12, 3)
        pops = _pykernels.popcounts(words)
        for i in range(12):
            assert pops[i] == reference_distance(words[i], np.zeros(3, dtype=np.uint64))
        d = _pykernels.distances_to(words, words[4])
        for i in range(12):
            assert d[i] == reference_distance(words[i], words[4])

    def test_min_pairwise(self, rng):
        words = random_words(rng, 8, 2)
        dm = _pykernels.pairwise_distances(words)
        off = dm[np.triu_indices(8, k=1)]
        assert _pykernels.min_pairwise_distance(words) == int(off.min())


@needs_compiled
class TestCompiledParity:
    @pytest.mark.parametrize("m,w", [(1, 1), (7, 1), (33, 2), (64, 5)])
    def test_popcounts(self, rng, m, w):
        words = random_words(rng, m, w)
        assert np.array_equal(_ckernels.popcounts(words), _pykernels.popcounts(words))

    def test_distances_to(self, rng):
        words = random_words(rng, 40, 4)
        for i in (0, 17, 39):
            assert np.array_equal(
                _ckernels.distances_to(words, words[i]),
                _pykernels.distances_to(words, words[i]),
            )

    def test_pairwise_and_min(self, rng):
        words = random_words(rng, 25, 3)
        assert np.array_equal(
            _ckernels.pairwise_distances(words), _pykernels.pairwise_distances(words)
        )
        assert _ckernels.min_pairwise_distance(words) == _pykernels.min_pairwise_distance(
            words
        )

    @pytest.mark.parametrize("strict", [True, False])
    def test_greedy_select(self, rng, strict):
        for _ in range(20):
            m = int(rng.integers(1, 60))
            w = int(rng.integers(1, 4))
            words = random_words(rng, m, w)
            # realistic sparse rows too, to exercise the length buckets
            if rng.random() < 0.5:
                words >>= np.uint64(int(rng.integers(0, 60)))
            lengths = _pykernels.popcounts(words)
            order = rng.permutation(m).astype(np.int64)
            delta = int(rng.integers(0, w * 64 + 2))
            a = _ckernels.greedy_select(words, lengths, order, delta, strict)
            b = _pykernels.greedy_select(words, lengths, order, delta, strict)
            assert np.array_equal(a, b), (m, w, delta, strict)

    def test_prim(self, rng):
        for _ in range(15):
            m = int(rng.integers(1, 40))
            words = random_words(rng, m, 2)
            pa, wa = _ckernels.prim_mst(words)
            pb, wb = _pykernels.prim_mst(words)
            assert np.array_equal(pa, pb)
            assert np.array_equal(wa, wb)

    def test_greedy_rejects_bad_shapes(self, rng):
        words = random_words(rng, 4, 1)
        lengths = _pykernels.popcounts(words)
        with pytest.raises(ValueError):
            _ckernels.greedy_select(words, lengths[:2], np.arange(4), 1, True)


class TestBackendSelection:
    def test_backend_reported(self):
        assert kernels.backend() in ("compiled", "python")

    def test_pure_env_forces_python(self):
        import subprocess
        import sys

        out = subprocess.run(
            [sys.executable, "-c", "import shallowpack; print(shallowpack.kernel_backend())"],
            capture_output=True,
            text=True,
            env={"PATH": "/usr/bin:/bin", "SHALLOWPACK_PURE": "1"},
        )
        assert out.stdout.strip() == "python"

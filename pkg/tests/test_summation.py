"""Tests for core/summation.py and core/workers.py - compensated sums and ordered maps."""

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from core.summation import NeumaierSum, compensated_dot, compensated_sum
from core.workers import chunked_apply, default_threads, ordered_map


class TestNeumaierSum:
    """Tests for the running compensated sum."""

    def test_recovers_small_term(self):
        """1 + 1e100 + 1 - 1e100 keeps both ones."""
        acc = NeumaierSum()
        for x in [1.0, 1e100, 1.0, -1e100]:
            acc.add(x)
        assert acc.value == 2.0

    def test_complex_parts(self):
        """Real and imaginary parts are compensated separately."""
        acc = NeumaierSum()
        for x in [1j, 1e100j, 1j, -1e100j, 3.0]:
            acc.add(x)
        assert acc.value == 3 + 2j

    def test_cancellation_ratio(self):
        """Cancellation is the largest term over the result."""
        acc = NeumaierSum()
        for x in [1e8, -1e8 + 1.0]:
            acc.add(x)
        assert acc.cancellation == pytest.approx(1e8)
        assert NeumaierSum().cancellation == 1.0

    @given(st.lists(st.floats(-1e6, 1e6), max_size=50))
    def test_matches_fsum(self, values):
        """Agrees with math.fsum to rounding."""
        acc = NeumaierSum()
        for x in values:
            acc.add(x)
        assert acc.value.real == pytest.approx(math.fsum(values), abs=1e-6)


class TestCompensatedSum:
    """Tests for the array helpers."""

    def test_empty(self):
        """An empty array sums to zero."""
        assert compensated_sum([]) == 0j

    def test_exact_on_cancelling_terms(self):
        """fsum-based summation survives catastrophic cancellation."""
        values = np.array([1e16, 1.0, -1e16, 1j])
        assert compensated_sum(values) == 1 + 1j

    def test_dot(self):
        """compensated_dot is the weighted sum."""
        assert compensated_dot([1.0, 2.0], [3.0, 4j]) == 3 + 8j


class TestWorkers:
    """Tests for ordered_map and chunked_apply."""

    def test_default_threads_from_env(self, monkeypatch):
        """HECKE_THREADS sets the default; junk falls back to 1."""
        monkeypatch.setenv("HECKE_THREADS", "4")
        assert default_threads() == 4
        monkeypatch.setenv("HECKE_THREADS", "many")
        assert default_threads() == 1

    @pytest.mark.parametrize("threads", [1, 4])
    def test_order_preserved(self, threads):
        """Results come back in input order for any thread count."""
        assert ordered_map(lambda x: x * x, range(20), threads) == [x * x for x in range(20)]

    def test_exceptions_propagate(self):
        """A failing item raises in the caller."""
        def boom(x):
            raise ValueError(x)
        with pytest.raises(ValueError):
            ordered_map(boom, [1, 2, 3], threads=2)

    def test_chunked_apply(self):
        """Chunks are concatenated in order."""
        values = np.arange(1000, dtype=float)
        np.testing.assert_array_equal(chunked_apply(np.sqrt, values, chunk=64, threads=3), np.sqrt(values))

"""Compensated summation helpers."""

import math
from typing import Union

import numpy as np


Number = Union[int, float, complex]


class NeumaierSum:
    """Running complex sum with Neumaier compensation.

    Tracks the largest term magnitude seen, which callers use as a
    cancellation indicator (``max_term / abs(result)``).
    """

    def __init__(self, value: Number = 0.0):
        self._re = 0.0
        self._im = 0.0
        self._c_re = 0.0
        self._c_im = 0.0
        self.max_term = 0.0
        self.count = 0
        if value:
            self.add(value)

    @staticmethod
    def _two_sum(total: float, comp: float, x: float) -> tuple[float, float]:
        t = total + x
        if abs(total) >= abs(x):
            comp += (total - t) + x
        else:
            comp += (x - t) + total
        return t, comp

    def add(self, x: Number) -> None:
        x = complex(x)
        self._re, self._c_re = self._two_sum(self._re, self._c_re, x.real)
        self._im, self._c_im = self._two_sum(self._im, self._c_im, x.imag)
        self.max_term = max(self.max_term, abs(x))
        self.count += 1

    @property
    def value(self) -> complex:
        return complex(self._re + self._c_re, self._im + self._c_im)

    @property
    def cancellation(self) -> float:
        """Ratio of the largest term to the result magnitude (>= 1 when no cancellation)."""
        result = abs(self.value)
        if self.max_term == 0.0:
            return 1.0
        if result == 0.0:
            return math.inf
        return self.max_term / result


def compensated_sum(values) -> complex:
    """Correctly rounded sum of a complex array (real and imaginary parts via fsum)."""
    arr = np.asarray(values, dtype=complex).ravel()
    if arr.size == 0:
        return 0j
    return complex(math.fsum(arr.real), math.fsum(arr.imag))


def compensated_dot(weights, values) -> complex:
    """Fixed-order compensated inner product."""
    return compensated_sum(np.asarray(weights) * np.asarray(values))

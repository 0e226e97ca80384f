"""Riemann zeta by Euler-Maclaurin summation, plus exact values at integers.

Independent from the Dirichlet-series machinery in lfun so that the two can
check each other.
"""

import logging
import math
from fractions import Fraction
from functools import lru_cache
from typing import Union

import numpy as np

from .errors import PoleError
from .workers import chunked_apply


logger = logging.getLogger(__name__)

EM_CORRECTIONS = 16


@lru_cache(maxsize=None)
def bernoulli(n: int) -> Fraction:
    """Bernoulli number B_n with B_1 = -1/2."""
    if n < 0:
        raise ValueError(f"Bernoulli index must be >= 0, got {n}")
    return _bernoulli_table(n)[n]


@lru_cache(maxsize=4)
def _bernoulli_table(n: int) -> tuple:
    table = [Fraction(0)] * (n + 1)
    table[0] = Fraction(1)
    for m in range(1, n + 1):
        acc = Fraction(0)
        for j in range(m):
            acc += math.comb(m + 1, j) * table[j]
        table[m] = -acc / (m + 1)
    return tuple(table)


def zeta_exact(n: int) -> Union[Fraction, float]:
    """zeta(n) for n <= 0 (exact rational) or even n >= 2 (from B_n)."""
    if n == 1:
        raise PoleError("zeta has a pole at s = 1")
    if n <= 0:
        m = -n
        return (-1) ** m * bernoulli(m + 1) / (m + 1)
    if n % 2:
        raise ValueError(f"no closed form for zeta at odd n = {n}")
    half = n // 2
    value = (-1) ** (half + 1) * bernoulli(n) * (2 * math.pi) ** n / (2 * math.factorial(n))
    return float(value)


@lru_cache(maxsize=1)
def _em_coefficients() -> np.ndarray:
    # B_{2j} / (2j)!
    return np.array(
        [float(bernoulli(2 * j)) / math.factorial(2 * j) for j in range(1, EM_CORRECTIONS + 1)]
    )


def _zeta_em(s: np.ndarray) -> np.ndarray:
    cutoff = int(max(16.0, float(np.max(np.abs(s))) + 16.0)) if s.size else 16
    n = np.arange(1, cutoff, dtype=float)
    head = np.exp(-np.outer(s, np.log(n))).sum(axis=1)
    log_cutoff = math.log(cutoff)
    value = head + np.exp((1.0 - s) * log_cutoff) / (s - 1.0) + 0.5 * np.exp(-s * log_cutoff)
    rising = s.copy()                       # s (s+1) ... (s + 2j - 2)
    power = np.exp(-(s + 1.0) * log_cutoff)  # N^{-s-2j+1}
    for j, coeff in enumerate(_em_coefficients(), start=1):
        value = value + coeff * rising * power
        rising = rising * (s + 2 * j - 1) * (s + 2 * j)
        power = power / (cutoff * cutoff)
    return value


def zeta(s):
    """Riemann zeta for complex scalar or array s != 1."""
    arr = np.atleast_1d(np.asarray(s, dtype=complex))
    if np.any(np.abs(arr - 1.0) < 1e-14):
        raise PoleError("zeta has a pole at s = 1")
    # the Euler-Maclaurin cutoff follows max |s| of each chunk
    result = chunked_apply(_zeta_em, arr.ravel(), chunk=512).reshape(arr.shape)
    if np.ndim(s) == 0:
        return complex(result[0])
    return result

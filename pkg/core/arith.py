"""Arithmetic coefficients and frequency sequences for the built-in families.

Coefficients are kept as exact Python integers and converted to floating
point only at evaluation boundaries. Frequencies are exact rationals so
that tie tests such as lambda_m == mu_n * x never suffer roundoff.
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import lru_cache
from typing import Optional

import numpy as np

from .errors import CapacityError, CoefficientOverflowError


logger = logging.getLogger(__name__)

INT64_MAX = 2**63 - 1


class Family(str, Enum):
    RAMANUJAN_TAU = "tau"
    SIGMA_L = "sigma_l"
    UNIT = "unit"


class FrequencyKind(str, Enum):
    INTEGERS = "integers"          # lambda_n = n
    HALF_SQUARES = "half_squares"  # lambda_n = n^2 / 2


@dataclass(frozen=True)
class FrequencySequence:
    """A strictly increasing frequency sequence lambda_n = scale * n**exponent."""
    kind: FrequencyKind

    @classmethod
    def integers(cls) -> "FrequencySequence":
        return cls(FrequencyKind.INTEGERS)

    @classmethod
    def half_squares(cls) -> "FrequencySequence":
        return cls(FrequencyKind.HALF_SQUARES)

    @property
    def scale(self) -> Fraction:
        return Fraction(1) if self.kind == FrequencyKind.INTEGERS else Fraction(1, 2)

    @property
    def exponent(self) -> int:
        return 1 if self.kind == FrequencyKind.INTEGERS else 2

    @property
    def product_scale(self) -> Fraction:
        """kappa in lambda_k * lambda_l = kappa * lambda_{kl}."""
        return self.scale

    def exact(self, n: int) -> Fraction:
        if n < 1:
            raise ValueError(f"frequency index must be positive, got {n}")
        return self.scale * n**self.exponent

    def __call__(self, n: int) -> float:
        return float(self.exact(n))

    def values(self, count: int) -> np.ndarray:
        """lambda_1..lambda_count as float64."""
        n = np.arange(1, count + 1, dtype=float)
        return float(self.scale) * n**self.exponent

    def log_values(self, count: int) -> np.ndarray:
        n = np.arange(1, count + 1, dtype=float)
        return math.log(self.scale) + self.exponent * np.log(n)

    def count_le(self, bound: Fraction) -> tuple[int, bool]:
        """Largest m with lambda_m <= bound, and whether lambda_m == bound exactly.

        Returns (0, False) when bound < lambda_1.
        """
        bound = Fraction(bound)
        if bound < self.exact(1):
            return 0, False
        if self.kind == FrequencyKind.INTEGERS:
            m = bound.numerator // bound.denominator
            return m, bound.denominator == 1
        # m^2 / 2 <= p / q  <=>  m^2 <= 2p / q
        p, q = bound.numerator, bound.denominator
        m = math.isqrt((2 * p) // q)
        return m, m * m * q == 2 * p


@dataclass(frozen=True)
class CoefficientTable:
    """Exact coefficients f(1..capacity) of one family."""
    family: Family
    values: tuple                       # f(1), f(2), ... as Python ints
    l: Optional[int] = None             # divisor-power parameter for SIGMA_L

    @property
    def capacity(self) -> int:
        return len(self.values)

    def __len__(self) -> int:
        return len(self.values)

    def __getitem__(self, n: int) -> int:
        if not 1 <= n <= self.capacity:
            raise CapacityError(
                f"{self.family.value} table holds n <= {self.capacity}, requested n = {n}"
            )
        return self.values[n - 1]

    def as_array(self, count: Optional[int] = None, dtype=float) -> np.ndarray:
        """First `count` coefficients as a numpy array.

        Raises CoefficientOverflowError instead of wrapping when a value does
        not fit the requested type.
        """
        count = self.capacity if count is None else count
        if count > self.capacity:
            raise CapacityError(
                f"{self.family.value} table holds n <= {self.capacity}, requested {count} terms"
            )
        head = self.values[:count]
        if np.dtype(dtype) == np.dtype(np.int64):
            worst = max((abs(v) for v in head), default=0)
            if worst > INT64_MAX:
                raise CoefficientOverflowError(
                    f"coefficient of magnitude {worst} exceeds int64"
                )
            return np.array(head, dtype=np.int64)
        try:
            return np.array([float(v) for v in head], dtype=dtype)
        except OverflowError as e:
            raise CoefficientOverflowError(f"coefficient does not fit {np.dtype(dtype)}: {e}") from e


def _pentagonal_series(length: int) -> np.ndarray:
    """Coefficients of prod_{n>=1} (1 - q^n) up to q^(length-1)."""
    series = np.zeros(length, dtype=object)
    series[:] = 0
    series[0] = 1
    k = 1
    while True:
        g1 = k * (3 * k - 1) // 2
        if g1 >= length:
            break
        sign = -1 if k % 2 else 1
        series[g1] += sign
        g2 = k * (3 * k + 1) // 2
        if g2 < length:
            series[g2] += sign
        k += 1
    return series


def _truncated_product(a: np.ndarray, b: np.ndarray, length: int) -> np.ndarray:
    """Truncated product of two exact series, looping over the sparser factor."""
    if np.count_nonzero(a) > np.count_nonzero(b):
        a, b = b, a
    result = np.zeros(length, dtype=object)
    result[:] = 0
    for i in np.flatnonzero(a):
        if i >= length:
            break
        result[i:] += a[i] * b[:length - i]
    return result


def _truncated_square(a: np.ndarray, length: int) -> np.ndarray:
    result = np.zeros(length, dtype=object)
    result[:] = 0
    for i in np.flatnonzero(a):
        if 2 * i >= length:
            break
        result[2 * i] += a[i] * a[i]
        if 2 * i + 1 < length:
            result[2 * i + 1:] += 2 * a[i] * a[i + 1:length - i]
    return result


@lru_cache(maxsize=8)
def _tau_values(count: int) -> tuple:
    # q * prod (1 - q^n)^24 with 24 = 3 * 2^3
    euler = _pentagonal_series(count)
    cube = _truncated_product(_truncated_product(euler, euler, count), euler, count)
    power = cube
    for _ in range(3):
        power = _truncated_square(power, count)
    logger.debug("generated tau(1..%d)", count)
    return tuple(int(c) for c in power)


def ramanujan_tau_table(count: int) -> CoefficientTable:
    """Exact tau(1..count) from the q-expansion of the discriminant."""
    if count < 1:
        raise ValueError(f"table size must be >= 1, got {count}")
    return CoefficientTable(Family.RAMANUJAN_TAU, _tau_values(count))


def sigma_l(n: int, l: int) -> int:
    """Sum of the l-th powers of the divisors of n."""
    if n < 1:
        raise ValueError(f"sigma_l needs n >= 1, got {n}")
    if l < 0:
        raise ValueError(f"sigma_l needs l >= 0, got {l}")
    total = 0
    root = math.isqrt(n)
    for d in range(1, root + 1):
        if n % d == 0:
            e = n // d
            total += d**l
            if e != d:
                total += e**l
    return total


@lru_cache(maxsize=8)
def _sigma_values(count: int, l: int) -> tuple:
    values = np.zeros(count, dtype=object)
    values[:] = 0
    for d in range(1, count + 1):
        values[d - 1::d] += d**l
    return tuple(int(v) for v in values)


def sigma_l_table(count: int, l: int) -> CoefficientTable:
    if count < 1:
        raise ValueError(f"table size must be >= 1, got {count}")
    if l < 0:
        raise ValueError(f"sigma_l needs l >= 0, got {l}")
    return CoefficientTable(Family.SIGMA_L, _sigma_values(count, l), l=l)


def unit_table(count: int) -> CoefficientTable:
    if count < 1:
        raise ValueError(f"table size must be >= 1, got {count}")
    return CoefficientTable(Family.UNIT, (1,) * count)


def coefficient_table(family: Family, count: int, l: Optional[int] = None) -> CoefficientTable:
    if family == Family.RAMANUJAN_TAU:
        return ramanujan_tau_table(count)
    if family == Family.SIGMA_L:
        if l is None:
            raise ValueError("SIGMA_L tables need l")
        return sigma_l_table(count, l)
    return unit_table(count)


def coefficient_growth(family: Family, l: Optional[int] = None) -> tuple[float, float]:
    """(C, g) with |f(n)| <= C * n**g for every n >= 1.

    Crude bounds used only to size truncations. tau uses Deligne,
    |tau(n)| <= d(n) n^(11/2), with d(n) <= 8.5 n^(1/4).
    """
    if family == Family.RAMANUJAN_TAU:
        return 8.5, 5.75
    if family == Family.UNIT:
        return 1.0, 0.0
    if l == 0:
        return 2.0, 0.5
    if l == 1:
        return 1.0, 2.0
    from .zeta import zeta_exact
    return float(zeta_exact(l)) if l % 2 == 0 else _zeta_upper(l), float(l)


def _zeta_upper(l: int) -> float:
    # zeta(l) <= 1 + 1/(l - 1) for l >= 2
    return 1.0 + 1.0 / (l - 1)


def weighted_self_convolution(table: CoefficientTable, freq: FrequencySequence,
                              a: complex, n: int) -> complex:
    """sum_{d | n} lambda_d^a f(d) f(n/d)."""
    if n > table.capacity:
        raise CapacityError(
            f"{table.family.value} table holds n <= {table.capacity}, requested n = {n}"
        )
    a = complex(a)
    total = 0j
    for d in range(1, n + 1):
        if n % d:
            continue
        weight = 1.0 if a == 0 else complex(np.exp(a * math.log(freq(d))))
        total += weight * table[d] * table[n // d]
    return total


def convolution_array(table: CoefficientTable, freq: FrequencySequence, a: complex,
                      count: int, scale: float = 1.0) -> np.ndarray:
    """Vectorised weighted_self_convolution for n = 1..count, times scale."""
    if count > table.capacity:
        raise CapacityError(
            f"{table.family.value} table holds n <= {table.capacity}, requested {count} terms"
        )
    f = table.as_array(count)
    weights = np.exp(complex(a) * freq.log_values(count))
    result = np.zeros(count, dtype=complex)
    for d in range(1, count + 1):
        e = count // d
        result[d * np.arange(1, e + 1) - 1] += weights[d - 1] * f[d - 1] * f[:e]
    return scale * result

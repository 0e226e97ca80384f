"""Complex special functions.

log-gamma (shift plus Stirling), the upper incomplete gamma function (series
or Legendre continued fraction), 1F2 with compensated summation, and the
Meijer function G^{1,1}_{3,1}(1, b, c; d | z) by two routes: the 1F2 series
and Mellin-Barnes quadrature along a vertical line.

The Meijer integrand is

    h(s) = Gamma(d - s) Gamma(s) / (Gamma(b - s) Gamma(c - s)) * z**s

and G is (1/2 pi i) times its integral over a path with the poles of Gamma(s)
on the left and the poles of Gamma(d - s) on the right.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Optional

import mpmath
import numpy as np
from numpy.polynomial.legendre import leggauss

from .errors import (
    ConvergenceError,
    PoleError,
    PrecisionExhaustedError,
    QuadratureError,
)
from .summation import NeumaierSum, compensated_sum
from .zeta import bernoulli


logger = logging.getLogger(__name__)

STIRLING_SHIFT = 15.0
STIRLING_TERMS = 9
CF_MAX_ITER = 5000
SERIES_MAX_TERMS = 5000
FPMIN = 1e-300
CANCELLATION_LIMIT = 1e6
MAX_EXTENDED_DPS = 600

_STIRLING = [
    float(bernoulli(2 * k)) / (2 * k * (2 * k - 1)) for k in range(1, STIRLING_TERMS + 1)
]
_HALF_LOG_2PI = 0.5 * math.log(2 * math.pi)


def _is_nonpositive_integer(s: complex, tol: float = 0.0) -> bool:
    s = complex(s)
    if abs(s.imag) > tol or s.real > tol:
        return False
    return abs(s.real - round(s.real)) <= tol


# ---------------------------------------------------------------------------
# Gamma
# ---------------------------------------------------------------------------

def log_gamma_array(s) -> np.ndarray:
    """Vectorised log Gamma (principal branch for Re s > 0).

    Raises PoleError if any entry is a nonpositive integer.
    """
    arr = np.asarray(s, dtype=complex)
    flat = arr.ravel()
    poles = (flat.imag == 0) & (flat.real <= 0) & (flat.real == np.round(flat.real))
    if np.any(poles):
        raise PoleError(f"Gamma has a pole at s = {flat[poles][0].real:g}")
    shift = np.maximum(0, np.ceil(STIRLING_SHIFT - flat.real)).astype(int)
    correction = np.zeros_like(flat)
    for j in range(int(shift.max()) if flat.size else 0):
        active = shift > j
        correction[active] += np.log(flat[active] + j)
    z = flat + shift
    inv = 1.0 / z
    inv2 = inv * inv
    series = np.zeros_like(z)
    power = inv
    for coeff in _STIRLING:
        series += coeff * power
        power = power * inv2
    result = (z - 0.5) * np.log(z) - z + _HALF_LOG_2PI + series - correction
    return result.reshape(arr.shape)


def log_gamma(s: complex) -> complex:
    """Principal-branch log Gamma(s)."""
    if _is_nonpositive_integer(s):
        raise PoleError(f"Gamma has a pole at s = {complex(s).real:g}")
    return complex(log_gamma_array(np.array([s]))[0])


def gamma(s: complex) -> complex:
    return complex(np.exp(log_gamma(s)))


def reciprocal_gamma(s):
    """1 / Gamma(s); zero at the poles of Gamma. Accepts scalars or arrays."""
    arr = np.atleast_1d(np.asarray(s, dtype=complex))
    flat = arr.ravel()
    poles = (flat.imag == 0) & (flat.real <= 0) & (flat.real == np.round(flat.real))
    out = np.zeros_like(flat)
    if np.any(~poles):
        out[~poles] = np.exp(-log_gamma_array(flat[~poles]))
    out = out.reshape(arr.shape)
    if np.ndim(s) == 0:
        return complex(out[0])
    return out


# ---------------------------------------------------------------------------
# Upper incomplete gamma
# ---------------------------------------------------------------------------

def _legendre_cf(s: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Continued fraction h with Gamma(s, x) = exp(-x) x**s h (modified Lentz)."""
    b = x + 1.0 - s
    c = np.full_like(b, 1.0 / FPMIN)
    d = 1.0 / np.where(np.abs(b) < FPMIN, FPMIN, b)
    h = d.copy()
    active = np.ones(b.shape, dtype=bool)
    for i in range(1, CF_MAX_ITER + 1):
        an = -i * (i - s[active])
        b[active] = b[active] + 2.0
        dd = an * d[active] + b[active]
        dd = np.where(np.abs(dd) < FPMIN, FPMIN, dd)
        cc = b[active] + an / c[active]
        cc = np.where(np.abs(cc) < FPMIN, FPMIN, cc)
        dd = 1.0 / dd
        delta = dd * cc
        d[active] = dd
        c[active] = cc
        h[active] = h[active] * delta
        done = np.abs(delta - 1.0) < 4e-16
        idx = np.flatnonzero(active)
        active[idx[done]] = False
        if not active.any():
            return h
    raise ConvergenceError(
        f"incomplete-gamma continued fraction did not converge in {CF_MAX_ITER} iterations"
    )


def _lower_series(s: np.ndarray, x: np.ndarray) -> np.ndarray:
    """sum_{n>=0} x^n / (s (s+1) ... (s+n))."""
    term = 1.0 / s
    total = term.copy()
    active = np.ones(s.shape, dtype=bool)
    for n in range(1, SERIES_MAX_TERMS):
        term = np.where(active, term * x / (s + n), 0.0)
        total = total + term
        active &= np.abs(term) > 1e-17 * np.abs(total)
        if not active.any():
            return total
    raise ConvergenceError(
        f"incomplete-gamma series did not converge in {SERIES_MAX_TERMS} terms"
    )


def _cf_route(s: np.ndarray, x: np.ndarray) -> np.ndarray:
    near_pole = (np.abs(s.imag) < 0.25) & (s.real < 0.25) & (np.abs(s.real - np.round(s.real)) < 0.25)
    return (np.abs(x) >= np.abs(s) + 1.0) | near_pole


def upper_gamma_scaled(s, x, route: str = "auto") -> np.ndarray:
    """x**(-s) Gamma(s, x), vectorised, for complex s and Re x > 0."""
    s, x = np.broadcast_arrays(np.asarray(s, dtype=complex), np.asarray(x, dtype=complex))
    s = s.ravel().copy()
    x = x.ravel().copy()
    if np.any(x.real <= 0):
        raise ValueError("upper incomplete gamma needs Re x > 0")
    if route == "cf":
        use_cf = np.ones(s.shape, dtype=bool)
    elif route == "series":
        use_cf = np.zeros(s.shape, dtype=bool)
    else:
        use_cf = _cf_route(s, x)
    out = np.empty_like(s)
    if use_cf.any():
        out[use_cf] = np.exp(-x[use_cf]) * _legendre_cf(s[use_cf], x[use_cf])
    series = ~use_cf
    if series.any():
        ss, xs = s[series], x[series]
        out[series] = (np.exp(log_gamma_array(ss) - ss * np.log(xs))
                       - np.exp(-xs) * _lower_series(ss, xs))
    return out


def upper_incomplete_gamma(s: complex, x: float, route: str = "auto") -> complex:
    """Gamma(s, x) = int_x^oo t^(s-1) e^(-t) dt for x > 0."""
    if isinstance(x, complex) or not x > 0:
        raise ValueError(f"upper_incomplete_gamma needs real x > 0, got {x}")
    s = complex(s)
    sa = np.array([s])
    xa = np.array([complex(x)])
    if route == "cf" or (route == "auto" and _cf_route(sa, xa)[0]):
        h = _legendre_cf(sa, xa.copy())[0]
        return complex(np.exp(s * math.log(x) - x) * h)
    tail = _lower_series(sa, xa)[0]
    return complex(np.exp(log_gamma(s)) - np.exp(s * math.log(x) - x) * tail)


# ---------------------------------------------------------------------------
# 1F2
# ---------------------------------------------------------------------------

@dataclass
class HypergeometricResult:
    """Value of a hypergeometric series with its cancellation indicator."""
    value: complex
    cancellation: float          # largest term / |value|
    terms: int
    precision: str               # "double" or "extended"


def _log10_peak_term(d: complex, b: complex, c: complex, w: complex, limit: int) -> tuple[float, int]:
    """log10 of the largest |term| of 1F2 and the index where terms become negligible."""
    log_term = 0.0
    peak = 0.0
    n = 0
    lw = math.log(abs(w)) if w != 0 else -math.inf
    while n < limit:
        ratio = abs((d + n) / ((n + 1) * (b + n) * (c + n)))
        if ratio == 0.0 or lw == -math.inf:
            break
        log_term += math.log(ratio) + lw
        peak = max(peak, log_term)
        n += 1
        if log_term < peak - 40 * math.log(10) and ratio * abs(w) < 0.5:
            break
    return peak / math.log(10), n


def _hyp_1f2_extended(d: complex, b: complex, c: complex, w: complex) -> HypergeometricResult:
    log10_peak, terms = _log10_peak_term(d, b, c, w, 10 * SERIES_MAX_TERMS)
    dps = int(30 + max(0.0, log10_peak))
    if dps > MAX_EXTENDED_DPS:
        raise PrecisionExhaustedError(
            f"1F2 at |w| = {abs(w):.3g} needs {dps} digits", cancellation=10.0**min(log10_peak, 300)
        )
    with mpmath.workdps(dps):
        value = mpmath.hyp1f2(mpmath.mpc(d), mpmath.mpc(b), mpmath.mpc(c), mpmath.mpc(w))
        value = complex(value)
    magnitude = abs(value)
    cancellation = math.inf if magnitude == 0 else 10.0 ** min(log10_peak, 300) / magnitude
    return HypergeometricResult(value, cancellation, terms, "extended")


def hyp_1f2(d: complex, b: complex, c: complex, w: complex, *, precision: str = "double",
            cancellation_limit: float = CANCELLATION_LIMIT,
            max_terms: int = SERIES_MAX_TERMS) -> HypergeometricResult:
    """1F2(d; b, c; w) by compensated summation.

    Args:
        precision: "double" raises PrecisionExhaustedError when the
            cancellation indicator exceeds cancellation_limit; "auto" falls
            back to extended precision instead; "extended" goes straight to
            mpmath at a working precision sized from the peak term.

    Returns:
        HypergeometricResult with value, cancellation indicator and term count.
    """
    for name, p in (("b", b), ("c", c)):
        if _is_nonpositive_integer(p):
            raise PoleError(f"1F2 lower parameter {name} = {complex(p).real:g} is a nonpositive integer")
    d, b, c, w = complex(d), complex(b), complex(c), complex(w)
    if precision == "extended":
        return _hyp_1f2_extended(d, b, c, w)
    log10_peak, _ = _log10_peak_term(d, b, c, w, 10 * max_terms)
    if log10_peak > 300:
        # terms would overflow double before they start to decrease
        if precision == "auto":
            return _hyp_1f2_extended(d, b, c, w)
        raise PrecisionExhaustedError(
            f"1F2 terms reach 1e{log10_peak:.0f} at |w| = {abs(w):.3g}", cancellation=math.inf
        )
    acc = NeumaierSum(1.0)
    term = 1.0 + 0j
    n = 0
    while True:
        if n >= max_terms:
            raise ConvergenceError(f"1F2 series did not converge in {max_terms} terms")
        ratio = (d + n) / ((n + 1) * (b + n) * (c + n)) * w
        term *= ratio
        acc.add(term)
        n += 1
        if term == 0 or (abs(term) <= 1e-17 * acc.max_term and abs(ratio) < 0.5):
            break
    result = HypergeometricResult(acc.value, acc.cancellation, n + 1, "double")
    if result.cancellation > cancellation_limit:
        if precision == "auto":
            logger.debug("1F2 cancellation %.3g at |w|=%.3g, switching to extended precision",
                         result.cancellation, abs(w))
            return _hyp_1f2_extended(d, b, c, w)
        raise PrecisionExhaustedError(
            f"1F2 cancellation {result.cancellation:.3g} exceeds {cancellation_limit:.3g}",
            cancellation=result.cancellation,
        )
    return result


# ---------------------------------------------------------------------------
# Meijer G^{1,1}_{3,1}
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MeijerParams:
    """G^{1,1}_{3,1}(1, b, c; d | z)."""
    b: complex
    c: complex
    d: complex
    z: complex

    def __post_init__(self):
        if _is_nonpositive_integer(self.d, 1e-12):
            raise PoleError(
                f"poles of Gamma(s) and Gamma(d - s) coincide: d = {complex(self.d)} "
                "is a nonpositive integer"
            )
        if self.z == 0:
            raise ValueError("Meijer argument z must be nonzero")

    @classmethod
    def for_series(cls, delta: float, u: complex, k: int, z: complex) -> "MeijerParams":
        """Parameters (1, delta-u+k+1, delta; delta-u) of the G-series terms."""
        d = delta - complex(u)
        return cls(b=d + k + 1, c=complex(delta), d=d, z=z)

    @property
    def decay_base(self) -> float:
        """Re(b + c - d): integrand decays like |t|^(2 Re s - decay_base)."""
        return float((complex(self.b) + complex(self.c) - complex(self.d)).real)

    def with_z(self, z: complex) -> "MeijerParams":
        return MeijerParams(self.b, self.c, self.d, z)


@dataclass
class QuadratureConfig:
    """Vertical-line quadrature settings."""
    abscissa: Optional[float] = None   # None: chosen automatically
    half_height: float = 60.0          # T
    nodes_per_unit: int = 24
    rule: str = "gauss"                # "gauss" or "trapezoid"
    tol: float = 1e-10

    def __post_init__(self):
        if self.half_height <= 0:
            raise ValueError(f"half_height must be positive, got {self.half_height}")
        if self.nodes_per_unit < 2:
            raise ValueError(f"nodes_per_unit must be >= 2, got {self.nodes_per_unit}")
        if self.rule not in ("gauss", "trapezoid"):
            raise ValueError(f"unknown quadrature rule {self.rule!r}")


@dataclass
class ContourValue:
    """Result of a Mellin-Barnes quadrature."""
    value: complex
    tail_estimate: float
    abscissa: float
    nodes: int
    corrections: list = field(default_factory=list)   # (pole, residue, sign)


def segment_nodes(a: float, b: float, nodes_per_panel: int,
                  panel_width: float = 1.0) -> tuple[np.ndarray, np.ndarray]:
    """Composite Gauss-Legendre nodes and weights on [a, b].

    Panels have width at most panel_width; b < a gives negative weights.
    """
    length = b - a
    panels = max(1, int(math.ceil(abs(length) / panel_width - 1e-12)))
    x, w = leggauss(nodes_per_panel)
    width = length / panels
    starts = a + width * np.arange(panels)
    nodes = (starts[:, None] + 0.5 * width * (x[None, :] + 1.0)).ravel()
    weights = np.tile(0.5 * width * w, panels)
    return nodes, weights


def line_nodes(half_height: float, nodes_per_unit: int, rule: str = "gauss") -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights for integrating over t in [-T, T]."""
    if rule == "trapezoid":
        count = int(math.ceil(2 * half_height * nodes_per_unit)) + 1
        t = np.linspace(-half_height, half_height, count)
        w = np.full(count, t[1] - t[0])
        w[0] *= 0.5
        w[-1] *= 0.5
        return t, w
    return segment_nodes(-half_height, half_height, nodes_per_unit)


def _log_mb_kernel(b: complex, c: complex, d: complex, s: np.ndarray) -> np.ndarray:
    return (log_gamma_array(d - s) + log_gamma_array(s)
            - log_gamma_array(b - s) - log_gamma_array(c - s))


def _gamma_pole_residue(p: MeijerParams, j: int) -> complex:
    """Residue of h at s = -j."""
    return complex(
        (-1) ** j / math.factorial(j) * gamma(p.d + j)
        * reciprocal_gamma(p.b + j) * reciprocal_gamma(p.c + j) * complex(p.z) ** (-j)
    )


def _chain_pole_residue(p: MeijerParams, j: int) -> complex:
    """Residue of h at s = d + j."""
    return complex(
        -((-1) ** j) / math.factorial(j) * gamma(p.d + j)
        * reciprocal_gamma(p.b - p.d - j) * reciprocal_gamma(p.c - p.d - j)
        * np.exp((p.d + j) * np.log(complex(p.z)))
    )


def _pole_lists(p: MeijerParams, lo: float, hi: float) -> tuple[list[int], list[int]]:
    """Indices j of Gamma-poles -j and chain poles d+j with real part in (lo, hi).

    The Gamma list is empty when lo is -inf and the chain list is empty when
    hi is +inf; both families are infinite in those directions.
    """
    gamma_poles = []
    if math.isfinite(lo):
        gamma_poles = [j for j in range(0, int(max(0.0, -lo)) + 2) if lo < -j < hi]
    chain = []
    if math.isfinite(hi):
        dr = complex(p.d).real
        chain = [j for j in range(0, int(max(0.0, hi - dr)) + 2) if lo < dr + j < hi]
    return gamma_poles, chain


def _shift_corrections(p: MeijerParams, start: float, target: Optional[float]) -> list:
    """Residue corrections turning the integral on Re s = start into the target value.

    target None means the standard separating path.
    """
    out = []
    if target is None:
        g_right, _ = _pole_lists(p, start, math.inf)
        _, c_left = _pole_lists(p, -math.inf, start)
        out += [(-j, _gamma_pole_residue(p, j), +1) for j in g_right]
        out += [(complex(p.d) + j, _chain_pole_residue(p, j), -1) for j in c_left]
        return out
    lo, hi = sorted((start, target))
    sign = +1 if target > start else -1
    g, ch = _pole_lists(p, lo, hi)
    out += [(-j, _gamma_pole_residue(p, j), sign) for j in g]
    out += [(complex(p.d) + j, _chain_pole_residue(p, j), sign) for j in ch]
    return out


def _pole_real_parts(p: MeijerParams, lo: float, hi: float) -> list[float]:
    g, ch = _pole_lists(p, lo - 1, hi + 1)
    return [-j for j in g] + [complex(p.d).real + j for j in ch]


def auto_abscissa(p: MeijerParams, preferred: Optional[float] = None, clearance: float = 0.2) -> float:
    """A line with |t|^-5 decay, nudged at least `clearance` away from pole real parts."""
    base = preferred if preferred is not None else (p.decay_base - 5.0) / 2.0
    for m in range(0, 41):
        for cand in (base - 0.05 * m, base + 0.05 * m):
            if 2 * cand - p.decay_base >= -1.0:
                continue
            reals = _pole_real_parts(p, cand - 1, cand + 1)
            if all(abs(cand - r) >= clearance for r in reals):
                return cand
    raise QuadratureError(f"no pole-free abscissa near {base:g}")


def meijer_contour_batch(b: complex, c: complex, d: complex, zs, quad: QuadratureConfig,
                         target: Optional[float] = None) -> list[ContourValue]:
    """Mellin-Barnes quadrature for many arguments sharing (b, c, d).

    target None returns the standard G; a float returns the integral along
    Re s = target.
    """
    zs = np.atleast_1d(np.asarray(zs, dtype=complex))
    ref = MeijerParams(b, c, d, zs[0])
    c0 = quad.abscissa if quad.abscissa is not None else auto_abscissa(ref)
    exponent = 2 * c0 - ref.decay_base
    if exponent >= -1.0:
        raise QuadratureError(
            f"integrand decays like |t|^{exponent:.3g} on Re s = {c0:g}; need exponent < -1"
        )
    for r in _pole_real_parts(ref, c0 - 1, c0 + 1):
        if abs(r - c0) < 1e-6:
            raise QuadratureError(f"pole on the integration line Re s = {c0:g}")
    t, w = line_nodes(quad.half_height, quad.nodes_per_unit, quad.rule)
    s = c0 + 1j * t
    log_kernel = _log_mb_kernel(complex(b), complex(c), complex(d), s)
    ends = np.array([c0 - 1j * quad.half_height, c0 + 1j * quad.half_height])
    log_ends = _log_mb_kernel(complex(b), complex(c), complex(d), ends)
    results = []
    for z in zs:
        logz = np.log(z)
        integrand = np.exp(log_kernel + s * logz)
        value = compensated_sum(w * integrand) / (2 * math.pi)
        end_mag = np.abs(np.exp(log_ends + ends * logz)).sum()
        tail = float(end_mag * quad.half_height / (abs(exponent) - 1.0) / (2 * math.pi))
        p = ref.with_z(z)
        corrections = _shift_corrections(p, c0, target)
        total = value + sum(sign * res for _, res, sign in corrections)
        scale = max(1.0, abs(total))
        if tail > quad.tol * scale:
            raise QuadratureError(
                f"Mellin-Barnes tail estimate {tail:.3g} exceeds tolerance at T = {quad.half_height:g}",
                estimate=tail, tol=quad.tol * scale,
            )
        results.append(ContourValue(complex(total), tail, c0, t.size, corrections))
    return results


def meijer_contour(params: MeijerParams, quad: Optional[QuadratureConfig] = None,
                   target: Optional[float] = None) -> ContourValue:
    """Meijer G by quadrature of its Mellin-Barnes integral (see meijer_contour_batch)."""
    quad = quad or QuadratureConfig()
    return meijer_contour_batch(params.b, params.c, params.d, [params.z], quad, target)[0]


def meijer_g_1f2(params: MeijerParams, precision: str = "auto") -> complex:
    """Standard G via Gamma(d) / (Gamma(b) Gamma(c)) 1F2(d; b, c; -1/z)."""
    for name, p in (("b", params.b), ("c", params.c)):
        if _is_nonpositive_integer(p, 1e-12):
            raise PoleError(f"Meijer parameter {name} = {complex(p).real:g} is a nonpositive integer")
    prefactor = np.exp(log_gamma(params.d) - log_gamma(params.b) - log_gamma(params.c))
    series = hyp_1f2(params.d, params.b, params.c, -1.0 / complex(params.z), precision=precision)
    return complex(prefactor * series.value)


def _meijer_line_extended(p: MeijerParams, gamma_line: float, dps: int) -> tuple[complex, float]:
    with mpmath.workdps(dps):
        b, c, d, z = (mpmath.mpc(complex(v)) for v in (p.b, p.c, p.d, p.z))
        standard = mpmath.gamma(d) * mpmath.rgamma(b) * mpmath.rgamma(c) * mpmath.hyp1f2(d, b, c, -1 / z)
        total = standard
        peak = abs(standard)
        _, chain = _pole_lists(p, -math.inf, gamma_line)
        g_right, _ = _pole_lists(p, gamma_line, math.inf)
        for j in chain:
            res = (-((-1) ** j) / mpmath.factorial(j) * mpmath.gamma(d + j)
                   * mpmath.rgamma(b - d - j) * mpmath.rgamma(c - d - j) * mpmath.power(z, d + j))
            total += res
            peak = max(peak, abs(res))
        for j in g_right:
            res = ((-1) ** j / mpmath.factorial(j) * mpmath.gamma(d + j)
                   * mpmath.rgamma(b + j) * mpmath.rgamma(c + j) * mpmath.power(z, -j))
            total -= res
            peak = max(peak, abs(res))
        magnitude = abs(total)
        ratio = float("inf") if magnitude == 0 else float(peak / magnitude)
        return complex(total), ratio


def meijer_line(params: MeijerParams, gamma_line: float, precision: str = "auto",
                cancellation_limit: float = CANCELLATION_LIMIT) -> complex:
    """(1/2 pi i) * integral of h along Re s = gamma_line.

    Computed as the standard G plus the residues of the poles between the
    standard path and the line. Falls back to extended precision when the
    residues cancel the algebraic part of G beyond cancellation_limit.
    """
    if precision != "extended":
        try:
            series = hyp_1f2(params.d, params.b, params.c, -1.0 / complex(params.z),
                             precision="double", cancellation_limit=cancellation_limit)
            prefactor = np.exp(log_gamma(params.d) - log_gamma(params.b) - log_gamma(params.c))
            standard = complex(prefactor * series.value)
            peak = abs(standard) * series.cancellation
            total = standard
            _, chain = _pole_lists(params, -math.inf, gamma_line)
            g_right, _ = _pole_lists(params, gamma_line, math.inf)
            for j in chain:
                res = _chain_pole_residue(params, j)
                total += res
                peak = max(peak, abs(res))
            for j in g_right:
                res = _gamma_pole_residue(params, j)
                total -= res
                peak = max(peak, abs(res))
            if total != 0 and peak / abs(total) <= cancellation_limit:
                return total
            if precision == "double":
                raise PrecisionExhaustedError(
                    "Meijer line value cancels beyond double precision",
                    cancellation=math.inf if total == 0 else peak / abs(total),
                )
        except PrecisionExhaustedError:
            if precision == "double":
                raise
    dps = 40
    while dps <= MAX_EXTENDED_DPS:
        value, ratio = _meijer_line_extended(params, gamma_line, dps)
        if ratio < 10.0 ** (dps - 20):
            return value
        dps = int(dps + max(20.0, math.log10(ratio) if math.isfinite(ratio) else 100.0))
    raise PrecisionExhaustedError(
        f"Meijer line value at z = {complex(params.z):.3g} needs more than {MAX_EXTENDED_DPS} digits"
    )

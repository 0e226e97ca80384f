"""Hecke-type Dirichlet series and their functional-equation data.

A series phi(s) = sum f(n) / lambda_n**s is paired with a partner psi through

    (2 pi)^-s Gamma(s) phi(s) = (2 pi)^(s - delta) Gamma(delta - s) psi(delta - s).

Inside the half-plane of absolute convergence phi is evaluated from a closed
form or a certified truncation. Elsewhere the completed function is written
as two incomplete-gamma sums plus polar terms (theta splitting).
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .arith import (
    CoefficientTable,
    Family,
    FrequencySequence,
    coefficient_growth,
    coefficient_table,
)
from .errors import (
    CapacityError,
    ConfigError,
    ConvergenceError,
    HypothesisError,
    PoleError,
    TruncationError,
)
from .special import log_gamma, upper_gamma_scaled
from .summation import compensated_sum
from .workers import chunked_apply, ordered_map
from .zeta import zeta, zeta_exact


logger = logging.getLogger(__name__)

LOG_2PI = math.log(2 * math.pi)
MAX_TERMS = 1 << 15
TAU_MAX_TERMS = 1 << 13   # exact q-expansion cost grows quadratically
ABS_MARGIN = 1e-3
POLE_EXCLUSION = 1e-6
SPLIT_DECAY = 2.5         # beta in theta = pi/2 - beta/|t|
SPLIT_DIGITS = 40.0       # natural-log units kept below the leading term


@dataclass(frozen=True)
class Pole:
    """Simple pole of phi on the real axis."""
    location: float
    residue: float


@dataclass(eq=False)
class HeckeSeriesSpec:
    """One Dirichlet series with its functional-equation data.

    `twist` scales every coefficient; the sigma_l partner uses it for the
    sign (-1)^((l+1)/2). `partner` is the psi side of the functional equation
    and defaults to the series itself.
    """
    name: str
    family: Family
    freq: FrequencySequence
    delta: float
    sigma_a: float
    poles: tuple = ()                # tuple[Pole, ...]
    l: Optional[int] = None
    twist: float = 1.0
    partner: Optional["HeckeSeriesSpec"] = field(default=None, repr=False)

    def __post_init__(self):
        if self.delta <= 0:
            raise ConfigError(f"{self.name}: delta must be positive, got {self.delta}")
        if self.poles and self.sigma_a > self.delta:
            raise ConfigError(f"{self.name}: series with poles need sigma_a <= delta")

    @property
    def dual(self) -> "HeckeSeriesSpec":
        return self.partner if self.partner is not None else self

    @property
    def max_terms(self) -> int:
        return TAU_MAX_TERMS if self.family == Family.RAMANUJAN_TAU else MAX_TERMS

    def table(self, count: int) -> CoefficientTable:
        """Coefficient table holding at least `count` entries.

        Sizes are rounded up to a power of two so repeated requests share a cache entry.
        """
        if count > self.max_terms:
            raise CapacityError(f"{self.name}: {count} coefficients requested, cap is {self.max_terms}")
        size = 1 << max(6, (count - 1).bit_length())
        return coefficient_table(self.family, size, self.l)

    def coefficient_array(self, count: int) -> np.ndarray:
        """twist * f(1..count) as float64."""
        return self.twist * self.table(count).as_array(count)

    def growth(self) -> tuple[float, float]:
        """(C, g) with |f(n)| <= C n^g, including the twist."""
        c, g = coefficient_growth(self.family, self.l)
        return abs(self.twist) * c, g

    def lambda_poles(self) -> list[tuple[float, float]]:
        """Poles (location, residue) of the completed function (2 pi)^-s Gamma(s) phi(s)."""
        merged: dict[float, float] = {}
        for p in self.poles:
            a = math.exp(-p.location * LOG_2PI + log_gamma(p.location).real) * p.residue
            merged[p.location] = merged.get(p.location, 0.0) + a
        for q in self.dual.poles:
            loc = self.delta - q.location
            a = -math.exp(-q.location * LOG_2PI + log_gamma(q.location).real) * q.residue
            merged[loc] = merged.get(loc, 0.0) + a
        return [(loc, a) for loc, a in sorted(merged.items()) if a != 0.0]

    def active_poles(self) -> list[Pole]:
        return [p for p in self.poles if p.residue != 0.0]


# ---------------------------------------------------------------------------
# Absolutely convergent region
# ---------------------------------------------------------------------------

def _closed_form(spec: HeckeSeriesSpec, s: np.ndarray) -> Optional[np.ndarray]:
    """Closed forms through zeta for the unit and divisor-power families."""
    scale = float(spec.freq.scale)
    e = spec.freq.exponent
    prefactor = spec.twist * np.exp(-s * math.log(scale))
    if spec.family == Family.UNIT:
        return prefactor * zeta(e * s)
    if spec.family == Family.SIGMA_L:
        return prefactor * zeta(e * s) * zeta(e * s - spec.l)
    return None


def truncation_point(spec: HeckeSeriesSpec, sigma: float, tol: float) -> int:
    """Smallest N with sum_{n>N} |f(n)| lambda_n^-sigma <= tol (integral comparison).

    The bound is C scale^-sigma N^-excess / excess, solved for N in log space.
    """
    if not tol > 0:
        raise ValueError(f"truncation tolerance must be positive, got {tol}")
    c, g = spec.growth()
    e = spec.freq.exponent
    excess = e * sigma - g - 1.0
    if excess <= 0:
        raise TruncationError(
            f"{spec.name}: coefficient bound n^{g:g} gives no tail control at Re s = {sigma:g}",
            estimate=math.inf, tol=tol,
        )
    log_constant = math.log(c) - sigma * math.log(float(spec.freq.scale)) - math.log(excess)
    log_n = max(0.0, (log_constant - math.log(tol)) / excess)
    log_cap = math.log(spec.max_terms)
    if log_n > log_cap:
        raise TruncationError(
            f"{spec.name}: about e^{log_n:.3g} terms needed at Re s = {sigma:g}, cap is {spec.max_terms}",
            estimate=math.exp(min(log_constant - excess * log_cap, 700.0)), tol=tol,
        )
    return min(max(math.ceil(math.exp(log_n)), 1), spec.max_terms)


def _truncated_sum(spec: HeckeSeriesSpec, s: np.ndarray, count: int) -> np.ndarray:
    coeffs = spec.coefficient_array(count)
    logs = spec.freq.log_values(count)

    def block(chunk: np.ndarray) -> np.ndarray:
        return np.exp(-np.outer(chunk, logs)) @ coeffs

    return chunked_apply(block, s, chunk=256)


def evaluate_abs_array(spec: HeckeSeriesSpec, s, tol: float = 1e-13,
                       margin: float = ABS_MARGIN) -> np.ndarray:
    """phi(s) for Re s > sigma_a + margin, vectorised."""
    arr = np.atleast_1d(np.asarray(s, dtype=complex)).ravel()
    if arr.size and arr.real.min() <= spec.sigma_a + margin:
        raise HypothesisError(
            "Re s > sigma_a + margin",
            f"{spec.name}: Re s = {arr.real.min():g}, sigma_a = {spec.sigma_a:g}",
        )
    closed = _closed_form(spec, arr)
    if closed is not None:
        return closed
    count = truncation_point(spec, float(arr.real.min()), tol)
    logger.debug("%s: truncating at N=%d for Re s >= %g", spec.name, count, arr.real.min())
    return _truncated_sum(spec, arr, count)


def evaluate_abs(spec: HeckeSeriesSpec, s: complex, tol: float = 1e-13,
                 margin: float = ABS_MARGIN) -> complex:
    """phi(s) inside the half-plane of absolute convergence.

    Args:
        tol: absolute bound on the neglected tail.
        margin: required distance of Re s from sigma_a.

    Raises:
        HypothesisError: Re s <= sigma_a + margin.
        TruncationError: the tail cannot be certified within the coefficient cap.
    """
    return complex(evaluate_abs_array(spec, [s], tol, margin)[0])


def abs_majorant(spec: HeckeSeriesSpec, sigma: float, tol: float = 1e-10) -> float:
    """Upper bound for sum |f(n)| lambda_n^-sigma.

    Raises:
        TruncationError: the coefficient bound gives no tail control at sigma.
    """
    if sigma <= spec.sigma_a:
        raise HypothesisError("Re s > sigma_a", f"{spec.name}: sigma = {sigma:g}")
    if spec.family != Family.RAMANUJAN_TAU:
        # nonnegative coefficients up to the twist
        return abs(complex(_closed_form(spec, np.array([complex(sigma)]))[0]))
    try:
        count, tail = truncation_point(spec, sigma, tol), tol
    except TruncationError as e:
        if not math.isfinite(e.estimate):
            raise
        # whole table plus the comparison tail past it
        count, tail = spec.max_terms, e.estimate
    head = np.abs(spec.coefficient_array(count)) * np.exp(-sigma * spec.freq.log_values(count))
    return math.fsum(head) + tail


# ---------------------------------------------------------------------------
# Continuation by theta splitting
# ---------------------------------------------------------------------------

def _split_point(s: complex, radius: float) -> complex:
    t = s.imag
    if t == 0:
        return complex(radius)
    theta = math.copysign(max(0.0, math.pi / 2 - SPLIT_DECAY / abs(t)), t)
    return radius * complex(math.cos(theta), math.sin(theta))


def _split_count(spec: HeckeSeriesSpec, sigma: float, scale: complex) -> int:
    """Terms needed in sum f(n) (2 pi lambda_n)^-s Gamma(s, 2 pi lambda_n * scale)."""
    lam = spec.freq.values(spec.max_terms)
    x = 2 * math.pi * lam * scale
    _, g = spec.growth()
    n = np.arange(1, spec.max_terms + 1)
    slack = x.real - (abs(sigma) + 1.0) * np.log1p(np.abs(x)) - g * np.log(n)
    ok = np.flatnonzero(slack >= SPLIT_DIGITS)
    if ok.size == 0:
        raise ConvergenceError(f"{spec.name}: theta splitting needs more than {spec.max_terms} terms")
    return int(ok[0]) + 1


def _incomplete_sum(spec: HeckeSeriesSpec, s: complex, scale: complex) -> complex:
    """sum f(n) (2 pi lambda_n)^-s Gamma(s, 2 pi lambda_n scale)."""
    count = _split_count(spec, s.real, scale)
    coeffs = spec.coefficient_array(count)
    x = 2 * math.pi * spec.freq.values(count) * scale
    # (2 pi lambda)^-s Gamma(s, X) = scale^s * X^-s Gamma(s, X)
    terms = coeffs * upper_gamma_scaled(s, x)
    return compensated_sum(terms) * np.exp(s * np.log(scale))


def completed(spec: HeckeSeriesSpec, s: complex, radius: float = 1.0) -> complex:
    """Lambda(s) = (2 pi)^-s Gamma(s) phi(s) everywhere except at its poles."""
    s = complex(s)
    poles = spec.lambda_poles()
    for rho, _ in poles:
        if abs(s - rho) < POLE_EXCLUSION:
            raise PoleError(f"{spec.name}: s = {s} lies within {POLE_EXCLUSION:g} of the pole {rho:g}")
    t0 = _split_point(s, radius)
    first = _incomplete_sum(spec, s, t0)
    second = _incomplete_sum(spec.dual, spec.delta - s, 1.0 / t0)
    polar = sum(a * np.exp((s - rho) * np.log(t0)) / (s - rho) for rho, a in poles)
    return complex(first + second + polar)


def evaluate_continued(spec: HeckeSeriesSpec, s: complex, radius: float = 1.0) -> complex:
    """phi(s) from the completed function; valid away from the poles of phi."""
    s = complex(s)
    for p in spec.active_poles():
        if abs(s - p.location) < POLE_EXCLUSION:
            raise PoleError(f"{spec.name}: s = {s} lies within {POLE_EXCLUSION:g} of the pole {p.location:g}")
    lam = completed(spec, s, radius)
    if s.imag == 0 and s.real <= 0 and s.real == round(s.real):
        raise PoleError(f"{spec.name}: Gamma pole at s = {s.real:g}; evaluate nearby instead")
    return complex(lam * np.exp(s * LOG_2PI - log_gamma(s)))


def evaluate_continued_array(spec: HeckeSeriesSpec, s, radius: float = 1.0,
                             threads: Optional[int] = None) -> np.ndarray:
    arr = np.atleast_1d(np.asarray(s, dtype=complex)).ravel()
    values = ordered_map(lambda z: evaluate_continued(spec, z, radius), list(arr), threads)
    return np.array(values, dtype=complex)


def evaluate(spec: HeckeSeriesSpec, s, tol: float = 1e-13, threads: Optional[int] = None):
    """phi at scalar or array s: absolute route where certified, continuation elsewhere."""
    scalar = np.ndim(s) == 0
    arr = np.atleast_1d(np.asarray(s, dtype=complex)).ravel()
    out = np.empty(arr.shape, dtype=complex)
    use_abs = arr.real > spec.sigma_a + ABS_MARGIN
    if use_abs.any():
        try:
            out[use_abs] = evaluate_abs_array(spec, arr[use_abs], tol)
        except TruncationError:
            # split by certifiability at each abscissa
            sigmas = np.unique(arr.real[use_abs])
            certified = set()
            for sigma in sigmas:
                try:
                    truncation_point(spec, float(sigma), tol)
                    certified.add(float(sigma))
                except TruncationError:
                    pass
            use_abs &= np.array([float(r) in certified for r in arr.real])
            if use_abs.any():
                out[use_abs] = evaluate_abs_array(spec, arr[use_abs], tol)
            logger.info("%s: %d points routed to continuation", spec.name, int((~use_abs).sum()))
    rest = ~use_abs
    if rest.any():
        out[rest] = evaluate_continued_array(spec, arr[rest], threads=threads)
    if scalar:
        return complex(out[0])
    return out


def functional_equation_residual(spec: HeckeSeriesSpec, s: complex) -> float:
    """|Lambda_phi(s) - Lambda_psi(delta - s)| / (1 + |Lambda_phi(s)|).

    The two sides use different splitting radii, so agreement checks the
    functional-equation data rather than the symmetry of one formula.
    """
    s = complex(s)
    lhs = completed(spec, s, radius=1.0)
    rhs = completed(spec.dual, spec.delta - s, radius=1.25)
    return abs(lhs - rhs) / (1.0 + abs(lhs))


@dataclass
class ResidueTerms:
    """The two residue sums of the product formula."""
    psi_part: complex      # -sum r_psi / (p_psi - v) * phi(v + u - p_psi)
    phi_part: complex      # -sum r_phi / (p_phi - u) * psi(v + u - p_phi)

    @property
    def total(self) -> complex:
        return self.psi_part + self.phi_part


def residue_correction_terms(phi: HeckeSeriesSpec, psi: HeckeSeriesSpec,
                             u: complex, v: complex, tol: float = 1e-13) -> ResidueTerms:
    u, v = complex(u), complex(v)
    psi_part = 0j
    for p in psi.active_poles():
        if abs(p.location - v) < POLE_EXCLUSION:
            raise PoleError(f"v = {v} coincides with the pole {p.location:g} of {psi.name}")
        psi_part -= p.residue / (p.location - v) * evaluate(phi, v + u - p.location, tol)
    phi_part = 0j
    for p in phi.active_poles():
        if abs(p.location - u) < POLE_EXCLUSION:
            raise PoleError(f"u = {u} coincides with the pole {p.location:g} of {phi.name}")
        phi_part -= p.residue / (p.location - u) * evaluate(psi, v + u - p.location, tol)
    return ResidueTerms(complex(psi_part), complex(phi_part))


# ---------------------------------------------------------------------------
# Built-in scenarios
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ParameterSet:
    """Documented (u, v, k, gamma) point inside the admissible region."""
    u: complex
    v: complex
    k: int
    gamma: float
    right: Optional[float] = None   # Perron abscissa; None means the midpoint of its range
    h: Optional[float] = None       # finite-difference step for derivative identities


@dataclass
class Scenario:
    name: str
    phi: HeckeSeriesSpec
    psi: HeckeSeriesSpec
    sums: ParameterSet
    derivatives: ParameterSet
    x_values: tuple = (1.0, 1.3)
    description: str = ""

    @property
    def delta(self) -> float:
        return self.phi.delta

    @property
    def sigma_a(self) -> float:
        return max(self.phi.sigma_a, self.psi.sigma_a)


def _pair(phi: HeckeSeriesSpec, psi: HeckeSeriesSpec) -> None:
    phi.partner = psi
    psi.partner = phi


def tau_scenario() -> Scenario:
    phi = HeckeSeriesSpec("tau", Family.RAMANUJAN_TAU, FrequencySequence.integers(),
                          delta=12.0, sigma_a=6.5)
    return Scenario(
        name="tau", phi=phi, psi=phi,
        sums=ParameterSet(u=11.0, v=11.0, k=7, gamma=8.75, right=11.5),
        derivatives=ParameterSet(u=11.0, v=11.0, k=3, gamma=7.0, h=0.04),
        description="Ramanujan tau, delta = 12, entire",
    )


def zeta_scenario() -> Scenario:
    phi = HeckeSeriesSpec("zeta", Family.UNIT, FrequencySequence.half_squares(),
                          delta=0.5, sigma_a=0.5, poles=(Pole(0.5, math.sqrt(2) / 2),))
    return Scenario(
        name="zeta", phi=phi, psi=phi,
        sums=ParameterSet(u=2.2, v=2.3, k=3, gamma=1.5, right=3.15),
        derivatives=ParameterSet(u=2.2, v=2.3, k=3, gamma=1.5, h=0.08),
        description="2^s zeta(2s) over lambda_n = n^2/2, delta = 1/2",
    )


def sigma_scenario(l: int) -> Scenario:
    if l < 1 or l % 2 == 0:
        raise ConfigError(f"sigma_l scenarios need odd l >= 1, got {l}")
    delta = float(l + 1)
    twist = float((-1) ** ((l + 1) // 2))
    poles = (Pole(1.0, float(zeta_exact(1 - l))), Pole(delta, float(zeta_exact(l + 1))))
    phi = HeckeSeriesSpec(f"sigma_{l}", Family.SIGMA_L, FrequencySequence.integers(),
                          delta=delta, sigma_a=delta, poles=poles, l=l)
    if twist == 1.0:
        psi = phi
    else:
        psi = HeckeSeriesSpec(f"sigma_{l}~", Family.SIGMA_L, FrequencySequence.integers(),
                              delta=delta, sigma_a=delta, l=l, twist=twist,
                              poles=tuple(Pole(p.location, twist * p.residue) for p in poles))
        _pair(phi, psi)
    # delta - u must stay off the nonpositive integers
    return Scenario(
        name=f"sigma_{l}", phi=phi, psi=psi,
        sums=ParameterSet(u=2.0 * l + 3.5, v=2.0 * l + 3.5, k=2 * l + 3, gamma=l + 2.0),
        derivatives=ParameterSet(u=2.0 * l + 3.5, v=2.0 * l + 3.5, k=l + 2, gamma=l + 1.25, h=0.06),
        description=f"sigma_{l}(n), delta = {l + 1}, twist {twist:+g}",
    )


def _check_residue_data(scenario: Scenario) -> None:
    """Residues must reproduce the closed-form coefficients of the residue terms."""
    name = scenario.name
    if name == "zeta":
        (pole,) = scenario.phi.poles
        # r / (p - v) must equal sqrt(2) / (1 - 2v)
        if abs(2 * pole.residue - math.sqrt(2)) > 1e-12 or pole.location != 0.5:
            raise ConfigError("zeta residue data does not give sqrt(2) / (1 - 2v)")
    elif name.startswith("sigma_"):
        l = scenario.phi.l
        expected = {1.0: float(zeta_exact(1 - l)), float(l + 1): float(zeta_exact(l + 1))}
        for p in scenario.phi.poles:
            if abs(p.residue - expected[p.location]) > 1e-12 * max(1.0, abs(expected[p.location])):
                raise ConfigError(f"{name}: residue at {p.location:g} is {p.residue}")
        c = scenario.psi.twist
        for p, q in zip(scenario.phi.poles, scenario.psi.poles):
            if q.residue != c * p.residue:
                raise ConfigError(f"{name}: partner residue at {q.location:g} lacks the twist")
    elif scenario.phi.poles:
        raise ConfigError(f"{name}: unexpected poles")


class ScenarioRegistry:
    """Built-in scenarios by name: tau, zeta, sigma_<l> for odd l."""

    FIXED = {"tau": tau_scenario, "zeta": zeta_scenario}

    def __init__(self):
        self._cache: dict[str, Scenario] = {}

    def names(self) -> list[str]:
        return ["tau", "zeta", "sigma_3"]

    def get(self, name: str, l: Optional[int] = None) -> Scenario:
        key = name.lower()
        if key in ("sigma", "sigma_l"):
            if l is None:
                raise ConfigError("sigma_l scenario needs l")
            key = f"sigma_{l}"
        if key not in self._cache:
            if key in self.FIXED:
                scenario = self.FIXED[key]()
            elif key.startswith("sigma_"):
                suffix = key.split("_", 1)[1]
                if not suffix.isdigit():
                    raise ConfigError(f"unknown scenario {name!r}")
                scenario = sigma_scenario(int(suffix))
            else:
                raise ConfigError(f"unknown scenario {name!r}; choose tau, zeta or sigma_<odd l>")
            _check_residue_data(scenario)
            self._cache[key] = scenario
        return self._cache[key]


_registry = ScenarioRegistry()


def get_scenario(name: str, l: Optional[int] = None) -> Scenario:
    return _registry.get(name, l)


def list_scenarios() -> list[Scenario]:
    return [_registry.get(n) for n in _registry.names()]

"""G-series of the product formula and end-to-end identity verification.

G_{g,k}(u, v, x) = (2 pi)^delta * sum_n g_{delta-u-v}(n) x^(delta-u+k) I_gamma(z_n),
z_n = 1 / (4 pi^2 kappa mu_n x), where I_gamma is the Mellin-Barnes integral of
G^{1,1}_{3,1}(1, delta-u+k+1, delta; delta-u | z) along Re s = gamma and
kappa is the frequency product scale. G_{f,k}(v, u, x) swaps the roles of
(phi, u) and (psi, v).

The series is computed directly from Meijer terms, or as the Riesz double
sum minus P_k(x). Its k-th derivative in x is always taken numerically on the
assembled series; differentiating the Meijer terms one by one diverges.
"""

import logging
import math
import time
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Callable, Optional

import numpy as np

from .arith import convolution_array
from .errors import (
    CertificationError,
    ConvergenceError,
    DifferentiationError,
    HeckeError,
    PoleError,
    PrecisionExhaustedError,
    TruncationError,
)
from .lfun import HeckeSeriesSpec, Scenario, evaluate, residue_correction_terms
from .report import VerificationReport, relative_residual
from .riesz import (
    PERRON_HALF_HEIGHT,
    PERRON_NODES,
    ContourSpec,
    Estimate,
    RieszParams,
    p_k_contour,
    perron_line_integral,
    prime_double_sum,
    riesz_double_sum,
    s2_check,
)
from .special import MeijerParams, meijer_line
from .workers import ordered_map


logger = logging.getLogger(__name__)

# The Meijer G already carries 1/(2 pi i); the prefactor of the series is (2 pi)^delta alone.
NORMALIZATION = 1.0

START_TERMS = 64
MAX_SERIES_TERMS = 4096
MIN_DECAY = 1.05
KNOT_TOL = 1e-12
KNOT_SEARCH = 512


class Side(str, Enum):
    F = "f"      # G_{f,k}(v, u, x)
    G = "g"      # G_{g,k}(u, v, x)


class Route(str, Enum):
    AUTO = "auto"
    DIRECT = "direct"
    RIESZ = "riesz"


class Identity(str, Enum):
    ID1 = "id1"
    ID2 = "id2"
    ID3 = "id3"
    EQUALITY1 = "equality1"
    EXPRESION1 = "expresion1"
    EXPRESSION2 = "expression2"
    S2 = "s2"


DERIVATIVE_IDENTITIES = (Identity.EXPRESION1, Identity.EXPRESSION2, Identity.ID1)

DEFAULT_TOLERANCES = {
    Identity.S2: 1e-6,
    Identity.ID2: 1e-5,
    Identity.ID3: 1e-5,
    Identity.EQUALITY1: 1e-5,
    Identity.EXPRESION1: 1e-3,
    Identity.EXPRESSION2: 1e-3,
    Identity.ID1: 1e-3,
}


@dataclass
class GSeriesParams:
    """Arguments of one G-series evaluation."""
    side: Side
    u: complex
    v: complex
    k: int
    x: float
    gamma: float
    right: Optional[float] = None
    n_max: int = MAX_SERIES_TERMS       # cap for the adaptive truncation
    route: Route = Route.AUTO
    tol: float = 1e-9                   # relative tail tolerance
    atol: float = 0.0                   # absolute tail tolerance

    def __post_init__(self):
        self.side = Side(self.side)
        self.route = Route(self.route)
        self.u = complex(self.u)
        self.v = complex(self.v)
        if self.n_max < 1:
            raise ValueError(f"n_max must be >= 1, got {self.n_max}")

    def riesz_params(self) -> RieszParams:
        """Riesz parameters in the orientation of this side."""
        p = RieszParams(self.u, self.v, self.k, self.x, self.gamma, self.right)
        return p if self.side == Side.G else p.swapped()


def oriented(scenario: Scenario, side: Side) -> tuple[HeckeSeriesSpec, HeckeSeriesSpec]:
    """(first, second): the series playing phi and psi for this side."""
    if Side(side) == Side.G:
        return scenario.phi, scenario.psi
    return scenario.psi, scenario.phi


def _series_prefactor(delta: float) -> float:
    return (2 * math.pi) ** delta * NORMALIZATION


def _tail_estimate(terms: np.ndarray) -> tuple[float, float]:
    """Tail of sum |t_n| past len(terms) from the decay of dyadic block maxima.

    Returns (tail, decay exponent p) with max|t_n| ~ n^-p.
    """
    n = terms.size
    if n < 4:
        return math.inf, 0.0
    mags = np.abs(terms)
    b1 = mags[n // 4:n // 2].max()
    b2 = mags[n // 2:].max()
    if b2 == 0.0:
        return 0.0, math.inf
    if b1 <= b2:
        return math.inf, 0.0
    p = math.log2(b1 / b2)
    if p <= MIN_DECAY:
        return math.inf, p
    return b2 * n / (p - 1.0), p


def g_series_direct(scenario: Scenario, params: GSeriesParams,
                    threads: Optional[int] = None) -> Estimate:
    """G-series summed from Meijer terms with an adaptive, tail-certified truncation.

    The tail is certified once it is at most atol + tol * |value|.

    Raises:
        TruncationError: the tail cannot be certified within n_max terms.
        PrecisionExhaustedError: a Meijer term needs more than the extended precision cap.
    """
    first, second = oriented(scenario, params.side)
    rp = params.riesz_params()
    rp.check_hypotheses(first, second)
    delta, s, t, k, x = first.delta, rp.u, rp.v, rp.k, float(rp.x)
    kappa = float(second.freq.product_scale)
    power = np.exp((delta - s + k) * math.log(x))

    def term_value(n_and_mu):
        n, mu = n_and_mu
        z = 1.0 / (4 * math.pi**2 * kappa * mu * x)
        return meijer_line(MeijerParams.for_series(delta, s, k, z), params.gamma)

    meijer: list[complex] = []
    count = min(START_TERMS, params.n_max)
    while True:
        mu = second.freq.values(count)
        fresh = range(len(meijer) + 1, count + 1)
        meijer += ordered_map(term_value, [(n, mu[n - 1]) for n in fresh], threads)
        conv = convolution_array(second.table(count), second.freq, delta - s - t, count,
                                 scale=second.twist**2)
        terms = _series_prefactor(delta) * power * conv * np.array(meijer)
        value = complex(np.sum(terms))
        tail, decay = _tail_estimate(terms)
        logger.debug("G_%s direct: N=%d, tail %.3g, decay n^-%.2f", params.side.value, count, tail, decay)
        if tail <= params.atol + params.tol * abs(value):
            logger.info("G_%s direct: %d terms, tail %.3g", params.side.value, count, tail)
            return Estimate(value, tail, {"route": Route.DIRECT.value, "n_max": count,
                                          "decay": decay})
        if count >= params.n_max:
            raise TruncationError(
                f"G_{params.side.value} series tail {tail:.3g} not certified with {count} terms",
                estimate=tail, tol=params.atol + params.tol * abs(value),
            )
        count = min(2 * count, params.n_max)


def g_series_via_riesz(scenario: Scenario, params: GSeriesParams, sum_tol: float = 1e-12) -> Estimate:
    """G-series as the Riesz double sum minus P_k(x)."""
    first, second = oriented(scenario, params.side)
    rp = params.riesz_params()
    rp.check_hypotheses(first, second)
    riesz = riesz_double_sum(first, second, rp, max(sum_tol, params.atol), rtol=params.tol)
    contour = p_k_contour(first, second, rp)
    settings = {"route": Route.RIESZ.value, **riesz.settings, **contour.settings}
    return Estimate(riesz.value - contour.value, riesz.error + contour.error, settings,
                    parts={"riesz": riesz.value, "p_k": contour.value})


def g_series(scenario: Scenario, params: GSeriesParams, threads: Optional[int] = None) -> Estimate:
    """G-series by the requested route; auto falls back from direct to riesz."""
    if params.route == Route.DIRECT:
        return g_series_direct(scenario, params, threads)
    if params.route == Route.RIESZ:
        return g_series_via_riesz(scenario, params)
    try:
        return g_series_direct(scenario, params, threads)
    except (TruncationError, PrecisionExhaustedError, PoleError) as e:
        logger.info("G_%s: direct route failed (%s); using Riesz sum minus P_k", params.side.value, e)
        return g_series_via_riesz(scenario, params)


@dataclass
class DerivativeResult:
    value: complex
    error: float
    h: float
    evaluations: int


def kth_derivative_at_1(fn: Callable[[float], complex], k: int, h: float,
                        tol: Optional[float] = None,
                        near_knot: Optional[Callable[[float], bool]] = None,
                        threads: Optional[int] = None) -> DerivativeResult:
    """k-th derivative of fn at x = 1 by central differences and one Richardson step.

    Uses steps h and h/2; the error estimate is |R - D(h/2)| for the
    extrapolant R. Off-centre samples closer than 1e-12 to a knot shift h.

    Raises:
        DifferentiationError: the error estimate exceeds tol * max(1, |value|).
    """
    if k < 0:
        raise ValueError(f"derivative order must be >= 0, got {k}")
    if k == 0:
        return DerivativeResult(complex(fn(1.0)), 0.0, h, 1)
    offsets = [k / 2 - j for j in range(k + 1)]
    for _ in range(10):
        points = [1.0 + o * step for step in (h, h / 2) for o in offsets if o != 0]
        if near_knot is None or not any(near_knot(p) for p in points):
            break
        h *= 1.0 + 1e-3
    else:
        raise DifferentiationError(f"could not move the stencil off the knots near x = 1 (h = {h:g})")

    samples = sorted({1.0 + o * step for step in (h, h / 2) for o in offsets})
    values = dict(zip(samples, ordered_map(fn, samples, threads)))

    def central(step: float) -> complex:
        total = sum((-1) ** j * math.comb(k, j) * values[1.0 + offsets[j] * step] for j in range(k + 1))
        return complex(total / step**k)

    coarse, fine = central(h), central(h / 2)
    value = (4 * fine - coarse) / 3
    error = abs(value - fine)
    if tol is not None and error > tol * max(1.0, abs(value)):
        raise DifferentiationError(
            f"derivative error estimate {error:.3g} exceeds tolerance (k = {k}, h = {h:g})",
            estimate=error, tol=tol,
        )
    return DerivativeResult(value, error, h, len(samples))


def knot_detector(first: HeckeSeriesSpec, second: HeckeSeriesSpec,
                  search: int = KNOT_SEARCH) -> Callable[[float], bool]:
    """Predicate for x within KNOT_TOL (relative) of some lambda_m / mu_n, n <= search."""
    mu = second.freq.values(search)
    scale = float(first.freq.scale)
    e = first.freq.exponent

    def near(x: float) -> bool:
        target = mu * x
        m = np.floor((target / scale) ** (1.0 / e))
        for cand in (m, m + 1):
            lam = scale * np.maximum(cand, 1.0) ** e
            if np.any(np.abs(lam - target) <= KNOT_TOL * target):
                return True
        return False

    return near


def g_series_derivative(scenario: Scenario, params: GSeriesParams, h: float,
                        tol: Optional[float] = None, threads: Optional[int] = None
                        ) -> tuple[DerivativeResult, str]:
    """d^k/dx^k of the assembled G-series at x = 1, and the route that produced it."""
    first, second = oriented(scenario, params.side)
    near_knot = knot_detector(first, second)
    center = replace(params, x=1.0)
    route = Route(g_series(scenario, center, threads).settings["route"])

    def differentiate(route: Route) -> DerivativeResult:
        fixed = replace(center, route=route)

        def at(x: float) -> complex:
            return g_series(scenario, replace(fixed, x=x), threads).value

        return kth_derivative_at_1(at, params.k, h, tol, near_knot=near_knot)

    # every stencil point must come from the same route
    try:
        return differentiate(route), route.value
    except (TruncationError, PrecisionExhaustedError, PoleError) as e:
        if params.route != Route.AUTO or route != Route.DIRECT:
            raise
        logger.info("G_%s: direct route failed off x = 1 (%s); differentiating Riesz sum minus P_k",
                    params.side.value, e)
        return differentiate(Route.RIESZ), Route.RIESZ.value


@dataclass
class VerificationSettings:
    """Tolerances and truncation settings for verify_identity."""
    tolerances: dict = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))
    sum_tol: float = 1e-12
    quad_tol: Optional[float] = None   # None: budget * identity tolerance
    series_tol: float = 1e-9
    budget: float = 0.1                # share of the identity tolerance per certified part
    n_max: int = MAX_SERIES_TERMS
    perron_T: Optional[float] = None
    perron_nodes: Optional[int] = None
    h: Optional[float] = None
    route: Route = Route.AUTO          # derivative identities only
    threads: Optional[int] = None

    def tolerance(self, which: Identity) -> float:
        return float(self.tolerances.get(which, self.tolerances.get(which.value, DEFAULT_TOLERANCES[which])))

    def part_tolerance(self, which: Identity) -> float:
        """Relative error allowed for each certified part of an identity."""
        return self.budget * self.tolerance(which)

    def quadrature_tolerance(self, which: Identity) -> float:
        return self.quad_tol if self.quad_tol is not None else self.part_tolerance(which)


@dataclass
class IdentityPoint:
    """Parameters of one identity check."""
    u: complex
    v: complex
    k: int
    gamma: float
    x: float = 1.0
    right: Optional[float] = None
    h: Optional[float] = None

    @classmethod
    def default(cls, scenario: Scenario, which: Identity, x: float = 1.0) -> "IdentityPoint":
        base = scenario.derivatives if Identity(which) in DERIVATIVE_IDENTITIES else scenario.sums
        return cls(base.u, base.v, base.k, base.gamma, x, base.right, base.h)

    def riesz(self) -> RieszParams:
        return RieszParams(self.u, self.v, self.k, self.x, self.gamma, self.right)

    def echo(self) -> dict:
        return {"u": complex(self.u), "v": complex(self.v), "k": self.k, "gamma": self.gamma,
                "x": self.x, "right": self.right, "h": self.h}


def check_identity_hypotheses(which: Identity, scenario: Scenario, point: IdentityPoint) -> None:
    """Hypothesis gate run before any computation."""
    rp = point.riesz()
    if which in (Identity.ID2, Identity.EQUALITY1, Identity.S2, Identity.EXPRESION1, Identity.ID1):
        rp.check_hypotheses(scenario.phi, scenario.psi)
    if which in (Identity.ID3, Identity.EXPRESSION2, Identity.ID1):
        rp.swapped().check_hypotheses(scenario.psi, scenario.phi)


def _series(scenario: Scenario, point: IdentityPoint, side: Side, route: Route,
            settings: VerificationSettings, atol: float = 0.0) -> GSeriesParams:
    return GSeriesParams(side, point.u, point.v, point.k, point.x, point.gamma, point.right,
                         n_max=settings.n_max, route=route, tol=settings.series_tol, atol=atol)


def _compute(which: Identity, scenario: Scenario, point: IdentityPoint,
             settings: VerificationSettings, terms: dict, echo: dict) -> tuple[complex, complex]:
    phi, psi = scenario.phi, scenario.psi
    rp = point.riesz()
    threads = settings.threads
    part = settings.part_tolerance(which)
    quad_tol = settings.quadrature_tolerance(which)

    if which == Identity.S2:
        check = s2_check(phi, psi, rp)
        terms.update(contour=check.contour.value, contour_error=check.contour.error, **check.contour.parts)
        echo.update(check.contour.settings)
        return check.contour.value, check.residues

    if which in (Identity.ID2, Identity.ID3, Identity.EQUALITY1):
        swapped = which == Identity.ID3
        first, second = (psi, phi) if swapped else (phi, psi)
        orp = rp.swapped() if swapped else rp
        side = Side.F if swapped else Side.G
        if which == Identity.EQUALITY1:
            quad = None
            if settings.perron_T or settings.perron_nodes:
                quad = ContourSpec.line(orp.resolve_right(first, second),
                                        settings.perron_T or PERRON_HALF_HEIGHT,
                                        settings.perron_nodes or PERRON_NODES)
            lhs_est = perron_line_integral(first, second, orp, quad, quad_tol)
        else:
            lhs_est = riesz_double_sum(first, second, orp, settings.sum_tol, rtol=part)
        contour = p_k_contour(first, second, orp, tol=quad_tol)
        # the series only has to be small against the other side
        floor = part * max(abs(lhs_est.value), abs(contour.value))
        series = g_series_direct(scenario, _series(scenario, point, side, Route.DIRECT, settings, floor),
                                 threads)
        terms.update(lhs=lhs_est.value, lhs_error=lhs_est.error, p_k=contour.value,
                     g_series=series.value, g_series_tail=series.error,
                     **{f"p_k_{k}": v for k, v in contour.parts.items()})
        echo.update(lhs_est.settings)
        echo.update(contour.settings)
        echo["n_max"] = series.settings["n_max"]
        return lhs_est.value, contour.value + series.value

    h = settings.h or point.h or 1e-2
    echo["h"] = h
    point_1 = replace(point, x=1.0)
    residues = residue_correction_terms(phi, psi, point.u, point.v, settings.sum_tol)
    product = evaluate(phi, point.u) * evaluate(psi, point.v)
    terms.update(phi_u_psi_v=product, residue_psi_part=residues.psi_part,
                 residue_phi_part=residues.phi_part)
    # a series error e moves the k-th difference quotient by up to 2^k e / h^k
    floor = part * abs(product) * (h / 2) ** point.k

    def derivative(side: Side) -> complex:
        result, route = g_series_derivative(
            scenario, _series(scenario, point_1, side, settings.route, settings, floor), h, threads=threads
        )
        terms[f"d{point.k}_G_{side.value}"] = result.value
        terms[f"d{point.k}_G_{side.value}_error"] = result.error
        echo[f"route_{side.value}"] = route
        return result.value

    if which == Identity.EXPRESION1:
        lhs = prime_double_sum(phi, psi, point.u, point.v, settings.sum_tol, rtol=part).value
        return lhs, product - residues.phi_part + derivative(Side.G)
    if which == Identity.EXPRESSION2:
        lhs = prime_double_sum(psi, phi, point.v, point.u, settings.sum_tol, rtol=part).value
        return lhs, product - residues.psi_part + derivative(Side.F)
    # ID1: the sum of the two expressions above
    return product, residues.psi_part + residues.phi_part - derivative(Side.F) - derivative(Side.G)


def _error_kind(e: Exception) -> str:
    if isinstance(e, CertificationError):
        return "certification"
    if isinstance(e, PrecisionExhaustedError):
        return "precision"
    if isinstance(e, ConvergenceError):
        return "convergence"
    if not isinstance(e, HeckeError):
        return "numerical"
    return "evaluation"


def verify_identity(which, scenario: Scenario, point: Optional[IdentityPoint] = None,
                    settings: Optional[VerificationSettings] = None) -> VerificationReport:
    """Evaluate both sides of one identity and report the residual.

    Hypothesis violations raise HypothesisError before any computation.
    Failures of sub-evaluations, including floating-point overflow and
    division by zero, are recorded in the report, never turned into a
    numeric residual.
    """
    which = Identity(which)
    settings = settings or VerificationSettings()
    point = point or IdentityPoint.default(scenario, which)
    check_identity_hypotheses(which, scenario, point)
    tolerance = settings.tolerance(which)
    terms: dict = {}
    echo: dict = {"sum_tol": settings.sum_tol, "quad_tol": settings.quadrature_tolerance(which),
                  "series_tol": settings.series_tol, "budget": settings.budget}
    started = time.perf_counter()
    lhs = rhs = None
    error = error_kind = None
    try:
        lhs, rhs = _compute(which, scenario, point, settings, terms, echo)
    except (HeckeError, ArithmeticError) as e:
        logger.warning("%s on %s failed: %s", which.value, scenario.name, e)
        error, error_kind = f"{type(e).__name__}: {e}", _error_kind(e)
    elapsed = time.perf_counter() - started
    if lhs is None:
        return VerificationReport.create(
            identity=which.value, scenario=scenario.name, parameters=point.echo(),
            lhs=None, rhs=None, tolerance=tolerance, terms=terms, settings=echo,
            wall_time=elapsed, error=error, error_kind=error_kind,
        )
    report = VerificationReport.create(
        identity=which.value, scenario=scenario.name, parameters=point.echo(),
        lhs=complex(lhs), rhs=complex(rhs), tolerance=tolerance, terms=terms, settings=echo,
        wall_time=elapsed,
    )
    logger.info("%s on %s: rel residual %.3g (%s)", which.value, scenario.name,
                report.rel_residual, "pass" if report.passed else "FAIL")
    return report


__all__ = [
    "DEFAULT_TOLERANCES",
    "DerivativeResult",
    "GSeriesParams",
    "Identity",
    "IdentityPoint",
    "NORMALIZATION",
    "Route",
    "Side",
    "VerificationSettings",
    "g_series",
    "g_series_derivative",
    "g_series_direct",
    "g_series_via_riesz",
    "kth_derivative_at_1",
    "relative_residual",
    "verify_identity",
]

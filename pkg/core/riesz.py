"""Riesz double sums, Perron line integrals and the closed-contour term P_k(x).

All integrands share the kernel

    R(z) phi(z) psi(v + u - z) x^(z - u + k),   R(z) = Gamma(z - u) / Gamma(z - u + k + 1),

where R is the rational function 1 / prod_{j=0..k} (z - u + j).
"""

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from .errors import (
    HypothesisError,
    PoleError,
    QuadratureError,
    TruncationError,
)
from .lfun import (
    HeckeSeriesSpec,
    abs_majorant,
    evaluate,
    evaluate_abs_array,
    truncation_point,
)
from .special import line_nodes, segment_nodes
from .summation import compensated_dot, compensated_sum


logger = logging.getLogger(__name__)

DEFAULT_SUM_TOL = 1e-12
PERRON_HALF_HEIGHT = 120.0
PERRON_NODES = 16
RECTANGLE_NODES = 80
RECTANGLE_PANEL = 0.25
RECTANGLE_MARGIN = 2.0
POLE_CLEARANCE = 0.05
OUTER_START = 1024
MAX_BLOCK_RATIO = 0.9
PERRON_MAX_HEIGHT = 1000.0


@dataclass(frozen=True)
class ContourSpec:
    """A vertical line Re z = right, |Im z| <= T, or the rectangle [left, right] x [-T, T]."""
    shape: str                     # "line" or "rectangle"
    right: float
    half_height: float
    nodes_per_unit: int
    left: Optional[float] = None
    panel_width: float = 1.0

    def __post_init__(self):
        if self.shape not in ("line", "rectangle"):
            raise ValueError(f"unknown contour shape {self.shape!r}")
        if self.half_height <= 0:
            raise ValueError(f"contour half-height must be positive, got {self.half_height}")
        if self.nodes_per_unit < 2:
            raise ValueError(f"nodes_per_unit must be >= 2, got {self.nodes_per_unit}")
        if self.shape == "rectangle" and not (self.left is not None and self.left < self.right):
            raise ValueError(f"rectangle needs left < right, got {self.left}, {self.right}")

    @classmethod
    def line(cls, abscissa: float, half_height: float = PERRON_HALF_HEIGHT,
             nodes_per_unit: int = PERRON_NODES) -> "ContourSpec":
        return cls("line", abscissa, half_height, nodes_per_unit)

    @classmethod
    def rectangle(cls, left: float, right: float, half_height: float,
                  nodes_per_unit: int = RECTANGLE_NODES) -> "ContourSpec":
        return cls("rectangle", right, half_height, nodes_per_unit, left=left,
                   panel_width=RECTANGLE_PANEL)

    def contains(self, z: complex) -> bool:
        return self.left < z.real < self.right and abs(z.imag) < self.half_height

    def boundary_distance(self, z: complex) -> float:
        """Distance from z to the rectangle's boundary."""
        x, y, t = z.real, z.imag, self.half_height
        cx = min(max(x, self.left), self.right)
        cy = min(max(y, -t), t)
        if self.contains(z):
            return min(x - self.left, self.right - x, t - y, y + t)
        return math.hypot(x - cx, y - cy)

    def sides(self, nodes_per_unit: Optional[int] = None) -> dict:
        """Counterclockwise sides as {name: (z, dz)} with dz the weights times z'(t)."""
        npu = nodes_per_unit or self.nodes_per_unit
        per_panel = max(4, math.ceil(npu * self.panel_width))
        t = self.half_height
        out = {}
        h, w = segment_nodes(-t, t, per_panel, self.panel_width)
        out["right"] = (self.right + 1j * h, 1j * w)
        g, w = segment_nodes(self.right, self.left, per_panel, self.panel_width)
        out["top"] = (g + 1j * t, w.astype(complex))
        h, w = segment_nodes(t, -t, per_panel, self.panel_width)
        out["left"] = (self.left + 1j * h, 1j * w)
        g, w = segment_nodes(self.left, self.right, per_panel, self.panel_width)
        out["bottom"] = (g - 1j * t, w.astype(complex))
        return out


@dataclass
class RieszParams:
    """(u, v, k, x) with the contour data gamma and right."""
    u: complex
    v: complex
    k: int
    x: float = 1.0
    gamma: Optional[float] = None
    right: Optional[float] = None

    def __post_init__(self):
        self.u = complex(self.u)
        self.v = complex(self.v)

    def swapped(self) -> "RieszParams":
        return RieszParams(self.v, self.u, self.k, self.x, self.gamma, self.right)

    def at(self, x: float) -> "RieszParams":
        return RieszParams(self.u, self.v, self.k, x, self.gamma, self.right)

    def right_range(self, phi: HeckeSeriesSpec, psi: HeckeSeriesSpec) -> tuple[float, float]:
        sigma_a = max(phi.sigma_a, psi.sigma_a)
        return max(self.u.real, self.v.real), self.u.real + self.v.real - sigma_a

    def resolve_right(self, phi: HeckeSeriesSpec, psi: HeckeSeriesSpec) -> float:
        if self.right is not None:
            return float(self.right)
        lo, hi = self.right_range(phi, psi)
        return 0.5 * (lo + hi)

    def check_convergence(self, phi: HeckeSeriesSpec, psi: HeckeSeriesSpec) -> None:
        """Conditions under which the Riesz sum and its Perron integral exist."""
        if self.k < 0 or int(self.k) != self.k:
            raise HypothesisError("k is a nonnegative integer", f"k = {self.k}")
        if not self.x > 0:
            raise HypothesisError("x > 0", f"x = {self.x}")
        if not self.u.real > phi.sigma_a:
            raise HypothesisError("Re u > σ_a", f"Re u = {self.u.real:g}, σ_a = {phi.sigma_a:g}")
        if not self.v.real > psi.sigma_a:
            raise HypothesisError("Re v > σ_a", f"Re v = {self.v.real:g}, σ_a = {psi.sigma_a:g}")

    def check_hypotheses(self, phi: HeckeSeriesSpec, psi: HeckeSeriesSpec) -> None:
        """Full hypothesis gate of the product formula.

        Raises:
            HypothesisError: naming the first violated inequality.
        """
        self.check_convergence(phi, psi)
        delta = phi.delta
        sigma_a = max(phi.sigma_a, psi.sigma_a)
        gamma = self.gamma
        if gamma is None:
            raise HypothesisError("gamma is set", "the contour abscissa gamma is required")
        if not gamma > sigma_a:
            raise HypothesisError("γ > σ_a", f"γ = {gamma:g}, σ_a = {sigma_a:g}")
        if not gamma > delta / 2:
            raise HypothesisError("γ > δ/2", f"γ = {gamma:g}, δ = {delta:g}")
        if not self.k > 2 * gamma - delta:
            raise HypothesisError("k > 2γ − δ", f"k = {self.k}, 2γ − δ = {2 * gamma - delta:g}")
        if not self.u.real + self.v.real - gamma > sigma_a:
            raise HypothesisError(
                "Re u + Re v − γ > σ_a",
                f"Re u + Re v − γ = {self.u.real + self.v.real - gamma:g}, σ_a = {sigma_a:g}",
            )
        lo, hi = self.right_range(phi, psi)
        right = self.resolve_right(phi, psi)
        if not lo < right < hi:
            raise HypothesisError(
                "max(Re u, Re v) < right < Re u + Re v − σ_a",
                f"right = {right:g}, admissible ({lo:g}, {hi:g})",
            )
        if not delta - gamma < self.u.real < right:
            raise HypothesisError("u inside C", f"Re u = {self.u.real:g}, C = [{delta - gamma:g}, {right:g}]")


def admissible_gamma(phi: HeckeSeriesSpec, psi: HeckeSeriesSpec, u: complex, v: complex, k: int) -> float:
    """A gamma satisfying every hypothesis for (u, v, k) in both orientations.

    The admissible interval is
    max(sigma_a, delta/2, delta - min(Re u, Re v)) < gamma < min((k + delta)/2, Re u + Re v - sigma_a).
    The Meijer chain poles delta - u + j and delta - v + j (j = 0..k) cut it into
    gaps; the midpoint of the widest gap is returned.

    Raises:
        HypothesisError: the interval is empty.
    """
    u, v = complex(u), complex(v)
    delta = phi.delta
    sigma_a = max(phi.sigma_a, psi.sigma_a)
    lo = max(sigma_a, delta / 2, delta - min(u.real, v.real))
    hi = min((k + delta) / 2, u.real + v.real - sigma_a)
    if not lo < hi:
        raise HypothesisError("an admissible γ exists", f"need {lo:g} < γ < {hi:g} for k = {k}")
    cuts = {lo, hi}
    for s in (u, v):
        for j in range(k + 1):
            pole = delta - s.real + j
            if lo < pole < hi:
                cuts.add(pole)
    edges = sorted(cuts)
    a, b = max(zip(edges, edges[1:]), key=lambda gap: gap[1] - gap[0])
    return 0.5 * (a + b)


@dataclass
class Estimate:
    """A computed value with its error bound and the settings that produced it."""
    value: complex
    error: float = 0.0
    settings: dict = field(default_factory=dict)
    parts: dict = field(default_factory=dict)


def _exact_x(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    return Fraction(str(x))


def _dyadic_tail(terms: np.ndarray) -> float:
    """Tail of sum |t_n| past len(terms), from geometric decay of dyadic block sums.

    With block sums A_j over (N/8, N/4], (N/4, N/2], (N/2, N] and the larger
    ratio rho of consecutive blocks, the tail is A_3 rho / (1 - rho).
    """
    n = terms.size
    if n < 8:
        return math.inf
    mags = np.abs(terms)
    a1, a2, a3 = (math.fsum(mags[lo:hi]) for lo, hi in ((n // 8, n // 4), (n // 4, n // 2), (n // 2, n)))
    if a3 == 0.0:
        return 0.0
    if a1 == 0.0 or a2 == 0.0:
        return math.inf
    rho = max(a2 / a1, a3 / a2)
    if rho >= MAX_BLOCK_RATIO:
        return math.inf
    return a3 * rho / (1.0 - rho)


def _outer_terms(phi: HeckeSeriesSpec, psi: HeckeSeriesSpec, u: complex, v: complex,
                 k: int, xq: Fraction, outer: int) -> tuple[np.ndarray, dict]:
    counts = [phi.freq.count_le(psi.freq.exact(n) * xq) for n in range(1, outer + 1)]
    inner = max(m for m, _ in counts)
    if inner > phi.max_terms:
        raise TruncationError(
            f"{phi.name}: inner sums need {inner} coefficients, cap is {phi.max_terms}",
        )
    logger.debug("double sum %s x %s: outer N=%d, inner M=%d, k=%d", phi.name, psi.name, outer, inner, k)
    xf = float(xq)
    m_idx = np.array([m for m, _ in counts])
    ties = np.array([t for _, t in counts])
    g = psi.coefficient_array(outer)
    log_mu = psi.freq.log_values(outer)
    mu_x = np.exp(log_mu) * xf

    inner_sums = np.zeros(outer, dtype=complex)
    if inner > 0:
        f = phi.coefficient_array(inner)
        log_lam = phi.freq.log_values(inner)
        for j in range(k + 1):
            weights = f * np.exp((j - u) * log_lam)
            prefix = np.concatenate(([0j], np.cumsum(weights)))
            inner_sums += math.comb(k, j) * (-1) ** j * mu_x ** (k - j) * prefix[m_idx]
        if k == 0 and ties.any():
            tied = m_idx[ties]
            inner_sums[ties] -= 0.5 * f[tied - 1] * np.exp(-u * log_lam[tied - 1])
    terms = g * np.exp(-(v + k) * log_mu) * inner_sums / math.factorial(k)
    return terms, {"n_outer": outer, "m_inner": inner, "ties": int(ties.sum())}


def _double_sum(phi: HeckeSeriesSpec, psi: HeckeSeriesSpec, u: complex, v: complex,
                k: int, x, tol: float, rtol: float = 0.0) -> Estimate:
    """(1/k!) sum_n g(n) mu_n^-(v+k) sum'_{lambda_m <= mu_n x} f(m) lambda_m^-u (mu_n x - lambda_m)^k.

    The outer sum is cut where the coefficient-growth comparison bound drops
    below tol. When that needs more terms than the table holds, the number of
    terms is doubled until the dyadic tail estimate drops below
    max(tol, rtol * |value|).
    """
    xq = _exact_x(x)
    try:
        scale = abs_majorant(phi, u.real) * float(xq)**k / math.factorial(k)
        outer = truncation_point(psi, v.real, tol / scale)
    except TruncationError as e:
        logger.info("double sum %s x %s: comparison bound fails (%s); using the dyadic tail estimate",
                    phi.name, psi.name, e)
    else:
        terms, settings = _outer_terms(phi, psi, u, v, k, xq, outer)
        logger.info("double sum %s x %s: N=%d by comparison bound", phi.name, psi.name, outer)
        return Estimate(compensated_sum(terms), tol, {**settings, "tail": "comparison"})

    count = min(OUTER_START, psi.max_terms)
    while True:
        terms, settings = _outer_terms(phi, psi, u, v, k, xq, count)
        value = compensated_sum(terms)
        tail = _dyadic_tail(terms)
        target = max(tol, rtol * abs(value))
        logger.debug("double sum %s x %s: N=%d, dyadic tail %.3g", phi.name, psi.name, count, tail)
        if tail <= target:
            logger.info("double sum %s x %s: N=%d, dyadic tail %.3g", phi.name, psi.name, count, tail)
            return Estimate(value, tail, {**settings, "tail": "dyadic"})
        grown = min(2 * count, psi.max_terms)
        if grown == count or phi.freq.count_le(psi.freq.exact(grown) * xq)[0] > phi.max_terms:
            raise TruncationError(
                f"{psi.name}: outer tail estimate {tail:.3g} exceeds {target:.3g} with {count} terms",
                estimate=tail, tol=target,
            )
        count = grown


def riesz_double_sum(phi: HeckeSeriesSpec, psi: HeckeSeriesSpec, p: RieszParams,
                     tol: float = DEFAULT_SUM_TOL, rtol: float = 0.0) -> Estimate:
    """Riesz double sum S(k, x) with a certified outer-tail bound.

    The half weight on exact ties lambda_m = mu_n x applies only when k = 0.

    Args:
        tol: absolute tail tolerance.
        rtol: relative tail tolerance, used only by the dyadic estimate.
    """
    p.check_convergence(phi, psi)
    return _double_sum(phi, psi, p.u, p.v, p.k, p.x, tol, rtol)


def prime_double_sum(phi: HeckeSeriesSpec, psi: HeckeSeriesSpec, u: complex, v: complex,
                     tol: float = DEFAULT_SUM_TOL, rtol: float = 0.0) -> Estimate:
    """sum_n g(n) mu_n^-v sum'_{lambda_m <= mu_n} f(m) lambda_m^-u, ties weighted 1/2."""
    RieszParams(u, v, 0).check_convergence(phi, psi)
    return _double_sum(phi, psi, complex(u), complex(v), 0, 1, tol, rtol)


def gamma_ratio(z: np.ndarray, u: complex, k: int) -> np.ndarray:
    """Gamma(z - u) / Gamma(z - u + k + 1) = 1 / prod_{j=0..k} (z - u + j)."""
    denom = np.ones_like(z)
    for j in range(k + 1):
        denom = denom * (z - u + j)
    return 1.0 / denom


def _tie_constant(phi: HeckeSeriesSpec, psi: HeckeSeriesSpec, u: complex, v: complex,
                  k: int, x, tol: float) -> complex:
    """x^(k-u) sum over lambda_m = mu_n x of f(m) g(n) mu_n^-(u+v)."""
    xq = _exact_x(x)
    _, g_phi = phi.growth()
    # |f(m)| <= C m^g with lambda_m ~ mu_n x transfers the growth onto n
    sigma = (u + v).real - g_phi / phi.freq.exponent
    try:
        count = truncation_point(psi, sigma, tol)
    except TruncationError:
        count = psi.max_terms
        logger.warning("tie sum for %s x %s capped at %d terms", phi.name, psi.name, count)
    pairs = []
    for n in range(1, count + 1):
        m, tie = phi.freq.count_le(psi.freq.exact(n) * xq)
        if m > phi.max_terms:
            break
        if tie:
            pairs.append((m, n))
    if not pairs:
        return 0j
    m_idx = np.array([m for m, _ in pairs])
    n_idx = np.array([n for _, n in pairs])
    f = phi.coefficient_array(int(m_idx.max()))[m_idx - 1]
    g = psi.coefficient_array(int(n_idx.max()))[n_idx - 1]
    log_mu = psi.freq.log_values(int(n_idx.max()))[n_idx - 1]
    total = compensated_sum(f * g * np.exp(-(u + v) * log_mu))
    return complex(total * np.exp((k - u) * math.log(float(xq))))


def _tie_tail(u: complex, k: int, c: float, half_height: float) -> complex:
    """(1/2 pi i) * integral of R(z) over Re z = c, |Im z| > T, in closed form."""
    total = 0j
    for j in range(k + 1):
        a_j = 1.0 / math.prod(i - j for i in range(k + 1) if i != j)
        p_j = u - j
        total += a_j * (np.log(c - p_j - 1j * half_height) - np.log(c - p_j + 1j * half_height))
    return complex(total / (2j * math.pi))


def _oscillation_majorant(phi: HeckeSeriesSpec, psi: HeckeSeriesSpec, p: RieszParams,
                          c: float, tie: complex) -> float:
    """M with |phi(z) psi(v + u - z) x^(z - u + k) - tie| <= M on Re z = c."""
    try:
        growth = abs_majorant(phi, c) * abs_majorant(psi, (p.u + p.v).real - c)
    except TruncationError:
        return math.inf
    return growth * math.exp((c - p.u.real + p.k) * math.log(float(p.x))) + abs(tie)


def perron_tail_bound(majorant: float, k: int, shift: float, half_height: float) -> float:
    """Both tails of the oscillating Perron integrand beyond |Im z| = T.

    |R(z)| <= (|t| - shift)^-(k+1) with shift = |Im u|, so the tails are at
    most 2 * integral_T^inf M (t - shift)^-(k+1) dt / (2 pi) = M (T - shift)^-k / (pi k).
    """
    if half_height <= shift:
        return math.inf
    return majorant * (half_height - shift) ** (-k) / (math.pi * k)


def perron_line_integral(phi: HeckeSeriesSpec, psi: HeckeSeriesSpec, p: RieszParams,
                         quad: Optional[ContourSpec] = None, tol: float = 1e-9) -> Estimate:
    """(1/2 pi i) * integral of the Riesz kernel along Re z = right.

    phi(z) and psi(v + u - z) are taken from their absolutely convergent
    series. The non-oscillating contribution of exact ties is split off and
    its tail is integrated in closed form. The oscillating remainder is cut
    at |Im z| = T with the analytic bound of perron_tail_bound; T is raised
    up to PERRON_MAX_HEIGHT when the bound misses tol * max(1, |value|).
    """
    p.check_convergence(phi, psi)
    if p.k < 1:
        raise HypothesisError("k >= 1", "the Perron integral needs k >= 1 to converge absolutely")
    c = quad.right if quad is not None else p.resolve_right(phi, psi)
    lo, hi = p.right_range(phi, psi)
    if not lo < c < hi:
        raise HypothesisError("max(Re u, Re v) < right < Re u + Re v − σ_a",
                              f"right = {c:g}, admissible ({lo:g}, {hi:g})")
    quad = quad or ContourSpec.line(c)
    u, v, k, x = p.u, p.v, p.k, float(p.x)
    tie = _tie_constant(phi, psi, u, v, k, p.x, tol * 1e-3)
    majorant = _oscillation_majorant(phi, psi, p, c, tie)
    shift = abs(u.imag)

    def integrate(height: float) -> tuple[complex, int]:
        t, w = line_nodes(height, quad.nodes_per_unit)
        z = c + 1j * t
        ratio = gamma_ratio(z, u, k)
        integrand = (ratio * evaluate_abs_array(phi, z) * evaluate_abs_array(psi, v + u - z)
                     * np.exp((z - u + k) * math.log(x)))
        oscillating = compensated_dot(w, integrand - tie * ratio) / (2 * math.pi)
        tie_part = compensated_dot(w, ratio) / (2 * math.pi) + _tie_tail(u, k, c, height)
        return complex(oscillating + tie * tie_part), int(t.size)

    height = quad.half_height
    value, nodes = integrate(height)
    estimate = perron_tail_bound(majorant, k, shift, height)
    if estimate > tol * max(1.0, abs(value)):
        needed = shift + (majorant / (math.pi * k * tol * max(1.0, abs(value)))) ** (1.0 / k)
        if needed > PERRON_MAX_HEIGHT:
            raise QuadratureError(
                f"Perron tail bound {estimate:.3g} exceeds tolerance at T = {height:g}; "
                f"T = {needed:.3g} needed, cap is {PERRON_MAX_HEIGHT:g}",
                estimate=estimate, tol=tol,
            )
        height = float(math.ceil(1.1 * needed))
        value, nodes = integrate(height)
        estimate = perron_tail_bound(majorant, k, shift, height)
        if estimate > tol * max(1.0, abs(value)):
            raise QuadratureError(
                f"Perron tail bound {estimate:.3g} exceeds tolerance at T = {height:g}",
                estimate=estimate, tol=tol,
            )
    settings = {"abscissa": c, "T": height, "nodes": nodes}
    logger.info("Perron line Re z = %g: T=%g, %d nodes, tail bound %.3g", c, height, nodes, estimate)
    return Estimate(value, estimate, settings, parts={"tie_constant": tie})


def riesz_kernel(phi: HeckeSeriesSpec, psi: HeckeSeriesSpec, p: RieszParams):
    """z -> R(z) phi(z) psi(v + u - z) x^(z - u + k), vectorised over z."""
    u, v, k, log_x = p.u, p.v, p.k, math.log(float(p.x))

    def kernel(z):
        return gamma_ratio(z, u, k) * evaluate(phi, z) * evaluate(psi, v + u - z) * np.exp((z - u + k) * log_x)

    return kernel


def _rectangle_for(phi: HeckeSeriesSpec, psi: HeckeSeriesSpec, p: RieszParams,
                   nodes_per_unit: int) -> ContourSpec:
    if p.gamma is None:
        raise HypothesisError("gamma is set", "the contour needs gamma for its left side")
    left = phi.delta - p.gamma
    right = p.resolve_right(phi, psi)
    return ContourSpec.rectangle(left, right, abs(p.u.imag) + RECTANGLE_MARGIN, nodes_per_unit)


def _check_clearance(contour: ContourSpec, points: list, label: str) -> None:
    for z in points:
        if contour.boundary_distance(complex(z)) < POLE_CLEARANCE:
            raise PoleError(f"{label} at {complex(z):.6g} lies within {POLE_CLEARANCE} of the contour")


def _rectangle_integral(fn, contour: ContourSpec, estimate: bool = True) -> Estimate:
    """(1/2 pi i) * closed counterclockwise integral of fn over the rectangle, per side."""
    def integrate(npu):
        parts = {}
        for name, (z, dz) in contour.sides(npu).items():
            parts[name] = compensated_sum(dz * fn(z)) / (2j * math.pi)
        return parts

    parts = integrate(contour.nodes_per_unit)
    value = sum(parts.values())
    error = 0.0
    if estimate:
        coarse = integrate(max(2, contour.nodes_per_unit // 2))
        error = abs(sum(coarse.values()) - value)
    settings = {"left": contour.left, "right": contour.right, "T": contour.half_height,
                "nodes_per_unit": contour.nodes_per_unit}
    return Estimate(complex(value), error, settings, parts=parts)


def p_k_contour(phi: HeckeSeriesSpec, psi: HeckeSeriesSpec, p: RieszParams,
                contour: Optional[ContourSpec] = None, tol: float = 1e-9) -> Estimate:
    """P_k(x): the Riesz kernel integrated counterclockwise around C.

    C is the rectangle with sides Re z = delta - gamma and Re z = right; it
    encloses z = u, the chain u - j inside the strip and the poles of phi.
    Side contributions are returned in `parts`.
    """
    contour = contour or _rectangle_for(phi, psi, p, RECTANGLE_NODES)
    u, v, k = p.u, p.v, p.k
    if not contour.contains(u):
        raise HypothesisError("u inside C", f"u = {u}, C = [{contour.left:g}, {contour.right:g}]")
    _check_clearance(contour, [q.location for q in phi.active_poles()], f"pole of {phi.name}")
    _check_clearance(contour, [u - j for j in range(k + 1)], "pole of Gamma(z - u)")
    _check_clearance(contour, [v + u - q.location for q in psi.active_poles()], f"pole of {psi.name}")

    result = _rectangle_integral(riesz_kernel(phi, psi, p), contour)
    if result.error > tol * max(1.0, abs(result.value)):
        raise QuadratureError(
            f"contour discretisation estimate {result.error:.3g} exceeds tolerance",
            estimate=result.error, tol=tol,
        )
    logger.info("P_k on [%g, %g] x [-%g, %g]: %s", contour.left, contour.right,
                contour.half_height, contour.half_height, result.value)
    return result


@dataclass
class ResidueCheck:
    """Both sides of the residue identity for phi(z) psi(v + u - z) / (z - u)."""
    contour: Estimate
    residues: complex


def s2_check(phi: HeckeSeriesSpec, psi: HeckeSeriesSpec, p: RieszParams,
             contour: Optional[ContourSpec] = None) -> ResidueCheck:
    """Contour integral of phi(z) psi(v+u-z)/(z-u) against phi(u) psi(v) plus pole terms.

    Refuses to run unless u lies inside the contour.
    """
    contour = contour or _rectangle_for(phi, psi, p, RECTANGLE_NODES)
    u, v = p.u, p.v
    if not contour.contains(u):
        raise HypothesisError("u inside C", f"u = {u}, C = [{contour.left:g}, {contour.right:g}]")
    _check_clearance(contour, [u] + [q.location for q in phi.active_poles()], "pole")

    def kernel(z):
        return evaluate(phi, z) * evaluate(psi, v + u - z) / (z - u)

    integral = _rectangle_integral(kernel, contour)
    residues = evaluate(phi, u) * evaluate(psi, v)
    for q in phi.active_poles():
        if contour.contains(complex(q.location)):
            residues += q.residue / (q.location - u) * evaluate(psi, v + u - q.location)
    return ResidueCheck(integral, complex(residues))

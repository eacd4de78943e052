"""The maximum-information-ratio strategy.

zeta = E(g1^2 / g2) fixes the best attainable IR, sqrt(zeta / (1 - zeta)).
For the zero-drift normal model zeta has a closed form in
b = sqrt(1 - rho^2) / rho; otherwise it is integrated numerically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy import optimize

from optstrat.errors import DegenerateCorrelation, NonUnimodalError
from optstrat.max_er import information_ratio_er, ir_zero_drift
from optstrat.model import ConditionalMoments, SecurityModel, standardize
from optstrat.normal_math import (
    SQRT_2_OVER_PI,
    QuadratureSpec,
    erfcx_scaled,
    integrate_gaussian_weighted,
)
from optstrat.notional import (
    BuyHold,
    ClippedRatio,
    LambdaClipped,
    NotionalFunction,
    on_raw_indicator,
)

# Beyond this b the asymptotic series for zeta is used; 1 - b*Mills(b) cancels badly.
_SERIES_B = 30.0
_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def b_of_rho(rho: float) -> float:
    """b = sqrt(1 - rho^2) / rho."""
    if not 0.0 < rho <= 1.0:
        raise ValueError("rho must lie in (0, 1]")
    return math.sqrt(1.0 - rho * rho) / rho


def _zeta_series(b: float) -> float:
    # zeta = sum_k (-1)^(k+1) (2k-1)!! / b^(2k); asymptotic, valid for large b
    inv_b2 = 1.0 / (b * b)
    term = inv_b2
    total = 0.0
    k = 1
    while abs(term) > 1e-18 * abs(total) or k == 1:
        total += term
        term *= -(2 * k + 1) * inv_b2
        k += 1
    return total


def _one_minus_zeta(rho: float) -> float:
    b = b_of_rho(rho)
    if b >= _SERIES_B:
        return 1.0 - _zeta_series(b)
    return math.sqrt(math.pi / 2.0) * b * erfcx_scaled(b / math.sqrt(2.0))


def zeta_closed_form(rho: float) -> float:
    """zeta(rho) for mu = 0: 1 - sqrt(2 pi) exp(b^2/2) b (1 - N(b)).

    The tail product is evaluated through erfcx, so it stays finite as rho -> 0.
    """
    if not 0.0 < rho <= 1.0:
        raise ValueError("zeta_closed_form needs 0 < rho <= 1")
    b = b_of_rho(rho)
    if b >= _SERIES_B:
        return _zeta_series(b)
    return 1.0 - _one_minus_zeta(rho)


def max_ir_from_zeta(zeta: float) -> float:
    """sqrt(zeta) / sqrt(1 - zeta); infinite at zeta == 1."""
    if not 0.0 <= zeta <= 1.0:
        raise ValueError("zeta must lie in [0, 1]")
    if zeta == 1.0:
        return math.inf
    return math.sqrt(zeta) / math.sqrt(1.0 - zeta)


def max_ir_zero_drift(rho: float) -> float:
    """Best attainable IR for mu = 0, computed from 1 - zeta directly to keep precision near rho = 1."""
    if rho == 1.0:
        return math.inf
    q = _one_minus_zeta(rho)
    zeta = zeta_closed_form(rho)
    return math.sqrt(zeta) / math.sqrt(q)


def ir_asymptotic_approx(rho: float) -> float:
    """(pi (1 - rho))^(-1/4), the growth of the max IR as rho -> 1."""
    if not 0.0 < rho < 1.0:
        raise ValueError("rho must lie in (0, 1)")
    return (math.pi * (1.0 - rho)) ** -0.25


def optimal_ir_notional(model: SecurityModel) -> NotionalFunction:
    """g(H) / g(H+), i.e. 2 s x / (x^2 + s^2) with x = mu + rho sigma H.

    rho == 0 makes g constant, so the notional is buy-and-hold on sign(mu)
    (flat when mu == 0).

    Raises:
        DegenerateCorrelation: |rho| == 1.
    """
    std, _ = standardize(model)
    if std.rho == 0.0:
        return BuyHold(int(np.sign(std.mu)))
    if std.rho == 1.0:
        raise DegenerateCorrelation("rho == 1: the max-IR notional collapses to a point mass")
    return on_raw_indicator(model, ClippedRatio(std))


def zeta_quadrature(model: SecurityModel, spec: QuadratureSpec | None = None) -> float:
    """Integrate (mu + rho sigma H)^2 / g2(H) against the standard normal density."""
    std, _ = standardize(model)
    if std.rho == 1.0:
        raise DegenerateCorrelation("rho == 1: zeta is 1 in the perfect-knowledge limit")
    # sigma cancels: only omega and rho matter
    omega, rho = std.omega, std.rho
    s2 = 1.0 - rho * rho

    def integrand(h):
        x = omega + rho * h
        x2 = x * x
        return x2 / (x2 + s2)

    points = None
    if rho > 0.0:
        centre = -omega / rho
        b = math.sqrt(s2) / rho
        points = [centre + k * b for k in (-10, -3, -1, 0, 1, 3, 10)]
    return integrate_gaussian_weighted(integrand, spec, points=points)


@dataclass(frozen=True)
class IrSolution:
    """Closed-form summary of the max-IR strategy for one standardized model.

    ``regime`` is "normal" for 0 < rho < 1, "no_knowledge" for rho == 0
    (buy-and-hold) and "perfect_knowledge" for rho == 1 (limit values).
    """

    model: SecurityModel
    flipped: bool
    zeta: float
    b: float
    max_ir: float
    expected_return: float
    h_plus: float | None
    h_minus: float | None
    notional: NotionalFunction
    regime: str = "normal"

    @property
    def std_dev(self) -> float:
        """2 b rho sigma sqrt(zeta (1 - zeta)) in the normal regime."""
        m = self.model
        if self.regime == "no_knowledge":
            return m.sigma if m.mu != 0.0 else 0.0
        if self.regime == "perfect_knowledge":
            return 0.0
        return 2.0 * math.sqrt(1.0 - m.rho ** 2) * m.sigma * math.sqrt(self.zeta * (1.0 - self.zeta))


def ir_solution(model: SecurityModel, spec: QuadratureSpec | None = None) -> IrSolution:
    """zeta (closed form when mu == 0, quadrature otherwise), max IR, E(f* R) = 2 sqrt(1-rho^2) sigma zeta, H+-."""
    std, flip = standardize(model)
    rho, sigma, mu = std.rho, std.sigma, std.mu
    if rho == 0.0:
        zeta = mu * mu / (mu * mu + sigma * sigma)
        return IrSolution(std, flip, zeta, math.inf, abs(std.omega), abs(mu), None, None,
                          BuyHold(int(np.sign(mu))), regime="no_knowledge")
    m = mu / (rho * sigma)
    if rho == 1.0:
        return IrSolution(std, flip, 1.0, 0.0, math.inf, 0.0, -m, -m, BuyHold(0),
                          regime="perfect_knowledge")
    if mu == 0.0:
        zeta = zeta_closed_form(rho)
        max_ir = max_ir_zero_drift(rho)
    else:
        zeta = zeta_quadrature(std, spec)
        max_ir = max_ir_from_zeta(zeta)
    notional = ClippedRatio(std)
    return IrSolution(
        model=std,
        flipped=flip,
        zeta=zeta,
        b=b_of_rho(rho),
        max_ir=max_ir,
        expected_return=2.0 * math.sqrt(1.0 - rho * rho) * sigma * zeta,
        h_plus=notional.h_plus,
        h_minus=notional.h_minus,
        notional=notional,
    )


def lambda_clipped_notional(moments: ConditionalMoments, lam: float) -> LambdaClipped:
    """clip(lam * g1 / g2)."""
    return LambdaClipped(moments, lam)


def _clip_kinks(moments: ConditionalMoments, lam: float, halfwidth: float, n_grid: int = 4001) -> tuple[float, ...]:
    """Indicator values where |lam g| crosses 1, i.e. where clipping starts."""
    grid = np.linspace(-halfwidth, halfwidth, n_grid)

    def excess(h):
        return abs(lam * float(moments.g(h))) - 1.0

    vals = np.abs(lam * moments.g(grid)) - 1.0
    kinks = []
    for i in np.flatnonzero(np.sign(vals[:-1]) != np.sign(vals[1:])):
        if vals[i] == 0.0:
            kinks.append(float(grid[i]))
        else:
            kinks.append(optimize.brentq(excess, grid[i], grid[i + 1], xtol=1e-14))
    return tuple(kinks)


def clipped_information_ratio(
    moments: ConditionalMoments, lam: float, spec: QuadratureSpec | None = None
) -> float:
    """E(f g1) / sqrt(E(f^2 g2) - E(f g1)^2) for f = clip(lam g), under H ~ N(0, 1)."""
    # IR is scale free; dividing by lam below 1 keeps the integrals O(g) for tiny lam
    scale = lam if lam < 1.0 else 1.0
    hw = (spec or QuadratureSpec()).integration_halfwidth
    points = tuple(moments.points) + _clip_kinks(moments, lam, hw)

    def f(h):
        return min(1.0, max(-1.0, lam * moments.g1(h) / moments.g2(h))) / scale

    mean = integrate_gaussian_weighted(lambda h: f(h) * moments.g1(h), spec, points)
    second = integrate_gaussian_weighted(lambda h: f(h) ** 2 * moments.g2(h), spec, points)
    var = second - mean * mean
    if var <= 0.0:
        return math.inf if mean > 0 else 0.0
    return mean / math.sqrt(var)


def golden_section_max(
    fn: Callable[[float], float], lo: float, hi: float, tol: float = 1e-8, max_iter: int = 200
) -> tuple[float, float]:
    """Maximize a unimodal ``fn`` on [lo, hi]; returns (argmax, max)."""
    x1 = hi - _INV_PHI * (hi - lo)
    x2 = lo + _INV_PHI * (hi - lo)
    f1, f2 = fn(x1), fn(x2)
    for _ in range(max_iter):
        if hi - lo <= tol:
            break
        if f1 >= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - _INV_PHI * (hi - lo)
            f1 = fn(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + _INV_PHI * (hi - lo)
            f2 = fn(x2)
    return (x1, f1) if f1 >= f2 else (x2, f2)


@dataclass(frozen=True)
class LambdaOptimum:
    lam: float
    ir: float

    @property
    def log_lam(self) -> float:
        return math.log(self.lam)


def optimize_lambda(
    moments: ConditionalMoments,
    spec: QuadratureSpec | None = None,
    log_bounds: tuple[float, float] = (-12.0, 12.0),
    tol: float = 1e-8,
    scan_points: int = 49,
) -> LambdaOptimum:
    """Best clipping level lam for the notional clip(lam g1/g2).

    A coarse scan over log lam brackets the maximum, which golden-section
    search then refines to ``tol`` in log lam. A dip in the scan between two
    higher values means the curve is not unimodal. When the largest lam that
    never clips (1 / sup|g|, read off a dense grid) is as good as the search
    result, that lam is returned.

    Raises:
        NonUnimodalError: the scan shows more than one local maximum.
        QuadratureError: an inner integral did not converge.
    """
    lo, hi = log_bounds

    def objective(log_lam: float) -> float:
        return clipped_information_ratio(moments, math.exp(log_lam), spec)

    xs = np.linspace(lo, hi, scan_points)
    vals = np.array([objective(x) for x in xs])
    noise = 1e-7 * max(1.0, float(np.max(np.abs(vals))))
    running_left = np.maximum.accumulate(vals)
    running_right = np.maximum.accumulate(vals[::-1])[::-1]
    for i in range(1, scan_points - 1):
        if vals[i] < running_left[i - 1] - noise and vals[i] < running_right[i + 1] - noise:
            raise NonUnimodalError(
                f"IR(lambda) dips at log lambda = {xs[i]:.3g} between two higher values"
            )
    k = int(np.argmax(vals))
    a, c = xs[max(k - 1, 0)], xs[min(k + 1, scan_points - 1)]
    x_best, f_best = golden_section_max(objective, a, c, tol=tol)
    if vals[k] > f_best:
        x_best, f_best = xs[k], vals[k]
    # Below 1/sup|g| nothing clips and the IR is flat in lambda, so the
    # maximizer is not unique. Prefer the largest unclipped lambda: same IR,
    # full use of the notional bound.
    hw = (spec or QuadratureSpec()).integration_halfwidth
    grid = np.concatenate([np.linspace(-hw, hw, 4001), np.asarray(moments.points, dtype=float)])
    g_sup = float(np.max(np.abs(moments.g(grid))))
    if g_sup > 0.0 and lo <= -math.log(g_sup) <= hi:
        ir_cap = objective(-math.log(g_sup))
        if ir_cap >= f_best - 1e-9 * max(1.0, abs(f_best)):
            x_best, f_best = -math.log(g_sup), ir_cap
    return LambdaOptimum(lam=math.exp(x_best), ir=float(f_best))


@dataclass(frozen=True)
class ComparisonRow:
    rho: float
    er_ratio: float
    ir_diff: float


def comparison_curves(rho_grid: Sequence[float]) -> list[ComparisonRow]:
    """Zero-drift comparison of the two optimal strategies at each rho in (0, 1).

    er_ratio = rho sqrt(2/pi) / (2 sqrt(1 - rho^2) zeta), the max-ER strategy's
    expected return over the max-IR strategy's (sigma cancels); ir_diff is the
    max-IR strategy's IR minus the max-ER strategy's.
    """
    rows = []
    for rho in rho_grid:
        if not 0.0 < rho < 1.0:
            raise ValueError("comparison curves need 0 < rho < 1")
        zeta = zeta_closed_form(rho)
        er_ratio = rho * SQRT_2_OVER_PI / (2.0 * math.sqrt(1.0 - rho * rho) * zeta)
        rows.append(ComparisonRow(rho, er_ratio, max_ir_zero_drift(rho) - ir_zero_drift(rho)))
    return rows


def information_ratio_gap(omega: float, rho: float, spec: QuadratureSpec | None = None) -> float:
    """max-IR strategy IR minus max-ER strategy IR for a (omega, rho) pair."""
    sol = ir_solution(SecurityModel(mu=omega, sigma=1.0, rho=rho), spec)
    return sol.max_ir - information_ratio_er(omega, rho)

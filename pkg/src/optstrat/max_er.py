"""The maximum-expected-return strategy sign(E(R|H)) and its closed-form performance."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from optstrat.model import SecurityModel, standardize
from optstrat.normal_math import a_of_theta
from optstrat.notional import BuyHold, NotionalFunction, SignThreshold, on_raw_indicator


@dataclass(frozen=True)
class StrategyStats:
    """Mean, variance and information ratio of a strategy return Q = f(H) R."""

    expected_return: float
    variance: float

    @property
    def std_dev(self) -> float:
        return math.sqrt(self.variance)

    @property
    def information_ratio(self) -> float:
        sd = self.std_dev
        if sd == 0.0:
            return math.copysign(math.inf, self.expected_return) if self.expected_return else 0.0
        return self.expected_return / sd

    def as_dict(self) -> dict:
        return {
            "expected_return": self.expected_return,
            "variance": self.variance,
            "std_dev": self.std_dev,
            "information_ratio": self.information_ratio,
        }


@dataclass(frozen=True)
class ErSolution:
    """Everything the CLI reports about the max-ER strategy of one model."""

    model: SecurityModel
    flipped: bool
    notional: NotionalFunction
    stats: StrategyStats
    m: float | None
    no_knowledge: bool
    degenerate: bool

    @property
    def threshold(self) -> float | None:
        return None if self.m is None else -self.m


def _direction(mu: float) -> int:
    return 1 if mu >= 0 else -1


def optimal_er_notional(model: SecurityModel) -> NotionalFunction:
    """sign(H + m) on the standardized indicator; buy-and-hold on sign(mu) when rho == 0.

    A non-standardized model gets a notional that reads the raw indicator.
    """
    std, _ = standardize(model)
    if std.rho == 0.0:
        return BuyHold(_direction(std.mu))
    m = std.mu / (std.rho * std.sigma)
    return on_raw_indicator(model, SignThreshold(threshold=-m))


def max_expected_return(model: SecurityModel) -> float:
    """M = rho sigma A(mu / (rho sigma)); |mu| when rho == 0."""
    std, _ = standardize(model)
    if std.rho == 0.0:
        return abs(std.mu)
    rs = std.rho * std.sigma
    m = std.mu / rs if rs > 0.0 else math.inf
    if not math.isfinite(m):
        # rho so small that m overflows: M has reached its rho -> 0 limit
        return abs(std.mu)
    return rs * a_of_theta(m)


def strategy_stats_er(model: SecurityModel) -> StrategyStats:
    """M, V = sigma^2 + mu^2 - M^2 and Omega = M / sqrt(V)."""
    big_m = max_expected_return(model)
    var = model.sigma ** 2 + model.mu ** 2 - big_m ** 2
    return StrategyStats(expected_return=big_m, variance=max(var, 0.0))


def er_solution(model: SecurityModel) -> ErSolution:
    std, flip = standardize(model)
    no_knowledge = std.rho == 0.0
    return ErSolution(
        model=std,
        flipped=flip,
        notional=optimal_er_notional(std),
        stats=strategy_stats_er(std),
        m=None if no_knowledge else std.mu / (std.rho * std.sigma),
        no_knowledge=no_knowledge,
        degenerate=no_knowledge and std.mu == 0.0,
    )


def information_ratio_er(omega: float, rho: float) -> float:
    """Omega(omega, rho): IR of the max-ER strategy, which depends only on omega and rho."""
    return strategy_stats_er(SecurityModel(mu=omega, sigma=1.0, rho=rho)).information_ratio


def ir_zero_drift(rho: float) -> float:
    """Omega(0, rho) = sqrt(2) rho / sqrt(pi - 2 rho^2)."""
    if not 0.0 <= rho <= 1.0:
        raise ValueError("rho must lie in [0, 1]")
    return math.sqrt(2.0) * rho / math.sqrt(math.pi - 2.0 * rho * rho)


def prob_positive(rho: float) -> float:
    """Pr(sign(H) R >= 0) for the zero-drift optimal strategy."""
    if not 0.0 <= rho <= 1.0:
        raise ValueError("rho must lie in [0, 1]")
    return 0.5 + math.asin(rho) / math.pi


def annualized_ir_bound(periods_per_year: float) -> float:
    """Perfect-knowledge zero-drift IR ceiling scaled by sqrt(periods per year)."""
    if periods_per_year < 1:
        raise ValueError("periods_per_year must be >= 1")
    return ir_zero_drift(1.0) * math.sqrt(periods_per_year)


def efficiency_chain(model: SecurityModel) -> tuple[float, float, float]:
    """(E(R), M, E|R|): buy-and-hold <= optimal <= perfect foresight when mu > 0."""
    return model.mu, max_expected_return(model), model.sigma * a_of_theta(model.omega)


def select_best_security(models: Sequence[SecurityModel]) -> int:
    """Index of the security whose max-ER strategy earns the most; ties go to the lowest index."""
    if len(models) == 0:
        raise ValueError("need at least one security")
    values = np.array([max_expected_return(m) for m in models])
    return int(np.argmax(values))


"""Optimal trading strategies for a return paired with a predictive indicator.

Builds the maximum-expected-return and maximum-information-ratio notionals,
evaluates them in closed form under a bivariate-normal model, estimates the
model from data and checks everything against a Monte Carlo oracle.
"""

from optstrat.errors import (
    DataError,
    DegenerateCorrelation,
    NoKnowledge,
    NonUnimodalError,
    OptStratError,
    QuadratureError,
    RankDeficiencyError,
)
from optstrat.estimate import Dataset, EstimatedModel, estimate_model, momentum_indicator, reduce_indicators
from optstrat.max_er import (
    StrategyStats,
    er_solution,
    information_ratio_er,
    max_expected_return,
    optimal_er_notional,
    select_best_security,
    strategy_stats_er,
)
from optstrat.max_ir import (
    ir_solution,
    max_ir_zero_drift,
    optimal_ir_notional,
    optimize_lambda,
    zeta_closed_form,
    zeta_quadrature,
)
from optstrat.mc import McConfig, McResult, dominance_sweep, evaluate_strategy
from optstrat.model import ConditionalMoments, SecurityModel, m_ratio, normal_conditional_moments, standardize
from optstrat.normal_math import QuadratureSpec, a_of_theta, erfcx_scaled, std_normal_cdf, tau_of_m
from optstrat.notional import (
    BuyHold,
    ClippedRatio,
    LambdaClipped,
    NotionalFunction,
    Rescaled,
    SignThreshold,
    Tabulated,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]

"""Bivariate-normal indicator/return model and its conditional moments."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

from optstrat.errors import DegenerateCorrelation, NoKnowledge

ArrayFn = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class SecurityModel:
    """Joint normal law of the indicator H and the next-period return R.

    Attributes:
        mu: mean return per period.
        sigma: return standard deviation per period.
        rho: Corr(H, R).
        mu_H: indicator mean.
        sigma_H: indicator standard deviation.
    """

    mu: float
    sigma: float
    rho: float
    mu_H: float = 0.0
    sigma_H: float = 1.0

    def __post_init__(self):
        for name in ("mu", "sigma", "rho", "mu_H", "sigma_H"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if self.sigma <= 0:
            raise ValueError("sigma must be > 0")
        if self.sigma_H <= 0:
            raise ValueError("sigma_H must be > 0")
        if not -1.0 <= self.rho <= 1.0:
            raise ValueError("rho must lie in [-1, 1]")

    @property
    def omega(self) -> float:
        """The security's own information ratio mu/sigma."""
        return self.mu / self.sigma

    @property
    def is_standardized(self) -> bool:
        return self.mu_H == 0.0 and self.sigma_H == 1.0 and self.rho >= 0.0

    def standard_indicator(self, h, flip: bool | None = None):
        """Map raw indicator values onto the standardized, positively correlated scale."""
        if flip is None:
            flip = self.rho < 0
        z = (np.asarray(h, dtype=float) - self.mu_H) / self.sigma_H
        return -z if flip else z


def standardize(model: SecurityModel) -> tuple[SecurityModel, bool]:
    """Return the model with mu_H=0, sigma_H=1, rho>=0 and whether H was negated."""
    flip = model.rho < 0
    std = replace(model, mu_H=0.0, sigma_H=1.0, rho=abs(model.rho))
    return std, flip


def m_ratio(model: SecurityModel) -> float:
    """m = mu / (rho sigma) on the standardized (rho >= 0) scale.

    Raises:
        NoKnowledge: when rho == 0.
    """
    rho = abs(model.rho)
    if rho == 0.0:
        raise NoKnowledge("rho == 0: the indicator carries no information, m is undefined")
    return model.mu / (rho * model.sigma)


@dataclass(frozen=True)
class ConditionalMoments:
    """First two conditional moments of R given H, as vectorized callables.

    ``g2`` must be strictly positive. ``points`` lists indicator values where
    the ratio has narrow features, as hints for quadrature.
    """

    g1: ArrayFn
    g2: ArrayFn
    points: tuple[float, ...] = ()

    def g(self, h):
        return self.g1(h) / self.g2(h)


def normal_conditional_moments(model: SecurityModel) -> ConditionalMoments:
    """g1 = E(R|H), g2 = E(R^2|H) for the bivariate normal, on the raw indicator scale.

    Raises:
        DegenerateCorrelation: when |rho| == 1 (g2 vanishes at H = -m).
    """
    if abs(model.rho) == 1.0:
        raise DegenerateCorrelation("|rho| == 1: g = g1/g2 is unbounded; use the perfect-knowledge limits")
    mu, sigma, rho = model.mu, model.sigma, model.rho
    mu_H, sigma_H = model.mu_H, model.sigma_H
    resid_var = (1.0 - rho * rho) * sigma * sigma

    def g1(h):
        return mu + (np.asarray(h, dtype=float) - mu_H) / sigma_H * rho * sigma

    def g2(h):
        mean = g1(h)
        return mean * mean + resid_var

    points: tuple[float, ...] = ()
    if rho != 0.0:
        # zero of g1 in raw units, plus the extrema of g
        centre = mu_H - sigma_H * mu / (rho * sigma)
        half = sigma_H * math.sqrt(1.0 - rho * rho) / abs(rho)
        points = (centre - half, centre, centre + half)
    return ConditionalMoments(g1=g1, g2=g2, points=points)

"""Bounded notional functions f: H -> [-1, 1].

Every variant is a callable taking an array of indicator values and returning
positions of the same shape. ``describe()`` gives a JSON-friendly summary.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from optstrat.errors import DegenerateCorrelation
from optstrat.model import ConditionalMoments, SecurityModel


class NotionalFunction:
    """Base class; subclasses implement ``__call__`` and ``describe``."""

    kind = "notional"

    def __call__(self, h) -> np.ndarray:
        raise NotImplementedError

    def describe(self) -> dict:
        return {"kind": self.kind}


@dataclass(frozen=True)
class SignThreshold(NotionalFunction):
    """sign(H - threshold), flat exactly at the threshold."""

    threshold: float
    kind = "sign_threshold"

    def __call__(self, h):
        return np.sign(np.asarray(h, dtype=float) - self.threshold)

    def describe(self):
        return {"kind": self.kind, "threshold": self.threshold}


@dataclass(frozen=True)
class BuyHold(NotionalFunction):
    """Constant position; direction 0 means no trade."""

    direction: int = 1
    kind = "buy_hold"

    def __post_init__(self):
        if self.direction not in (-1, 0, 1):
            raise ValueError("direction must be -1, 0 or +1")

    def __call__(self, h):
        return np.full(np.shape(h), float(self.direction))

    def describe(self):
        return {"kind": self.kind, "direction": self.direction}


@dataclass(frozen=True)
class ClippedRatio(NotionalFunction):
    """Maximum-information-ratio notional g(H)/g(H+) for a standardized normal model.

    With x = mu + rho sigma H and s = sqrt(1 - rho^2) sigma the ratio
    g = x / (x^2 + s^2) peaks at x = +-s with value +-1/(2s), so the notional
    is 2 s x / (x^2 + s^2), reaching +1 at H+ and -1 at H-.
    """

    model: SecurityModel
    kind = "clipped_ratio"

    def __post_init__(self):
        if not self.model.is_standardized:
            raise ValueError("ClippedRatio needs a standardized model (mu_H=0, sigma_H=1, rho>=0)")
        if not 0.0 < self.model.rho < 1.0:
            raise DegenerateCorrelation("ClippedRatio is defined for 0 < rho < 1")

    @property
    def resid_sd(self) -> float:
        return math.sqrt(1.0 - self.model.rho ** 2) * self.model.sigma

    @property
    def scale(self) -> float:
        """g(H+) = max g = 1 / (2 sqrt(1 - rho^2) sigma)."""
        return 1.0 / (2.0 * self.resid_sd)

    @property
    def h_plus(self) -> float:
        rho = self.model.rho
        return -self.model.mu / (rho * self.model.sigma) + math.sqrt(1.0 - rho * rho) / rho

    @property
    def h_minus(self) -> float:
        rho = self.model.rho
        return -self.model.mu / (rho * self.model.sigma) - math.sqrt(1.0 - rho * rho) / rho

    def __call__(self, h):
        m = self.model
        s = self.resid_sd
        x = m.mu + m.rho * m.sigma * np.asarray(h, dtype=float)
        return np.clip(2.0 * s * x / (x * x + s * s), -1.0, 1.0)

    def describe(self):
        return {
            "kind": self.kind,
            "h_plus": self.h_plus,
            "h_minus": self.h_minus,
            "g_at_h_plus": self.scale,
        }


@dataclass(frozen=True)
class LambdaClipped(NotionalFunction):
    """clip(lam * g1(H) / g2(H)) for arbitrary conditional moments."""

    moments: ConditionalMoments
    lam: float
    kind = "lambda_clipped"

    def __post_init__(self):
        if not self.lam > 0:
            raise ValueError("lambda must be > 0")

    def __call__(self, h):
        h = np.asarray(h, dtype=float)
        return np.clip(self.lam * self.moments.g(h), -1.0, 1.0)

    def describe(self):
        return {"kind": self.kind, "lambda": self.lam}


@dataclass(frozen=True, eq=False)
class Tabulated(NotionalFunction):
    """Piecewise-linear notional through (H, value) knots, constant outside."""

    grid: np.ndarray
    values: np.ndarray = field(repr=False)
    kind = "tabulated"

    def __post_init__(self):
        grid = np.asarray(self.grid, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if grid.ndim != 1 or grid.shape != values.shape or grid.size < 1:
            raise ValueError("grid and values must be 1-d arrays of equal nonzero length")
        if np.any(np.diff(grid) <= 0):
            raise ValueError("tabulated grid must be strictly increasing")
        if not np.all(np.isfinite(values)) or np.any(np.abs(values) > 1.0):
            raise ValueError("tabulated values must lie in [-1, 1]")
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "values", values)

    @classmethod
    def from_pairs(cls, pairs) -> "Tabulated":
        arr = np.asarray(pairs, dtype=float)
        return cls(arr[:, 0], arr[:, 1])

    def __call__(self, h):
        return np.interp(np.asarray(h, dtype=float), self.grid, self.values)

    def describe(self):
        return {"kind": self.kind, "knots": int(self.grid.size)}


@dataclass(frozen=True)
class Rescaled(NotionalFunction):
    """Applies a notional defined on the standardized indicator to raw indicator values."""

    inner: NotionalFunction
    mu_H: float
    sigma_H: float
    flip: bool = False
    kind = "rescaled"

    def __call__(self, h):
        z = (np.asarray(h, dtype=float) - self.mu_H) / self.sigma_H
        return self.inner(-z if self.flip else z)

    def describe(self):
        return {
            "kind": self.kind,
            "mu_H": self.mu_H,
            "sigma_H": self.sigma_H,
            "flip": self.flip,
            "inner": self.inner.describe(),
        }


def on_raw_indicator(model: SecurityModel, inner: NotionalFunction) -> NotionalFunction:
    """Wrap ``inner`` (built for the standardized model) so it reads raw H."""
    if model.is_standardized:
        return inner
    return Rescaled(inner, model.mu_H, model.sigma_H, model.rho < 0)

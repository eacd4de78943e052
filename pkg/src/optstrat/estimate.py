"""Estimating the model and the optimal threshold from data."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from datetime import date
from typing import Sequence

import numpy as np

from optstrat.errors import DataError, RankDeficiencyError
from optstrat.model import SecurityModel

DEGENERATE_RHO = 1.0 - 1e-12
MIN_RECOMMENDED_N = 30


class SmallSampleWarning(UserWarning):
    """Fewer than 30 observations were supplied for estimation."""


@dataclass(frozen=True, eq=False)
class Dataset:
    """Paired indicator/return observations (variance estimates need n >= 2)."""

    h: np.ndarray
    r: np.ndarray

    def __post_init__(self):
        h = np.asarray(self.h, dtype=float)
        r = np.asarray(self.r, dtype=float)
        if h.ndim != 1 or h.shape != r.shape:
            raise DataError("h and r must be 1-d sequences of equal length")
        if h.size < 1:
            raise DataError("dataset is empty")
        if not (np.all(np.isfinite(h)) and np.all(np.isfinite(r))):
            raise DataError("dataset contains non-finite values")
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "r", r)

    @classmethod
    def from_pairs(cls, pairs) -> "Dataset":
        arr = np.asarray(pairs, dtype=float).reshape(-1, 2)
        return cls(arr[:, 0], arr[:, 1])

    def __len__(self):
        return self.h.size


@dataclass(frozen=True)
class EstimatedModel:
    """Sample-moment model plus the implied threshold of the max-ER strategy.

    ``m_hat`` is mean(r) / mean(h* r) on the standardized, positively
    correlated indicator h*; ``m_hat_plugin`` is mu/(rho sigma) from the
    sample moments. ``threshold_hat`` = -m_hat lives on the h* scale and
    ``threshold_raw`` is the same cut in raw indicator units.
    """

    model: SecurityModel
    n: int
    m_hat: float
    m_hat_plugin: float
    flipped: bool
    degenerate: bool
    standard_errors: dict[str, float] = field(default_factory=dict)

    @property
    def threshold_hat(self) -> float:
        return -self.m_hat

    @property
    def threshold_raw(self) -> float:
        z = -self.m_hat if not self.flipped else self.m_hat
        return self.model.mu_H + self.model.sigma_H * z

    def as_dict(self) -> dict:
        m = self.model
        return {
            "n": self.n,
            "model": {"mu": m.mu, "sigma": m.sigma, "rho": m.rho, "mu_H": m.mu_H, "sigma_H": m.sigma_H},
            "m_hat": self.m_hat,
            "m_hat_plugin": self.m_hat_plugin,
            "threshold_hat": self.threshold_hat,
            "threshold_raw": self.threshold_raw,
            "flipped": self.flipped,
            "degenerate": self.degenerate,
            "standard_errors": dict(self.standard_errors),
        }


def _moment_stats(h: np.ndarray, r: np.ndarray) -> np.ndarray:
    """Rows of (mu_H, sigma_H, mu, sigma, rho, m_ratio, m_plugin) along the last axis."""
    n = h.shape[-1]
    mu_h = h.mean(axis=-1, keepdims=True)
    mu_r = r.mean(axis=-1, keepdims=True)
    dh = h - mu_h
    dr = r - mu_r
    var_h = (dh * dh).sum(axis=-1) / (n - 1)
    var_r = (dr * dr).sum(axis=-1) / (n - 1)
    cov = (dh * dr).sum(axis=-1) / (n - 1)
    sd_h, sd_r = np.sqrt(var_h), np.sqrt(var_r)
    with np.errstate(divide="ignore", invalid="ignore"):
        rho = cov / (sd_h * sd_r)
        sign = np.where(rho < 0, -1.0, 1.0)
        hstar = sign[..., None] * dh / sd_h[..., None]
        m_ratio = mu_r[..., 0] / (hstar * r).mean(axis=-1)
        m_plugin = mu_r[..., 0] / (np.abs(rho) * sd_r)
    return np.stack([mu_h[..., 0], sd_h, mu_r[..., 0], sd_r, rho, m_ratio, m_plugin], axis=-1)


_SE_NAMES = ("mu_H", "sigma_H", "mu", "sigma", "rho", "m_hat", "m_hat_plugin")


def bootstrap_standard_errors(data: Dataset, n_boot: int = 1000, seed: int = 0, stream: int = 0) -> dict[str, float]:
    """Nonparametric bootstrap SDs of every estimated quantity.

    Resampling indices come from the same Philox (seed, stream) generator
    family the Monte Carlo module uses.
    """
    rng = np.random.Generator(np.random.Philox(key=np.array([seed, stream], dtype=np.uint64)))
    n = len(data)
    batch = max(1, min(n_boot, 2_000_000 // n))
    draws = []
    done = 0
    while done < n_boot:
        k = min(batch, n_boot - done)
        idx = rng.integers(0, n, size=(k, n))
        draws.append(_moment_stats(data.h[idx], data.r[idx]))
        done += k
    stats = np.concatenate(draws)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        sds = np.nanstd(np.where(np.isfinite(stats), stats, np.nan), axis=0, ddof=1)
    return {name: float(v) for name, v in zip(_SE_NAMES, sds)}


def estimate_model(data: Dataset, n_boot: int = 1000, seed: int = 0) -> EstimatedModel:
    """Sample moments (unbiased variances, Pearson rho) and both m-ratio estimates.

    Raises:
        DataError: fewer than 2 rows, or an input has zero variance.
    Warns:
        SmallSampleWarning: fewer than 30 observations.
    """
    n = len(data)
    if n < 2:
        raise DataError("need at least 2 observations to estimate variances")
    if n < MIN_RECOMMENDED_N:
        warnings.warn(f"only {n} observations; estimates will be unreliable", SmallSampleWarning, stacklevel=2)
    if np.ptp(data.h) == 0 or np.ptp(data.r) == 0:
        raise DataError("indicator and return must both have nonzero variance")
    mu_h, sd_h, mu_r, sd_r, rho, m_ratio, m_plugin = _moment_stats(data.h, data.r)
    rho = float(np.clip(rho, -1.0, 1.0))
    model = SecurityModel(mu=float(mu_r), sigma=float(sd_r), rho=rho, mu_H=float(mu_h), sigma_H=float(sd_h))
    ses = bootstrap_standard_errors(data, n_boot, seed) if n_boot > 0 else {}
    return EstimatedModel(
        model=model,
        n=n,
        m_hat=float(m_ratio),
        m_hat_plugin=float(m_plugin),
        flipped=rho < 0,
        degenerate=abs(rho) >= DEGENERATE_RHO,
        standard_errors=ses,
    )


@dataclass(frozen=True, eq=False)
class IndicatorReduction:
    """OLS of r on (1, h1..hk); ``combined`` pairs the fitted values with r.

    ``weights`` holds the intercept first, then one coefficient per indicator.
    """

    combined: Dataset
    weights: np.ndarray
    std_errors: np.ndarray
    r_squared: float


def reduce_indicators(indicators, r, names: Sequence[str] | None = None) -> IndicatorReduction:
    """Collapse k indicators into the single indicator E(R | H1..Hk) by linear regression.

    Raises:
        RankDeficiencyError: the design matrix is (numerically) rank deficient;
            the message names the collinear columns.
    """
    x = np.asarray(indicators, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    y = np.asarray(r, dtype=float)
    n, k = x.shape
    names = list(names) if names is not None else [f"h{j + 1}" for j in range(k)]
    if y.shape != (n,):
        raise DataError("indicator rows and returns must have the same length")
    if n <= k + 1:
        raise DataError(f"need more than {k + 1} rows for {k} indicators, got {n}")
    design = np.column_stack([np.ones(n), x])
    _, sv, vt = np.linalg.svd(design, full_matrices=False)
    if sv[-1] <= 1e-10 * sv[0]:
        null = np.abs(vt[-1])
        involved = [(["intercept"] + names)[j] for j in np.flatnonzero(null > 1e-6 * null.max())]
        raise RankDeficiencyError(f"collinear indicator columns: {', '.join(involved)}", involved)
    coef, *_ = np.linalg.lstsq(design, y, rcond=None)
    fitted = design @ coef
    resid = y - fitted
    s2 = resid @ resid / (n - k - 1)
    cov = s2 * np.linalg.inv(design.T @ design)
    tss = ((y - y.mean()) ** 2).sum()
    return IndicatorReduction(
        combined=Dataset(fitted, y),
        weights=coef,
        std_errors=np.sqrt(np.diag(cov)),
        r_squared=float(1.0 - resid @ resid / tss) if tss > 0 else math.nan,
    )


def momentum_indicator(dates: Sequence[date] | None, prices: Sequence[float], lookback: int) -> Dataset:
    """Trailing return over ``lookback`` periods paired with the next-period simple return.

    h_t = p_t / p_{t-lookback} - 1, r_t = p_{t+1} / p_t - 1, for every t with a
    full history and a next price.
    """
    p = np.asarray(prices, dtype=float)
    if lookback < 1:
        raise DataError("lookback must be >= 1")
    if p.ndim != 1 or p.size <= lookback + 1:
        raise DataError(f"need more than {lookback + 1} prices for lookback {lookback}")
    if not np.all(np.isfinite(p)) or np.any(p <= 0):
        raise DataError("prices must be positive and finite")
    if dates is not None:
        if len(dates) != p.size:
            raise DataError("dates and prices differ in length")
        for i in range(1, len(dates)):
            if not dates[i] > dates[i - 1]:
                raise DataError(f"dates must be strictly increasing (row {i + 1})")
    t = np.arange(lookback, p.size - 1)
    return Dataset(p[t] / p[t - lookback] - 1.0, p[t + 1] / p[t] - 1.0)


def synthetic_dataset(model: SecurityModel, n: int, seed: int, stream: int = 0) -> Dataset:
    """Draw n (h, r) pairs from ``model`` with the Monte Carlo sampler."""
    from optstrat.mc import McConfig, sample_pairs

    h, r = sample_pairs(model, McConfig(seed=seed, stream=stream, n_samples=n))
    return Dataset(h, r)

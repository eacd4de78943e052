"""Deterministic Monte Carlo oracle for the closed forms.

Sample i of stream (seed, stream) is a pure function of (seed, stream, i): two
uniforms are read from Philox-4x64 counter block i // 2 and turned into two
independent normals by Box-Muller. Disjoint index ranges can therefore be
generated in any order, on any thread, and merged into exactly the same sample.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from optstrat.max_er import max_expected_return, optimal_er_notional
from optstrat.max_ir import ir_solution
from optstrat.model import SecurityModel
from optstrat.notional import NotionalFunction

CHUNK = 1 << 20
_TWO_PI = 2.0 * math.pi
_U53 = 2.0 ** -53


@dataclass(frozen=True)
class McConfig:
    seed: int = 42
    stream: int = 0
    n_samples: int = 1_000_000

    def __post_init__(self):
        if not 0 <= self.seed < 2 ** 64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if not 0 <= self.stream < 2 ** 64:
            raise ValueError("stream must be a 64-bit unsigned integer")
        if self.n_samples < 1:
            raise ValueError("n_samples must be >= 1")


def standard_normal_pairs(seed: int, stream: int, start: int, stop: int) -> tuple[np.ndarray, np.ndarray]:
    """Independent N(0,1) pairs (z1, z2) for sample indices [start, stop)."""
    if not 0 <= start <= stop:
        raise ValueError("need 0 <= start <= stop")
    block_lo = start // 2
    n_blocks = (stop + 1) // 2 - block_lo
    bitgen = np.random.Philox(key=np.array([seed, stream], dtype=np.uint64), counter=block_lo)
    raw = bitgen.random_raw(4 * n_blocks).reshape(-1, 2)[start - 2 * block_lo : stop - 2 * block_lo]
    u = ((raw >> np.uint64(11)).astype(np.float64) + 1.0) * _U53  # (0, 1]
    radius = np.sqrt(-2.0 * np.log(u[:, 0]))
    angle = _TWO_PI * u[:, 1]
    return radius * np.cos(angle), radius * np.sin(angle)


def sample_pairs(model: SecurityModel, cfg: McConfig, start: int = 0, stop: int | None = None):
    """(h, r) arrays for sample indices [start, stop) (default: the whole run)."""
    stop = cfg.n_samples if stop is None else stop
    z1, z2 = standard_normal_pairs(cfg.seed, cfg.stream, start, stop)
    h = model.mu_H + model.sigma_H * z1
    r = model.mu + model.sigma * (model.rho * z1 + math.sqrt(1.0 - model.rho ** 2) * z2)
    return h, r


def iter_pairs(
    model: SecurityModel, cfg: McConfig, start: int = 0, stop: int | None = None, chunk: int = CHUNK
) -> Iterator[tuple[np.ndarray, np.ndarray]]:
    """Yield (h, r) chunks covering [start, stop)."""
    stop = cfg.n_samples if stop is None else stop
    for lo in range(start, stop, chunk):
        yield sample_pairs(model, cfg, lo, min(lo + chunk, stop))


@dataclass(frozen=True)
class Moments:
    """Count, mean, central power sums M2..M4 and hit count of a sample.

    ``merge`` combines two disjoint samples exactly (up to rounding), so
    results from parallel substreams can be reduced in any grouping.
    """

    n: int = 0
    mean: float = 0.0
    m2: float = 0.0
    m3: float = 0.0
    m4: float = 0.0
    hits: int = 0

    @classmethod
    def of(cls, q: np.ndarray) -> "Moments":
        n = q.size
        if n == 0:
            return cls()
        mean = float(np.mean(q))
        d = q - mean
        d2 = d * d
        return cls(
            n=n,
            mean=mean,
            m2=float(np.sum(d2)),
            m3=float(np.sum(d2 * d)),
            m4=float(np.sum(d2 * d2)),
            hits=int(np.count_nonzero(q >= 0.0)),
        )

    def merge(self, other: "Moments") -> "Moments":
        if self.n == 0:
            return other
        if other.n == 0:
            return self
        na, nb = self.n, other.n
        n = na + nb
        delta = other.mean - self.mean
        d_n = delta / n
        mean = self.mean + d_n * nb
        m2 = self.m2 + other.m2 + delta * d_n * na * nb
        m3 = (
            self.m3 + other.m3
            + delta * d_n * d_n * na * nb * (na - nb)
            + 3.0 * d_n * (na * other.m2 - nb * self.m2)
        )
        m4 = (
            self.m4 + other.m4
            + delta * d_n ** 3 * na * nb * (na * na - na * nb + nb * nb)
            + 6.0 * d_n * d_n * (na * na * other.m2 + nb * nb * self.m2)
            + 4.0 * d_n * (na * other.m3 - nb * self.m3)
        )
        return Moments(n, mean, m2, m3, m4, self.hits + other.hits)


@dataclass(frozen=True)
class McResult:
    """Sample statistics of Q = f(H) R with delta-method standard errors."""

    n: int
    mean: float
    std_dev: float
    information_ratio: float
    hit_rate: float
    se_mean: float
    se_std_dev: float
    se_information_ratio: float
    se_hit_rate: float
    second_moment: float
    se_second_moment: float

    @classmethod
    def from_moments(cls, mom: Moments) -> "McResult":
        n = mom.n
        var_pop = mom.m2 / n
        var = mom.m2 / (n - 1) if n > 1 else 0.0
        sd = math.sqrt(var)
        mu3, mu4 = mom.m3 / n, mom.m4 / n
        hit = mom.hits / n
        if sd > 0.0:
            ir = mom.mean / sd
            skew = mu3 / var_pop ** 1.5
            kurt = mu4 / var_pop ** 2
            se_ir = math.sqrt(max(1.0 - ir * skew + ir * ir * (kurt - 1.0) / 4.0, 0.0) / n)
            se_sd = math.sqrt(max(mu4 - var_pop ** 2, 0.0) / n) / (2.0 * sd)
        else:
            ir = 0.0 if mom.mean == 0.0 else math.copysign(math.inf, mom.mean)
            se_ir = se_sd = 0.0
        a = mom.mean
        raw2 = var_pop + a * a
        raw4 = mu4 + 4.0 * a * mu3 + 6.0 * a * a * var_pop + a ** 4
        return cls(
            n=n,
            mean=a,
            std_dev=sd,
            information_ratio=ir,
            hit_rate=hit,
            se_mean=sd / math.sqrt(n),
            se_std_dev=se_sd,
            se_information_ratio=se_ir,
            se_hit_rate=math.sqrt(hit * (1.0 - hit) / n),
            second_moment=raw2,
            se_second_moment=math.sqrt(max(raw4 - raw2 * raw2, 0.0) / n),
        )


def _split(n: int, parts: int) -> list[tuple[int, int]]:
    edges = [n * i // parts for i in range(parts + 1)]
    return [(edges[i], edges[i + 1]) for i in range(parts)]


def _range_moments(notional, model, cfg, lo, hi) -> Moments:
    acc = Moments()
    for h, r in iter_pairs(model, cfg, lo, hi):
        acc = acc.merge(Moments.of(notional(h) * r))
    return acc


def evaluate_strategy(
    notional: NotionalFunction,
    model: SecurityModel,
    cfg: McConfig,
    parts: int = 1,
    workers: int | None = None,
) -> McResult:
    """Monte Carlo statistics of Q = f(H) R.

    ``parts`` splits the index range into that many contiguous substreams,
    evaluated on up to ``workers`` threads and merged in order.
    """
    ranges = _split(cfg.n_samples, max(1, parts))
    if workers and workers > 1 and len(ranges) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            pieces = list(pool.map(lambda lh: _range_moments(notional, model, cfg, *lh), ranges))
    else:
        pieces = [_range_moments(notional, model, cfg, lo, hi) for lo, hi in ranges]
    total = Moments()
    for piece in pieces:
        total = total.merge(piece)
    return McResult.from_moments(total)


def perturbation_test(
    model: SecurityModel,
    base: NotionalFunction,
    interval: tuple[float, float],
    epsilon: float,
    cfg: McConfig,
) -> tuple[float, float]:
    """E[(f + eps 1_I) R] - E[f R] and its standard error, on common random numbers.

    The bumped notional is clipped to [-1, 1] pointwise, so an eps that would
    break the bound is truncated where needed.
    """
    lo, hi = interval
    if not lo < hi:
        raise ValueError("perturbation interval is empty")
    acc = Moments()
    for h, r in iter_pairs(model, cfg):
        f = base(h)
        inside = (h >= lo) & (h <= hi)
        bumped = np.where(inside, np.clip(f + epsilon, -1.0, 1.0), f)
        acc = acc.merge(Moments.of((bumped - f) * r))
    res = McResult.from_moments(acc)
    return res.mean, res.se_mean


@dataclass(frozen=True)
class DominanceRow:
    result: McResult
    mean_ok: bool
    ir_ok: bool


@dataclass(frozen=True)
class DominanceReport:
    max_expected_return: float
    max_information_ratio: float
    rows: list[DominanceRow]

    @property
    def violations(self) -> int:
        return sum((not row.mean_ok) + (not row.ir_ok) for row in self.rows)


def dominance_sweep(
    model: SecurityModel,
    candidates: Sequence[NotionalFunction],
    cfg: McConfig,
    n_se: float = 4.0,
) -> DominanceReport:
    """Check every candidate against the closed-form maxima on shared samples.

    Flags: mean <= M + n_se SE and IR <= max IR + n_se SE(IR).
    """
    big_m = max_expected_return(model)
    max_ir = ir_solution(model).max_ir
    accs = [Moments() for _ in candidates]
    for h, r in iter_pairs(model, cfg):
        for i, cand in enumerate(candidates):
            accs[i] = accs[i].merge(Moments.of(cand(h) * r))
    rows = []
    for acc in accs:
        res = McResult.from_moments(acc)
        rows.append(
            DominanceRow(
                result=res,
                mean_ok=res.mean <= big_m + n_se * res.se_mean,
                ir_ok=res.information_ratio <= max_ir + n_se * res.se_information_ratio,
            )
        )
    return DominanceReport(big_m, max_ir, rows)


def conditional_mean_bins(model: SecurityModel, cfg: McConfig, bins: int = 50, h_range=(-2.5, 2.5)):
    """Bin samples by H; returns (centres, mean R per bin, SE per bin)."""
    edges = np.linspace(h_range[0], h_range[1], bins + 1)
    count = np.zeros(bins)
    s1 = np.zeros(bins)
    s2 = np.zeros(bins)
    for h, r in iter_pairs(model, cfg):
        idx = np.digitize(h, edges) - 1
        ok = (idx >= 0) & (idx < bins)
        count += np.bincount(idx[ok], minlength=bins)
        s1 += np.bincount(idx[ok], weights=r[ok], minlength=bins)
        s2 += np.bincount(idx[ok], weights=r[ok] ** 2, minlength=bins)
    mean = s1 / count
    var = (s2 - count * mean ** 2) / (count - 1)
    return 0.5 * (edges[1:] + edges[:-1]), mean, np.sqrt(var / count)


def select_best_security_mc(models: Sequence[SecurityModel], cfg: McConfig) -> tuple[int, list[McResult]]:
    """argmax_j of the estimated E(sign(E(R_j|H)) R_j), all securities on common random numbers."""
    if len(models) == 0:
        raise ValueError("need at least one security")
    results = [evaluate_strategy(optimal_er_notional(m), m, cfg) for m in models]
    return int(np.argmax([r.mean for r in results])), results

"""Scalar special functions and the Gaussian-weighted quadrature engine.

Everything here accepts Python floats or numpy arrays and returns the same
shape. Inputs must be finite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy import integrate, special

from optstrat.errors import QuadratureError

SQRT_2_OVER_PI = math.sqrt(2.0 / math.pi)
INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)


@dataclass(frozen=True)
class QuadratureSpec:
    """Tolerances and domain for :func:`integrate_gaussian_weighted`."""

    abs_tol: float = 1e-10
    rel_tol: float = 1e-10
    max_subdivisions: int = 2000
    integration_halfwidth: float = 12.0

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise ValueError("quadrature tolerances must be positive")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be >= 1")
        if not self.integration_halfwidth >= 8:
            raise ValueError("integration_halfwidth must be >= 8 standard deviations")


def _finite(x, name="x"):
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} must be finite")
    return arr


def _out(arr):
    return float(arr) if arr.ndim == 0 else arr


def std_normal_cdf(x):
    """Standard normal CDF."""
    return _out(special.ndtr(_finite(x)))


def std_normal_pdf(x):
    x = _finite(x)
    return _out(INV_SQRT_2PI * np.exp(-0.5 * x * x))


def erfcx_scaled(x):
    """exp(x**2) * erfc(x) for x >= 0, without overflow.

    Used for tail products exp(b**2/2) * (1 - N(b)) = erfcx_scaled(b/sqrt(2)) / 2.
    """
    x = _finite(x)
    if np.any(x < 0):
        raise ValueError("erfcx_scaled is defined here for x >= 0 only")
    return _out(special.erfcx(x))


def tau_of_m(m):
    """2 N(m) - 1, computed as erf(m / sqrt 2) so it stays exactly odd."""
    return _out(special.erf(_finite(m, "m") / math.sqrt(2.0)))


def a_of_theta(theta):
    """E|X| for X ~ N(theta, 1).

    Written as |t| + 2 phi(t) (1 - |t| R(|t|)) with the Mills ratio
    R(t) = sqrt(pi/2) erfcx(t/sqrt 2), so the excess over |t| is never
    lost to rounding and A(t) >= |t| holds in floating point.
    """
    t = np.abs(_finite(theta, "theta"))
    mills = math.sqrt(math.pi / 2.0) * special.erfcx(t / math.sqrt(2.0))
    with np.errstate(over="ignore"):  # t*t may overflow; exp then underflows to 0
        excess = 2.0 * INV_SQRT_2PI * np.exp(-0.5 * t * t) * np.maximum(1.0 - t * mills, 0.0)
    return _out(t + excess)


def clip(x):
    """Clipping function: identity on (-1, 1), saturating at +-1."""
    return _out(np.clip(_finite(x), -1.0, 1.0))


def integrate_gaussian_weighted(
    f: Callable[[float], float],
    spec: QuadratureSpec | None = None,
    points: Sequence[float] | None = None,
) -> float:
    """Integrate f(H) against the standard normal density.

    The domain is truncated to +-spec.integration_halfwidth. ``points`` are
    optional interior breakpoints (kinks, narrow features) handed to the
    adaptive integrator.

    Raises:
        QuadratureError: if the tolerance is not met within
            ``spec.max_subdivisions`` subintervals.
    """
    spec = spec or QuadratureSpec()
    hw = spec.integration_halfwidth
    inner = None
    if points is not None:
        inner = sorted({float(p) for p in points if -hw < p < hw}) or None

    if inner is not None and len(inner) >= spec.max_subdivisions:
        raise QuadratureError(
            f"{len(inner)} breakpoints need more than max_subdivisions={spec.max_subdivisions} subintervals"
        )

    def integrand(h):
        return f(h) * INV_SQRT_2PI * math.exp(-0.5 * h * h)

    value, abserr, info, *rest = integrate.quad(
        integrand,
        -hw,
        hw,
        epsabs=spec.abs_tol,
        epsrel=spec.rel_tol,
        limit=spec.max_subdivisions,
        points=inner,
        full_output=1,
    )
    tol = max(spec.abs_tol, spec.rel_tol * abs(value))
    if abserr > tol:
        msg = rest[0] if rest else "tolerance not met"
        raise QuadratureError(
            f"quadrature did not converge: estimated error {abserr:.3g} > {tol:.3g} "
            f"after {info['last']} subdivisions ({msg.strip().splitlines()[0]})"
        )
    return value

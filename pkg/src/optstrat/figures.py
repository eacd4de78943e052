"""Data behind the published tables and curves, as OutputTables."""

from __future__ import annotations

import math

import numpy as np

from optstrat.max_er import information_ratio_er, ir_zero_drift, prob_positive
from optstrat.max_ir import (
    comparison_curves,
    ir_asymptotic_approx,
    ir_solution,
    max_ir_zero_drift,
    zeta_closed_form,
)
from optstrat.model import SecurityModel
from optstrat.normal_math import SQRT_2_OVER_PI, a_of_theta
from optstrat.notional import ClippedRatio
from optstrat.output import OutputTable

FIG3_RHOS = (0.1, 0.25, 0.5, 0.75, 1.0)
FIG3_OMEGAS = (0.5, 1.0, 2.0)
FIG7_RHOS = (0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.99, 0.999, 0.9999, 0.99999)
FIG5_RHOS = (0.3, 0.6, 0.9, 0.99)

TABLES = ("fig3", "fig7", "table1")
CURVES = ("fig1", "fig2", "fig4", "fig5", "fig6", "fig7", "fig8", "fig9")

# (default lo, default hi, lowest allowed, highest allowed, open at lo, open at hi)
_DOMAINS = {
    "fig1": (0.0, 1.0, 0.0, 1.0, False, False),
    "fig2": (-3.0, 3.0, -math.inf, math.inf, False, False),
    "fig4": (0.0, 1.0, 0.0, 1.0, False, False),
    "fig5": (-4.0, 4.0, -math.inf, math.inf, False, False),
    "fig6": (0.005, 1.0, 0.0, 1.0, True, False),
    "fig7": (0.005, 0.995, 0.0, 1.0, True, True),
    "fig8": (0.005, 0.995, 0.0, 1.0, True, True),
    "fig9": (0.005, 0.995, 0.0, 1.0, True, True),
}


def table_fig3() -> OutputTable:
    cols = {"rho": list(FIG3_RHOS)}
    for w in FIG3_OMEGAS:
        cols[f"omega_{w:g}"] = [information_ratio_er(w, rho) for rho in FIG3_RHOS]
    return OutputTable(cols)


def table_fig7() -> OutputTable:
    return OutputTable(
        {
            "rho": list(FIG7_RHOS),
            "max_ir": [max_ir_zero_drift(r) for r in FIG7_RHOS],
            "approx": [ir_asymptotic_approx(r) for r in FIG7_RHOS],
        }
    )


def table_table1(sigma: float = 1.0, rho: float = 0.5) -> OutputTable:
    """Both optimal strategies at zero drift, for one (sigma, rho)."""
    model = SecurityModel(mu=0.0, sigma=sigma, rho=rho)
    er = rho * sigma * SQRT_2_OVER_PI
    er_sd = sigma * math.sqrt(1.0 - 2.0 * rho * rho / math.pi)
    if 0.0 < rho < 1.0:
        sol = ir_solution(model)
        c = 1.0 - rho * rho
        ir_notional = f"{2 * rho * math.sqrt(c):.6g}*H/({c:.6g}+{rho * rho:.6g}*H^2)"
        ir_cells = [ir_notional, sol.expected_return, sol.std_dev, sol.max_ir]
    else:
        ir_cells = ["degenerate", math.nan, math.nan, math.nan]
    return OutputTable(
        {
            "quantity": ["notional", "expected_return", "std_dev", "information_ratio"],
            "max_er": ["sign(H)", er, er_sd, ir_zero_drift(rho)],
            "max_ir": ir_cells,
        }
    )


def build_table(which: str, sigma: float = 1.0, rho: float = 0.5) -> OutputTable:
    if which == "fig3":
        return table_fig3()
    if which == "fig7":
        return table_fig7()
    if which == "table1":
        return table_table1(sigma, rho)
    raise ValueError(f"unknown table {which!r}; choose from {', '.join(TABLES)}")


def curve_grid(which: str, x_min: float | None = None, x_max: float | None = None, points: int = 201):
    """Uniform grid for a curve, validated against that curve's domain."""
    if which not in _DOMAINS:
        raise ValueError(f"unknown curve {which!r}; choose from {', '.join(CURVES)}")
    d_lo, d_hi, lo_bound, hi_bound, open_lo, open_hi = _DOMAINS[which]
    lo = d_lo if x_min is None else x_min
    hi = d_hi if x_max is None else x_max
    if points < 2:
        raise ValueError("need at least 2 grid points")
    if not (math.isfinite(lo) and math.isfinite(hi) and lo < hi):
        raise ValueError("grid needs finite x_min < x_max")
    if lo < lo_bound or (open_lo and lo == lo_bound) or hi > hi_bound or (open_hi and hi == hi_bound):
        lb = "(" if open_lo else "["
        rb = ")" if open_hi else "]"
        raise ValueError(f"{which} is defined on {lb}{lo_bound:g}, {hi_bound:g}{rb}; got [{lo:g}, {hi:g}]")
    return np.linspace(lo, hi, points)


def _series(xs, ys, name=None, cols=None):
    cols = cols if cols is not None else {"x": [], "y": [], "series": []}
    cols["x"].extend(float(x) for x in xs)
    cols["y"].extend(float(y) for y in ys)
    cols["series"].extend([name] * len(xs))
    return cols


def build_curve(which: str, x_min: float | None = None, x_max: float | None = None, points: int = 201) -> OutputTable:
    xs = curve_grid(which, x_min, x_max, points)
    if which == "fig1":
        return OutputTable({"x": list(xs), "y": [prob_positive(float(r)) for r in xs]})
    if which == "fig2":
        cols = _series(xs, a_of_theta(xs), "A")
        return OutputTable(_series(xs, np.abs(xs), "abs_m", cols))
    if which == "fig4":
        return OutputTable({"x": list(xs), "y": [ir_zero_drift(float(r)) for r in xs]})
    if which == "fig5":
        cols = None
        for rho in FIG5_RHOS:
            cols = _series(xs, ClippedRatio(SecurityModel(0.0, 1.0, rho))(xs), f"rho={rho:g}", cols)
        return OutputTable(_series(xs, np.sign(xs), "sign", cols))
    if which == "fig6":
        zetas = [zeta_closed_form(float(r)) for r in xs]
        cols = _series(xs, zetas, "zeta")
        er = [2.0 * math.sqrt(max(1.0 - r * r, 0.0)) * z for r, z in zip(xs, zetas)]
        return OutputTable(_series(xs, er, "expected_return", cols))
    if which == "fig7":
        cols = _series(xs, [max_ir_zero_drift(float(r)) for r in xs], "max_ir")
        return OutputTable(_series(xs, [ir_asymptotic_approx(float(r)) for r in xs], "approx", cols))
    rows = comparison_curves([float(r) for r in xs])
    if which == "fig8":
        return OutputTable({"x": list(xs), "y": [row.er_ratio for row in rows]})
    return OutputTable({"x": list(xs), "y": [row.ir_diff for row in rows]})

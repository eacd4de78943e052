"""Verification suites: closed forms against published values, and Monte Carlo bands.

Every check yields a dict with measured, expected, tolerance and a status of
"pass", "fail" or "insufficient_n". Reports carry no timings, so identical
arguments give byte-identical output.
"""

from __future__ import annotations

import math

import numpy as np

from optstrat.estimate import Dataset, estimate_model, synthetic_dataset
from optstrat.figures import FIG3_OMEGAS, FIG3_RHOS, FIG7_RHOS
from optstrat.max_er import (
    annualized_ir_bound,
    efficiency_chain,
    information_ratio_er,
    ir_zero_drift,
    optimal_er_notional,
    prob_positive,
    strategy_stats_er,
)
from optstrat.max_ir import (
    comparison_curves,
    ir_asymptotic_approx,
    ir_solution,
    max_ir_zero_drift,
    zeta_closed_form,
    zeta_quadrature,
)
from optstrat.mc import McConfig, dominance_sweep, evaluate_strategy, perturbation_test
from optstrat.model import SecurityModel
from optstrat.normal_math import a_of_theta
from optstrat.notional import SignThreshold, Tabulated

MIN_MC_SAMPLES = 10_000
N_SE = 4.0

FIG3_PUBLISHED = {
    0.1: (0.5, 1.0, 2.0),
    0.25: (0.505324, 1.00001, 2.0),
    0.5: (0.611567, 1.0172, 2.00004),
    0.75: (0.85525, 1.1411, 2.00891),
    1.0: (1.33818, 1.45946, 2.08951),
}
FIG7_PUBLISHED = {
    0.1: (0.0995317, 0.771173),
    0.2: (0.196865, 0.794219),
    0.3: (0.291882, 0.821179),
    0.4: (0.386508, 0.853443),
    0.5: (0.484213, 0.893244),
    0.6: (0.590425, 0.94449),
    0.7: (0.714714, 1.01492),
    0.8: (0.878467, 1.12319),
    0.9: (1.15429, 1.33571),
    0.99: (2.29156, 2.37527),
    0.999: (4.17963, 4.22389),
    0.9999: (7.48685, 7.51126),
    0.99999: (13.3435, 13.3571),
}
# A(1), A(2), A(3) and Omega(0, 1) as printed, to three decimals
PUBLISHED_A = {1.0: 1.167, 2.0: 2.017, 3.0: 3.001}
PUBLISHED_IR_CEILING = 1.324


def _check(name, criterion, measured, expected, tolerance, ok, kind="abs"):
    return {
        "name": name,
        "criterion": criterion,
        "measured": measured,
        "expected": expected,
        "tolerance": tolerance,
        "tolerance_kind": kind,
        "status": "pass" if ok else "fail",
    }


def _rel(name, criterion, measured, expected, tol):
    return _check(name, criterion, measured, expected, tol, abs(measured - expected) <= tol * abs(expected), "rel")


def _abs(name, criterion, measured, expected, tol):
    return _check(name, criterion, measured, expected, tol, abs(measured - expected) <= tol)


def _band(name, criterion, measured, expected, se, n_se=N_SE):
    chk = _check(name, criterion, measured, expected, n_se * se, abs(measured - expected) <= n_se * se, "se_band")
    chk["se"] = se
    return chk


def _insufficient(name, criterion, n):
    return {
        "name": name,
        "criterion": criterion,
        "status": "insufficient_n",
        "detail": f"n={n} < {MIN_MC_SAMPLES}; SE bands are not meaningful",
    }


# closed forms ---------------------------------------------------------------


def check_fig3():
    out = []
    for rho in FIG3_RHOS:
        for w, expected in zip(FIG3_OMEGAS, FIG3_PUBLISHED[rho]):
            out.append(_rel(f"fig3 Omega(omega={w:g}, rho={rho:g})", 1, information_ratio_er(w, rho), expected, 1e-4))
    return out


def check_fig7():
    out = []
    for rho in FIG7_RHOS:
        exact, approx = FIG7_PUBLISHED[rho]
        out.append(_rel(f"fig7 max IR rho={rho:g}", 2, max_ir_zero_drift(rho), exact, 1e-4))
        out.append(_rel(f"fig7 approximation rho={rho:g}", 2, ir_asymptotic_approx(rho), approx, 1e-4))
    return out


def check_special_values():
    out = [_abs("A(0) = sqrt(2/pi)", 3, a_of_theta(0.0), math.sqrt(2.0 / math.pi), 1e-12)]
    for theta, expected in PUBLISHED_A.items():
        out.append(_abs(f"A({theta:g})", 3, a_of_theta(theta), expected, 5e-4))
    out.append(_abs("Omega(0, 1)", 3, ir_zero_drift(1.0), PUBLISHED_IR_CEILING, 5e-4))
    monthly = annualized_ir_bound(12)
    chk = _check("annualized monthly IR ceiling", 3, monthly, 4.6, [4.55, 4.62], 4.55 <= monthly <= 4.62, "interval")
    out.append(chk)
    return out


def check_zeta_cross_validation():
    out = []
    for rho in np.round(np.arange(0.05, 0.951, 0.05), 2):
        rho = float(rho)
        quad = zeta_quadrature(SecurityModel(mu=0.0, sigma=1.0, rho=rho))
        out.append(_abs(f"zeta quadrature vs closed form rho={rho:g}", 4, quad, zeta_closed_form(rho), 1e-8))
    return out


def check_fig8_minimum():
    grid = np.round(np.arange(0.5, 0.8 + 1e-9, 0.005), 3)
    rows = comparison_curves([float(r) for r in grid])
    best = min(rows, key=lambda row: row.er_ratio)
    return [
        _check("fig8 minimum value", 5, best.er_ratio, 1.15, [1.14, 1.16], 1.14 <= best.er_ratio <= 1.16, "interval"),
        _check("fig8 minimizing rho", 5, best.rho, 0.65, [0.62, 0.68], 0.62 <= best.rho <= 0.68, "interval"),
    ]


def efficiency_grid():
    """50 models with mu > 0 (5 mu x 2 sigma x 5 rho, rho = 0 included)."""
    return [
        SecurityModel(mu=mu, sigma=sigma, rho=rho)
        for mu in (0.001, 0.0025, 0.005, 0.01, 0.02)
        for sigma in (0.05, 0.1)
        for rho in (0.0, 0.25, 0.5, 0.75, 1.0)
    ]


def check_efficiency_chain():
    lower_violations = upper_violations = equality_failures = 0
    for model in efficiency_grid():
        er, big_m, abs_r = efficiency_chain(model)
        lower_violations += not er <= big_m + 1e-15
        upper_violations += not big_m <= abs_r + 1e-15
        is_equal = abs(big_m - er) <= 1e-12
        equality_failures += is_equal != (model.rho == 0.0)
    return [
        _check("E(R) <= M on 50-point grid", 9, lower_violations, 0, 0, lower_violations == 0, "count"),
        _check("M <= E|R| on 50-point grid", 9, upper_violations, 0, 0, upper_violations == 0, "count"),
        _check("E(R) == M exactly when rho == 0", 9, equality_failures, 0, 0, equality_failures == 0, "count"),
    ]


def closed_form_checks():
    return (
        check_fig3()
        + check_fig7()
        + check_special_values()
        + check_zeta_cross_validation()
        + check_fig8_minimum()
        + check_efficiency_chain()
    )


# Monte Carlo ----------------------------------------------------------------

MC_ER_GRID = [SecurityModel(mu=mu, sigma=0.05, rho=rho) for mu in (0.0, 0.01) for rho in (0.3, 0.6, 0.9)]
MC_IR_RHOS = (0.3, 0.6, 0.9)


def check_mc_er(n, seed, stream=0):
    out = []
    for i, model in enumerate(MC_ER_GRID):
        label = f"mu={model.mu:g}, rho={model.rho:g}"
        if n < MIN_MC_SAMPLES:
            out.append(_insufficient(f"max-ER MC {label}", 6, n))
            continue
        res = evaluate_strategy(optimal_er_notional(model), model, McConfig(seed, stream + 10 + i, n))
        stats = strategy_stats_er(model)
        out.append(_band(f"max-ER mean {label}", 6, res.mean, stats.expected_return, res.se_mean))
        out.append(_band(f"max-ER SD {label}", 6, res.std_dev, stats.std_dev, res.se_std_dev))
        if model.mu == 0.0:
            out.append(_band(f"max-ER hit rate {label}", 6, res.hit_rate, prob_positive(model.rho), res.se_hit_rate))
    return out


def check_mc_ir(n, seed, stream=0, sigma=0.05):
    out = []
    for i, rho in enumerate(MC_IR_RHOS):
        if n < MIN_MC_SAMPLES:
            out.append(_insufficient(f"max-IR MC rho={rho:g}", 7, n))
            continue
        model = SecurityModel(mu=0.0, sigma=sigma, rho=rho)
        sol = ir_solution(model)
        res = evaluate_strategy(sol.notional, model, McConfig(seed, stream + 20 + i, n))
        out.append(_band(f"max-IR IR rho={rho:g}", 7, res.information_ratio, sol.max_ir, res.se_information_ratio))
        out.append(_band(f"max-IR mean rho={rho:g}", 7, res.mean, sol.expected_return, res.se_mean))
    return out


def random_tabulated(rng: np.random.Generator, knots: int = 6, span: float = 3.0) -> Tabulated:
    grid = np.sort(rng.uniform(-span, span, size=knots))
    return Tabulated(grid, rng.uniform(-1.0, 1.0, size=knots))


DOMINANCE_MODEL = SecurityModel(mu=0.0, sigma=1.0, rho=0.7)


def check_dominance(n, seed, stream=0, count=100):
    if n < MIN_MC_SAMPLES:
        return [_insufficient("dominance sweep", 8, n), _insufficient("perturbation", 8, n)]
    rng = np.random.Generator(np.random.Philox(key=np.array([seed, stream + 99], dtype=np.uint64)))
    candidates = [random_tabulated(rng) for _ in range(count)]
    report = dominance_sweep(DOMINANCE_MODEL, candidates, McConfig(seed, stream + 30, n))
    mean_viol = sum(not row.mean_ok for row in report.rows)
    ir_viol = sum(not row.ir_ok for row in report.rows)
    delta, se = perturbation_test(
        DOMINANCE_MODEL, SignThreshold(0.0), (0.5, 1.5), -0.1, McConfig(seed, stream + 31, n)
    )
    perturb = _check("perturbation lowers mean beyond 4 SE", 8, delta, "< 0", N_SE * se, delta < -N_SE * se, "se_band")
    perturb["se"] = se
    return [
        _check(f"mean <= M + 4 SE for {count} random notionals", 8, mean_viol, 0, 0, mean_viol == 0, "count"),
        _check(f"IR <= max IR + 4 SE for {count} random notionals", 8, ir_viol, 0, 0, ir_viol == 0, "count"),
        perturb,
    ]


ESTIMATION_MODEL = SecurityModel(mu=0.01, sigma=0.05, rho=0.3)
FIXTURE_SEED = 7
CONSISTENCY_SIZES = (10**2, 10**3, 10**4, 10**5, 10**6)


def check_estimation(seed, n_boot=1000):
    true_m = ESTIMATION_MODEL.mu / (ESTIMATION_MODEL.rho * ESTIMATION_MODEL.sigma)
    est = estimate_model(synthetic_dataset(ESTIMATION_MODEL, 10**5, FIXTURE_SEED), n_boot=n_boot, seed=seed)
    out = [
        _band("m_hat (moment ratio) vs 2/3", 10, est.m_hat, true_m, est.standard_errors["m_hat"], 3.0),
        _band("m_hat (plug-in) vs 2/3", 10, est.m_hat_plugin, true_m, est.standard_errors["m_hat_plugin"], 3.0),
    ]
    out.extend(consistency_checks(seed))
    return out


def consistency_errors(seed, sizes=CONSISTENCY_SIZES):
    """|m_hat - m| on nested prefixes of one seeded sample."""
    true_m = ESTIMATION_MODEL.mu / (ESTIMATION_MODEL.rho * ESTIMATION_MODEL.sigma)
    full = synthetic_dataset(ESTIMATION_MODEL, max(sizes), seed, stream=1)
    errs = []
    for n in sizes:
        est = estimate_model(Dataset(full.h[:n], full.r[:n]), n_boot=0)
        errs.append(abs(est.m_hat - true_m))
    return errs


def consistency_checks(seed):
    errs = consistency_errors(seed)
    steps = sum(b <= a for a, b in zip(errs, errs[1:]))
    return [
        _check("m_hat error nonincreasing in >= 3 of 4 steps", 10, steps, ">= 3", 0, steps >= 3, "count"),
        _check("m_hat error at n=1e6", 10, errs[-1], "< 0.05", 0.05, errs[-1] < 0.05, "bound"),
    ]


def check_parallel_merge(n, seed, stream=0, parts=8):
    if n < MIN_MC_SAMPLES:
        return [_insufficient("parallel vs serial MC", 11, n)]
    model = SecurityModel(mu=0.01, sigma=0.05, rho=0.4)
    notional = optimal_er_notional(model)
    cfg = McConfig(seed, stream + 40, n)
    serial = evaluate_strategy(notional, model, cfg)
    parallel = evaluate_strategy(notional, model, cfg, parts=parts, workers=parts)
    return [
        _rel("parallel vs serial mean", 11, parallel.mean, serial.mean, 1e-12),
        _rel("parallel vs serial SD", 11, parallel.std_dev, serial.std_dev, 1e-12),
    ]


def mc_checks(n, seed, stream=0):
    return (
        check_mc_er(n, seed, stream)
        + check_mc_ir(n, seed, stream)
        + check_dominance(n, seed, stream)
        + check_estimation(seed)
        + check_parallel_merge(n, seed, stream)
    )


SUITES = ("closed-forms", "mc", "all")


def run_suite(suite: str, n: int = 10**7, seed: int = 42, stream: int = 0) -> dict:
    """Run a suite; ``stream`` offsets every Monte Carlo substream index."""
    if suite not in SUITES:
        raise ValueError(f"unknown suite {suite!r}; choose from {', '.join(SUITES)}")
    checks = []
    if suite in ("closed-forms", "all"):
        checks += closed_form_checks()
    if suite in ("mc", "all"):
        checks += mc_checks(n, seed, stream)
    counts = {s: sum(c["status"] == s for c in checks) for s in ("pass", "fail", "insufficient_n")}
    return {
        "suite": suite,
        "n": n,
        "seed": seed,
        "stream": stream,
        "summary": counts,
        "ok": counts["fail"] == 0,
        "failed": [c["name"] for c in checks if c["status"] == "fail"],
        "checks": checks,
    }

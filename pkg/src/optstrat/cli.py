"""Command-line interface: ``optstrat {tables,curves,optimal,estimate,verify}``.

Exit codes: 0 success, 2 invalid arguments, 3 data/format error,
4 verification failure, 5 numerical nonconvergence.
"""

from __future__ import annotations

import argparse
import csv
import math
import os
import sys
import warnings
from datetime import date

import numpy as np

from optstrat import figures, verify
from optstrat.errors import DataError, NonUnimodalError, OptStratError, QuadratureError
from optstrat.estimate import (
    MIN_RECOMMENDED_N,
    Dataset,
    estimate_model,
    momentum_indicator,
    reduce_indicators,
)
from optstrat.max_er import er_solution
from optstrat.max_ir import ir_solution
from optstrat.model import SecurityModel
from optstrat.output import dump_report

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_VERIFY = 4
EXIT_NUMERIC = 5

DEFAULT_SEED = 42


class UsageError(Exception):
    pass


def _default_seed() -> int:
    raw = os.environ.get("OPTSTRAT_SEED")
    if raw is None:
        return DEFAULT_SEED
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"OPTSTRAT_SEED must be an integer, got {raw!r}") from None


def _count(text: str) -> int:
    """Accept counts like 10000000 or 1e7."""
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not value.is_integer() or value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return int(value)


def _model_dict(m: SecurityModel) -> dict:
    return {"mu": m.mu, "sigma": m.sigma, "rho": m.rho, "mu_H": m.mu_H, "sigma_H": m.sigma_H}


def _raw_h(model: SecurityModel, z: float | None, flipped: bool) -> float | None:
    """Standardized indicator value back in raw units."""
    if z is None:
        return None
    return model.mu_H + model.sigma_H * (-z if flipped else z)


def _buy_and_hold(model: SecurityModel) -> dict:
    direction = 1 if model.mu >= 0 else -1
    return {
        "direction": direction,
        "expected_return": abs(model.mu),
        "std_dev": model.sigma,
        "information_ratio": abs(model.omega),
    }


def optimal_report(model: SecurityModel, objective: str) -> dict:
    """JSON-ready description of the optimal strategy for ``model``."""
    report: dict = {"input": _model_dict(model), "objective": objective}
    if objective == "er":
        sol = er_solution(model)
        report.update(
            standardized_model=_model_dict(sol.model),
            flipped=sol.flipped,
            no_knowledge=sol.no_knowledge,
            notional=sol.notional.describe(),
            m_ratio=sol.m,
            threshold=sol.threshold,
            threshold_raw=_raw_h(model, sol.threshold, sol.flipped),
            stats=sol.stats.as_dict(),
        )
        if sol.no_knowledge:
            report["note"] = "no knowledge: rho = 0, so buy and hold on the sign of mu"
        if sol.degenerate:
            report["note"] = "no knowledge and zero drift: every notional earns 0; buy-and-hold reported"
    else:
        sol = ir_solution(model)
        report.update(
            standardized_model=_model_dict(sol.model),
            flipped=sol.flipped,
            regime=sol.regime,
            notional=sol.notional.describe(),
            zeta=sol.zeta,
            b=sol.b,
            h_plus=sol.h_plus,
            h_minus=sol.h_minus,
            h_plus_raw=_raw_h(model, sol.h_plus, sol.flipped),
            h_minus_raw=_raw_h(model, sol.h_minus, sol.flipped),
            stats={
                "expected_return": sol.expected_return,
                "std_dev": sol.std_dev,
                "information_ratio": sol.max_ir,
            },
        )
        if sol.regime == "no_knowledge":
            report["note"] = "no knowledge: rho = 0, so buy and hold on the sign of mu"
        elif sol.regime == "perfect_knowledge":
            report["note"] = "perfect knowledge: rho = 1, the max IR is unbounded; limit values reported"
    report["buy_and_hold"] = _buy_and_hold(model)
    return report


# CSV input ------------------------------------------------------------------


def _parse_float(cell: str, line: int, column: str) -> float:
    try:
        value = float(cell)
    except ValueError:
        raise DataError(f"line {line}, column {column!r}: cannot parse {cell!r} as a number") from None
    if not math.isfinite(value):
        raise DataError(f"line {line}, column {column!r}: non-finite value {cell!r}")
    return value


def read_input(path: str):
    """Read a pairs, multi-indicator or prices CSV.

    Returns (kind, header, rows) where kind is "pairs", "multi" or "prices".
    """
    try:
        fh = open(path, newline="", encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot open {path}: {exc.strerror}") from None
    with fh:
        reader = csv.reader(fh)
        header = [c.strip() for c in next(reader, [])]
        if header == ["h", "r"]:
            kind = "pairs"
        elif header == ["date", "price"]:
            kind = "prices"
        elif (
            len(header) >= 2
            and header[-1] == "r"
            and header[:-1] == [f"h{j + 1}" for j in range(len(header) - 1)]
        ):
            kind = "multi"
        else:
            raise DataError(f"line 1: unrecognized header {','.join(header)!r}; expected h,r or h1,...,hk,r or date,price")
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(header):
                raise DataError(f"line {lineno}: expected {len(header)} fields, got {len(row)}")
            if kind == "prices":
                try:
                    d = date.fromisoformat(row[0].strip())
                except ValueError:
                    raise DataError(f"line {lineno}, column 'date': {row[0]!r} is not an ISO-8601 date") from None
                rows.append((d, _parse_float(row[1].strip(), lineno, "price")))
            else:
                rows.append([_parse_float(c.strip(), lineno, name) for c, name in zip(row, header)])
    if not rows:
        raise DataError(f"{path}: no data rows")
    return kind, header, rows


def estimate_report(path: str, lookback: int | None, objective: str | None, force: bool,
                    n_boot: int, seed: int) -> dict:
    kind, header, rows = read_input(path)
    report: dict = {"input": path, "format": kind}
    if kind == "prices":
        if lookback is None:
            raise UsageError("a prices file needs --lookback")
        dates = [d for d, _ in rows]
        data = momentum_indicator(dates, [p for _, p in rows], lookback)
        report["lookback"] = lookback
    elif kind == "multi":
        arr = np.asarray(rows)
        red = reduce_indicators(arr[:, :-1], arr[:, -1], names=header[:-1])
        data = red.combined
        report["reduction"] = {
            "columns": ["intercept"] + header[:-1],
            "weights": red.weights,
            "std_errors": red.std_errors,
            "r_squared": red.r_squared,
        }
    else:
        arr = np.asarray(rows)
        data = Dataset(arr[:, 0], arr[:, 1])

    n = len(data)
    if n < MIN_RECOMMENDED_N and not force:
        raise DataError(f"only {n} observation(s) (< {MIN_RECOMMENDED_N}); rerun with --force to estimate anyway")
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        est = estimate_model(data, n_boot=n_boot, seed=seed)
    report["estimate"] = est.as_dict()
    if caught:
        report["warnings"] = [str(w.message) for w in caught]
    report["optimal_er"] = {
        "threshold_standardized": est.threshold_hat,
        "threshold_raw": est.threshold_raw,
        "direction_above_threshold": -1 if est.flipped else 1,
    }
    if objective == "ir":
        std = SecurityModel(mu=est.model.mu, sigma=est.model.sigma, rho=abs(est.model.rho))
        if est.degenerate:
            report["optimal_ir"] = {"note": "near-degenerate correlation; IR notional is singular"}
        else:
            sol = ir_solution(std)
            report["optimal_ir"] = {
                "regime": sol.regime,
                "zeta": sol.zeta,
                "max_information_ratio": sol.max_ir,
                "h_plus": sol.h_plus,
                "h_minus": sol.h_minus,
                "h_plus_raw": _raw_h(est.model, sol.h_plus, est.flipped),
                "h_minus_raw": _raw_h(est.model, sol.h_minus, est.flipped),
            }
    return report


# argument parsing -----------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="optstrat", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add_output(p):
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--precision", choices=("short", "full"), default="short")

    p = sub.add_parser("tables", help="reproduce the published tables")
    p.add_argument("which", choices=figures.TABLES)
    p.add_argument("--sigma", type=float, default=1.0, help="table1 only")
    p.add_argument("--rho", type=float, default=0.5, help="table1 only")
    add_output(p)

    p = sub.add_parser("curves", help="sample the published curves on a grid")
    p.add_argument("which", choices=figures.CURVES)
    p.add_argument("--x-min", type=float)
    p.add_argument("--x-max", type=float)
    p.add_argument("--points", type=int, default=201)
    add_output(p)

    p = sub.add_parser("optimal", help="optimal strategy for a bivariate-normal model")
    p.add_argument("--mu", type=float, required=True)
    p.add_argument("--sigma", type=float, required=True)
    p.add_argument("--rho", type=float, required=True)
    p.add_argument("--mu-h", type=float, default=0.0)
    p.add_argument("--sigma-h", type=float, default=1.0)
    p.add_argument("--objective", choices=("er", "ir"), default="er")

    p = sub.add_parser("estimate", help="estimate the model and optimal threshold from a CSV")
    p.add_argument("input")
    p.add_argument("--lookback", type=int)
    p.add_argument("--objective", choices=("er", "ir"), default="er")
    p.add_argument("--force", action="store_true", help="estimate even with fewer than 30 rows")
    p.add_argument("--bootstrap", type=int, default=1000, help="bootstrap resamples (0 disables)")
    p.add_argument("--seed", type=int)

    p = sub.add_parser("verify", help="run the verification suites")
    p.add_argument("suite", choices=verify.SUITES)
    p.add_argument("--n", type=_count, default=10**7)
    p.add_argument("--seed", type=int)
    p.add_argument("--stream", type=int, default=0, help="offset added to every check's stream")
    return parser


def run(argv=None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        if args.command == "tables":
            table = figures.build_table(args.which, sigma=args.sigma, rho=args.rho)
            out.write(table.render(args.format, args.precision))
        elif args.command == "curves":
            table = figures.build_curve(args.which, args.x_min, args.x_max, args.points)
            out.write(table.render(args.format, args.precision))
        elif args.command == "optimal":
            model = SecurityModel(mu=args.mu, sigma=args.sigma, rho=args.rho, mu_H=args.mu_h, sigma_H=args.sigma_h)
            out.write(dump_report(optimal_report(model, args.objective)))
        elif args.command == "estimate":
            seed = args.seed if args.seed is not None else _default_seed()
            report = estimate_report(args.input, args.lookback, args.objective, args.force, args.bootstrap, seed)
            out.write(dump_report(report))
        elif args.command == "verify":
            seed = args.seed if args.seed is not None else _default_seed()
            report = verify.run_suite(args.suite, n=args.n, seed=seed, stream=args.stream)
            out.write(dump_report(report))
            if not report["ok"]:
                print(f"verification failed: {', '.join(report['failed'])}", file=sys.stderr)
                return EXIT_VERIFY
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (UsageError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (QuadratureError, NonUnimodalError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OptStratError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()

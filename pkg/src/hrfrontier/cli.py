"""Command-line interface: solve markets from files and emit JSON reports.

Subcommands: ``frontier`` (special portfolios + frontier parabolas),
``multiperiod`` (adds horizon propagation), ``mhr`` (monotone ratio of a
scenario CSV), ``hj`` (kernel bounds), and ``verify`` (built-in benchmark
regression).  Reports are deterministic: fixed key order and shortest
round-trip float formatting.

Exit codes: 0 success, 1 invalid input or usage, 2 internal invariant
violation (including a failed ``verify``).
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import dataclass
from typing import Any, Sequence

import numpy as np

from . import benchmark
from .errors import HRFrontierError, InternalInvariantError, InvalidInputError
from .frontier import (
    FrontierCoefficients,
    check_hansen_bound,
    frontier_coefficients,
    frontier_points,
    special_portfolios,
)
from .kernel import hj_bounds
from .market import market_from_json
from .moments import ScenarioPayoff
from .monotone import monotone_hansen_ratio
from .multiperiod import multiperiod_frontier, propagate


@dataclass(frozen=True)
class GridSpec:
    lo: float
    hi: float
    count: int

    def __post_init__(self) -> None:
        if self.count < 2:
            raise InvalidInputError("grid needs at least two points", count=self.count)
        if not self.hi > self.lo:
            raise InvalidInputError("grid upper bound must exceed the lower bound")

    def points(self) -> list[float]:
        return [float(x) for x in np.linspace(self.lo, self.hi, self.count)]


@dataclass(frozen=True)
class RunConfig:
    """Parsed invocation: one command plus its inputs, outputs, and knobs."""

    command: str
    input_path: str | None = None
    output_path: str | None = None
    points_csv: str | None = None
    grid: GridSpec | None = None
    periods: int = 1
    renormalize: bool = False
    allow_no_downside: bool = False
    prob_tol: float = 1e-12
    rel_tol: float = benchmark.DEFAULT_REL_TOL

    def __post_init__(self) -> None:
        if self.prob_tol <= 0 or self.rel_tol <= 0:
            raise InvalidInputError("tolerances must be positive")


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        raise _UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="hrfrontier",
        description="Mean-variance frontier toolkit built on mean/L2-norm ratios.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_output(p: argparse.ArgumentParser) -> None:
        p.add_argument("--output", help="write the JSON report here (default stdout)")

    def add_market_input(p: argparse.ArgumentParser) -> None:
        p.add_argument("--input", required=True, help="market JSON file")

    def add_points(p: argparse.ArgumentParser) -> None:
        p.add_argument("--points-csv", help="also write frontier points (CSV mu,omega,sigma)")
        p.add_argument(
            "--grid",
            help="mean grid for --points-csv as MIN:MAX:COUNT (count >= 2)",
        )

    p_frontier = sub.add_parser("frontier", help="special portfolios and frontier parabolas")
    add_market_input(p_frontier)
    add_output(p_frontier)
    add_points(p_frontier)

    p_multi = sub.add_parser("multiperiod", help="n-period frontier under IID returns")
    add_market_input(p_multi)
    add_output(p_multi)
    add_points(p_multi)
    p_multi.add_argument("--periods", type=int, required=True, help="number of periods n >= 1")

    p_mhr = sub.add_parser("mhr", help="monotone ratio of a scenario CSV payoff")
    p_mhr.add_argument("--input", required=True, help="scenario CSV (probability,value)")
    add_output(p_mhr)
    p_mhr.add_argument(
        "--renormalize",
        action="store_true",
        help="rescale probabilities to sum to one (never done silently)",
    )
    p_mhr.add_argument(
        "--allow-no-downside",
        action="store_true",
        help="report the unattained supremum for nonnegative payoffs instead of failing",
    )
    p_mhr.add_argument(
        "--prob-tol",
        type=float,
        default=1e-12,
        help="acceptance window for the probability sum (default 1e-12)",
    )

    p_hj = sub.add_parser("hj", help="pricing-kernel bounds of a market")
    add_market_input(p_hj)
    add_output(p_hj)

    p_verify = sub.add_parser("verify", help="re-run the built-in benchmark regression")
    add_output(p_verify)
    p_verify.add_argument(
        "--rel-tol",
        type=float,
        default=benchmark.DEFAULT_REL_TOL,
        help="relative tolerance per value (default 1e-5)",
    )

    return parser


def _parse_grid(text: str | None) -> GridSpec | None:
    if text is None:
        return None
    parts = text.split(":")
    if len(parts) != 3:
        raise InvalidInputError("grid spec must be MIN:MAX:COUNT", grid=text)
    try:
        lo, hi, count = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise InvalidInputError("could not parse grid spec", grid=text) from None
    return GridSpec(lo=lo, hi=hi, count=count)


def parse_config(argv: Sequence[str]) -> RunConfig:
    args = build_parser().parse_args(argv)
    return RunConfig(
        command=args.command,
        input_path=getattr(args, "input", None),
        output_path=getattr(args, "output", None),
        points_csv=getattr(args, "points_csv", None),
        grid=_parse_grid(getattr(args, "grid", None)),
        periods=getattr(args, "periods", 1),
        renormalize=getattr(args, "renormalize", False),
        allow_no_downside=getattr(args, "allow_no_downside", False),
        prob_tol=getattr(args, "prob_tol", 1e-12),
        rel_tol=getattr(args, "rel_tol", benchmark.DEFAULT_REL_TOL),
    )


def _emit(report: dict[str, Any], output_path: str | None) -> None:
    text = json.dumps(report, indent=2, allow_nan=False) + "\n"
    if output_path:
        with open(output_path, "w", encoding="utf-8") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)


def _write_points(
    coefficients: FrontierCoefficients, config: RunConfig
) -> None:
    if config.points_csv is None:
        return
    if config.grid is None:
        raise InvalidInputError("--points-csv needs --grid MIN:MAX:COUNT")
    points = frontier_points(coefficients, config.grid.points())
    with open(config.points_csv, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["mu", "omega", "sigma"])
        for point in points:
            writer.writerow([repr(point.mu), repr(point.omega), repr(point.sigma)])


def _cmd_frontier(config: RunConfig) -> int:
    market = market_from_json(config.input_path)
    sp = special_portfolios(market)
    coeffs = frontier_coefficients(sp)
    bound = check_hansen_bound(sp)
    report = {
        "portfolios": sp.to_dict(),
        "frontier": coeffs.to_dict(),
        "hansen_bound": {
            "total": bound.total,
            "slack": bound.slack,
            "pass": bound.passed,
        },
    }
    _emit(report, config.output_path)
    _write_points(coeffs, config)
    return 0


def _cmd_multiperiod(config: RunConfig) -> int:
    market = market_from_json(config.input_path)
    sp = special_portfolios(market)
    stats_n = propagate(sp, config.periods)
    coeffs = multiperiod_frontier(stats_n)
    report = {
        "portfolios": sp.to_dict(),
        "multiperiod": stats_n.to_dict(),
        "frontier": coeffs.to_dict(),
    }
    _emit(report, config.output_path)
    _write_points(coeffs, config)
    return 0


def _cmd_mhr(config: RunConfig) -> int:
    payoff = ScenarioPayoff.from_csv(
        config.input_path,
        renormalize=config.renormalize,
        sum_tol=config.prob_tol if config.renormalize else 1e-12,
    )
    result = monotone_hansen_ratio(payoff, allow_no_downside=config.allow_no_downside)
    _emit(result.to_dict(), config.output_path)
    return 0


def _cmd_hj(config: RunConfig) -> int:
    market = market_from_json(config.input_path)
    _emit(hj_bounds(market).to_dict(), config.output_path)
    return 0


def _cmd_verify(config: RunConfig) -> int:
    report = benchmark.verification_report(rel_tol=config.rel_tol)
    _emit(report, config.output_path)
    return 0 if report["all_pass"] else 2


_COMMANDS = {
    "frontier": _cmd_frontier,
    "multiperiod": _cmd_multiperiod,
    "mhr": _cmd_mhr,
    "hj": _cmd_hj,
    "verify": _cmd_verify,
}


def run(config: RunConfig) -> int:
    return _COMMANDS[config.command](config)


def _error_json(code: str, message: str, context: dict[str, Any]) -> None:
    sys.stderr.write(
        json.dumps({"code": code, "message": message, "context": context}) + "\n"
    )


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        config = parse_config(argv)
        return run(config)
    except _UsageError as exc:
        _error_json("usage", str(exc), {})
        return 1
    except InternalInvariantError as exc:
        _error_json(exc.code, exc.message, exc.context)
        return 2
    except HRFrontierError as exc:
        _error_json(exc.code, exc.message, exc.context)
        return 1
    except OSError as exc:
        _error_json("io_error", str(exc), {})
        return 1


if __name__ == "__main__":
    sys.exit(main())

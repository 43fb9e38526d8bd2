#!/usr/bin/env python3
"""Batch front end: solve one instance, run a sweep, run the property battery."""
import argparse
import csv
import json
import logging
import os
import sys
import time
from dataclasses import dataclass
from typing import List
from typing import Optional

import numpy as np

from swiptgame import __version__
from swiptgame.baselines import GridSpec
from swiptgame.channel import derive_seed
from swiptgame.configure import Configuration
from swiptgame.configure import create_from_config_file
from swiptgame.constant import CSV_DIGITS
from swiptgame.constant import FULL_TRIALS
from swiptgame.exception import ConfigParseError
from swiptgame.exception import ConfigurationError
from swiptgame.experiments import SweepResult
from swiptgame.experiments import run_sweep
from swiptgame.game import best_response_curve
from swiptgame.game import solve
from swiptgame.logging import configure_logging
from swiptgame.util import config_digest
from swiptgame.util import format_number
from swiptgame.verify import run_battery

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NONCONVERGED = 2

CSV_COLUMNS = [
    "sweep_param",
    "value",
    "scheme",
    "mean_sum_rate",
    "ci_half_width",
    "mean_rho",
    "mean_best_rate",
    "mean_worst_rate",
    "mean_iterations",
    "trials",
    "config_digest",
]

# Seed stream of the solver's random start, kept apart from the channel draw (stream 0)
START_STREAM = 1
TRACE_RESOLUTION = 1e-3


@dataclass(frozen=True)
class RunManifest:
    command: str
    config_digest: Optional[str]
    master_seed: Optional[int]
    version: str
    runtime_seconds: float

    def to_dict(self) -> dict:
        return {
            "command": self.command,
            "config_digest": self.config_digest,
            "master_seed": self.master_seed,
            "version": self.version,
            "runtime_seconds": self.runtime_seconds,
        }


def _manifest(command, digest, seed, started) -> RunManifest:
    return RunManifest(
        command=command,
        config_digest=digest,
        master_seed=seed,
        version=__version__,
        runtime_seconds=time.perf_counter() - started,
    )


def report_config_error(path: str, err: ConfigurationError) -> None:
    if isinstance(err, ConfigParseError) and err.line is not None:
        message = f"{path}: line {err.line}: {err}"
    elif err.field:
        message = f"{path}: field '{err.field}': {err}"
    else:
        message = f"{path}: {err}"
    logger.error(message)
    print(message, file=sys.stderr)


def _load(config_path: str, debug: bool = False) -> Configuration:
    try:
        conf = create_from_config_file(Configuration, config_path)
    except OSError as err:
        raise ConfigurationError(f"Cannot read the configuration: {err.strerror or err}")
    if conf["logging"]:
        if not isinstance(conf["logging"], dict):
            raise ConfigurationError("The logging section must be a mapping", field="logging")
        try:
            configure_logging(debug=debug, config=conf["logging"])
        except (ValueError, TypeError) as err:
            raise ConfigurationError(f"Invalid logging configuration: {err}", field="logging")
    return conf


def write_json(path: str, payload: dict) -> None:
    with open(path, "w", encoding="utf-8") as fp:
        json.dump(payload, fp, indent=2)
        fp.write("\n")


def write_sweep_csv(path: str, result: SweepResult, digest: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fp:
        writer = csv.writer(fp)
        writer.writerow(CSV_COLUMNS)
        for value, stat in result.rows():
            writer.writerow(
                [
                    result.parameter,
                    format_number(value, CSV_DIGITS),
                    stat.scheme,
                    format_number(stat.mean_sum_rate, CSV_DIGITS),
                    format_number(stat.ci_half_width, CSV_DIGITS),
                    format_number(stat.mean_rho, CSV_DIGITS),
                    format_number(stat.mean_best_rate, CSV_DIGITS),
                    format_number(stat.mean_worst_rate, CSV_DIGITS),
                    format_number(stat.mean_iterations, CSV_DIGITS),
                    stat.trials,
                    digest,
                ]
            )


def sidecar_path(output_path: str) -> str:
    root, _ = os.path.splitext(output_path)
    return f"{root}.manifest.json"


def cmd_solve(
    config_path: str, seed: Optional[int] = None, output_path: str = "solve.json", debug=False
) -> int:
    started = time.perf_counter()
    try:
        conf = _load(config_path, debug)
        scenario_conf = conf["scenario"]
        _seed = scenario_conf["seed"] if seed is None else seed
        scenario, channels = scenario_conf.instance(_seed)
        conf["solver"].check_links(scenario.n)
        options = conf["solver"].to_options(seed=derive_seed(_seed, START_STREAM))
    except ConfigurationError as err:
        report_config_error(config_path, err)
        return EXIT_CONFIG

    result = solve(scenario, channels, options)
    manifest = _manifest("solve", config_digest(config_path), _seed, started)
    write_json(
        output_path,
        {
            "scenario": scenario.to_dict(),
            "channels": channels.to_dict(),
            "equilibrium": result.to_dict(),
            "manifest": manifest.to_dict(),
        },
    )

    if not result.converged:
        logger.error(f"Solver did not converge, residual {result.residual:.3e}")
        return EXIT_NONCONVERGED
    return EXIT_OK


def cmd_sweep(
    config_path: str,
    output_path: str = "sweep.csv",
    workers: Optional[int] = None,
    trials: Optional[int] = None,
    full: bool = False,
    seed: Optional[int] = None,
    debug=False,
) -> int:
    started = time.perf_counter()
    try:
        conf = _load(config_path, debug)
        if conf["sweep"] is None:
            raise ConfigurationError("The configuration has no sweep section", field="sweep")
        sweep_config = conf["sweep"].to_sweep_config(
            conf["scenario"],
            conf["solver"],
            trials=FULL_TRIALS if full else trials,
            workers=workers,
            master_seed=seed,
        )
    except ConfigurationError as err:
        report_config_error(config_path, err)
        return EXIT_CONFIG

    result = run_sweep(sweep_config)
    digest = config_digest(config_path)
    write_sweep_csv(output_path, result, digest)

    manifest = _manifest("sweep", digest, sweep_config.master_seed, started)
    write_json(sidecar_path(output_path), {"manifest": manifest.to_dict(), "csv": output_path})

    failures = sum(stat.failures for _, stat in result.rows())
    if failures:
        logger.error(f"{failures} trials did not converge")
        return EXIT_NONCONVERGED
    return EXIT_OK


def cmd_verify(
    seed: int = 0, instances: int = 100, starts: int = 100, output_path: Optional[str] = None
) -> int:
    started = time.perf_counter()
    if instances <= 0:
        print("warning: no instances requested, all checks pass vacuously", file=sys.stderr)

    report = run_battery(seed=seed, instances=max(instances, 0), starts=starts)
    print(report.table())

    if output_path:
        payload = report.to_dict()
        payload["manifest"] = _manifest("verify", None, seed, started).to_dict()
        write_json(output_path, payload)

    return EXIT_OK if report.passed else EXIT_NONCONVERGED


def cmd_trace(
    config_path: str,
    seed: Optional[int] = None,
    output_path: str = "trace.json",
    starts: int = 3,
    debug=False,
) -> int:
    """Best-response curves of a two-link network and convergence trajectories."""
    started = time.perf_counter()
    try:
        conf = _load(config_path, debug)
        scenario_conf = conf["scenario"]
        _seed = scenario_conf["seed"] if seed is None else seed
        scenario, channels = scenario_conf.instance(_seed)
        conf["solver"].check_links(scenario.n)
    except ConfigurationError as err:
        report_config_error(config_path, err)
        return EXIT_CONFIG

    payload = {"scenario": scenario.to_dict(), "channels": channels.to_dict()}

    if scenario.n == 2:
        points = GridSpec(TRACE_RESOLUTION).points()
        curves = {}
        for i, j in [(0, 1), (1, 0)]:
            _, responses = best_response_curve(scenario, channels, i, j, points)
            curves[f"rho_{i + 1}(rho_{j + 1})"] = responses.tolist()
        payload["curves"] = {"points": points.tolist(), **curves}
    else:
        logger.info("Best-response curves are only traced for two-link networks")

    rng = np.random.default_rng(derive_seed(_seed, START_STREAM))
    trajectories = []
    converged = True
    for _ in range(starts):
        result = solve(scenario, channels, conf["solver"].to_options(seed=rng,
                                                                    record_trajectory=True))
        converged = converged and result.converged
        trajectories.append(result.to_dict())
    payload["trajectories"] = trajectories
    payload["manifest"] = _manifest("trace", config_digest(config_path), _seed, started).to_dict()
    write_json(output_path, payload)

    return EXIT_OK if converged else EXIT_NONCONVERGED


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="swiptgame", description=__doc__)
    parser.add_argument("--debug", action="store_true", help="Log at DEBUG level")
    sub = parser.add_subparsers(dest="command", required=True)

    _solve = sub.add_parser("solve", help="Equilibrium of one channel realization")
    _solve.add_argument("--config", required=True)
    _solve.add_argument("--seed", type=int, default=None)
    _solve.add_argument("--out", default="solve.json")

    _sweep = sub.add_parser("sweep", help="Monte Carlo sweep, CSV output")
    _sweep.add_argument("--config", required=True)
    _sweep.add_argument("--seed", type=int, default=None, help="Override the master seed")
    _sweep.add_argument("--out", default="sweep.csv")
    _sweep.add_argument("--workers", type=int, default=None)
    _sweep.add_argument("--trials", type=int, default=None)
    _sweep.add_argument("--full", action="store_true", help=f"Run {FULL_TRIALS} trials")

    _verify = sub.add_parser("verify", help="Property battery on random instances")
    _verify.add_argument("--seed", type=int, default=0)
    _verify.add_argument("--instances", type=int, default=100)
    _verify.add_argument("--starts", type=int, default=100)
    _verify.add_argument("--out", default=None)

    _trace = sub.add_parser("trace", help="Best-response curves and trajectories")
    _trace.add_argument("--config", required=True)
    _trace.add_argument("--seed", type=int, default=None)
    _trace.add_argument("--out", default="trace.json")
    _trace.add_argument("--starts", type=int, default=3)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(debug=args.debug)

    if args.command == "solve":
        return cmd_solve(args.config, args.seed, args.out, debug=args.debug)
    elif args.command == "sweep":
        return cmd_sweep(
            args.config,
            args.out,
            workers=args.workers,
            trials=args.trials,
            full=args.full,
            seed=args.seed,
            debug=args.debug,
        )
    elif args.command == "verify":
        return cmd_verify(args.seed, args.instances, args.starts, args.out)
    return cmd_trace(args.config, args.seed, args.out, args.starts, debug=args.debug)


if __name__ == "__main__":
    sys.exit(main())

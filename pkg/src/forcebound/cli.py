"""Batch command-line front end.

Subcommands: bound, protocol, figure2, simulate, validate. Tables are CSV,
reports are JSON; every emitted number is finite or the explicit tag
"no-information". Exit codes: 0 success, 2 config error, 3 validation
failure, 4 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import validate as validation_suite
from .bounds import (
    BoundInputs,
    NoInformationError,
    classical_fisher_momentum_min_uncertainty,
    force_bound_dimensionless,
    is_no_information,
    qfi_min,
)
from .gaussian import ChannelDescriptor
from .montecarlo import RngStream, run_experiment
from .protocol import (
    BracketError,
    asymptotic_ratio,
    delta_f_infinity,
    diffusive_bound,
    figure2_curve,
    optimal_tau,
    potential_sensitivity,
    sequential_ratio_squared,
)
from .scenario import Scenario, ScenarioError, parse_scenario

BOUND_SCHEMA = "forcebound.bound/1"
PROTOCOL_SCHEMA = "forcebound.protocol/1"
FIGURE2_SCHEMA = "forcebound.figure2/1"
SIMULATE_SCHEMA = "forcebound.simulate/1"

DEFAULT_FIGURE2_GRID = "0.5:1e6:60,log"


class NumericalError(RuntimeError):
    """A non-finite value reached an output boundary."""


def _fmt(value) -> str:
    """Render one cell: repr of a finite float, or the no-information tag."""
    if is_no_information(value):
        return "no-information"
    number = float(value)
    if not math.isfinite(number):
        raise NumericalError(f"non-finite value {number!r} reached the output layer")
    return repr(number)


def _write_text(out: str | None, text: str):
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def _csv_table(schema: str, header: list[str], rows: list[list[str]]) -> str:
    lines = [f"# schema: {schema}", ",".join(header)]
    lines.extend(",".join(row) for row in rows)
    return "\n".join(lines) + "\n"


def parse_grid(spec: str) -> list[float]:
    """Parse "start:stop:points[,log|lin]" into a grid of calibration energies."""
    body, _, scale = spec.partition(",")
    scale = scale or "log"
    if scale not in ("log", "lin"):
        raise ScenarioError(f"grid scale must be log or lin, got {scale!r}", "<grid>", 0)
    parts = body.split(":")
    if len(parts) != 3:
        raise ScenarioError(f"grid must be start:stop:points, got {body!r}", "<grid>", 0)
    try:
        start, stop = float(parts[0]), float(parts[1])
        points = int(parts[2])
    except ValueError as exc:
        raise ScenarioError(f"bad grid specification {spec!r}: {exc}", "<grid>", 0) from exc
    if points < 1 or start <= 0 or stop < start:
        raise ScenarioError(f"grid needs 0 < start <= stop and points >= 1, got {spec!r}", "<grid>", 0)
    if points == 1:
        return [start]
    if scale == "log":
        return list(np.geomspace(start, stop, points))
    return list(np.linspace(start, stop, points))


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_bound(args) -> int:
    scenario = parse_scenario(args.scenario)
    params = scenario.params
    channel = ChannelDescriptor.from_params(params, scenario.tau)
    nu = scenario.t_total / scenario.tau
    inputs = BoundInputs(
        eta=channel.eta,
        n_thermal=params.n_thermal,
        var_x0=scenario.var_x0,
        omega=params.omega,
        gamma=params.gamma,
        nu=nu,
    )
    fisher = classical_fisher_momentum_min_uncertainty(inputs, channel.d_factor)
    qfi = qfi_min(channel.eta, params.n_thermal, scenario.var_x0, params.omega, params.gamma, scenario.tau)
    delta_f_dimensionless = force_bound_dimensionless(inputs, channel.d_factor)
    if is_no_information(delta_f_dimensionless):
        delta_f_newton = delta_f_dimensionless
    else:
        delta_f_newton = params.force_scale * delta_f_dimensionless
    header = ["name", "eta", "d_factor", "nu", "fisher_momentum", "qfi", "delta_F", "delta_f_newton"]
    row = [
        scenario.name,
        _fmt(channel.eta),
        _fmt(channel.d_factor),
        _fmt(nu),
        _fmt(fisher),
        _fmt(qfi),
        _fmt(delta_f_dimensionless),
        _fmt(delta_f_newton),
    ]
    _write_text(args.out, _csv_table(BOUND_SCHEMA, header, [row]))
    return 0


def cmd_protocol(args) -> int:
    scenario = parse_scenario(args.scenario)
    params = scenario.params
    cal = scenario.calibration_energy
    tau_opt, ratio = optimal_tau(cal, params.gamma)
    floor_sens = potential_sensitivity(params, scenario.t_total)
    delta_f_opt = ratio * floor_sens
    nu_continuous = scenario.t_total / tau_opt
    nu_floor = int(math.floor(nu_continuous))
    if nu_floor >= 1:
        u = params.gamma * tau_opt
        scaled = sequential_ratio_squared(u, cal) * (nu_continuous / nu_floor)
        delta_f_floor = _fmt(math.sqrt(scaled) * floor_sens)
    else:
        delta_f_floor = "no-information"
    if scenario.diffusion is not None:
        diff = scenario.diffusion
        diffusive = diffusive_bound(params.mass, params.omega, diff, scenario.var_x0, scenario.t_total, params.hbar)
        heuristic = math.sqrt(4.0 * params.mass * params.hbar * params.omega * diff / scenario.t_total)
        diffusive_cells = [_fmt(diffusive), _fmt(heuristic)]
    else:
        diffusive_cells = ["", ""]
    header = [
        "name",
        "calibration_E",
        "gamma_tau_opt",
        "tau_opt",
        "nu_continuous",
        "nu_floor",
        "delta_f_E",
        "delta_f_floor_nu",
        "delta_f_min",
        "delta_f_infinity",
        "ratio",
        "ratio_asymptotic",
        "diffusive_bound",
        "diffusive_heuristic",
    ]
    row = [
        scenario.name,
        _fmt(cal),
        _fmt(params.gamma * tau_opt),
        _fmt(tau_opt),
        _fmt(nu_continuous),
        str(nu_floor),
        _fmt(delta_f_opt),
        delta_f_floor,
        _fmt(floor_sens),
        _fmt(delta_f_infinity(params)),
        _fmt(ratio),
        _fmt(asymptotic_ratio(cal)),
        *diffusive_cells,
    ]
    _write_text(args.out, _csv_table(PROTOCOL_SCHEMA, header, [row]))
    return 0


def cmd_figure2(args) -> int:
    grid = parse_grid(args.grid)
    rows = [
        [_fmt(cal), _fmt(gamma_tau), _fmt(ratio)]
        for cal, gamma_tau, ratio in figure2_curve(grid)
    ]
    _write_text(args.out, _csv_table(FIGURE2_SCHEMA, ["calibration_E", "gamma_tau_opt", "ratio"], rows))
    return 0


def cmd_simulate(args) -> int:
    scenario = parse_scenario(args.scenario)
    if scenario.simulation is None:
        raise ScenarioError("missing required section [simulation]", str(args.scenario), 0)
    sim = scenario.simulation
    seed = sim.seed if args.seed is None else args.seed
    report = run_experiment(
        params=scenario.params,
        probe=scenario.probe.state(),
        t=scenario.tau,
        nu_shots=sim.nu_shots,
        n_trials=sim.n_trials,
        rng=RngStream(seed=seed),
    )
    tolerance = 3.0 * math.sqrt(2.0 / sim.n_trials)
    payload = {
        "schema": SIMULATE_SCHEMA,
        "scenario": scenario.name,
        "seed": seed,
        "probing_time": scenario.tau,
        "report": report.to_json_dict(),
        "tolerance_3sigma": tolerance,
        "verdict": "PASS" if abs(report.attainment_ratio - 1.0) < tolerance else "FAIL",
    }
    _assert_finite_json(payload)
    _write_text(args.out, json.dumps(payload, sort_keys=True, indent=2) + "\n")
    return 0


def cmd_validate(args) -> int:
    results = validation_suite.run_all()
    width = max(len(r.name) for r in results)
    for result in results:
        status = "PASS" if result.passed else "FAIL"
        sys.stdout.write(f"{status}  {result.name.ljust(width)}  {result.detail}\n")
    failures = [r for r in results if not r.passed]
    sys.stdout.write(f"{len(results) - len(failures)}/{len(results)} identities hold\n")
    return 3 if failures else 0


def _assert_finite_json(node):
    if isinstance(node, dict):
        for value in node.values():
            _assert_finite_json(value)
    elif isinstance(node, list):
        for value in node:
            _assert_finite_json(value)
    elif isinstance(node, float) and not math.isfinite(node):
        raise NumericalError(f"non-finite value {node!r} reached the output layer")


# ---------------------------------------------------------------------------
# argument parsing and dispatch
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="forcebound",
        description="Force-estimation precision bounds for a damped oscillator probe",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    bound = sub.add_parser("bound", help="per-interval bound table for a scenario")
    bound.add_argument("--scenario", required=True, help="path to a scenario TOML file")
    bound.add_argument("--out", default=None, help="output path (default: stdout)")
    bound.set_defaults(func=cmd_bound)

    proto = sub.add_parser("protocol", help="optimized sequential-measurement table")
    proto.add_argument("--scenario", required=True)
    proto.add_argument("--out", default=None)
    proto.set_defaults(func=cmd_protocol)

    fig2 = sub.add_parser("figure2", help="optimized ratio curve over a calibration-energy grid")
    fig2.add_argument("--grid", default=DEFAULT_FIGURE2_GRID, help="start:stop:points[,log|lin]")
    fig2.add_argument("--out", default=None)
    fig2.set_defaults(func=cmd_figure2)

    sim = sub.add_parser("simulate", help="Monte Carlo attainment experiment")
    sim.add_argument("--scenario", required=True)
    sim.add_argument("--seed", type=int, default=None, help="override the scenario seed")
    sim.add_argument("--out", default=None)
    sim.set_defaults(func=cmd_simulate)

    val = sub.add_parser("validate", help="run the oracle-vs-closed-form identity suite")
    val.set_defaults(func=cmd_validate)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ScenarioError as exc:
        sys.stderr.write(f"config error: {exc}\n")
        return 2
    except (BracketError, NumericalError, NoInformationError, FloatingPointError) as exc:
        sys.stderr.write(f"numerical failure: {exc}\n")
        return 4
    except ValueError as exc:
        sys.stderr.write(f"config error: {exc}\n")
        return 2


def entry_point():
    raise SystemExit(main())


if __name__ == "__main__":
    entry_point()

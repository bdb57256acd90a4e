"""Scenario files: TOML parsing and domain validation with line-numbered errors.

A scenario bundles the oscillator constants, the probe preparation, the
protocol timing, and (optionally) the simulation block and a diffusive
variant. All domain constraints of the embedded types are re-validated at
parse time so a bad value is reported against its line in the file.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from .gaussian import GaussianState, K_BOLTZMANN, HBAR, OscillatorParams, displace, squeezed_ground_state, vacuum_state
from .protocol import ProtocolConfig

__all__ = ["Scenario", "ScenarioError", "parse_scenario", "parse_scenario_text"]

PROBE_KINDS = ("vacuum", "coherent", "squeezed_ground")


class ScenarioError(ValueError):
    """A scenario file failed to parse or violated a domain constraint."""

    def __init__(self, message: str, source: str = "<scenario>", line: int = 0):
        self.source = source
        self.line = line
        super().__init__(f"{source}:{line}: {message}")


@dataclass(frozen=True)
class ProbeSpec:
    kind: str
    energy: float = 0.5
    mean_x: float = 0.0
    mean_p: float = 0.0

    def state(self) -> GaussianState:
        if self.kind == "vacuum":
            return vacuum_state(1)
        if self.kind == "coherent":
            return displace(vacuum_state(1), 0, self.mean_x, self.mean_p)
        return squeezed_ground_state(self.energy)

    @property
    def var_x0(self) -> float:
        if self.kind == "squeezed_ground":
            return self.energy + math.sqrt(self.energy**2 - 0.25)
        return 0.5


@dataclass(frozen=True)
class SimulationSpec:
    n_trials: int
    nu_shots: int
    seed: int


@dataclass(frozen=True)
class Scenario:
    """Validated scenario: parameters plus probe, timing, and simulation blocks."""

    name: str
    params: OscillatorParams
    probe: ProbeSpec
    t_total: float
    tau: float
    simulation: SimulationSpec | None = None
    diffusion: float | None = None

    @property
    def var_x0(self) -> float:
        return self.probe.var_x0

    @property
    def calibration_energy(self) -> float:
        return 2.0 * self.var_x0 * (2.0 * self.params.n_thermal + 1.0)

    def protocol_config(self) -> ProtocolConfig:
        return ProtocolConfig(
            t_total=self.t_total,
            tau=self.tau,
            calibration_energy=self.calibration_energy,
            params=self.params,
        )


class _Reader:
    """Typed key access over a parsed TOML table, with line-aware errors."""

    def __init__(self, text: str, source: str):
        self.text = text
        self.source = source
        try:
            self.data = tomllib.loads(text)
        except tomllib.TOMLDecodeError as exc:
            raise ScenarioError(f"invalid TOML: {exc}", source, _first_line_from(str(exc))) from exc

    def fail(self, section: str | None, key: str, message: str):
        raise ScenarioError(f"{_qualify(section, key)}: {message}", self.source, self.key_line(section, key))

    def key_line(self, section: str | None, key: str) -> int:
        lines = self.text.splitlines()
        pattern = re.compile(rf"^\s*{re.escape(key)}\s*=")
        in_section = section is None
        section_line = 0
        for i, raw in enumerate(lines, start=1):
            stripped = raw.strip()
            if stripped.startswith("[") and stripped.endswith("]"):
                in_section = stripped == f"[{section}]"
                if in_section:
                    section_line = i
                continue
            if in_section and pattern.match(raw):
                return i
        for i, raw in enumerate(lines, start=1):
            if pattern.match(raw):
                return i
        return section_line

    def section(self, name: str, required: bool = True) -> dict | None:
        table = self.data.get(name)
        if table is None:
            if required:
                raise ScenarioError(f"missing required section [{name}]", self.source, 0)
            return None
        if not isinstance(table, dict):
            raise ScenarioError(f"[{name}] must be a table", self.source, self.key_line(None, name))
        return table

    def number(
        self,
        section: str | None,
        table: dict,
        key: str,
        required: bool = True,
        default: float | None = None,
    ) -> float | None:
        if key not in table:
            if required:
                self.fail(section, key, "missing required value")
            return default
        value = table[key]
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            self.fail(section, key, f"expected a number, got {value!r}")
        if not math.isfinite(float(value)):
            self.fail(section, key, "must be finite")
        return float(value)

    def integer(self, section: str | None, table: dict, key: str) -> int:
        if key not in table:
            self.fail(section, key, "missing required value")
        value = table[key]
        if isinstance(value, bool) or not isinstance(value, int):
            self.fail(section, key, f"expected an integer, got {value!r}")
        return int(value)

    def string(self, section: str | None, table: dict, key: str) -> str:
        if key not in table:
            self.fail(section, key, "missing required value")
        value = table[key]
        if not isinstance(value, str):
            self.fail(section, key, f"expected a string, got {value!r}")
        return value

    def check(self, condition: bool, section: str | None, key: str, message: str):
        if not condition:
            self.fail(section, key, message)


def _qualify(section: str | None, key: str) -> str:
    return key if section is None else f"{section}.{key}"


def _first_line_from(message: str) -> int:
    match = re.search(r"line (\d+)", message)
    return int(match.group(1)) if match else 0


def parse_scenario_text(text: str, source: str = "<scenario>") -> Scenario:
    reader = _Reader(text, source)
    name = reader.string(None, reader.data, "name")

    osc = reader.section("oscillator")
    mass = reader.number("oscillator", osc, "mass")
    omega = reader.number("oscillator", osc, "omega")
    gamma = reader.number("oscillator", osc, "gamma")
    reader.check(mass > 0, "oscillator", "mass", "must be positive")
    reader.check(omega > 0, "oscillator", "omega", "must be positive")
    reader.check(gamma >= 0, "oscillator", "gamma", "must be non-negative")
    hbar = reader.number("oscillator", osc, "hbar", required=False, default=HBAR)
    k_boltzmann = reader.number("oscillator", osc, "k_boltzmann", required=False, default=K_BOLTZMANN)
    reader.check(hbar > 0, "oscillator", "hbar", "must be positive")
    reader.check(k_boltzmann > 0, "oscillator", "k_boltzmann", "must be positive")

    has_temp = "temperature" in osc
    has_nt = "n_thermal" in osc
    if has_temp == has_nt:
        key = "temperature" if has_temp else "n_thermal"
        reader.fail("oscillator", key, "provide exactly one of temperature / n_thermal")
    if has_temp:
        temperature = reader.number("oscillator", osc, "temperature")
        reader.check(temperature >= 0, "oscillator", "temperature", "must be non-negative")
        if temperature == 0.0:
            n_thermal = 0.0
        else:
            n_thermal = 1.0 / math.expm1(hbar * omega / (k_boltzmann * temperature))
    else:
        n_thermal = reader.number("oscillator", osc, "n_thermal")
        reader.check(n_thermal >= 0, "oscillator", "n_thermal", "must be non-negative")

    has_force = "force" in osc
    has_force_n = "force_newton" in osc
    if has_force and has_force_n:
        reader.fail("oscillator", "force", "provide at most one of force / force_newton")
    force_scale = math.sqrt(hbar * mass * omega**3)
    if has_force_n:
        force = reader.number("oscillator", osc, "force_newton") / force_scale
    else:
        force = reader.number("oscillator", osc, "force", required=False, default=0.0)
    params = OscillatorParams(
        mass=mass,
        omega=omega,
        gamma=gamma,
        n_thermal=n_thermal,
        force_dimensionless=force,
        hbar=hbar,
    )

    probe_table = reader.section("probe")
    kind = reader.string("probe", probe_table, "kind")
    reader.check(kind in PROBE_KINDS, "probe", "kind", f"must be one of {', '.join(PROBE_KINDS)}")
    if kind == "squeezed_ground":
        energy = reader.number("probe", probe_table, "energy")
        reader.check(energy >= 0.5, "probe", "energy", "must be at least 1/2 (zero point included)")
        probe = ProbeSpec(kind=kind, energy=energy)
    elif kind == "coherent":
        mean_x = reader.number("probe", probe_table, "mean_x")
        mean_p = reader.number("probe", probe_table, "mean_p")
        probe = ProbeSpec(kind=kind, mean_x=mean_x, mean_p=mean_p)
    else:
        probe = ProbeSpec(kind=kind)

    proto = reader.section("protocol")
    t_total = reader.number("protocol", proto, "t_total")
    tau = reader.number("protocol", proto, "tau")
    reader.check(tau > 0, "protocol", "tau", "must be positive")
    reader.check(t_total >= tau, "protocol", "t_total", "must be at least tau")

    simulation = None
    sim = reader.section("simulation", required=False)
    if sim is not None:
        n_trials = reader.integer("simulation", sim, "n_trials")
        nu_shots = reader.integer("simulation", sim, "nu_shots")
        seed = reader.integer("simulation", sim, "seed")
        reader.check(n_trials >= 1, "simulation", "n_trials", "must be at least 1")
        reader.check(nu_shots >= 1, "simulation", "nu_shots", "must be at least 1")
        reader.check(0 <= seed < 2**64, "simulation", "seed", "must fit in an unsigned 64-bit integer")
        simulation = SimulationSpec(n_trials=n_trials, nu_shots=nu_shots, seed=seed)

    diffusion = None
    diff = reader.section("diffusive", required=False)
    if diff is not None:
        diffusion = reader.number("diffusive", diff, "diffusion")
        reader.check(diffusion > 0, "diffusive", "diffusion", "must be positive")

    return Scenario(
        name=name,
        params=params,
        probe=probe,
        t_total=t_total,
        tau=tau,
        simulation=simulation,
        diffusion=diffusion,
    )


def parse_scenario(path: str | Path) -> Scenario:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ScenarioError(f"cannot read scenario: {exc}", str(path), 0) from exc
    return parse_scenario_text(text, source=str(path))

"""CLI tests: scenario validation, golden outputs, determinism, exit codes."""

import math
import subprocess
import sys
from pathlib import Path

import pytest

import forcebound.bounds
from forcebound import validate as validation_suite
from forcebound.cli import NumericalError, _fmt, main, parse_grid
from forcebound.scenario import ScenarioError, parse_scenario_text

DATA = Path(__file__).parent / "data"
FIXTURE = DATA / "fixture.toml"
FIXTURE_DIFFUSIVE = DATA / "fixture_diffusive.toml"


def run_cli(args, capsys):
    code = main(args)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestScenarioParsing:
    def test_fixture_parses(self):
        scenario = parse_scenario_text(FIXTURE.read_text(), source=str(FIXTURE))
        assert scenario.name == "fixture-squeezed"
        assert scenario.params.n_thermal == 2.0
        assert scenario.var_x0 == pytest.approx(5 + math.sqrt(25 - 0.25))
        assert scenario.calibration_energy == pytest.approx(2 * scenario.var_x0 * 5.0)
        assert scenario.simulation.seed == 20240809

    def test_domain_error_carries_line_number(self):
        text = FIXTURE.read_text().replace("gamma = 10.0", "gamma = -1.0")
        with pytest.raises(ScenarioError) as excinfo:
            parse_scenario_text(text, source="bad.toml")
        line = next(i for i, row in enumerate(text.splitlines(), start=1) if row.startswith("gamma"))
        assert f"bad.toml:{line}:" in str(excinfo.value)
        assert "gamma" in str(excinfo.value)

    def test_temperature_and_occupation_are_exclusive(self):
        text = FIXTURE.read_text().replace("n_thermal = 2.0", "n_thermal = 2.0\ntemperature = 0.001")
        with pytest.raises(ScenarioError, match="exactly one"):
            parse_scenario_text(text)

    def test_temperature_converts_to_occupation(self):
        text = FIXTURE.read_text().replace("n_thermal = 2.0", "temperature = 0.001")
        scenario = parse_scenario_text(text)
        hbar, kb = 1.054571817e-34, 1.380649e-23
        expected = 1.0 / math.expm1(hbar * scenario.params.omega / (kb * 0.001))
        assert scenario.params.n_thermal == pytest.approx(expected, rel=1e-12)

    def test_force_newton_converts(self):
        text = FIXTURE.read_text().replace("force = 0.3", "force_newton = 1.0e-22")
        scenario = parse_scenario_text(text)
        assert scenario.params.force_newton == pytest.approx(1.0e-22, rel=1e-12)

    def test_unknown_probe_kind_rejected(self):
        text = FIXTURE.read_text().replace('kind = "squeezed_ground"', 'kind = "fock"')
        with pytest.raises(ScenarioError, match="kind"):
            parse_scenario_text(text)

    def test_missing_section_rejected(self):
        with pytest.raises(ScenarioError, match=r"\[protocol\]"):
            parse_scenario_text('name = "x"\n[oscillator]\nmass = 1.0\nomega = 1.0\ngamma = 1.0\nn_thermal = 0.0\n[probe]\nkind = "vacuum"\n')

    def test_invalid_toml_reports_config_error(self):
        with pytest.raises(ScenarioError, match="invalid TOML"):
            parse_scenario_text("name = [unterminated\n")


class TestGoldenOutputs:
    @pytest.mark.parametrize(
        "args,golden",
        [
            (["bound", "--scenario", str(FIXTURE)], "golden_bound.csv"),
            (["protocol", "--scenario", str(FIXTURE)], "golden_protocol.csv"),
            (["protocol", "--scenario", str(FIXTURE_DIFFUSIVE)], "golden_protocol_diffusive.csv"),
            (["figure2", "--grid", "1:1e4:7,log"], "golden_figure2.csv"),
            (["simulate", "--scenario", str(FIXTURE)], "golden_simulate.json"),
        ],
    )
    def test_reproduces_frozen_bytes(self, args, golden, capsys, monkeypatch):
        # the simulate golden was frozen under the numba kernels; the numpy
        # twins differ in the last ulps (pairwise vs sequential summation)
        monkeypatch.setenv("FORCEBOUND_BACKEND", "numba")
        code, out, _ = run_cli(args, capsys)
        assert code == 0
        assert out == (DATA / golden).read_text()

    def test_out_flag_writes_identical_bytes(self, tmp_path, capsys):
        target = tmp_path / "bound.csv"
        code, out, _ = run_cli(["bound", "--scenario", str(FIXTURE), "--out", str(target)], capsys)
        assert code == 0
        assert out == ""
        assert target.read_text() == (DATA / "golden_bound.csv").read_text()

    def test_figure2_grid_echoed_exactly(self, capsys):
        code, out, _ = run_cli(["figure2", "--grid", "2:32:5,log"], capsys)
        assert code == 0
        rows = [line.split(",") for line in out.strip().splitlines()[2:]]
        grid = [float(r[0]) for r in rows]
        assert grid == parse_grid("2:32:5,log")

    def test_seed_override_changes_output(self, capsys):
        _, base, _ = run_cli(["simulate", "--scenario", str(FIXTURE)], capsys)
        _, other, _ = run_cli(["simulate", "--scenario", str(FIXTURE), "--seed", "7"], capsys)
        assert base != other
        assert '"seed": 7' in other

    def test_bound_vacuum_probe_matches_standard_limit(self, tmp_path, capsys):
        vacuum_scenario = tmp_path / "vacuum.toml"
        vacuum_scenario.write_text(
            FIXTURE.read_text().replace('kind = "squeezed_ground"', 'kind = "vacuum"').replace("energy = 5.0", "")
        )
        code, out, _ = run_cli(["bound", "--scenario", str(vacuum_scenario)], capsys)
        assert code == 0
        header, row = out.strip().splitlines()[1:]
        cells = dict(zip(header.split(","), row.split(",")))
        eta, d, nu = float(cells["eta"]), float(cells["d_factor"]), float(cells["nu"])
        n_t = 2.0
        standard_limit = math.sqrt(2 * n_t * (1 - eta) + 1) / (d * math.sqrt(2 * nu))
        assert float(cells["delta_F"]) == pytest.approx(standard_limit, rel=1e-12)

    def test_bound_squeezed_beats_vacuum(self, tmp_path, capsys):
        vacuum_scenario = tmp_path / "vacuum.toml"
        vacuum_scenario.write_text(
            FIXTURE.read_text().replace('kind = "squeezed_ground"', 'kind = "vacuum"').replace("energy = 5.0", "")
        )
        _, squeezed_out, _ = run_cli(["bound", "--scenario", str(FIXTURE)], capsys)
        _, vacuum_out, _ = run_cli(["bound", "--scenario", str(vacuum_scenario)], capsys)

        def delta_f(out):
            header, row = out.strip().splitlines()[1:]
            return float(dict(zip(header.split(","), row.split(",")))["delta_f_newton"])

        assert delta_f(squeezed_out) < delta_f(vacuum_out)

    def test_figure2_default_grid_tail(self, capsys):
        code, out, _ = run_cli(["figure2"], capsys)
        assert code == 0
        rows = out.strip().splitlines()[2:]
        assert len(rows) == 60
        first, last = rows[0].split(","), rows[-1].split(",")
        assert float(first[0]) == pytest.approx(0.5)
        assert float(last[0]) == pytest.approx(1e6)
        assert float(last[2]) < 1.001


class TestDeterminism:
    def test_simulate_byte_identical_across_thread_counts(self):
        outputs = []
        for threads in ("1", "8"):
            result = subprocess.run(
                [sys.executable, "-m", "forcebound", "simulate", "--scenario", str(FIXTURE)],
                capture_output=True,
                text=True,
                env={"PATH": "/usr/bin:/bin", "FORCEBOUND_THREADS": threads},
                cwd=str(Path(__file__).parent.parent),
            )
            assert result.returncode == 0, result.stderr
            outputs.append(result.stdout)
        assert outputs[0] == outputs[1]


class TestValidateCommand:
    def test_fresh_checkout_passes(self, capsys):
        code, out, _ = run_cli(["validate"], capsys)
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[-1].startswith("9/9")
        assert all(line.startswith("PASS") for line in lines[:-1])
        for name in validation_suite.CHECK_NAMES:
            assert name in out

    def test_perturbed_attenuation_fails_validation(self, monkeypatch, capsys):
        # mutation sanity: a biased D formula must trip the identity suite
        true_d = forcebound.bounds.attenuation_d
        monkeypatch.setattr(forcebound.bounds, "attenuation_d", lambda w, g, t: 1.001 * true_d(w, g, t))
        code, out, _ = run_cli(["validate"], capsys)
        assert code == 3
        assert "FAIL" in out
        assert "FAIL  attainability_identity" in out


class TestErrorPaths:
    def test_missing_scenario_file(self, capsys):
        code, _, err = run_cli(["bound", "--scenario", "/nonexistent.toml"], capsys)
        assert code == 2
        assert "config error" in err

    def test_bad_scenario_value_exits_2(self, tmp_path, capsys):
        bad = tmp_path / "bad.toml"
        bad.write_text(FIXTURE.read_text().replace("mass = 1.0e-25", "mass = -1.0"))
        code, _, err = run_cli(["bound", "--scenario", str(bad)], capsys)
        assert code == 2
        assert "mass" in err
        assert f"{bad}:" in err

    def test_simulate_requires_simulation_block(self, tmp_path, capsys):
        text = "\n".join(
            line for line in FIXTURE.read_text().splitlines() if not line.startswith(("[simulation]", "n_trials", "nu_shots", "seed"))
        )
        stripped = tmp_path / "nosim.toml"
        stripped.write_text(text)
        code, _, err = run_cli(["simulate", "--scenario", str(stripped)], capsys)
        assert code == 2
        assert "simulation" in err

    def test_missing_subcommand_exits_2(self):
        with pytest.raises(SystemExit) as excinfo:
            main([])
        assert excinfo.value.code == 2

    def test_bad_grid_spec(self, capsys):
        code, _, err = run_cli(["figure2", "--grid", "10:1:5,log"], capsys)
        assert code == 2
        assert "grid" in err

    def test_formatter_rejects_non_finite(self):
        with pytest.raises(NumericalError):
            _fmt(float("nan"))
        with pytest.raises(NumericalError):
            _fmt(float("inf"))


class TestParseGrid:
    def test_log_default(self):
        grid = parse_grid("0.5:1e6:60,log")
        assert len(grid) == 60
        assert grid[0] == pytest.approx(0.5)
        assert grid[-1] == pytest.approx(1e6)

    def test_linear(self):
        assert parse_grid("1:5:5,lin") == pytest.approx([1, 2, 3, 4, 5])

    def test_single_point(self):
        assert parse_grid("2.5:2.5:1,log") == [2.5]

    def test_rejects_malformed(self):
        for spec in ("1:2", "a:b:c", "1:2:3,cubic", "0:2:3,log", "-1:2:3,lin"):
            with pytest.raises(ScenarioError):
                parse_grid(spec)

"""Tests for scenario parsing, serialization, and the run command."""

import pytest

from aircover.cli import (
    ParseError,
    RunConfig,
    ValidationError,
    bundled_scenario,
    emit_plotdata,
    main,
    parse_config,
    run_command,
    serialize,
)
from aircover.sim import run

MINIMAL = """
[agents]
0.0 -2.0 1.5 1.0
-1.4 0.0 1.5 1.0
1.4 0.0 1.5 1.0

[density]
mission = -3.5 -3.5 3.5 3.5
1.0 0.0 0.0 1.5
"""


class TestParseConfig:
    def test_minimal_config_gets_documented_defaults(self):
        scenario = parse_config(MINIMAL)
        assert len(scenario.agents) == 3
        assert scenario.epsilon == 0.2
        assert scenario.guard_threshold == 1e4
        assert scenario.dt == 0.01
        assert scenario.steps == 1000
        assert scenario.mode == "ncbf"
        assert scenario.alpha.gain == 1.0 and scenario.alpha.power == 3
        assert scenario.w_lambda == 3.0e6
        assert (scenario.sensing.r, scenario.sensing.kappa) == (1.0, 4.0)
        assert scenario.fixed_nominal is None
        assert scenario.density.components == ((1.0, (0.0, 0.0), 1.5),)

    def test_zero_dt_is_a_validation_error(self):
        text = MINIMAL + "\n[sim]\ndt = 0.0\n"
        with pytest.raises(ValidationError, match="dt must be positive"):
            parse_config(text)

    def test_missing_mission_is_a_validation_error(self):
        text = "[agents]\n0 0 1 1\n"
        with pytest.raises(ValidationError, match="mission"):
            parse_config(text)

    def test_unknown_key_reports_line_and_column(self):
        text = "[agents]\n0 0 1 1\n\n[sim]\n  bogus = 3\n"
        with pytest.raises(ParseError) as err:
            parse_config(text)
        assert err.value.line == 5
        assert err.value.col == 3
        assert "bogus" in str(err.value)

    def test_unknown_section(self):
        with pytest.raises(ParseError, match="unknown section"):
            parse_config("[wings]\nspan = 3\n")

    def test_content_before_section(self):
        with pytest.raises(ParseError, match="before any section"):
            parse_config("dt = 3\n[agents]\n0 0 1 1\n")

    def test_bad_number_reports_position(self):
        with pytest.raises(ParseError) as err:
            parse_config("[agents]\n0.0 oops 1.0 1.0\n")
        assert err.value.line == 2
        assert err.value.col == 5

    def test_wrong_agent_row_arity(self):
        with pytest.raises(ParseError, match="4 or 8"):
            parse_config("[agents]\n0 0 1\n")

    def test_mixed_agent_row_widths(self):
        text = "[agents]\n0 0 1 1 0 0 0 0\n1 0 1 1\n"
        with pytest.raises(ParseError, match="all have 4 or all have 8"):
            parse_config(text)

    def test_duplicate_key(self):
        text = MINIMAL + "\n[sim]\ndt = 0.01\ndt = 0.02\n"
        with pytest.raises(ParseError, match="duplicate key"):
            parse_config(text)

    def test_key_in_agents_section(self):
        with pytest.raises(ParseError, match="agent rows"):
            parse_config("[agents]\ncount = 3\n")

    def test_bare_row_in_sim_section(self):
        with pytest.raises(ParseError, match="key = value"):
            parse_config(MINIMAL + "\n[sim]\n0.01 100\n")

    def test_integer_keys_reject_floats(self):
        with pytest.raises(ParseError, match="expected an integer"):
            parse_config(MINIMAL + "\n[sim]\nsteps = 10.5\n")

    def test_comments_and_blanks_ignored(self):
        text = "# header\n\n[agents]  # trailing\n0 0 1 1  # an agent\n\n[density]\nmission = 0 0 1 1\n"
        scenario = parse_config(text)
        assert len(scenario.agents) == 1
        assert scenario.density.components == ()

    def test_eight_column_rows_fix_the_nominal_input(self):
        text = "[agents]\n0 0 1 1  0 0.4 0 0\n1 0 1 1  0 0 0 0\n[density]\nmission = -2 -2 2 2\n"
        scenario = parse_config(text)
        assert scenario.fixed_nominal == ((0.0, 0.4, 0.0, 0.0), (0.0, 0.0, 0.0, 0.0))


class TestSerialize:
    @pytest.mark.parametrize("name", ["trio", "nine_agents", "five_agents"])
    def test_bundled_round_trip(self, name):
        scenario = parse_config(bundled_scenario(name))
        assert parse_config(serialize(scenario)) == scenario

    def test_serialize_is_idempotent(self):
        scenario = parse_config(MINIMAL)
        text = serialize(scenario)
        assert serialize(parse_config(text)) == text


class TestBundledScenarios:
    def test_trio_has_a_single_mover(self):
        scenario = parse_config(bundled_scenario("trio"))
        assert len(scenario.agents) == 3
        assert scenario.fixed_nominal[0] == (0.0, 0.4, 0.0, 0.0)
        assert scenario.fixed_nominal[1] == (0.0, 0.0, 0.0, 0.0)
        assert scenario.mode == "ncbf"

    def test_nine_agent_parameters(self):
        scenario = parse_config(bundled_scenario("nine_agents"))
        assert len(scenario.agents) == 9
        s = scenario.sensing
        assert (s.kappa, s.sigma, s.M, s.w) == (4.0, 3.0, 11.0, 0.4)
        assert scenario.w_lambda == 3.0e6
        assert scenario.epsilon == 0.2
        assert scenario.alpha.gain == 1.0 and scenario.alpha.power == 3
        assert scenario.steps == 10000
        assert scenario.grid_resolution == 0.3

    def test_five_agent_parameters(self):
        scenario = parse_config(bundled_scenario("five_agents"))
        assert len(scenario.agents) == 5
        s = scenario.sensing
        assert (s.kappa, s.sigma, s.M, s.w) == (4.0, 1.0, 0.7, 0.2)
        assert scenario.w_lambda == 1.0e6
        assert scenario.alpha.gain == 20.0
        assert scenario.density.mission == (0.0, 0.0, 3.0, 4.0)


class TestRunCommand:
    def write_trio(self, tmp_path, steps=None):
        path = tmp_path / "scenario.cfg"
        path.write_text(bundled_scenario("trio"))
        return str(path)

    def test_writes_trace_and_summary(self, tmp_path):
        cfg = RunConfig(
            scenario_path=self.write_trio(tmp_path),
            out_dir=str(tmp_path / "out"),
            steps=40,
        )
        assert run_command(cfg) == 0
        trace = (tmp_path / "out" / "trace.csv").read_text().splitlines()
        assert trace[0].startswith("#")
        header = trace[1].split(",")
        assert header[:6] == ["step", "switch", "hole_witnesses", "H", "H_M", "H_O"]
        assert "x0" in header and "min_ncbf2" in header
        rows = trace[2:]
        assert len(rows) == 40
        assert [r.split(",")[0] for r in rows] == [str(k) for k in range(40)]
        # Every cell must be a plain number: no numpy scalar reprs may leak
        # through the integrator into the trace.
        for row in rows:
            for cell in row.split(","):
                float(cell)
        summary = (tmp_path / "out" / "summary.txt").read_text()
        assert "final_H = " in summary
        assert "mode = 'ncbf'" in summary

    def test_plotdata_files(self, tmp_path):
        cfg = RunConfig(
            scenario_path=self.write_trio(tmp_path),
            out_dir=str(tmp_path / "out"),
            steps=1,
            emit=("plotdata",),
        )
        assert run_command(cfg) == 0
        for name in ("plot_positions", "plot_radius", "plot_ncbf", "plot_global"):
            lines = (tmp_path / "out" / f"{name}.csv").read_text().splitlines()
            assert len(lines) == 2  # header + exactly one data row
        assert not (tmp_path / "out" / "trace.csv").exists()

    def test_missing_scenario_path(self, tmp_path, capsys):
        cfg = RunConfig(scenario_path=str(tmp_path / "nope.cfg"), out_dir=str(tmp_path))
        assert run_command(cfg) != 0
        assert "cannot read scenario" in capsys.readouterr().err

    def test_invalid_config_exits_nonzero(self, tmp_path, capsys):
        path = tmp_path / "bad.cfg"
        path.write_text(MINIMAL + "\n[sim]\ndt = 0.0\n")
        cfg = RunConfig(scenario_path=str(path), out_dir=str(tmp_path / "out"))
        assert run_command(cfg) == 2
        assert "dt must be positive" in capsys.readouterr().err

    def test_mode_override_uses_hyphenated_name(self, tmp_path):
        cfg = RunConfig(
            scenario_path=self.write_trio(tmp_path),
            out_dir=str(tmp_path / "out"),
            mode="hf-only",
            steps=5,
            emit=("summary",),
        )
        assert run_command(cfg) == 0
        assert "mode = 'hf_only'" in (tmp_path / "out" / "summary.txt").read_text()

    def test_unknown_emit_flag(self, tmp_path, capsys):
        cfg = RunConfig(
            scenario_path=self.write_trio(tmp_path),
            out_dir=str(tmp_path / "out"),
            emit=("video",),
        )
        assert run_command(cfg) == 2
        assert "emit" in capsys.readouterr().err


class TestMain:
    def test_run_subcommand(self, tmp_path):
        path = tmp_path / "scenario.cfg"
        path.write_text(bundled_scenario("trio"))
        code = main(
            ["run", "--config", str(path), "--out", str(tmp_path / "out"), "--steps", "5"]
        )
        assert code == 0
        assert (tmp_path / "out" / "trace.csv").exists()

    def test_emit_accepts_repeated_flags_and_comma_lists(self, tmp_path):
        path = tmp_path / "scenario.cfg"
        path.write_text(bundled_scenario("trio"))
        code = main(
            ["run", "--config", str(path), "--out", str(tmp_path / "out"),
             "--steps", "5", "--emit", "trace,summary", "--emit", "plotdata"]
        )
        assert code == 0
        for name in ("trace.csv", "summary.txt", "plot_positions.csv"):
            assert (tmp_path / "out" / name).exists()

    def test_requires_subcommand(self):
        with pytest.raises(SystemExit):
            main([])


class TestEmitPlotdata:
    def test_series_shapes(self, tmp_path):
        from dataclasses import replace as dc_replace

        scenario = dc_replace(parse_config(bundled_scenario("trio")), steps=7)
        records, _ = run(scenario)
        paths = emit_plotdata(records, tmp_path)
        assert len(paths) == 4
        for path in paths:
            lines = open(path).read().splitlines()
            assert len(lines) == 8
            width = len(lines[0].split(","))
            assert all(len(line.split(",")) == width for line in lines)

import csv
import json
import logging

import pytest
from pydantic import ValidationError

from main import main
from src.config.experiment import ExperimentConfig, build_config, load_config
from src.config.presets import ALIASES, PRESETS, preset, validate_presets
from src.middleware.errors import ConfigError, LyapunovInconsistencyError, handle_command_errors
from src.routes import experiments
from src.routes.commands import build_parser, resolve_config


def write_config(path, body):
    path.write_text(json.dumps(body), encoding="utf-8")
    return str(path)


class TestExperimentConfig:
    def test_rejects_unknown_keys(self, tiny_coherence_config):
        with pytest.raises(ValidationError):
            ExperimentConfig.model_validate({**tiny_coherence_config, "shotz": 3})

    @pytest.mark.parametrize("width", [0.5, 1.0, 0.3])
    def test_rejects_bad_coherence_width(self, tiny_coherence_config, width):
        with pytest.raises(ValidationError):
            ExperimentConfig.model_validate({**tiny_coherence_config, "prior_width": width})

    def test_rejects_zeta_above_noise_bound(self, tiny_coherence_config):
        with pytest.raises(ValidationError):
            ExperimentConfig.model_validate({**tiny_coherence_config, "true_zeta": 0.95})

    def test_lifetime_truth_inside_prior(self):
        with pytest.raises(ValidationError):
            ExperimentConfig(case="lifetime", prior_width=2.0, true_parameter=5.0, shots=1)

    def test_adaptive_rate_is_rejected(self):
        with pytest.raises(ValidationError):
            ExperimentConfig(case="rate", shots=1, protocol="adaptive")

    def test_hash_is_stable(self, tiny_coherence_config):
        a = ExperimentConfig.model_validate(tiny_coherence_config)
        b = ExperimentConfig.model_validate(dict(reversed(list(tiny_coherence_config.items()))))
        assert a.config_hash() == b.config_hash()
        assert ExperimentConfig.model_validate_json(a.canonical_json()) == a

    def test_defaults(self):
        config = ExperimentConfig(case="lifetime", shots=1)
        assert config.width == 10.0
        assert config.frameworks == ["transformation", "geometry"]

    def test_layer_precedence(self, tiny_coherence_config):
        config = build_config(tiny_coherence_config, {"seed": 99, "shots": None})
        assert config.seed == 99
        assert config.shots == tiny_coherence_config["shots"]

    def test_load_config_errors(self, tmp_path):
        with pytest.raises(ConfigError):
            load_config(tmp_path / "missing.json")
        bad = tmp_path / "bad.json"
        bad.write_text("{not json", encoding="utf-8")
        with pytest.raises(ConfigError, match="line 1"):
            load_config(bad)
        listing = tmp_path / "list.json"
        listing.write_text("[1, 2]", encoding="utf-8")
        with pytest.raises(ConfigError):
            load_config(listing)


class TestPresets:
    def test_all_presets_validate(self):
        configs = validate_presets()
        assert set(configs) == set(PRESETS)
        assert configs["coherence-mu120"].shots == 120
        assert configs["probe-eta"].sweep.prior_widths == [2.0, 10.0, 100.0]

    def test_unknown_preset(self):
        with pytest.raises(ConfigError, match="available"):
            preset("coherence-mu7")

    def test_preset_is_a_copy(self):
        preset("rate")["shots"] = 500
        assert PRESETS["rate"]["shots"] == 1

    @pytest.mark.parametrize("alias", sorted(ALIASES))
    def test_aliases_resolve(self, alias):
        assert preset(alias) == PRESETS[ALIASES[alias]]

    def test_alias_on_command_line(self):
        args = build_parser().parse_args(["sweep", "--preset", "fig2", "--seed", "5"])
        config = resolve_config(args)
        assert config.sweep.axis == "prior_width"
        assert config.case == "coherence" and config.seed == 5


class TestRun:
    def test_writes_artifacts(self, tiny_coherence_config, tmp_path):
        config = ExperimentConfig.model_validate(tiny_coherence_config)
        artifacts = experiments.run(config, out_dir=str(tmp_path / "run"))
        for name in ("trajectory.csv", "estimates.csv", "summary.json", "manifest.json"):
            assert (tmp_path / "run" / name).exists()
        manifest = json.loads((tmp_path / "run" / "manifest.json").read_text(encoding="utf-8"))
        assert manifest["config_sha256"] == config.config_hash()
        assert manifest["seed"] == 11
        with (tmp_path / "run" / "estimates.csv").open(encoding="utf-8") as handle:
            rows = list(csv.DictReader(handle))
        assert len(rows) == 3 * 2
        assert {row["framework"] for row in rows} == {"transformation", "geometry"}
        summary = artifacts.summary
        assert summary["true_zeta"] == pytest.approx(0.72)
        assert summary["true_parameter"] == pytest.approx(0.8)
        assert "nsr_ratio" in summary

    def test_trajectory_has_every_shot(self, tiny_coherence_config):
        artifacts = experiments.execute(ExperimentConfig.model_validate(tiny_coherence_config))
        shots = [row["shot"] for row in artifacts.trajectory if row["repetition"] == 0 and row["framework"] == "geometry"]
        assert shots == [1, 2, 3, 4, 5]

    def test_reproducible_outputs(self, tiny_coherence_config, tmp_path):
        config = ExperimentConfig.model_validate(tiny_coherence_config)
        experiments.run(config, out_dir=str(tmp_path / "a"))
        experiments.run(config, out_dir=str(tmp_path / "b"))
        for name in ("trajectory.csv", "estimates.csv", "summary.json"):
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()

    def test_worker_count_does_not_change_results(self, tiny_coherence_config, tmp_path):
        serial = ExperimentConfig.model_validate(tiny_coherence_config)
        threaded = ExperimentConfig.model_validate({**tiny_coherence_config, "workers": 2})
        experiments.run(serial, out_dir=str(tmp_path / "serial"))
        experiments.run(threaded, out_dir=str(tmp_path / "threaded"))
        assert (tmp_path / "serial" / "estimates.csv").read_bytes() == (tmp_path / "threaded" / "estimates.csv").read_bytes()

    def test_run_rejects_sweep_configs(self):
        config = build_config(preset("coherence-gain"), {"grid_nodes": 129})
        with pytest.raises(ConfigError, match="sweep"):
            experiments.run(config)

    def test_rate_grid_matches_closed_form(self):
        config = build_config(preset("rate"), {"repetitions": 5, "shots": 3})
        summary = experiments.execute(config).summary
        assert summary["rate"]["estimate_relative_difference"] < 1e-3
        assert summary["rate"]["error_relative_difference"] < 1e-3
        assert list(summary["frameworks"]) == ["transformation"]


class TestSweep:
    def test_prior_width_sweep(self, tmp_path):
        config = ExperimentConfig(
            case="coherence",
            shots=1,
            grid_nodes=129,
            sweep={"axis": "prior_width", "values": [0.8, 0.6]},
        )
        artifacts = experiments.sweep(config, out_dir=str(tmp_path / "sweep"))
        assert (tmp_path / "sweep" / "sweep.csv").exists()
        rows = artifacts.sweep_rows
        assert [row["prior_width"] for row in rows] == [0.6, 0.6, 0.8, 0.8]
        assert all(0.0 <= row["intrinsic_gain"] <= 1.0 for row in rows)
        assert {"transformation_increasing", "geometry_increasing", "max_gap"} <= set(artifacts.summary["diagnostics"])

    def test_eta_sweep_needs_transformation_framework(self):
        config = ExperimentConfig(
            case="lifetime", shots=1, grid_nodes=65, sweep={"axis": "eta", "values": [0.5, 1.0]}
        )
        with pytest.raises(ConfigError, match="transformation"):
            experiments.sweep(config)

    def test_sweep_needs_axis(self, tiny_coherence_config):
        with pytest.raises(ConfigError):
            experiments.sweep(ExperimentConfig.model_validate(tiny_coherence_config))


class TestCommands:
    def test_run_command(self, tiny_coherence_config, tmp_path, capsys):
        path = write_config(tmp_path / "config.json", tiny_coherence_config)
        out = tmp_path / "out"
        assert main(["run", "--config", path, "--out", str(out)]) == 0
        assert str(out) in capsys.readouterr().out
        assert (out / "summary.json").exists()

    def test_bad_key_exits_with_config_code(self, tiny_coherence_config, tmp_path):
        path = write_config(tmp_path / "config.json", {**tiny_coherence_config, "bogus": 1})
        assert main(["run", "--config", path, "--out", str(tmp_path / "out")]) == 2
        assert not (tmp_path / "out").exists()

    def test_missing_config_source(self):
        assert main(["run"]) == 2

    def test_presets_listing(self, capsys):
        assert main(["presets"]) == 0
        output = capsys.readouterr().out
        assert "coherence-gain" in output and "lifetime-mu20" in output
        assert "fig2" in output and "fig5-bottom" in output

    def test_numerical_errors_map_to_exit_code(self):
        @handle_command_errors
        def failing() -> int:
            raise LyapunovInconsistencyError("weight on the kernel")

        assert failing() == 3

    def test_numerical_error_names_failing_function(self, caplog):
        def solve_step() -> None:
            raise LyapunovInconsistencyError("weight on the kernel")

        @handle_command_errors
        def failing() -> int:
            solve_step()
            return 0

        with caplog.at_level(logging.ERROR):
            assert failing() == 3
        assert "test_cli.py" in caplog.text
        assert "solve_step" in caplog.text


@pytest.mark.slow
class TestPresetStatistics:
    def test_coherence_nsr_is_small(self):
        summary = experiments.execute(build_config(preset("coherence-mu120"), {"repetitions": 50})).summary
        for entry in summary["frameworks"].values():
            assert entry["nsr_percent"] < 5.0

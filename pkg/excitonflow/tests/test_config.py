"""Tests for experiment configuration."""

import pytest
import yaml
from pydantic import ValidationError

from excitonflow.cli.config import (
    EXPERIMENTS,
    ExperimentConfig,
    build_channels,
    build_motion,
    build_scenario,
    diagnose,
    flatten,
    load_config_file,
    load_presets,
    parse_flat_text,
    resolve_config,
    unflatten,
)
from excitonflow.core.errors import ConfigurationError
from excitonflow.core.model import GaussianPulse, NormalMode, PairwiseSinusoid, StaticProfile


class TestExperimentConfig:
    """Tests for the config model."""

    def test_defaults_round_trip(self):
        cfg = ExperimentConfig()
        assert ExperimentConfig.from_flat(cfg.to_flat()) == cfg

    def test_presets_round_trip(self):
        for name in EXPERIMENTS:
            cfg = resolve_config(name)
            assert ExperimentConfig.from_flat(cfg.to_flat()) == cfg

    def test_unknown_key_rejected(self):
        with pytest.raises(ValidationError):
            ExperimentConfig.from_flat({"chain.length": "3"})
        with pytest.raises(ValidationError):
            ExperimentConfig.from_flat({"bogus.key": "1"})

    def test_comma_lists(self):
        cfg = ExperimentConfig.from_flat({"chain.n_sites": "2", "channels.gamma": "0.1, 0.2"})
        assert cfg.channels.gamma == [0.1, 0.2]

    def test_negative_rate_rejected(self):
        with pytest.raises(ValidationError):
            ExperimentConfig.from_flat({"channels.gamma_sink": "-0.5"})

    def test_unknown_experiment(self):
        with pytest.raises(ValidationError):
            ExperimentConfig.from_flat({"experiment": "nope"})


class TestFlatFormat:
    """Tests for the flat key = value format."""

    def test_parse(self):
        text = "# comment\nchain.n_sites = 3\n\nmotion.kind = static  # trailing\n"
        assert parse_flat_text(text) == {"chain.n_sites": "3", "motion.kind": "static"}

    def test_parse_error_names_line(self):
        with pytest.raises(ConfigurationError, match=":2:"):
            parse_flat_text("chain.n_sites = 3\nnot a pair\n")

    def test_unflatten(self):
        assert unflatten({"a.b": "1", "c": "2", "d.e": ""}) == {"a": {"b": "1"}, "c": "2"}
        with pytest.raises(ConfigurationError):
            unflatten({"a.b.c": "1"})

    def test_flatten(self):
        assert flatten({"chain": {"n_sites": 2, "epsilon": [0.0, 1.0]}, "workers": 3}) == {
            "chain.n_sites": "2",
            "chain.epsilon": "0.0,1.0",
            "workers": "3",
        }

    def test_load_yaml_and_manifest(self, tmp_path):
        nested = tmp_path / "cfg.yaml"
        nested.write_text(yaml.safe_dump({"chain": {"n_sites": 4}}))
        assert load_config_file(str(nested)) == {"chain.n_sites": "4"}

        manifest = tmp_path / "manifest.yaml"
        manifest.write_text(yaml.safe_dump({"config": {"chain.n_sites": "5"}, "outputs": []}))
        assert load_config_file(str(manifest)) == {"chain.n_sites": "5"}

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigurationError):
            load_config_file(str(tmp_path / "absent.txt"))


class TestResolveConfig:
    """Tests for preset, file, override and flag precedence."""

    def test_every_experiment_has_a_preset(self):
        assert set(load_presets()) == set(EXPERIMENTS)

    def test_override_beats_preset(self):
        cfg = resolve_config("dimer-sweep", overrides=["motion.a=0.1"])
        assert cfg.motion.a == 0.1
        assert cfg.experiment == "dimer-sweep"

    def test_file_then_override(self, tmp_path):
        path = tmp_path / "run.txt"
        path.write_text("motion.a = 0.2\nmotion.omega = 3.0\n")
        cfg = resolve_config("trajectory", str(path), ["motion.omega=2.0"])
        assert cfg.motion.a == 0.2
        assert cfg.motion.omega == 2.0

    def test_workers_from_environment(self, monkeypatch):
        monkeypatch.setenv("EXCITON_WORKERS", "3")
        assert resolve_config("dimer-sweep").workers == 3
        assert resolve_config("dimer-sweep", workers=2).workers == 2

    def test_unknown_experiment(self):
        with pytest.raises(ConfigurationError):
            resolve_config("no-such-run")

    def test_bad_override(self):
        with pytest.raises(ConfigurationError):
            resolve_config("dimer-sweep", overrides=["motion.a"])


class TestBuilders:
    """Tests for building domain objects from a config."""

    def test_motion_kinds(self):
        for kind, expected in [
            ("static", StaticProfile),
            ("pairwise", PairwiseSinusoid),
            ("normal_mode", NormalMode),
            ("pulse", GaussianPulse),
        ]:
            cfg = ExperimentConfig.from_flat({"chain.n_sites": "4", "motion.kind": kind, "motion.a": "0.05"})
            assert isinstance(build_motion(cfg), expected)

    def test_rates_broadcast(self):
        cfg = ExperimentConfig.from_flat({"chain.n_sites": "3", "channels.gamma": "0.2"})
        assert build_channels(cfg).gamma_n == (0.2, 0.2, 0.2)

    def test_mismatched_energies(self):
        cfg = ExperimentConfig.from_flat({"chain.n_sites": "3", "chain.epsilon": "0,1"})
        with pytest.raises(ConfigurationError):
            build_scenario(cfg)

    def test_preset_scenarios_build(self):
        for name in EXPERIMENTS:
            build_scenario(resolve_config(name))


class TestDiagnose:
    """Tests for validate-without-running."""

    def test_clean(self):
        assert diagnose({"experiment": "dimer-sweep"}) == []

    def test_amplitude_bound(self):
        problems = diagnose({"motion.a": "0.6"})
        assert len(problems) == 1
        assert "a < 1/2" in problems[0]

    def test_negative_sink_rate(self):
        problems = diagnose({"channels.gamma_sink": "-0.5"})
        assert problems and "gamma_sink" in problems[0]

    def test_energy_count(self):
        problems = diagnose({"chain.n_sites": "3", "chain.epsilon": "0,1"})
        assert any("site_energies" in p for p in problems)


if __name__ == "__main__":
    pytest.main([__file__, "-v"])

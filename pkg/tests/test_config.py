# -*- coding: utf-8 -*-
import os

import pytest

import config as config_module
from configs.run_config_loader import (
    METHOD_TABLE,
    RunConfig,
    build_section,
    load_run_config,
    parse_run_config,
    run_config_path,
)
from tools.dough_sim.configs import SimConfig
from tools.error_handler import ConfigurationError
from tools.training.configs import METHOD_NAMES


@pytest.mark.unit
def test_empty_config_uses_defaults():
    run = parse_run_config({})
    assert isinstance(run, RunConfig)
    assert run.seed == 0
    assert run.sim == SimConfig()
    assert set(run.methods) == set(METHOD_NAMES)
    assert run.method("implicit-uniform").inference == "dfo"
    assert run.method("implicit-langevin").inference == "langevin"
    assert run.method("implicit-langevin").train.negative_sampler == "langevin"
    assert run.method("explicit-gaussian").loss_kind == "gaussian-nll"
    assert not run.method("explicit-mse").is_implicit


@pytest.mark.unit
def test_tiny_run_is_parsed_section_by_section(tiny_run):
    run = parse_run_config(tiny_run, "tiny")
    assert run.sim.num_particles == 8
    assert run.traj_opt.steps == 5
    assert run.demos.count == 2
    train = run.method("explicit-mse").train
    assert train.point_widths == (4, 8)
    assert train.head_widths == (8,)
    assert run.dfo.n_samples == 16
    assert run.langevin_training.buffer_capacity == 32
    assert run.evaluation.seeds == (0,)
    assert run.source == "tiny"


@pytest.mark.unit
def test_method_overrides_merge_over_defaults():
    run = parse_run_config({"training": {"defaults": {"epochs": 3},
                                         "implicit-langevin": {"epochs": 7, "inference": "dfo"}}})
    assert run.method("explicit-mse").train.epochs == 3
    assert run.method("implicit-langevin").train.epochs == 7
    assert run.method("implicit-langevin").inference == "dfo"


@pytest.mark.unit
@pytest.mark.parametrize("data", [
    {"unknown": 1},
    {"sim": {"viscosity": 1.0}},
    {"samplers": {"cem": {}}},
    {"samplers": {"dfo": {"n_samples": 2, "n_components": 3}}},
    {"training": {"implicit-contrastive": {}}},
    {"training": {"implicit-uniform": {"negative_sampler": "langevin"}}},
    {"training": {"implicit-uniform": {"inference": "cem"}}},
    {"training": {"explicit-mse": {"inference": "dfo"}}},
    {"evaluation": {"methods": ["explicit-bc"]}},
    {"evaluation": {"seeds": []}},
    {"demos": {"grid": 500}},
    {"seed": -1},
    {"seed": "abc"},
    {"sim": [1, 2]},
])
def test_invalid_configs_are_rejected(data):
    with pytest.raises(ConfigurationError):
        parse_run_config(data)


@pytest.mark.unit
def test_build_section_reports_the_key():
    with pytest.raises(ConfigurationError) as info:
        build_section(SimConfig, {"stiffnes": 3.0}, "sim")
    assert info.value.config_key == "sim.stiffnes"


@pytest.mark.unit
def test_unknown_method_lookup():
    with pytest.raises(ConfigurationError):
        parse_run_config({}).method("implicit-cem")


@pytest.mark.unit
def test_train_seeds_are_derived_per_seed_index():
    run = parse_run_config({"seed": 5})
    a = run.train_config("implicit-uniform", 0)
    b = run.train_config("explicit-mse", 0)
    c = run.train_config("implicit-uniform", 1)
    assert a.seed == b.seed
    assert a.seed != c.seed
    assert run.train_config("implicit-uniform", 0) == a
    assert run.traj_opt_config().seed == parse_run_config({"seed": 5}).traj_opt_config().seed


@pytest.mark.unit
def test_run_config_path_resolution():
    assert run_config_path("smoke").endswith(os.path.join("configs", "runs", "smoke.yaml"))
    assert run_config_path("my.yaml") == "my.yaml"
    assert run_config_path(os.path.join("a", "b")) == os.path.join("a", "b")


@pytest.mark.unit
@pytest.mark.parametrize("name", ["default", "smoke"])
def test_bundled_run_configs_load(name):
    run = load_run_config(name)
    assert set(run.methods) == set(METHOD_TABLE)
    assert run.source.endswith(f"{name}.yaml")


@pytest.mark.unit
def test_load_run_config_errors(tmp_path):
    with pytest.raises(ConfigurationError):
        load_run_config(str(tmp_path / "missing.yaml"))
    broken = tmp_path / "broken.yaml"
    broken.write_text("sim: [unclosed\n", encoding="utf-8")
    with pytest.raises(ConfigurationError):
        load_run_config(str(broken))


@pytest.mark.unit
def test_written_run_config_round_trip(write_run_config, tmp_path):
    run = load_run_config(write_run_config(seed=9))
    assert run.seed == 9
    assert run.output_dir == str(tmp_path / "out")


@pytest.mark.unit
def test_default_run_config_follows_environment(monkeypatch):
    monkeypatch.setattr(config_module.Config, "RUN_CONFIG", None)
    assert config_module.Config.default_run_config().endswith(os.path.join("runs", "default.yaml"))
    monkeypatch.setattr(config_module.Config, "RUN_CONFIG", "/tmp/custom.yaml")
    assert config_module.Config.default_run_config() == "/tmp/custom.yaml"


@pytest.mark.unit
def test_integer_environment_values(monkeypatch):
    monkeypatch.setenv("IBC_TEST_INT", "4")
    assert config_module._int_env("IBC_TEST_INT", None) == 4
    monkeypatch.setenv("IBC_TEST_INT", " ")
    assert config_module._int_env("IBC_TEST_INT", 2) == 2
    monkeypatch.setenv("IBC_TEST_INT", "four")
    with pytest.raises(ValueError):
        config_module._int_env("IBC_TEST_INT", None)


@pytest.mark.unit
def test_progress_bars_follow_console_level():
    import logging_config

    try:
        logging_config.setup_logging("WARNING", log_dir=None)
        assert not logging_config.progress_enabled()
        logging_config.setup_logging("debug", log_dir=None)
        assert logging_config.progress_enabled()
    finally:
        logging_config.setup_logging("INFO", log_dir=None)
    assert logging_config.progress_enabled()

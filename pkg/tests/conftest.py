# -*- coding: utf-8 -*-
"""
Pytest configuration: ensure project root is on sys.path for imports like `tools.*`, `pipeline.*` and `configs.*`,
plus small shared fixtures (tiny simulator/model settings, run config files under tmp_path).
"""
import copy
import os
import sys

import numpy as np
import pytest
import yaml

TESTS_DIR = os.path.dirname(os.path.abspath(__file__))
PROJECT_ROOT = os.path.dirname(TESTS_DIR)
if PROJECT_ROOT not in sys.path:
    sys.path.insert(0, PROJECT_ROOT)


# 몇 초 안에 끝나는 실행 설정 (파이프라인 테스트용)
TINY_RUN = {
    "seed": 0,
    "sim": {"num_particles": 8, "horizon": 3},
    "traj_opt": {"steps": 5},
    "demos": {"count": 2, "grid": 2, "workers": 1},
    "training": {
        "defaults": {
            "batch_size": 4,
            "n_negatives": 4,
            "epochs": 1,
            "point_widths": [4, 8],
            "embed_dim": 4,
            "head_widths": [8],
        },
    },
    "samplers": {
        "dfo": {"n_samples": 16, "n_iters": 1, "n_components": 2, "em_iters": 2},
        "langevin": {"step_size": 0.0001, "chain_length": 3, "grad_clip": 100.0, "num_chains": 4},
        "langevin_training": {"step_size": 0.0001, "chain_length": 2, "grad_clip": 100.0,
                              "buffer_capacity": 32},
    },
    "evaluation": {"seeds": [0], "methods": ["explicit-mse", "implicit-uniform"], "heldout_count": 1},
}


@pytest.fixture
def tiny_run():
    return copy.deepcopy(TINY_RUN)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def small_sim():
    from tools.dough_sim.configs import SimConfig
    return SimConfig(num_particles=8, horizon=3)


@pytest.fixture
def small_model_config():
    from tools.energy_model.configs import EnergyModelConfig
    from tools.energy_model.layers import SetEncoderConfig
    return EnergyModelConfig(action_dim=2, encoder=SetEncoderConfig(point_widths=(8, 16), embed_dim=8),
                             head_widths=(16, 16))


@pytest.fixture
def small_train_config():
    from tools.training.configs import TrainConfig
    return TrainConfig(batch_size=8, n_negatives=8, epochs=2, point_widths=(8, 16), embed_dim=8,
                       head_widths=(16, 16), seed=3)


@pytest.fixture
def write_run_config(tmp_path):
    """dict 를 YAML 로 써서 경로 반환 (output_dir 은 tmp_path 아래)"""

    def _write(data=None, name="run.yaml", **updates):
        payload = dict(TINY_RUN if data is None else data)
        payload.update(updates)
        payload.setdefault("output_dir", str(tmp_path / "out"))
        path = tmp_path / name
        path.write_text(yaml.safe_dump(payload, sort_keys=False), encoding="utf-8")
        return str(path)

    return _write

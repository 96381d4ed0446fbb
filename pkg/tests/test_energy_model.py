# -*- coding: utf-8 -*-
import numpy as np
import pytest

from tools.autodiff import finite_difference_gradient, relative_error
from tools.energy_model import (
    ActionBounds,
    EnergyParams,
    ModelEnergy,
    Observation,
    action_gradient,
    candidate_softmax,
    decode_checkpoint,
    encode,
    encode_checkpoint,
    energies,
    energy,
    init_energy_params,
    load_energy_params,
    read_checkpoint,
    save_checkpoint,
)
from tools.energy_model.configs import CHECKPOINT_MAGIC, INIT_ENERGY_BOUND
from tools.error_handler import CheckpointFormatError, DatasetIOError, ShapeError, ValidationError
from tools.training.explicit import init_policy_params


def _random_obs(r, count=12):
    return Observation(r.uniform(0.0, 1.0, size=(count, 2)), r.uniform(0.0, 1.0, size=3))


@pytest.fixture
def params(small_model_config):
    return init_energy_params(np.random.default_rng(0), small_model_config)


def _reference_embedding(params, obs):
    """층을 직접 풀어 쓴 인코더 순전파"""
    arrays = params.arrays
    h = obs.points
    i = 0
    while f"encoder.{i}.weight" in arrays:
        h = np.tanh(h @ arrays[f"encoder.{i}.weight"] + arrays[f"encoder.{i}.bias"])
        i += 1
    pooled = h.max(axis=0)
    joined = np.concatenate([pooled, obs.roller_pose])
    return joined @ arrays["projection.0.weight"] + arrays["projection.0.bias"]


@pytest.mark.unit
def test_encoder_matches_straight_line_forward(params):
    r = np.random.default_rng(1)
    for _ in range(5):
        obs = _random_obs(r)
        np.testing.assert_allclose(encode(params, obs), _reference_embedding(params, obs), rtol=1e-12, atol=1e-12)


@pytest.mark.unit
def test_encoder_is_permutation_invariant(params):
    r = np.random.default_rng(2)
    obs = _random_obs(r, 20)
    shuffled = Observation(obs.points[r.permutation(20)], obs.roller_pose)
    np.testing.assert_allclose(encode(params, obs), encode(params, shuffled), rtol=0, atol=1e-12)


@pytest.mark.unit
def test_energies_shape_and_batch_consistency(params):
    r = np.random.default_rng(3)
    observations = [_random_obs(r) for _ in range(3)]
    actions = r.uniform(-1, 1, size=(3, 5, 2))
    values = energies(params, observations, actions)
    assert values.shape == (3, 5)
    assert energy(params, observations[1], actions[1, 2]) == pytest.approx(values[1, 2], abs=1e-12)


@pytest.mark.unit
def test_mixed_point_counts_keep_order(params):
    r = np.random.default_rng(4)
    observations = [_random_obs(r, 6), _random_obs(r, 9)]
    actions = r.uniform(-1, 1, size=(2, 3, 2))
    values = energies(params, observations, actions)
    np.testing.assert_allclose(values[1], energies(params, observations[1:], actions[1:])[0], atol=1e-12)


@pytest.mark.unit
def test_initial_energies_are_bounded(params):
    r = np.random.default_rng(5)
    for _ in range(10):
        assert abs(energy(params, _random_obs(r), r.uniform(-1, 1, size=2))) < INIT_ENERGY_BOUND


@pytest.mark.unit
def test_action_gradient_matches_finite_differences(params):
    r = np.random.default_rng(6)
    for _ in range(20):
        obs = _random_obs(r)
        action = r.uniform(-1, 1, size=2)
        numeric = finite_difference_gradient(lambda a: energy(params, obs, a), action)
        assert relative_error(action_gradient(params, obs, action), numeric) < 1e-4


@pytest.mark.unit
def test_energy_rejects_wrong_action_dim(params):
    with pytest.raises(ShapeError):
        energy(params, _random_obs(np.random.default_rng(0)), np.zeros(3))


@pytest.mark.unit
def test_bound_surface_gradients_are_rowwise(params):
    r = np.random.default_rng(7)
    observations = [_random_obs(r) for _ in range(2)]
    actions = r.uniform(-1, 1, size=(2, 4, 2))
    grads = ModelEnergy(params).bind(observations).gradients(actions)
    assert grads.shape == actions.shape
    np.testing.assert_allclose(grads[1, 3], action_gradient(params, observations[1], actions[1, 3]), atol=1e-12)


@pytest.mark.unit
def test_candidate_softmax_matches_direct_formula():
    r = np.random.default_rng(8)
    values = r.normal(size=7) * 3
    direct = np.exp(-values) / np.exp(-values).sum()
    np.testing.assert_allclose(candidate_softmax(values), direct, rtol=1e-12)
    shifted = candidate_softmax(values + 1e4)
    assert np.isfinite(shifted).all()
    assert shifted.sum() == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(ValidationError):
        candidate_softmax(np.array([]))


@pytest.mark.unit
def test_params_config_round_trip(params, small_model_config):
    assert params.config() == small_model_config
    assert params.action_dim == 2
    assert params.embed_dim == 8


@pytest.mark.unit
def test_checkpoint_round_trip_is_bitwise(params, tmp_path):
    path = str(tmp_path / "model.ckpt")
    save_checkpoint(path, params)
    loaded = load_energy_params(path)
    assert loaded.names == params.names
    for a, b in zip(loaded.as_list(), params.as_list()):
        assert a.tobytes() == b.tobytes()
    obs = _random_obs(np.random.default_rng(9))
    assert energy(loaded, obs, np.array([0.1, -0.2])) == energy(params, obs, np.array([0.1, -0.2]))


@pytest.mark.unit
def test_checkpoint_format_errors(params, tmp_path):
    blob = encode_checkpoint("energy", params.names, params.as_list())
    assert blob.startswith(CHECKPOINT_MAGIC)
    with pytest.raises(CheckpointFormatError):
        decode_checkpoint(b"NOTACKPT" + blob[8:])
    with pytest.raises(CheckpointFormatError):
        decode_checkpoint(blob[:-5])
    with pytest.raises(CheckpointFormatError):
        decode_checkpoint(blob + b"\x00")
    with pytest.raises(CheckpointFormatError):
        encode_checkpoint("transformer", params.names, params.as_list())


@pytest.mark.unit
def test_loading_policy_checkpoint_as_energy_model_fails(tmp_path, small_train_config):
    policy = init_policy_params(np.random.default_rng(0), 2, small_train_config, "mse")
    path = str(tmp_path / "policy.ckpt")
    save_checkpoint(path, policy)
    kind, _ = read_checkpoint(path)
    assert kind == "explicit-mse"
    with pytest.raises(CheckpointFormatError):
        load_energy_params(path)


@pytest.mark.unit
def test_missing_checkpoint_is_io_error(tmp_path):
    with pytest.raises(DatasetIOError):
        read_checkpoint(str(tmp_path / "missing.ckpt"))


@pytest.mark.unit
def test_observation_and_bounds_validation():
    with pytest.raises(ValidationError):
        Observation(np.zeros((0, 2)), np.zeros(3))
    with pytest.raises(ValidationError):
        Observation(np.zeros((3, 3)), np.zeros(3))
    with pytest.raises(ValidationError):
        Observation(np.zeros((3, 2)), np.zeros(2))
    with pytest.raises(ValidationError):
        Observation(np.array([[np.nan, 0.0]]), np.zeros(3))
    with pytest.raises(ValidationError):
        ActionBounds([0.0, 1.0], [1.0, 1.0])
    bounds = ActionBounds.symmetric([0.05, 0.05])
    np.testing.assert_array_equal(bounds.clip(np.array([1.0, -1.0])), [0.05, -0.05])
    assert bounds.contains(bounds.sample_uniform(np.random.default_rng(0), (100,)))


@pytest.mark.unit
def test_energy_params_type_from_checkpoint(params):
    kind, arrays = decode_checkpoint(encode_checkpoint("energy", params.names, params.as_list()))
    assert kind == "energy"
    assert isinstance(EnergyParams(arrays), EnergyParams)

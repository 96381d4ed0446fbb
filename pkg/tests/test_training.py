# -*- coding: utf-8 -*-
import dataclasses
import math
from collections import OrderedDict

import numpy as np
import pytest
from scipy import stats

from tools.autodiff import Tensor, finite_difference_gradient, relative_error, value_and_grad
from tools.dough_sim import replay_actions, sample_configuration
from tools.energy_model import ActionBounds, ModelEnergy, Observation, init_energy_params, save_checkpoint
from tools.error_handler import CheckpointFormatError, ConfigurationError, DatasetIOError, ShapeError, ValidationError
from tools.samplers import DfoConfig, LangevinConfig, act_implicit
from tools.training import (
    UNIT_BOUNDS,
    DemoDataset,
    DemoProvenance,
    DemoTrajectory,
    GaussianPolicyParams,
    MsePolicyParams,
    TrainConfig,
    augment_actions,
    bc_mse_loss,
    bimodal_dataset,
    check_loss_kind,
    demo_for_task,
    epoch_batches,
    evaluate_infonce,
    format_dataset,
    gaussian_nll_loss,
    infonce_loss,
    infonce_tensor,
    load_policy_params,
    parse_dataset,
    predict,
    read_dataset,
    sample_uniform_negatives,
    step_eval_grid,
    step_function_dataset,
    step_target,
    train_explicit,
    train_implicit,
    write_dataset,
)

# ---------------------------------------------------------------------------
# 손실 함수
# ---------------------------------------------------------------------------


def _direct_infonce(pos, neg):
    """math.fsum 으로 분모를 합산한 −log p̃"""
    numerator = math.exp(-pos)
    denominator = math.fsum([numerator] + [math.exp(-e) for e in neg])
    return -math.log(numerator / denominator)


@pytest.mark.unit
def test_infonce_equal_energies_give_log_candidates():
    assert infonce_loss(0.3, np.full(256, 0.3)) == pytest.approx(math.log(257), abs=1e-9)
    assert infonce_loss(-4.0, np.full(7, -4.0)) == pytest.approx(math.log(8), abs=1e-9)


@pytest.mark.unit
def test_infonce_matches_direct_formula():
    r = np.random.default_rng(0)
    for _ in range(100):
        neg = r.normal(scale=2.0, size=int(r.integers(1, 64)))
        pos = float(r.normal(scale=2.0))
        assert infonce_loss(pos, neg) == pytest.approx(_direct_infonce(pos, neg), abs=1e-9)


@pytest.mark.unit
def test_infonce_shift_invariance_and_monotonicity():
    r = np.random.default_rng(1)
    neg = r.normal(size=32)
    assert infonce_loss(0.5 + 1e3, neg + 1e3) == pytest.approx(infonce_loss(0.5, neg), abs=1e-9)
    assert infonce_loss(0.4, neg) < infonce_loss(0.5, neg)


@pytest.mark.unit
def test_infonce_tensor_matches_scalar_and_finite_differences():
    values = np.random.default_rng(2).normal(size=(3, 6))
    expected = sum(infonce_loss(row[0], row[1:]) for row in values)
    assert infonce_tensor(Tensor(values)).item() == pytest.approx(expected, abs=1e-12)
    _, (grad,) = value_and_grad(infonce_tensor, values)
    numeric = finite_difference_gradient(lambda v: infonce_tensor(Tensor(v)).item(), values)
    assert relative_error(grad, numeric) < 1e-6


@pytest.mark.unit
def test_bc_mse_loss():
    assert bc_mse_loss(np.ones((2, 2)), np.ones((2, 2))).item() == 0.0
    assert bc_mse_loss(np.array([[1.0, 0.0]]), np.zeros((1, 2))).item() == 1.0
    r = np.random.default_rng(3)
    a, b = r.normal(size=(5, 3)), r.normal(size=(5, 3))
    brute = sum((a[i, j] - b[i, j]) ** 2 for i in range(5) for j in range(3))
    assert bc_mse_loss(a, b).item() == pytest.approx(brute, rel=1e-12)
    with pytest.raises(ShapeError):
        bc_mse_loss(np.zeros((2, 2)), np.zeros((2, 3)))


@pytest.mark.unit
def test_gaussian_nll_loss():
    half_log_2pi = 0.5 * math.log(2 * math.pi)
    assert gaussian_nll_loss([[0.2]], [[1.0]], [[0.2]]).item() == pytest.approx(half_log_2pi, abs=1e-12)
    assert gaussian_nll_loss([[0.0]], [[0.3]], [[0.3]]).item() == pytest.approx(
        half_log_2pi + math.log(0.3) + 0.5, abs=1e-12)
    r = np.random.default_rng(4)
    mean, sigma, x = r.normal(size=(4, 2)), r.uniform(0.1, 2.0, size=(4, 2)), r.normal(size=(4, 2))
    expected = -np.sum(stats.norm.logpdf(x, loc=mean, scale=sigma))
    assert gaussian_nll_loss(mean, sigma, x).item() == pytest.approx(expected, rel=1e-10)
    with pytest.raises(ValidationError):
        gaussian_nll_loss([[0.0]], [[0.0]], [[0.0]])


# ---------------------------------------------------------------------------
# 배치 / 증강
# ---------------------------------------------------------------------------

@pytest.mark.unit
def test_epoch_batches_cover_every_pair_once():
    batches = list(epoch_batches(10, 4, np.random.default_rng(0)))
    assert [len(b) for b in batches] == [4, 4, 2]
    assert sorted(np.concatenate(batches).tolist()) == list(range(10))


@pytest.mark.unit
def test_augmentation_and_uniform_negatives():
    bounds = ActionBounds([-1.0, 0.0], [1.0, 0.5])
    actions = np.array([[0.99, 0.49], [-0.5, 0.1]])
    assert augment_actions(actions, bounds, 0.0, np.random.default_rng(0)) is actions
    noisy = augment_actions(actions, bounds, 0.1, np.random.default_rng(0))
    assert noisy.shape == actions.shape
    assert bounds.contains(noisy)
    negatives = sample_uniform_negatives(bounds, 50, np.random.default_rng(1))
    assert negatives.shape == (50, 2)
    assert bounds.contains(negatives)
    with pytest.raises(ValidationError):
        sample_uniform_negatives(bounds, 0, np.random.default_rng(1))


@pytest.mark.unit
def test_benchmark_datasets():
    np.testing.assert_array_equal(step_target(np.array([-0.2, 0.0, 0.7])), [-0.5, 0.5, 0.5])
    grid = step_eval_grid()
    assert np.all(np.abs(grid) > 0.01)
    assert len(grid) >= 197
    step = step_function_dataset(40)
    assert step.num_pairs == 40
    assert step.action_dim == 1
    bimodal = bimodal_dataset(100)
    _, actions = bimodal.pairs()
    assert np.sum(actions == 1.0) == np.sum(actions == -1.0) == 50


# ---------------------------------------------------------------------------
# 데이터셋 파일
# ---------------------------------------------------------------------------

@pytest.fixture
def tiny_dataset(small_sim):
    spec = sample_configuration(7, small_sim)
    actions = np.random.default_rng(5).uniform(-0.05, 0.05, size=(small_sim.horizon, 2))
    replay = replay_actions(spec.initial_state(), actions, small_sim)
    trajectory = DemoTrajectory(0, spec.name, replay.observations, replay.actions)
    provenance = [DemoProvenance(0, spec.name, spec.index, 0.125, 0.5, False),
                  DemoProvenance(1, "grid-003", 3, float("nan"), float("nan"), True, "boom")]
    return DemoDataset([trajectory], small_sim.bounds(), OrderedDict([(spec.name, spec)]), provenance)


@pytest.mark.unit
def test_dataset_text_round_trip_is_exact(tiny_dataset):
    text = format_dataset(tiny_dataset)
    parsed = parse_dataset(text)
    assert format_dataset(parsed) == text
    assert parsed.tasks == tiny_dataset.tasks
    assert parsed.skipped == 1
    assert parsed.mean_score() == 0.5
    original_obs, original_actions = tiny_dataset.pairs()
    parsed_obs, parsed_actions = parsed.pairs()
    assert parsed_actions.tobytes() == original_actions.tobytes()
    for a, b in zip(original_obs, parsed_obs):
        assert a.points.tobytes() == b.points.tobytes()
        assert a.roller_pose.tobytes() == b.roller_pose.tobytes()


@pytest.mark.unit
def test_dataset_file_round_trip(tiny_dataset, tmp_path):
    path = str(tmp_path / "demos.txt")
    write_dataset(path, tiny_dataset)
    loaded = read_dataset(path)
    assert len(loaded) == 1
    assert demo_for_task(loaded, tiny_dataset.trajectories[0].task_name) is loaded.trajectories[0]
    assert demo_for_task(loaded, "grid-999") is None
    with pytest.raises(DatasetIOError):
        read_dataset(str(tmp_path / "missing.txt"))


@pytest.mark.unit
def test_malformed_dataset_lines_are_rejected(tiny_dataset):
    text = format_dataset(tiny_dataset)
    with pytest.raises(ValidationError):
        parse_dataset("")
    with pytest.raises(ValidationError):
        parse_dataset("# something-else v1\n")
    with pytest.raises(ValidationError):
        parse_dataset(text + "R 0 x\n")
    with pytest.raises(ValidationError):
        parse_dataset(text + "Q 1 2\n")
    truncated = text.rstrip("\n").rsplit(" ", 1)[0] + "\n"
    with pytest.raises(ValidationError):
        parse_dataset(truncated)


@pytest.mark.unit
def test_dataset_validation():
    with pytest.raises(ValidationError):
        DemoDataset([DemoTrajectory(0, "-", [Observation.scalar(0.0)], [[2.0]])], UNIT_BOUNDS)
    with pytest.raises(ValidationError):
        DemoTrajectory(0, "-", [Observation.scalar(0.0)], np.zeros((2, 1)))
    empty = DemoDataset([], UNIT_BOUNDS)
    assert empty.pairs()[1].shape == (0, 1)
    with pytest.raises(ValidationError):
        empty.require_pairs()
    with pytest.raises(ValidationError):
        train_implicit(empty)


# ---------------------------------------------------------------------------
# 설정
# ---------------------------------------------------------------------------

@pytest.mark.unit
def test_train_config_validation(small_train_config):
    with pytest.raises(ConfigurationError):
        TrainConfig(negative_sampler="contrastive-divergence")
    with pytest.raises(ConfigurationError):
        TrainConfig(epochs=-1)
    with pytest.raises(ConfigurationError):
        TrainConfig(langevin_fraction=1.5)
    with pytest.raises(ConfigurationError):
        check_loss_kind("l1")
    model = small_train_config.model_config(3)
    assert model.action_dim == 3
    assert model.head_widths == (16, 16)
    assert model.encoder.embed_dim == 8


# ---------------------------------------------------------------------------
# 암시적 학습
# ---------------------------------------------------------------------------

@pytest.mark.unit
def test_fresh_model_infonce_is_near_log_candidates(small_train_config):
    config = dataclasses.replace(small_train_config, n_negatives=256)
    dataset = step_function_dataset(40)
    params = init_energy_params(np.random.default_rng(0), config.model_config(1))
    assert abs(evaluate_infonce(params, dataset, config) - math.log(257)) < 0.5


@pytest.mark.unit
def test_train_implicit_is_deterministic(small_train_config):
    dataset = step_function_dataset(24)
    first = train_implicit(dataset, config=small_train_config)
    second = train_implicit(dataset, config=small_train_config)
    assert first.history == second.history
    assert len(first.history) == small_train_config.epochs
    for a, b in zip(first.params.as_list(), second.params.as_list()):
        assert a.tobytes() == b.tobytes()


@pytest.mark.unit
def test_train_implicit_reduces_loss(small_train_config):
    config = dataclasses.replace(small_train_config, epochs=20)
    result = train_implicit(step_function_dataset(50), config=config)
    assert np.isfinite(result.history).all()
    assert result.history[-1] < result.history[0]


@pytest.mark.unit
def test_train_implicit_with_langevin_negatives(small_train_config):
    langevin = LangevinConfig(step_size=1e-3, chain_length=3, buffer_capacity=64)
    dataset = step_function_dataset(16)
    for fraction in (1.0, 0.5):
        config = dataclasses.replace(small_train_config, negative_sampler="langevin", epochs=1,
                                     langevin_fraction=fraction)
        result = train_implicit(dataset, config=config, langevin=langevin)
        assert np.isfinite(result.history).all()
        assert result.params.all_finite()


# ---------------------------------------------------------------------------
# 명시적 기준선
# ---------------------------------------------------------------------------

@pytest.mark.unit
def test_explicit_mse_fits_constant_action(small_train_config):
    xs = np.linspace(-1.0, 1.0, 20)
    dataset = DemoDataset([DemoTrajectory(0, "-", [Observation.scalar(x) for x in xs], np.full((20, 1), 0.3))],
                          UNIT_BOUNDS)
    config = dataclasses.replace(small_train_config, batch_size=20, epochs=400, noise_std=0.0,
                                 learning_rate=5e-3)
    result = train_explicit(dataset, config, "mse")
    predictions = predict(result.params, [Observation.scalar(x) for x in xs])
    np.testing.assert_allclose(predictions, 0.3, atol=0.01)


@pytest.mark.unit
def test_explicit_training_is_deterministic_and_kinds_differ(small_train_config):
    dataset = step_function_dataset(24)
    mse = train_explicit(dataset, small_train_config, "mse")
    again = train_explicit(dataset, small_train_config, "mse")
    assert mse.history == again.history
    assert isinstance(mse.params, MsePolicyParams)
    assert mse.method == "explicit-mse"

    gaussian = train_explicit(dataset, small_train_config, "gaussian-nll")
    assert isinstance(gaussian.params, GaussianPolicyParams)
    assert gaussian.params.action_dim == 1
    assert np.isfinite(gaussian.history).all()
    assert predict(gaussian.params, [Observation.scalar(0.4)]).shape == (1, 1)
    with pytest.raises(ConfigurationError):
        train_explicit(dataset, small_train_config, "hinge")


@pytest.mark.unit
def test_policy_checkpoint_round_trip(small_train_config, tmp_path):
    result = train_explicit(step_function_dataset(8), dataclasses.replace(small_train_config, epochs=1),
                            "gaussian-nll")
    path = str(tmp_path / "policy.ckpt")
    save_checkpoint(path, result.params)
    loaded = load_policy_params(path)
    assert isinstance(loaded, GaussianPolicyParams)
    obs = [Observation.scalar(-0.3)]
    assert predict(loaded, obs).tobytes() == predict(result.params, obs).tobytes()

    energy_path = str(tmp_path / "energy.ckpt")
    save_checkpoint(energy_path, init_energy_params(np.random.default_rng(0), small_train_config.model_config(1)))
    with pytest.raises(CheckpointFormatError):
        load_policy_params(energy_path)


# ---------------------------------------------------------------------------
# 1차원 벤치마크 (불연속 / 다봉)
# ---------------------------------------------------------------------------

BENCHMARK_CONFIG = TrainConfig(batch_size=50, n_negatives=64, epochs=100, point_widths=(16, 32), embed_dim=16,
                               head_widths=(64, 64))


def _implicit_actions(params, xs, seed):
    energy_fn = ModelEnergy(params)
    return np.array([act_implicit(energy_fn, Observation.scalar(x), UNIT_BOUNDS, "dfo",
                                  DfoConfig(seed=seed + i))[0] for i, x in enumerate(xs)])


@pytest.mark.slow
def test_implicit_policy_beats_explicit_on_step_function():
    xs = step_eval_grid()
    implicit_mae, explicit_mae = [], []
    for seed in range(3):
        config = dataclasses.replace(BENCHMARK_CONFIG, seed=seed)
        dataset = step_function_dataset(200, np.random.default_rng(seed))
        implicit = train_implicit(dataset, config=config)
        explicit = train_explicit(dataset, config, "mse")
        truth = step_target(xs)
        implicit_mae.append(np.mean(np.abs(_implicit_actions(implicit.params, xs, seed) - truth)))
        explicit_pred = np.clip(predict(explicit.params, [Observation.scalar(x) for x in xs])[:, 0], -1.0, 1.0)
        explicit_mae.append(np.mean(np.abs(explicit_pred - truth)))
    assert np.mean(implicit_mae) <= np.mean(explicit_mae)


@pytest.mark.slow
def test_implicit_training_on_bimodal_benchmark_beats_uniform_guessing():
    # 후보 257 개 모두 같은 에너지면 ln 257
    config = dataclasses.replace(BENCHMARK_CONFIG, n_negatives=256)
    result = train_implicit(bimodal_dataset(200, np.random.default_rng(0)), config=config)
    assert result.history[-1] < math.log(257) - 2.0


@pytest.mark.slow
def test_bimodal_actions_explicit_averages_implicit_picks_a_mode():
    dataset = bimodal_dataset(200, np.random.default_rng(0))
    queries = np.random.default_rng(1).uniform(-1.0, 1.0, size=200)

    explicit = train_explicit(dataset, BENCHMARK_CONFIG, "mse")
    predictions = predict(explicit.params, [Observation.scalar(x) for x in queries])[:, 0]
    assert np.mean(np.abs(predictions)) < 0.1

    implicit = train_implicit(dataset, config=BENCHMARK_CONFIG)
    actions = _implicit_actions(implicit.params, queries, 0)
    near_mode = np.minimum(np.abs(actions - 1.0), np.abs(actions + 1.0)) <= 0.1
    assert near_mode.mean() >= 0.9
    assert np.any(actions > 0.9) and np.any(actions < -0.9)

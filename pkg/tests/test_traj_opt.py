# -*- coding: utf-8 -*-
import os

import numpy as np
import pytest

from tools.dough_sim import SimConfig, contact_loss, replay_actions, sample_configuration, task_loss
from tools.error_handler import ConfigurationError, ValidationError
from tools.traj_opt import (
    TrajOptConfig,
    action_gradients,
    draw_configurations,
    generate_demos,
    initial_actions,
    optimize_trajectory,
    provenance_table,
    rollout_loss_and_grad,
    trajectory_loss,
)
from tools.traj_opt.demos import run_demo


@pytest.mark.unit
def test_trajectory_loss_sums_every_state(small_sim):
    spec = sample_configuration(40, small_sim)
    actions = np.random.default_rng(0).uniform(-0.05, 0.05, size=(3, 2))
    states = replay_actions(spec.initial_state(), actions, small_sim).states
    goal = spec.goal_cloud()
    expected = sum(task_loss(s.particles, goal).item() + 0.7 * contact_loss(s).item() for s in states)
    assert trajectory_loss(states, goal, 0.7).item() == pytest.approx(expected, rel=1e-12)
    task_only = sum(task_loss(s.particles, goal).item() for s in states)
    assert trajectory_loss(states, goal, 0.0).item() == pytest.approx(task_only, rel=1e-12)


@pytest.mark.unit
def test_optimize_trajectory_never_returns_worse_than_start(small_sim):
    spec = sample_configuration(90, small_sim)
    cfg = TrajOptConfig(steps=15, learning_rate=0.005)
    result = optimize_trajectory(spec, cfg, small_sim)
    assert len(result.history) == cfg.steps + 1
    assert result.best_loss <= result.initial_loss
    assert result.best_loss == min(result.history)
    assert result.history[result.best_step] == result.best_loss
    assert small_sim.bounds().contains(result.actions)
    assert result.actions.shape == (small_sim.horizon, 2)
    assert np.all(np.diff(result.running_minimum()) <= 0)


@pytest.mark.unit
def test_optimize_trajectory_clips_starting_actions(small_sim):
    spec = sample_configuration(12, small_sim)
    clipped = optimize_trajectory(spec, TrajOptConfig(steps=1), small_sim,
                                  actions=np.full((small_sim.horizon, 2), 0.2))
    inside = optimize_trajectory(spec, TrajOptConfig(steps=1), small_sim,
                                 actions=np.full((small_sim.horizon, 2), 0.05))
    assert clipped.history[0] == inside.history[0]
    assert action_gradients(spec, clipped.actions, TrajOptConfig(), small_sim).shape == (small_sim.horizon, 2)


@pytest.mark.unit
def test_last_action_gradient_vanishes_when_final_state_matches_goal():
    sim = SimConfig(num_particles=16, horizon=5)
    spec = sample_configuration(62, sim)
    actions = np.random.default_rng(2).uniform(-0.04, 0.04, size=(5, 2))
    final = replay_actions(spec.initial_state(), actions, sim).final_state.particle_array().copy()
    _, grad = rollout_loss_and_grad(spec.initial_state(), final, actions, sim, contact_weight=0.0)
    np.testing.assert_allclose(grad[-1], 0.0, atol=1e-12)
    assert np.abs(grad[:-1]).max() > 0.0


@pytest.mark.unit
def test_action_gradients_match_rollout_gradient():
    sim = SimConfig(num_particles=16, horizon=5)
    spec = sample_configuration(31, sim)
    cfg = TrajOptConfig(contact_weight=0.5)
    actions = np.random.default_rng(3).uniform(-0.05, 0.05, size=(5, 2))
    _, expected = rollout_loss_and_grad(spec.initial_state(), spec.goal_cloud(), actions, sim, 0.5)
    np.testing.assert_array_equal(action_gradients(spec, actions, cfg, sim), expected)


@pytest.mark.unit
def test_initial_actions(small_sim):
    spec = sample_configuration(5, small_sim)
    np.testing.assert_array_equal(initial_actions(spec, TrajOptConfig(), small_sim), np.zeros((3, 2)))
    noisy = initial_actions(spec, TrajOptConfig(init_noise=0.02, seed=4), small_sim)
    assert small_sim.bounds().contains(noisy)
    np.testing.assert_array_equal(noisy, initial_actions(spec, TrajOptConfig(init_noise=0.02, seed=4), small_sim))
    assert np.any(noisy != 0.0)


@pytest.mark.unit
def test_traj_opt_config_validation():
    with pytest.raises(ConfigurationError):
        TrajOptConfig(steps=0)
    with pytest.raises(ConfigurationError):
        TrajOptConfig(learning_rate=-1.0)
    with pytest.raises(ConfigurationError):
        TrajOptConfig(contact_weight=-0.1)


@pytest.mark.unit
def test_draw_configurations():
    draws = draw_configurations(50, seed=3, grid=10)
    assert draws.shape == (50,)
    assert draws.min() >= 0 and draws.max() < 10
    np.testing.assert_array_equal(draws, draw_configurations(50, seed=3, grid=10))
    assert not np.array_equal(draws, draw_configurations(50, seed=4, grid=10))
    with pytest.raises(ValidationError):
        draw_configurations(0, seed=0)
    with pytest.raises(ValidationError):
        draw_configurations(5, seed=0, grid=126)


@pytest.mark.unit
def test_generate_demos_is_deterministic(small_sim):
    cfg = TrajOptConfig(steps=5)
    first = generate_demos(3, cfg, small_sim, seed=1, grid=4)
    second = generate_demos(3, cfg, small_sim, seed=1, grid=4)
    assert len(first) == 3
    assert first.skipped == 0
    assert [p.task_name for p in first.provenance] == [p.task_name for p in second.provenance]
    assert first.pairs()[1].tobytes() == second.pairs()[1].tobytes()
    assert set(first.tasks) == {t.task_name for t in first.trajectories}
    table = provenance_table(first)
    assert list(table.columns) == ["draw", "task", "config_index", "final_loss", "score", "skipped", "error"]
    assert table["draw"].tolist() == [0, 1, 2]


@pytest.mark.integration
def test_generate_demos_worker_count_does_not_change_output(small_sim):
    cfg = TrajOptConfig(steps=5)
    serial = generate_demos(4, cfg, small_sim, seed=2, grid=6, workers=1)
    parallel = generate_demos(4, cfg, small_sim, seed=2, grid=6, workers=2)
    assert serial.pairs()[1].tobytes() == parallel.pairs()[1].tobytes()
    assert [p.score for p in serial.provenance] == [p.score for p in parallel.provenance]


@pytest.mark.slow
def test_default_expert_improves_default_task():
    # 격자 중앙 과제 (반지름 0.1, 운반 거리 0.35)
    outcome = run_demo((0, 62, TrajOptConfig(), SimConfig()))
    assert outcome.trajectory is not None
    assert outcome.score >= 0.5


@pytest.mark.slow
def test_default_expert_demos_score_at_least_point_six():
    dataset = generate_demos(8, TrajOptConfig(), SimConfig(), seed=0, workers=min(4, os.cpu_count() or 1))
    assert dataset.skipped == 0
    assert dataset.mean_score() >= 0.6

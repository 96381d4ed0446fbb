# -*- coding: utf-8 -*-
import numpy as np
import pytest

from tools.autodiff import finite_difference_gradient, relative_error
from tools.dough_sim import (
    GRID_COUNT,
    DoughState,
    SimConfig,
    contact_loss,
    grid_configurations,
    held_out_configurations,
    observe,
    render_table,
    replay_actions,
    rollout,
    sample_configuration,
    split_configurations,
    sunflower_disk,
    task_loss,
    transition,
)
from tools.dough_sim.configs import TABLE_Y
from tools.error_handler import ConfigurationError, ValidationError
from tools.traj_opt import rollout_loss_and_grad


def _state(points, center, radius=0.05):
    return DoughState.from_arrays(np.asarray(points, dtype=float), np.asarray(center, dtype=float), radius)


@pytest.mark.unit
def test_far_roller_without_cohesion_leaves_particles_untouched():
    cfg = SimConfig(cohesion=0.0)
    points = np.random.default_rng(0).uniform(0.4, 0.6, size=(10, 2))
    state = _state(points, [0.1, 0.9])
    nxt = transition(state, [0.03, -0.02], cfg)
    np.testing.assert_array_equal(nxt.particle_array(), points)
    np.testing.assert_allclose(nxt.center_array(), [0.13, 0.88], atol=1e-15)


@pytest.mark.unit
def test_contact_pushes_particle_away_from_roller():
    cfg = SimConfig(cohesion=0.0)
    state = _state([[0.5, 0.5]], [0.5, 0.53])
    nxt = transition(state, [0.0, 0.0], cfg)
    moved = nxt.particle_array()[0]
    assert moved[0] == pytest.approx(0.5, abs=1e-15)
    assert moved[1] < 0.5
    assert np.linalg.norm(moved - [0.5, 0.53]) > 0.03


@pytest.mark.unit
def test_coincident_particle_gets_finite_push():
    cfg = SimConfig(cohesion=0.0)
    state = _state([[0.5, 0.5], [0.3, 0.3]], [0.5, 0.5])
    nxt = transition(state, [0.0, 0.0], cfg)
    moved = nxt.particle_array()[0]
    assert np.isfinite(moved).all()
    # 중심과 겹친 입자는 +x 방향으로 κ·w·(softplus(r/w) − softplus(−10)) 만큼 밀림
    expected = cfg.stiffness * cfg.smoothing * (np.logaddexp(0.0, 0.05 / cfg.smoothing) - np.logaddexp(0.0, -10.0))
    assert moved[0] - 0.5 == pytest.approx(expected, rel=1e-8)
    assert moved[1] == pytest.approx(0.5, abs=1e-15)


@pytest.mark.unit
def test_table_stops_particles_pushed_downwards():
    state = _state([[0.5, 0.21]], [0.5, 0.25])
    on_table = transition(state, [0.0, 0.0], SimConfig(cohesion=0.0, table_height=0.2)).particle_array()[0]
    np.testing.assert_array_equal(on_table, [0.5, 0.2])
    no_table = transition(state, [0.0, 0.0], SimConfig(cohesion=0.0, table_height=None)).particle_array()[0]
    assert no_table[1] < 0.2


@pytest.mark.unit
def test_horizontal_translation_moves_trajectory_along():
    sim = SimConfig(num_particles=16, horizon=4)
    spec = sample_configuration(37, sim)
    shift = np.array([0.1, 0.0])
    actions = np.random.default_rng(6).uniform(-0.05, 0.05, size=(4, 2))
    base = replay_actions(spec.initial_state(), actions, sim)
    moved_start = _state(spec.initial_particles() + shift, np.asarray(spec.roller_center) + shift, spec.roller_radius)
    moved = replay_actions(moved_start, actions, sim)
    for a, b in zip(base.states, moved.states):
        np.testing.assert_allclose(b.particle_array(), a.particle_array() + shift, atol=1e-12)
    assert task_loss(moved.final_state.particles, spec.goal_cloud() + shift).item() == pytest.approx(
        task_loss(base.final_state.particles, spec.goal_cloud()).item(), rel=1e-9, abs=1e-15)


@pytest.mark.unit
def test_cohesion_pulls_towards_centroid():
    cfg = SimConfig(cohesion=0.5)
    state = _state([[0.2, 0.5], [0.4, 0.5]], [0.9, 0.9])
    nxt = transition(state, [0.0, 0.0], cfg)
    np.testing.assert_allclose(nxt.particle_array(), [[0.25, 0.5], [0.35, 0.5]], atol=1e-12)


@pytest.mark.unit
def test_out_of_bounds_action_is_rejected():
    state = _state([[0.5, 0.5]], [0.5, 0.8])
    with pytest.raises(ValidationError):
        transition(state, [0.06, 0.0])
    with pytest.raises(ValidationError):
        transition(state, [0.01, 0.0, 0.0])


@pytest.mark.unit
def test_state_and_config_validation():
    with pytest.raises(ValidationError):
        _state(np.zeros((0, 2)), [0.5, 0.5])
    with pytest.raises(ValidationError):
        _state([[np.inf, 0.0]], [0.5, 0.5])
    with pytest.raises(ValidationError):
        _state([[0.1, 0.1]], [0.5, 0.5, 0.5])
    with pytest.raises(ConfigurationError):
        SimConfig(stiffness=0.0)
    with pytest.raises(ConfigurationError):
        SimConfig(horizon=0)


@pytest.mark.unit
def test_rollout_gradients_match_finite_differences():
    sim = SimConfig(num_particles=16, horizon=5)
    spec = sample_configuration(62, sim)
    initial, goal = spec.initial_state(), spec.goal_cloud()
    r = np.random.default_rng(5)
    for _ in range(3):
        actions = r.uniform(-0.04, 0.04, size=(5, 2))
        loss, grad = rollout_loss_and_grad(initial, goal, actions, sim)
        assert grad.shape == (5, 2)
        numeric = finite_difference_gradient(lambda a: rollout_loss_and_grad(initial, goal, a, sim)[0], actions)
        assert relative_error(grad, numeric) < 1e-3
        assert np.isfinite(loss)


@pytest.mark.unit
def test_task_loss_values():
    r = np.random.default_rng(1)
    a = r.uniform(size=(7, 2))
    b = r.uniform(size=(5, 2))
    assert task_loss(a, a).item() == 0.0
    assert task_loss(a, b).item() == pytest.approx(task_loss(b, a).item(), abs=1e-14)
    assert task_loss(np.array([[0.0, 0.0]]), np.array([[3.0, 4.0]])).item() == pytest.approx(25.0)
    with pytest.raises(ValidationError):
        task_loss(a, np.zeros((0, 2)))


@pytest.mark.unit
def test_contact_loss_is_a_squared_hinge():
    assert contact_loss(_state([[0.5, 0.5]], [0.5, 0.54])).item() == 0.0
    far = contact_loss(_state([[0.5, 0.5]], [0.5, 0.7])).item()
    assert far == pytest.approx(0.15 ** 2, abs=1e-12)


@pytest.mark.unit
def test_observe_exposes_cloud_and_pose():
    obs = observe(_state([[0.1, 0.2], [0.3, 0.4]], [0.5, 0.6], radius=0.07))
    np.testing.assert_array_equal(obs.points, [[0.1, 0.2], [0.3, 0.4]])
    np.testing.assert_array_equal(obs.roller_pose, [0.5, 0.6, 0.07])


@pytest.mark.unit
def test_rollout_clamps_policy_actions(small_sim):
    spec = sample_configuration(0, small_sim)
    trajectory = rollout(lambda obs: np.array([1.0, -1.0]), spec.initial_state(), 3, small_sim)
    np.testing.assert_array_equal(trajectory.actions, np.tile([0.05, -0.05], (3, 1)))
    assert trajectory.horizon == 3
    assert len(trajectory.states) == 4
    with pytest.raises(ValidationError):
        rollout(lambda obs: np.zeros(2), spec.initial_state(), 0, small_sim)


@pytest.mark.unit
def test_replay_is_deterministic_and_renders(small_sim):
    spec = sample_configuration(10, small_sim)
    actions = np.random.default_rng(2).uniform(-0.05, 0.05, size=(3, 2))
    first = replay_actions(spec.initial_state(), actions, small_sim)
    second = replay_actions(spec.initial_state(), actions, small_sim)
    assert first.final_state.particle_array().tobytes() == second.final_state.particle_array().tobytes()
    table = render_table(first)
    assert len(table) == 4 * small_sim.num_particles
    assert list(table.columns) == ["step", "particle", "x", "y", "roller_x", "roller_y"]


@pytest.mark.unit
def test_grid_configurations():
    specs = grid_configurations()
    assert len(specs) == GRID_COUNT == 125
    assert len({s.name for s in specs}) == 125
    assert len({(s.dough_center, s.target_center, s.blob_radius) for s in specs}) == 125
    assert all(0.08 - 1e-12 <= s.blob_radius <= 0.12 + 1e-12 for s in specs)
    assert sample_configuration(17) == specs[17]
    for bad in (-1, 125):
        with pytest.raises(ValidationError):
            sample_configuration(bad)
    with pytest.raises(ValidationError):
        sample_configuration()
    assert 0 <= sample_configuration(rng=np.random.default_rng(0)).index < 125


@pytest.mark.unit
def test_held_out_configurations_lie_outside_the_grid():
    specs = held_out_configurations()
    assert len(specs) == 10
    assert specs == held_out_configurations()
    assert all(s.blob_radius < 0.08 or s.blob_radius > 0.12 for s in specs)
    assert all(s.split == "heldout" for s in specs)
    assert split_configurations("heldout") == specs
    with pytest.raises(ValidationError):
        split_configurations("valid")


@pytest.mark.unit
def test_task_geometry(small_sim):
    spec = sample_configuration(3, small_sim)
    assert spec.initial_particles().shape == (small_sim.num_particles, 2)
    assert spec.goal_cloud().shape == (small_sim.num_particles, 2)
    initial, goal = spec.initial_particles(), spec.goal_cloud()
    gaps = np.linalg.norm(initial - np.asarray(spec.roller_center), axis=1) - spec.roller_radius
    assert gaps.min() > 0
    # 롤러는 반죽 왼쪽, 목표는 반죽 오른쪽, 모두 바닥 위
    assert spec.roller_center[0] < spec.dough_center[0] < spec.target_center[0]
    assert spec.roller_center[1] == pytest.approx(TABLE_Y + spec.roller_radius)
    assert initial[:, 1].min() > TABLE_Y and goal[:, 1].min() > TABLE_Y
    assert all(s.target_distance > 0.2 for s in grid_configurations(small_sim))
    assert np.all(np.linalg.norm(sunflower_disk(50), axis=1) <= 1.0)

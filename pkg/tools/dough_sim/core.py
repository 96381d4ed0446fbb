"""
미분 가능한 2D 반죽 시뮬레이터

상태는 입자 좌표 (M, 2), 롤러 중심 (2,), 롤러 반지름입니다. 전이는 롤러 이동 → 부드러운
(softplus) 방사형 밀어내기 → 무게중심 방향 응집 → 바닥 아래로 밀린 입자를 바닥 높이로 고정
순서이며, 모두 자동미분 연산으로 작성되어 활성 Graph 가 있으면 행동과 상태에 대한 기울기가
기록됩니다. 롤러가 위에서 누르면 바닥에 막힌 입자는 옆으로만 움직여 반죽이 납작해집니다.
"""

import logging
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from tools.autodiff import Tensor, ops
from tools.autodiff.core import ArrayLike, as_tensor
from tools.energy_model.types import Observation
from tools.error_handler import ValidationError

from .configs import (
    ACTION_TOLERANCE,
    COINCIDENT_OFFSET,
    CONTACT_CUTOFF,
    ERROR_ACTION_OUT_OF_BOUNDS,
    ERROR_EMPTY_CLOUD,
    LOG_ROLLOUT,
    SOFTMIN_TEMPERATURE,
    SimConfig,
)

logger = logging.getLogger(__name__)

_CUTOFF_SOFTPLUS = float(np.logaddexp(0.0, CONTACT_CUTOFF))


@dataclass(frozen=True)
class DoughState:
    """시뮬레이터 상태 s_t (불변 값)"""

    particles: Tensor
    roller_center: Tensor
    roller_radius: float

    @classmethod
    def from_arrays(cls, particles: np.ndarray, roller_center: np.ndarray, roller_radius: float) -> "DoughState":
        particles = np.asarray(particles, dtype=np.float64)
        center = np.asarray(roller_center, dtype=np.float64).reshape(-1)
        if particles.ndim != 2 or particles.shape[1] != 2 or particles.shape[0] < 1:
            raise ValidationError(f"particles must be M×2 with M >= 1, got {particles.shape}", field="particles")
        if center.shape != (2,):
            raise ValidationError(f"roller center must be a 2-vector, got {center.shape}", field="roller_center")
        if not (np.isfinite(particles).all() and np.isfinite(center).all()):
            raise ValidationError("dough state has non-finite coordinates", field="particles")
        return cls(Tensor(particles), Tensor(center), float(roller_radius))

    @property
    def num_particles(self) -> int:
        return int(self.particles.shape[0])

    def particle_array(self) -> np.ndarray:
        return self.particles.data

    def center_array(self) -> np.ndarray:
        return self.roller_center.data

    def detach(self) -> "DoughState":
        return DoughState(self.particles.detach(), self.roller_center.detach(), self.roller_radius)


def _pairwise_distance(diff: Tensor) -> Tuple[Tensor, Tensor]:
    """마지막 축 노름. 길이 0 인 벡터는 +x 로 COINCIDENT_OFFSET 만큼 밀어 방향과 기울기를 정의"""
    coincident = np.sum(diff.data * diff.data, axis=-1) == 0.0
    if coincident.any():
        offset = np.zeros(diff.shape)
        offset[coincident, 0] = COINCIDENT_OFFSET
        diff = ops.add(diff, offset)
    return diff, ops.sqrt(ops.sum(ops.square(diff), axis=-1))


def _rest_on_table(particles: Tensor, height: float) -> Tensor:
    """y < height 인 입자를 바닥 위로 (x 는 그대로)"""
    xs = ops.slice(particles, (slice(None), slice(0, 1)))
    ys = ops.clamp(ops.slice(particles, (slice(None), slice(1, 2))), lo=height)
    return ops.concat([xs, ys], axis=1)


def check_action(action: ArrayLike, cfg: SimConfig) -> Tensor:
    action = as_tensor(action)
    low = np.asarray(cfg.action_low)
    high = np.asarray(cfg.action_high)
    values = action.data
    if values.shape != low.shape or np.any(values < low - ACTION_TOLERANCE) or np.any(values > high + ACTION_TOLERANCE):
        raise ValidationError(ERROR_ACTION_OUT_OF_BOUNDS.format(values.tolist(), low.tolist(), high.tolist()),
                              field="action")
    return action


def transition(state: DoughState, action: ArrayLike, cfg: Optional[SimConfig] = None) -> DoughState:
    """
    s_{t+1} = T(s_t, a_t)

    Args:
        state: 현재 상태
        action: 롤러 변위 (2,), 상자 밖이면 오류 (clamp 는 정책 쪽 책임)
        cfg: SimConfig

    Returns:
        다음 상태 (활성 Graph 가 있고 입력이 추적 중이면 기록됨)
    """
    cfg = cfg or SimConfig()
    action = check_action(action, cfg)
    count = state.num_particles
    center = ops.add(state.roller_center, action)

    rows = ops.expand(ops.reshape(center, (1, 2)), (count, 2))
    diff, dist = _pairwise_distance(ops.sub(state.particles, rows))

    depth = ops.div(ops.sub(state.roller_radius, dist), cfg.smoothing)
    push = ops.clamp(ops.sub(ops.softplus(depth), _CUTOFF_SOFTPLUS), lo=0.0)
    magnitude = ops.scale(push, cfg.stiffness * cfg.smoothing)

    direction = ops.div(diff, ops.expand(ops.reshape(dist, (count, 1)), (count, 2)))
    displacement = ops.mul(direction, ops.expand(ops.reshape(magnitude, (count, 1)), (count, 2)))
    particles = ops.add(state.particles, displacement)

    if cfg.cohesion > 0.0:
        centroid = ops.expand(ops.reshape(ops.mean(particles, axis=0), (1, 2)), (count, 2))
        particles = ops.add(particles, ops.scale(ops.sub(centroid, particles), cfg.cohesion))
    if cfg.table_height is not None:
        particles = _rest_on_table(particles, cfg.table_height)
    return DoughState(particles, center, state.roller_radius)


def _stack(tensors: Sequence[Tensor], shape: Tuple[int, ...]) -> Tensor:
    return ops.concat([ops.reshape(t, (1,) + shape) for t in tensors], axis=0)


def contact_losses(particles: Tensor, centers: Tensor, radius: float,
                   temperature: float = SOFTMIN_TEMPERATURE) -> Tensor:
    """
    (S, M, 2) 입자와 (S, 2) 롤러 중심 -> (S,) 접촉 손실

    max(0, softmin_i ‖p_i − c‖ − r)², softmin = −τ·logsumexp(−d/τ)
    """
    steps, count, _ = particles.shape
    rows = ops.expand(ops.reshape(centers, (steps, 1, 2)), (steps, count, 2))
    _, dist = _pairwise_distance(ops.sub(particles, rows))
    softmin = ops.scale(ops.logsumexp(ops.scale(dist, -1.0 / temperature), axis=1), -temperature)
    gap = ops.clamp(ops.sub(softmin, radius), lo=0.0)
    return ops.square(gap)


def contact_loss(state: DoughState) -> Tensor:
    """롤러가 반죽에서 떨어진 정도의 제곱 힌지 (스칼라)"""
    losses = contact_losses(ops.reshape(state.particles, (1, state.num_particles, 2)),
                            ops.reshape(state.roller_center, (1, 2)), state.roller_radius)
    return ops.sum(losses)


def task_losses(particles: Tensor, goal: np.ndarray) -> Tensor:
    """(S, M, 2) 입자 구름들과 (G, 2) 목표 구름 -> (S,) 대칭 chamfer 거리"""
    goal = np.asarray(goal, dtype=np.float64)
    if particles.shape[1] == 0 or goal.shape[0] == 0:
        raise ValidationError(ERROR_EMPTY_CLOUD, field="cloud")
    steps, count, _ = particles.shape
    size = goal.shape[0]
    tiled = ops.expand(ops.reshape(particles, (steps, count, 1, 2)), (steps, count, size, 2))
    sq = ops.sum(ops.square(ops.sub(tiled, np.broadcast_to(goal, (steps, count, size, 2)))), axis=3)
    forward = ops.mean(ops.min_reduce(sq, axis=2), axis=1)
    backward = ops.mean(ops.min_reduce(sq, axis=1), axis=1)
    return ops.scale(ops.add(forward, backward), 0.5)


def task_loss(particles: ArrayLike, goal: np.ndarray) -> Tensor:
    """d(s_t, s_g): 두 방향 최근접 제곱거리 평균의 평균 (스칼라)"""
    particles = as_tensor(particles)
    if particles.ndim != 2 or particles.shape[0] == 0:
        raise ValidationError(ERROR_EMPTY_CLOUD, field="cloud")
    return ops.sum(task_losses(ops.reshape(particles, (1,) + particles.shape), goal))


def stack_states(states: Sequence[DoughState]) -> Tuple[Tensor, Tensor]:
    """상태 S 개 -> (S, M, 2) 입자, (S, 2) 롤러 중심"""
    count = states[0].num_particles
    return _stack([s.particles for s in states], (count, 2)), _stack([s.roller_center for s in states], (2,))


def observe(state: DoughState) -> Observation:
    """전체 입자 구름 + 롤러 자세 (cx, cy, r)"""
    pose = np.concatenate([state.center_array(), [state.roller_radius]])
    return Observation(state.particle_array().copy(), pose)


@dataclass
class Trajectory:
    """T 개의 관측/행동과 T+1 개의 상태"""

    states: List[DoughState]
    observations: List[Observation]
    actions: np.ndarray

    @property
    def horizon(self) -> int:
        return len(self.observations)

    @property
    def final_state(self) -> DoughState:
        return self.states[-1]


PolicyFn = Callable[[Observation], np.ndarray]


def rollout(policy: PolicyFn, initial: DoughState, horizon: int, cfg: Optional[SimConfig] = None,
            name: str = "") -> Trajectory:
    """관측 → 정책 → clamp → 전이 를 horizon 번 반복 (그래프 기록 없음)"""
    cfg = cfg or SimConfig()
    if horizon < 1:
        raise ValidationError(f"rollout horizon must be >= 1, got {horizon}", field="horizon")
    bounds = cfg.bounds()
    state = initial.detach()
    states = [state]
    observations: List[Observation] = []
    actions: List[np.ndarray] = []
    for _ in range(horizon):
        obs = observe(state)
        action = bounds.clip(np.asarray(policy(obs), dtype=np.float64).reshape(-1))
        state = transition(state, action, cfg)
        observations.append(obs)
        actions.append(action)
        states.append(state)
    logger.debug(LOG_ROLLOUT.format(name or "-", horizon))
    return Trajectory(states, observations, np.stack(actions))


def replay_actions(initial: DoughState, actions: np.ndarray, cfg: Optional[SimConfig] = None) -> Trajectory:
    """저장된 행동열을 그대로 재생"""
    actions = np.asarray(actions, dtype=np.float64)
    step = iter(range(len(actions)))
    return rollout(lambda _obs: actions[next(step)], initial, len(actions), cfg)


def render_table(trajectory: Trajectory) -> pd.DataFrame:
    """스텝별 입자 좌표 표: step, particle, x, y, roller_x, roller_y"""
    frames = []
    for t, state in enumerate(trajectory.states):
        points = state.particle_array()
        center = state.center_array()
        frames.append(pd.DataFrame({
            "step": t,
            "particle": np.arange(len(points)),
            "x": points[:, 0],
            "y": points[:, 1],
            "roller_x": center[0],
            "roller_y": center[1],
        }))
    return pd.concat(frames, ignore_index=True)

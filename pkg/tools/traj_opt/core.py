"""
시뮬레이터를 통한 궤적 최적화

행동열 전체를 하나의 Graph 에 기록한 롤아웃으로 L_traj = Σ_t [task(s_t) + λ·contact(s_t)] 를
계산하고, backward 로 모든 a_t 에 대한 기울기를 한 번에 얻습니다. Adam 한 스텝마다 행동을
상자로 clamp 하고 지금까지 가장 낮은 손실의 행동열을 돌려줍니다.
"""

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from tools.autodiff import AdamState, Graph, Tensor, adam_step, ops
from tools.dough_sim.configs import SimConfig
from tools.dough_sim.core import DoughState, contact_losses, stack_states, task_losses, transition
from tools.dough_sim.tasks import TaskSpec
from tools.error_handler import NumericalError
from utils.seeding import derive_rng

from .configs import (
    ERROR_NON_FINITE_TRAJ_LOSS,
    LOG_OPT_DONE,
    LOG_OPT_PROGRESS,
    PROGRESS_LOG_EVERY,
    TrajOptConfig,
)

logger = logging.getLogger(__name__)


def trajectory_loss(states: Sequence[DoughState], goal: np.ndarray, contact_weight: float) -> Tensor:
    """Σ_{t=0..T} task_loss(s_t, goal) + λ·contact_loss(s_t)"""
    particles, centers = stack_states(states)
    total = ops.sum(task_losses(particles, goal))
    if contact_weight == 0.0:
        return total
    contact = ops.sum(contact_losses(particles, centers, states[0].roller_radius))
    return ops.add(total, ops.scale(contact, contact_weight))


def simulate(initial: DoughState, actions: Tensor, sim_cfg: SimConfig) -> List[DoughState]:
    """(T, n) 행동 텐서로 T+1 개 상태 (활성 Graph 가 있으면 기록)"""
    states = [initial]
    for t in range(actions.shape[0]):
        step = ops.reshape(ops.slice(actions, (slice(t, t + 1), slice(None))), (actions.shape[1],))
        states.append(transition(states[-1], step, sim_cfg))
    return states


def rollout_loss_and_grad(initial: DoughState, goal: np.ndarray, actions: np.ndarray,
                          sim_cfg: Optional[SimConfig] = None,
                          contact_weight: float = 1.0) -> Tuple[float, np.ndarray]:
    """궤적 손실과 (T, n) 행동 기울기"""
    sim_cfg = sim_cfg or SimConfig()
    with Graph() as graph:
        leaf = graph.watch(np.asarray(actions, dtype=np.float64))
        loss = trajectory_loss(simulate(initial.detach(), leaf, sim_cfg), goal, contact_weight)
        grads = graph.backward(loss)
    return loss.item(), grads.wrt(leaf)


def action_gradients(spec: TaskSpec, actions: np.ndarray, cfg: Optional[TrajOptConfig] = None,
                     sim_cfg: Optional[SimConfig] = None) -> np.ndarray:
    """∂L_traj/∂a_t 전부 (T × n)"""
    cfg = cfg or TrajOptConfig()
    _, grads = rollout_loss_and_grad(spec.initial_state(), spec.goal_cloud(), actions, sim_cfg, cfg.contact_weight)
    return grads


@dataclass
class TrajOptResult:
    """최적 행동열과 스텝별 손실 (history[0] 은 초기 행동열의 손실)"""

    actions: np.ndarray
    best_loss: float
    best_step: int
    history: List[float] = field(default_factory=list)

    @property
    def initial_loss(self) -> float:
        return self.history[0]

    def running_minimum(self) -> np.ndarray:
        return np.minimum.accumulate(np.asarray(self.history))


def initial_actions(spec: TaskSpec, cfg: TrajOptConfig, sim_cfg: SimConfig) -> np.ndarray:
    bounds = sim_cfg.bounds()
    actions = np.zeros((spec.horizon, bounds.dim))
    if cfg.init_noise > 0.0:
        rng = derive_rng(cfg.seed, "traj_opt", "init", spec.seed)
        actions = bounds.clip(actions + cfg.init_noise * rng.standard_normal(actions.shape))
    return actions


def optimize_trajectory(spec: TaskSpec, cfg: Optional[TrajOptConfig] = None,
                        sim_cfg: Optional[SimConfig] = None,
                        actions: Optional[np.ndarray] = None) -> TrajOptResult:
    """
    Adam 으로 행동열 최적화

    Args:
        spec: 과제 (초기 상태, 목표 구름, 지평)
        cfg: TrajOptConfig
        sim_cfg: SimConfig (동역학, 행동 상자)
        actions: 시작 행동열 (None 이면 0, init_noise > 0 이면 잡음 추가)

    Returns:
        TrajOptResult (가장 낮은 손실의 행동열)
    """
    cfg = cfg or TrajOptConfig()
    sim_cfg = sim_cfg or SimConfig()
    bounds = sim_cfg.bounds()
    initial = spec.initial_state()
    goal = spec.goal_cloud()
    current = initial_actions(spec, cfg, sim_cfg) if actions is None else bounds.clip(np.asarray(actions, float))

    state = AdamState.for_params([current], lr=cfg.learning_rate)
    history: List[float] = []
    best_actions, best_loss, best_step = current.copy(), float("inf"), 0
    for step in range(cfg.steps + 1):
        try:
            loss, grad = rollout_loss_and_grad(initial, goal, current, sim_cfg, cfg.contact_weight)
        except NumericalError as e:
            e.details.update(step=step)
            raise
        if not np.isfinite(loss) or not np.isfinite(grad).all():
            raise NumericalError(ERROR_NON_FINITE_TRAJ_LOSS.format(step), step=step)
        history.append(loss)
        if loss < best_loss:
            best_actions, best_loss, best_step = current.copy(), loss, step
        if step % PROGRESS_LOG_EVERY == 0:
            logger.debug(LOG_OPT_PROGRESS.format(spec.name, step, cfg.steps, loss, best_loss))
        if step == cfg.steps:
            break
        (current,) = adam_step([current], [grad], state)
        current = bounds.clip(current)

    logger.info(LOG_OPT_DONE.format(spec.name, history[0], best_loss))
    return TrajOptResult(actions=best_actions, best_loss=best_loss, best_step=best_step, history=history)

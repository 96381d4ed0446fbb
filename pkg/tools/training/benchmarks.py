"""
1차원 벤치마크 데이터셋

관측은 스칼라 x ∈ [−1, 1] (Observation.scalar), 행동 상자는 [−1, 1] 입니다.
계단 함수는 불연속 근사, 이봉 분포는 다봉 행동 포착을 시험합니다.
"""

from typing import Callable, Optional

import numpy as np

from tools.energy_model.types import ActionBounds, Observation

from .dataset import DemoDataset, DemoTrajectory, NO_TASK

UNIT_BOUNDS = ActionBounds([-1.0], [1.0])
STEP_LOW = -0.5
STEP_HIGH = 0.5
STEP_MARGIN = 0.01


def step_target(x: np.ndarray) -> np.ndarray:
    """x < 0 이면 −0.5, 아니면 +0.5"""
    return np.where(np.asarray(x) < 0.0, STEP_LOW, STEP_HIGH)


def _scalar_dataset(xs: np.ndarray, labels: Callable[[np.ndarray], np.ndarray]) -> DemoDataset:
    actions = labels(xs).reshape(-1, 1)
    trajectory = DemoTrajectory(0, NO_TASK, [Observation.scalar(x) for x in xs], actions)
    return DemoDataset([trajectory], UNIT_BOUNDS)


def step_function_dataset(count: int = 200, rng: Optional[np.random.Generator] = None) -> DemoDataset:
    """x 를 [−1, 1] 격자(rng 가 있으면 균등 추출)에서 뽑은 계단 함수 시연"""
    xs = rng.uniform(-1.0, 1.0, size=count) if rng is not None else np.linspace(-1.0, 1.0, count)
    return _scalar_dataset(xs, step_target)


def bimodal_dataset(count: int = 200, rng: Optional[np.random.Generator] = None) -> DemoDataset:
    """같은 관측에 행동 −1, +1 이 반씩 (x 마다 두 번 기록)"""
    half = count // 2
    xs = rng.uniform(-1.0, 1.0, size=half) if rng is not None else np.linspace(-1.0, 1.0, half)
    xs = np.concatenate([xs, xs])
    signs = np.concatenate([-np.ones(half), np.ones(half)])
    return _scalar_dataset(xs, lambda _x: signs)


def step_eval_grid(points: int = 201) -> np.ndarray:
    """평가 격자에서 계단 부근 ±STEP_MARGIN 을 제외한 x"""
    xs = np.linspace(-1.0, 1.0, points)
    return xs[np.abs(xs) > STEP_MARGIN]

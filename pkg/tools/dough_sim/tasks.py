"""
반죽 밀기 과제 구성

학습용 과제는 (초기 반죽 중심 x, 목표 중심 x, 반죽 반지름) 의 5 × 5 × 5 격자 125 개이고,
held-out 과제 10 개는 격자 범위 밖의 반지름/위치에서 고정 시드로 뽑습니다.
반죽과 목표는 바닥 위에 놓이고 목표는 항상 반죽 오른쪽, 롤러는 반죽 왼쪽 바닥에서 시작합니다.
초기 반죽과 목표 구름은 해바라기(sunflower) 배치로 결정적으로 만듭니다.
"""

from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from tools.error_handler import ValidationError

from .configs import (
    BLOB_RADIUS_RANGE,
    DOUGH_X_RANGE,
    ERROR_INDEX_RANGE,
    GOAL_AXIS_SCALE,
    GRID_SIZE,
    HELD_OUT_COUNT,
    HELD_OUT_RADIUS_RANGES,
    HELD_OUT_SEED,
    HELD_OUT_DOUGH_X_RANGE,
    HELD_OUT_TARGET_X_RANGE,
    ROLLER_CLEARANCE,
    TABLE_Y,
    TARGET_X_RANGE,
    SimConfig,
)
from .core import DoughState, PolicyFn, Trajectory, rollout

_GOLDEN_ANGLE = np.pi * (3.0 - np.sqrt(5.0))

GRID_COUNT = GRID_SIZE ** 3


def sunflower_disk(count: int) -> np.ndarray:
    """단위 원판 위에 고르게 퍼진 count 개 점"""
    i = np.arange(count, dtype=np.float64)
    radius = np.sqrt((i + 0.5) / count)
    theta = i * _GOLDEN_ANGLE
    return np.stack([radius * np.cos(theta), radius * np.sin(theta)], axis=1)


@dataclass(frozen=True)
class TaskSpec:
    """과제 하나: 초기 반죽, 목표 구름, 롤러 초기 자세, 지평"""

    name: str
    split: str
    index: int
    dough_center: Tuple[float, float]
    blob_radius: float
    target_center: Tuple[float, float]
    roller_center: Tuple[float, float]
    roller_radius: float
    horizon: int
    num_particles: int
    seed: int

    @property
    def target_distance(self) -> float:
        return float(np.hypot(self.target_center[0] - self.dough_center[0],
                              self.target_center[1] - self.dough_center[1]))

    def initial_particles(self) -> np.ndarray:
        return np.asarray(self.dough_center) + self.blob_radius * sunflower_disk(self.num_particles)

    def goal_cloud(self) -> np.ndarray:
        """목표 중심의 납작한 타원 (입자 M 개, 아래 끝이 바닥에 닿음)"""
        axes = self.blob_radius * np.asarray(GOAL_AXIS_SCALE)
        return np.asarray(self.target_center) + axes * sunflower_disk(self.num_particles)

    def initial_state(self) -> DoughState:
        return DoughState.from_arrays(self.initial_particles(), np.asarray(self.roller_center), self.roller_radius)


def _make_spec(name: str, split: str, index: int, dough_x: float, target_x: float, radius: float,
               cfg: SimConfig, seed: int) -> TaskSpec:
    roller_x = dough_x - radius - cfg.roller_radius - ROLLER_CLEARANCE
    return TaskSpec(
        name=name,
        split=split,
        index=index,
        dough_center=(float(dough_x), TABLE_Y + float(radius)),
        blob_radius=float(radius),
        target_center=(float(target_x), TABLE_Y + GOAL_AXIS_SCALE[1] * float(radius)),
        roller_center=(float(roller_x), TABLE_Y + cfg.roller_radius),
        roller_radius=cfg.roller_radius,
        horizon=cfg.horizon,
        num_particles=cfg.num_particles,
        seed=seed,
    )


def _grid_axes() -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    return (np.linspace(*DOUGH_X_RANGE, GRID_SIZE),
            np.linspace(*TARGET_X_RANGE, GRID_SIZE),
            np.linspace(*BLOB_RADIUS_RANGE, GRID_SIZE))


def sample_configuration(index: Optional[int] = None, cfg: Optional[SimConfig] = None,
                         rng: Optional[np.random.Generator] = None) -> TaskSpec:
    """
    격자 과제 하나

    Args:
        index: 0..124 (None 이면 rng 로 균등 추출)
        cfg: SimConfig (입자 수, 지평, 롤러 반지름)
        rng: index 가 None 일 때 사용

    Returns:
        TaskSpec
    """
    cfg = cfg or SimConfig()
    if index is None:
        if rng is None:
            raise ValidationError("sample_configuration needs an index or an rng", field="index")
        index = int(rng.integers(0, GRID_COUNT))
    if not 0 <= index < GRID_COUNT:
        raise ValidationError(ERROR_INDEX_RANGE.format(index, GRID_COUNT), field="index")
    dough_xs, target_xs, radii = _grid_axes()
    i, rest = divmod(index, GRID_SIZE * GRID_SIZE)
    j, k = divmod(rest, GRID_SIZE)
    return _make_spec(f"grid-{index:03d}", "train", index, dough_xs[i], target_xs[j], radii[k], cfg, seed=index)


def grid_configurations(cfg: Optional[SimConfig] = None) -> List[TaskSpec]:
    return [sample_configuration(i, cfg) for i in range(GRID_COUNT)]


def held_out_configurations(cfg: Optional[SimConfig] = None, count: int = HELD_OUT_COUNT) -> List[TaskSpec]:
    """격자 밖 과제: 반지름이 격자 범위보다 작거나 큼, 위치도 격자 범위 밖까지"""
    cfg = cfg or SimConfig()
    rng = np.random.default_rng(HELD_OUT_SEED)
    specs = []
    for j in range(count):
        radius = rng.uniform(*HELD_OUT_RADIUS_RANGES[j % len(HELD_OUT_RADIUS_RANGES)])
        dough_x = rng.uniform(*HELD_OUT_DOUGH_X_RANGE)
        target_x = rng.uniform(*HELD_OUT_TARGET_X_RANGE)
        specs.append(_make_spec(f"heldout-{j:02d}", "heldout", j, dough_x, target_x, radius, cfg,
                                seed=GRID_COUNT + j))
    return specs


def split_configurations(split: str, cfg: Optional[SimConfig] = None) -> List[TaskSpec]:
    if split == "train":
        return grid_configurations(cfg)
    if split == "heldout":
        return held_out_configurations(cfg)
    raise ValidationError(f"unknown split '{split}' (expected train or heldout)", field="split")


def rollout_task(policy: PolicyFn, spec: TaskSpec, cfg: Optional[SimConfig] = None) -> Trajectory:
    return rollout(policy, spec.initial_state(), spec.horizon, cfg, name=spec.name)

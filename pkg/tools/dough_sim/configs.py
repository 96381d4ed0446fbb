"""
2D 반죽 시뮬레이터 설정 및 상수 정의

작업 공간은 [0, 1]² 이고, 반죽은 y = TABLE_Y 바닥 위에 놓인 입자 M 개의 원형 덩어리,
롤러는 반지름 r 의 원입니다.
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional, Tuple

from tools.energy_model.types import ActionBounds
from tools.error_handler import ConfigurationError

logger = logging.getLogger(__name__)

# 반죽, 목표, 롤러가 놓이는 바닥 높이
TABLE_Y = 0.2


@dataclass(frozen=True)
class SimConfig:
    """접촉/응집 동역학과 행동 상자"""

    stiffness: float = 5.0  # κ
    smoothing: float = 0.02  # w
    cohesion: float = 0.05
    action_low: Tuple[float, float] = (-0.05, -0.05)
    action_high: Tuple[float, float] = (0.05, 0.05)
    num_particles: int = 128
    horizon: int = 40
    roller_radius: float = 0.08
    # 전이 마지막에 입자 y 를 이 높이 이상으로 고정 (None 이면 바닥 없음)
    table_height: Optional[float] = TABLE_Y

    def __post_init__(self) -> None:
        if self.stiffness <= 0 or self.smoothing <= 0:
            raise ConfigurationError("sim stiffness and smoothing must be > 0", config_key="sim.stiffness")
        if self.cohesion < 0:
            raise ConfigurationError("sim cohesion must be >= 0", config_key="sim.cohesion")
        if self.num_particles < 1:
            raise ConfigurationError("sim num_particles must be >= 1", config_key="sim.num_particles")
        if self.horizon < 1:
            raise ConfigurationError("sim horizon must be >= 1", config_key="sim.horizon")
        if self.roller_radius <= 0:
            raise ConfigurationError("sim roller_radius must be > 0", config_key="sim.roller_radius")
        if self.table_height is not None and not math.isfinite(self.table_height):
            raise ConfigurationError("sim table_height must be finite or null", config_key="sim.table_height")

    def bounds(self) -> ActionBounds:
        return ActionBounds(self.action_low, self.action_high)


# 접촉 변위 κ·w·max(softplus((r−d)/w) − softplus(CONTACT_CUTOFF), 0): d ≥ r + 10w 에서 정확히 0
CONTACT_CUTOFF = -10.0
# 롤러 중심과 정확히 겹친 입자의 밀림 방향 (+x)
COINCIDENT_OFFSET = 1e-12
SOFTMIN_TEMPERATURE = 0.01
ACTION_TOLERANCE = 1e-12

# 과제 격자: (초기 반죽 중심 x, 목표 중심 x, 반죽 반지름) 5 × 5 × 5
# 목표는 항상 반죽 오른쪽에 있어 모든 과제에 0.2 이상의 운반 거리가 있음
GRID_SIZE = 5
DOUGH_X_RANGE = (0.25, 0.4)
TARGET_X_RANGE = (0.6, 0.75)
BLOB_RADIUS_RANGE = (0.08, 0.12)
# 롤러는 반죽 왼쪽(목표 반대편) 바닥 위에서 이만큼 떨어져 시작
ROLLER_CLEARANCE = 0.02
# 목표 구름: 바닥 위의 납작한 타원 (반축 = 반지름 × 배율, 넓이는 초기 원판과 거의 같음)
GOAL_AXIS_SCALE = (1.5, 0.65)

# 격자 밖 held-out 과제
HELD_OUT_COUNT = 10
HELD_OUT_SEED = 20240
HELD_OUT_RADIUS_RANGES = ((0.06, 0.075), (0.125, 0.14))
HELD_OUT_DOUGH_X_RANGE = (0.26, 0.42)
HELD_OUT_TARGET_X_RANGE = (0.58, 0.76)

LOG_ROLLOUT = "rollout finished: task {} ({} steps)"
ERROR_ACTION_OUT_OF_BOUNDS = "action {} lies outside the per-step bounds [{}, {}]"
ERROR_INDEX_RANGE = "task index {} out of range (grid has {} configurations)"
ERROR_EMPTY_CLOUD = "point cloud is empty"

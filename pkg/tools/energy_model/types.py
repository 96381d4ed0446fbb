"""
관측/행동 도메인 타입

Observation 은 M×2 입자 좌표와 롤러 자세(중심 2 + 반지름 1)로 이루어지고,
ActionBounds 는 모든 샘플러와 정책이 공유하는 행동 상자 [a_min, a_max] 입니다.
"""

from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

from tools.error_handler import ValidationError

POINT_DIM = 2
POSE_DIM = 3


@dataclass(frozen=True)
class Observation:
    """입자 점군 + 롤러 자세"""

    points: np.ndarray
    roller_pose: np.ndarray

    def __post_init__(self) -> None:
        points = np.asarray(self.points, dtype=np.float64)
        pose = np.asarray(self.roller_pose, dtype=np.float64).reshape(-1)
        if points.ndim != 2 or points.shape[1] != POINT_DIM:
            raise ValidationError(f"observation points must be M×{POINT_DIM}, got {points.shape}", field="points")
        if points.shape[0] < 1:
            raise ValidationError("observation has zero points", field="points")
        if pose.shape != (POSE_DIM,):
            raise ValidationError(f"roller pose must have {POSE_DIM} values, got {pose.shape}", field="roller_pose")
        if not (np.isfinite(points).all() and np.isfinite(pose).all()):
            raise ValidationError("observation contains non-finite coordinates", field="points")
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "roller_pose", pose)

    @property
    def num_points(self) -> int:
        return int(self.points.shape[0])

    def flatten(self) -> np.ndarray:
        """직렬화용 평탄화: points 행 우선 + 롤러 자세"""
        return np.concatenate([self.points.reshape(-1), self.roller_pose])

    @classmethod
    def scalar(cls, x: float) -> "Observation":
        """1차원 벤치마크용: 단일 점 (x, 0), 롤러 자세 0"""
        return cls(np.array([[float(x), 0.0]]), np.zeros(POSE_DIM))


@dataclass(frozen=True)
class ActionBounds:
    """행동 상자 경계 a_min < a_max (성분별)"""

    low: np.ndarray
    high: np.ndarray

    def __post_init__(self) -> None:
        low = np.asarray(self.low, dtype=np.float64).reshape(-1)
        high = np.asarray(self.high, dtype=np.float64).reshape(-1)
        if low.shape != high.shape or low.size == 0:
            raise ValidationError(f"action bounds shapes differ: {low.shape} vs {high.shape}", field="bounds")
        if not np.all(low < high):
            raise ValidationError("action bounds need a_min < a_max componentwise", field="bounds")
        object.__setattr__(self, "low", low)
        object.__setattr__(self, "high", high)

    @classmethod
    def symmetric(cls, half_width: Sequence[float]) -> "ActionBounds":
        half = np.asarray(half_width, dtype=np.float64)
        return cls(-half, half)

    @property
    def dim(self) -> int:
        return int(self.low.size)

    @property
    def width(self) -> np.ndarray:
        return self.high - self.low

    @property
    def midpoint(self) -> np.ndarray:
        return 0.5 * (self.low + self.high)

    def clip(self, actions: np.ndarray) -> np.ndarray:
        return np.clip(actions, self.low, self.high)

    def contains(self, actions: np.ndarray) -> bool:
        actions = np.asarray(actions)
        return bool(np.all(actions >= self.low) and np.all(actions <= self.high))

    def sample_uniform(self, rng: np.random.Generator, shape: Tuple[int, ...]) -> np.ndarray:
        """shape + (n,) 모양의 균등 샘플"""
        return rng.uniform(self.low, self.high, size=tuple(shape) + (self.dim,))


def stack_observations(observations: Sequence[Observation]) -> Tuple[np.ndarray, np.ndarray]:
    """같은 입자 수의 관측들을 (B, M, 2), (B, 3) 배열로 쌓음"""
    points = np.stack([o.points for o in observations])
    poses = np.stack([o.roller_pose for o in observations])
    return points, poses

"""
공유 신경망 구성 요소

순열 불변 점군 인코더(점별 MLP → max-pool → 롤러 자세 결합 → 투영)와 tanh MLP 를
자동미분 연산으로 구현합니다. 에너지 모델과 명시적(explicit) 정책이 함께 사용합니다.
"""

from collections import OrderedDict
from dataclasses import dataclass
from typing import Dict, List, Mapping, Sequence, Tuple

import numpy as np

from tools.autodiff import Tensor, ops
from tools.autodiff.core import ArrayLike
from tools.error_handler import NumericalError

from .types import POINT_DIM, POSE_DIM, Observation, stack_observations


@dataclass(frozen=True)
class SetEncoderConfig:
    """점별 폭 (2→64→128), 투영 폭 D"""

    point_widths: Tuple[int, ...] = (64, 128)
    embed_dim: int = 64


class ParamSet:
    """이름 순서가 고정된 파라미터 배열 묶음 (불변 값처럼 취급)"""

    MODEL_KIND = "params"

    def __init__(self, arrays: "OrderedDict[str, np.ndarray]"):
        self.arrays: "OrderedDict[str, np.ndarray]" = OrderedDict(
            (name, np.asarray(value, dtype=np.float64)) for name, value in arrays.items()
        )

    @property
    def names(self) -> List[str]:
        return list(self.arrays.keys())

    def as_list(self) -> List[np.ndarray]:
        return list(self.arrays.values())

    def replace(self, values: Sequence[np.ndarray]) -> "ParamSet":
        """같은 이름 순서로 새 값을 가진 복사본"""
        return type(self)(OrderedDict(zip(self.names, values)))

    def num_parameters(self) -> int:
        return int(sum(a.size for a in self.arrays.values()))

    def all_finite(self) -> bool:
        return all(np.isfinite(a).all() for a in self.arrays.values())

    def __getitem__(self, name: str) -> np.ndarray:
        return self.arrays[name]


def glorot_uniform(rng: np.random.Generator, fan_in: int, fan_out: int) -> np.ndarray:
    """±√(6/(fan_in+fan_out)) 균등 초기화"""
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=(fan_in, fan_out))


def init_mlp(rng: np.random.Generator, prefix: str, widths: Sequence[int]) -> "OrderedDict[str, np.ndarray]":
    """widths = (입력, 은닉..., 출력) 의 dense 층들, 편향 0"""
    arrays: "OrderedDict[str, np.ndarray]" = OrderedDict()
    for i, (fan_in, fan_out) in enumerate(zip(widths[:-1], widths[1:])):
        arrays[f"{prefix}.{i}.weight"] = glorot_uniform(rng, fan_in, fan_out)
        arrays[f"{prefix}.{i}.bias"] = np.zeros(fan_out)
    return arrays


def init_set_encoder(rng: np.random.Generator, cfg: SetEncoderConfig) -> "OrderedDict[str, np.ndarray]":
    arrays = init_mlp(rng, "encoder", (POINT_DIM,) + tuple(cfg.point_widths))
    arrays.update(init_mlp(rng, "projection", (cfg.point_widths[-1] + POSE_DIM, cfg.embed_dim)))
    return arrays


def count_layers(params: Mapping[str, ArrayLike], prefix: str) -> int:
    return sum(1 for name in params if name.startswith(prefix + ".") and name.endswith(".weight"))


def _check_finite(t: Tensor, layer: str) -> Tensor:
    if not np.isfinite(t.data).all():
        raise NumericalError(f"non-finite activation after layer {layer}", layer=layer)
    return t


def mlp_forward(params: Mapping[str, ArrayLike], prefix: str, x: ArrayLike,
                final_activation: bool = False) -> Tensor:
    """tanh 은닉층 MLP. 마지막 층은 final_activation 이 False 면 선형."""
    n_layers = count_layers(params, prefix)
    h = x
    for i in range(n_layers):
        h = ops.dense(h, params[f"{prefix}.{i}.weight"], params[f"{prefix}.{i}.bias"])
        if i < n_layers - 1 or final_activation:
            h = ops.tanh(h)
        h = _check_finite(h, f"{prefix}.{i}")
    return h


def encode_points(params: Mapping[str, ArrayLike], points: np.ndarray, poses: np.ndarray) -> Tensor:
    """
    (B, M, 2) 점군 + (B, 3) 자세 -> (B, D) 임베딩

    점별 MLP 후 점 축 max-pool 이라 점 순서에 정확히 불변입니다.
    """
    batch, count, _ = points.shape
    flat = ops.reshape(points, (batch * count, POINT_DIM))
    features = mlp_forward(params, "encoder", flat, final_activation=True)
    width = features.shape[1]
    pooled = ops.max_reduce(ops.reshape(features, (batch, count, width)), axis=1)
    joined = ops.concat([pooled, poses], axis=1)
    return mlp_forward(params, "projection", joined)


def encode_observations(params: Mapping[str, ArrayLike], observations: Sequence[Observation]) -> Tensor:
    """입자 수가 섞여 있으면 같은 크기끼리 나눠 인코딩한 뒤 원래 순서로 합침"""
    counts = {o.num_points for o in observations}
    if len(counts) == 1:
        points, poses = stack_observations(observations)
        return encode_points(params, points, poses)
    rows = [encode_points(params, o.points[None], o.roller_pose[None]) for o in observations]
    return ops.concat(rows, axis=0)


def as_tensors(params: ParamSet) -> Dict[str, Tensor]:
    """그래프에 기록하지 않는 상수 텐서로 변환"""
    return {name: Tensor(value) for name, value in params.arrays.items()}

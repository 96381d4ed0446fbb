"""
샘플러가 소비하는 에너지 함수 인터페이스

EnergyFunction.bind(관측들) 은 관측 B 개에 고정된 EnergySurface 를 돌려주고, 표면은
(B, K, n) 행동 배열의 에너지 (B, K) 와 행동 기울기 (B, K, n) 를 계산합니다.
학습된 모델은 tools.energy_model.ModelEnergy, 닫힌 형태의 시험용 에너지는 AnalyticEnergy 입니다.
"""

from typing import Callable, Protocol, Sequence

import numpy as np

from tools.autodiff import Graph, Tensor, ops
from tools.energy_model.types import Observation
from tools.error_handler import ShapeError

# (B, K, n) 행동 텐서 -> (B, K) 에너지 텐서
ActionEnergyFn = Callable[[Tensor], Tensor]


class EnergySurface(Protocol):
    def energies(self, actions: np.ndarray) -> np.ndarray: ...

    def gradients(self, actions: np.ndarray) -> np.ndarray: ...


class EnergyFunction(Protocol):
    @property
    def action_dim(self) -> int: ...

    def bind(self, observations: Sequence[Observation]) -> EnergySurface: ...


class _AnalyticSurface:
    def __init__(self, fn: ActionEnergyFn, batch_size: int, action_dim: int):
        self._fn = fn
        self.batch_size = batch_size
        self._action_dim = action_dim

    def _check(self, actions: np.ndarray) -> np.ndarray:
        actions = np.asarray(actions, dtype=np.float64)
        if actions.ndim != 3 or actions.shape[0] != self.batch_size or actions.shape[2] != self._action_dim:
            raise ShapeError("energy_surface", actions.shape, (self.batch_size, -1, self._action_dim))
        return actions

    def energies(self, actions: np.ndarray) -> np.ndarray:
        return self._fn(Tensor(self._check(actions))).data

    def gradients(self, actions: np.ndarray) -> np.ndarray:
        with Graph() as graph:
            leaf = graph.watch(self._check(actions))
            grads = graph.backward(ops.sum(self._fn(leaf)))
        return grads.wrt(leaf)


class AnalyticEnergy:
    """관측과 무관한 닫힌 형태 에너지 (자동미분 연산으로 작성)"""

    def __init__(self, fn: ActionEnergyFn, action_dim: int):
        self._fn = fn
        self._action_dim = action_dim

    @property
    def action_dim(self) -> int:
        return self._action_dim

    def bind(self, observations: Sequence[Observation]) -> _AnalyticSurface:
        return _AnalyticSurface(self._fn, len(observations), self._action_dim)


def _coordinate(actions: Tensor, i: int) -> Tensor:
    return ops.slice(actions, (slice(None), slice(None), i))


def quadratic_energy(center: Sequence[float], weight: float = 1.0) -> AnalyticEnergy:
    """E(a) = weight · ‖a − center‖²"""
    center = np.asarray(center, dtype=np.float64)
    n = center.size

    def fn(actions: Tensor) -> Tensor:
        b, k, _ = actions.shape
        offset = ops.sub(actions, np.broadcast_to(center, (b, k, n)))
        return ops.scale(ops.sum(ops.square(offset), axis=2), weight)

    return AnalyticEnergy(fn, n)


def double_well_energy(action_dim: int = 2) -> AnalyticEnergy:
    """E(a) = (a₁² − 1)² + Σ_{i>1} aᵢ², 최소점 (±1, 0, ...)"""

    def fn(actions: Tensor) -> Tensor:
        well = ops.square(ops.sub(ops.square(_coordinate(actions, 0)), 1.0))
        if action_dim == 1:
            return well
        rest = ops.slice(actions, (slice(None), slice(None), slice(1, None)))
        return ops.add(well, ops.sum(ops.square(rest), axis=2))

    return AnalyticEnergy(fn, action_dim)


def constant_energy(action_dim: int, value: float = 0.0) -> AnalyticEnergy:
    """모든 행동에서 같은 값; 기울기는 정확히 0"""

    def fn(actions: Tensor) -> Tensor:
        return ops.add(ops.scale(ops.sum(actions, axis=2), 0.0), value)

    return AnalyticEnergy(fn, action_dim)


def shifted_energy(base: AnalyticEnergy, value: float) -> AnalyticEnergy:
    """E(a) + value"""
    inner = base._fn

    def fn(actions: Tensor) -> Tensor:
        return ops.add(inner(actions), value)

    return AnalyticEnergy(fn, base.action_dim)

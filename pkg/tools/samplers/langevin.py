"""
Langevin MCMC 샘플러와 리플레이 버퍼

a ← clamp(a − (λ/2)·clip(∇_a E) + ω), ω ~ N(0, σ²I) 를 chain_length 번 반복합니다.
여러 관측(B)과 관측마다 여러 체인(C)을 (B, C, n) 배열로 한꺼번에 진행합니다.
"""

import logging
import math
import threading
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
import pandas as pd

from tools.energy_model.types import ActionBounds, Observation
from tools.error_handler import NumericalError, ValidationError

from .configs import (
    ERROR_INIT_OUT_OF_BOUNDS,
    ERROR_NON_FINITE_GRADIENT,
    LOG_NEGATIVES,
    LangevinConfig,
)
from .energy_fn import EnergyFunction

logger = logging.getLogger(__name__)


@dataclass
class LangevinResult:
    """final: (B, C, n). chain: (k_max+1, B, C, n), energies: (k_max+1, B, C); record=False 면 None"""

    final: np.ndarray
    chain: Optional[np.ndarray] = None
    energies: Optional[np.ndarray] = None

    def best_states(self) -> np.ndarray:
        """관측마다 체인·스텝 전체에서 에너지가 가장 낮은 상태 (B, n)"""
        if self.chain is None or self.energies is None:
            raise ValidationError("chain was not recorded; run with record=True", field="record")
        steps, batch, chains = self.energies.shape
        flat = self.energies.transpose(1, 0, 2).reshape(batch, steps * chains)
        index = np.argmin(flat, axis=1)
        step, chain = np.divmod(index, chains)
        return self.chain[step, np.arange(batch), chain]


def _as_batch(init: np.ndarray, batch: int) -> np.ndarray:
    init = np.asarray(init, dtype=np.float64)
    if init.ndim == 1:
        init = init[None, None, :]
    elif init.ndim == 2:
        init = init[None]
    if init.ndim != 3 or init.shape[0] != batch:
        raise ValidationError(f"Langevin init must be (B, C, n) with B={batch}, got {init.shape}", field="init")
    return init


def clip_gradient_norm(grads: np.ndarray, max_norm: Optional[float]) -> np.ndarray:
    """마지막 축의 L2 노름이 max_norm 을 넘는 기울기만 축소"""
    if max_norm is None:
        return grads
    norms = np.linalg.norm(grads, axis=-1, keepdims=True)
    factor = np.minimum(1.0, max_norm / np.maximum(norms, 1e-300))
    return grads * factor


def langevin_chain(energy_fn: EnergyFunction, observations: Sequence[Observation], init: np.ndarray,
                   bounds: ActionBounds, config: Optional[LangevinConfig] = None,
                   rng: Optional[np.random.Generator] = None, record: bool = True) -> LangevinResult:
    """
    Langevin 체인 실행

    Args:
        energy_fn: EnergyFunction
        observations: 관측 B 개
        init: (B, C, n) 초기 행동 (관측 하나면 (C, n) 또는 (n,) 도 허용), 상자 안이어야 함
        bounds: 행동 상자
        config: LangevinConfig
        rng: 난수 생성기 (None 이면 config.seed)
        record: True 면 전체 체인과 스텝별 에너지를 보관

    Returns:
        LangevinResult
    """
    config = config or LangevinConfig()
    rng = rng if rng is not None else np.random.default_rng(config.seed)
    actions = _as_batch(init, len(observations))
    if not bounds.contains(actions):
        raise ValidationError(ERROR_INIT_OUT_OF_BOUNDS, field="init")
    surface = energy_fn.bind(observations)

    step_size = config.step_size
    sigma = config.sigma
    noise_decay = math.sqrt(config.step_decay)

    chain = [actions] if record else None
    energies = [surface.energies(actions)] if record else None
    for step in range(config.chain_length):
        grads = surface.gradients(actions)
        if not np.all(np.isfinite(grads)):
            raise NumericalError(ERROR_NON_FINITE_GRADIENT.format(step), step=step)
        grads = clip_gradient_norm(grads, config.grad_clip)
        noise = sigma * rng.standard_normal(actions.shape)
        actions = bounds.clip(actions - 0.5 * step_size * grads + noise)
        step_size *= config.step_decay
        sigma *= noise_decay
        if record:
            chain.append(actions)
            energies.append(surface.energies(actions))

    if not record:
        return LangevinResult(final=actions)
    return LangevinResult(final=actions, chain=np.stack(chain), energies=np.stack(energies))


class ReplayBuffer:
    """체인 최종 행동을 모아 두는 고정 크기 FIFO 링 (관측과 무관한 전역 풀)"""

    def __init__(self, capacity: int, action_dim: int, bounds: Optional[ActionBounds] = None):
        if capacity < 1:
            raise ValidationError("replay buffer capacity must be >= 1", field="capacity")
        self.capacity = capacity
        self.bounds = bounds
        self._data = np.zeros((capacity, action_dim))
        self._size = 0
        self._head = 0
        self._lock = threading.Lock()

    def __len__(self) -> int:
        return self._size

    @property
    def size(self) -> int:
        return self._size

    def push(self, actions: np.ndarray) -> None:
        actions = np.asarray(actions, dtype=np.float64).reshape(-1, self._data.shape[1])
        if self.bounds is not None and not self.bounds.contains(actions):
            raise ValidationError("replay buffer only stores in-bounds actions", field="actions")
        # 용량보다 많이 들어오면 마지막 capacity 개만 남음
        if len(actions) > self.capacity:
            actions = actions[-self.capacity:]
        with self._lock:
            for row in actions:
                self._data[self._head] = row
                self._head = (self._head + 1) % self.capacity
            self._size = min(self.capacity, self._size + len(actions))

    def sample(self, count: int, rng: np.random.Generator) -> np.ndarray:
        with self._lock:
            if self._size == 0:
                raise ValidationError("cannot sample from an empty replay buffer", field="buffer")
            index = rng.integers(0, self._size, size=count)
            return self._data[index].copy()

    def contents(self) -> np.ndarray:
        with self._lock:
            return self._data[:self._size].copy()


def langevin_negatives(energy_fn: EnergyFunction, observations: Sequence[Observation], n_neg: int,
                       buffer: ReplayBuffer, bounds: ActionBounds, config: Optional[LangevinConfig] = None,
                       rng: Optional[np.random.Generator] = None) -> np.ndarray:
    """
    관측마다 n_neg 개의 Langevin 음성 표본 (B, n_neg, n)

    각 체인은 buffer_reuse 확률로 버퍼에서, 아니면 상자에서 균등하게 시작합니다.
    최종 행동은 모두 버퍼에 들어갑니다.
    """
    config = config or LangevinConfig()
    rng = rng if rng is not None else np.random.default_rng(config.seed)
    init = bounds.sample_uniform(rng, (len(observations), n_neg))
    reused = 0
    if len(buffer) > 0 and config.buffer_reuse > 0.0:
        mask = rng.random(init.shape[:2]) < config.buffer_reuse
        reused = int(mask.sum())
        if reused:
            init[mask] = buffer.sample(reused, rng)
    result = langevin_chain(energy_fn, observations, init, bounds, config, rng, record=False)
    buffer.push(result.final.reshape(-1, bounds.dim))
    logger.debug(LOG_NEGATIVES.format(init.shape[0] * init.shape[1], reused, len(buffer)))
    return result.final


def chain_trace_table(result: LangevinResult, observation_index: int = 0) -> pd.DataFrame:
    """진단용 체인 궤적 표: step, chain, a0..a{n-1}, energy"""
    if result.chain is None or result.energies is None:
        raise ValidationError("chain was not recorded; run with record=True", field="record")
    steps, _, chains, n = result.chain.shape
    states = result.chain[:, observation_index]
    frame = pd.DataFrame({
        "step": np.repeat(np.arange(steps), chains),
        "chain": np.tile(np.arange(chains), steps),
    })
    for i in range(n):
        frame[f"a{i}"] = states[:, :, i].reshape(-1)
    frame["energy"] = result.energies[:, observation_index].reshape(-1)
    return frame

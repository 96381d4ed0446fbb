"""
에너지 함수 E_θ(o, a)

인코더 임베딩과 행동을 이어 붙여 스칼라 에너지로 보냅니다. 암시적 정책은
â = argmin_a E_θ(o, a) 이고, 샘플러는 ModelEnergy.bind(관측들) 로 얻은 표면에서
(B, K, n) 행동 배열의 에너지와 행동 기울기를 한 번에 계산합니다.
"""

import logging
from typing import Mapping, Optional, Sequence

import numpy as np
from scipy.special import logsumexp

from tools.autodiff import Graph, Tensor, ops
from tools.autodiff.core import ArrayLike
from tools.error_handler import NumericalError, ShapeError, ValidationError

from .configs import LOG_INIT, EnergyModelConfig
from .layers import (
    ParamSet,
    SetEncoderConfig,
    as_tensors,
    count_layers,
    encode_observations,
    init_mlp,
    init_set_encoder,
    mlp_forward,
)
from .types import Observation

logger = logging.getLogger(__name__)


class EnergyParams(ParamSet):
    """인코더 + 에너지 헤드의 모든 학습 파라미터 θ"""

    MODEL_KIND = "energy"

    @property
    def embed_dim(self) -> int:
        return int(self.arrays["projection.0.weight"].shape[1])

    @property
    def action_dim(self) -> int:
        return int(self.arrays["head.0.weight"].shape[0]) - self.embed_dim

    def config(self) -> EnergyModelConfig:
        n_enc = count_layers(self.arrays, "encoder")
        n_head = count_layers(self.arrays, "head")
        point_widths = tuple(int(self.arrays[f"encoder.{i}.weight"].shape[1]) for i in range(n_enc))
        head_widths = tuple(int(self.arrays[f"head.{i}.weight"].shape[1]) for i in range(n_head - 1))
        return EnergyModelConfig(
            action_dim=self.action_dim,
            encoder=SetEncoderConfig(point_widths=point_widths, embed_dim=self.embed_dim),
            head_widths=head_widths,
        )


def init_energy_params(rng: np.random.Generator, cfg: Optional[EnergyModelConfig] = None) -> EnergyParams:
    """Glorot 균등 가중치, 0 편향으로 초기화"""
    cfg = cfg or EnergyModelConfig()
    arrays = init_set_encoder(rng, cfg.encoder)
    widths = (cfg.encoder.embed_dim + cfg.action_dim,) + tuple(cfg.head_widths) + (1,)
    arrays.update(init_mlp(rng, "head", widths))
    params = EnergyParams(arrays)
    logger.debug(LOG_INIT.format(params.num_parameters(), cfg.encoder.embed_dim, cfg.action_dim))
    return params


def head_energies(params: Mapping[str, ArrayLike], embeddings: ArrayLike, actions: ArrayLike) -> Tensor:
    """
    (B, D) 임베딩과 (B, K, n) 행동 -> (B, K) 에너지

    임베딩은 행동 축으로 명시적으로 expand 한 뒤 행동과 concat 합니다.
    """
    actions = actions if isinstance(actions, Tensor) else Tensor(actions)
    if actions.ndim != 3:
        raise ShapeError("head_energies", actions.shape)
    batch, count, n = actions.shape
    emb = embeddings if isinstance(embeddings, Tensor) else Tensor(embeddings)
    if emb.ndim != 2 or emb.shape[0] != batch:
        raise ShapeError("head_energies", emb.shape, actions.shape)
    dim = emb.shape[1]
    tiled = ops.reshape(ops.expand(ops.reshape(emb, (batch, 1, dim)), (batch, count, dim)), (batch * count, dim))
    joined = ops.concat([tiled, ops.reshape(actions, (batch * count, n))], axis=1)
    out = mlp_forward(params, "head", joined)
    return ops.reshape(out, (batch, count))


def encode(params: EnergyParams, obs: Observation) -> np.ndarray:
    """관측 하나의 D 차원 임베딩 (결정적, 점 순서 불변)"""
    return encode_observations(params.arrays, [obs]).data[0].copy()


def energies(params: EnergyParams, observations: Sequence[Observation], actions: np.ndarray) -> np.ndarray:
    """관측 B 개와 (B, K, n) 행동 -> (B, K) 에너지 (그래프 없이)"""
    emb = encode_observations(params.arrays, observations)
    return head_energies(params.arrays, emb, np.asarray(actions, dtype=np.float64)).data


def energy(params: EnergyParams, obs: Observation, action: np.ndarray) -> float:
    """E_θ(o, a) 스칼라"""
    action = np.asarray(action, dtype=np.float64).reshape(1, 1, -1)
    if action.shape[2] != params.action_dim:
        raise ShapeError("energy", action.shape[2:], (params.action_dim,))
    value = float(energies(params, [obs], action)[0, 0])
    if not np.isfinite(value):
        raise NumericalError("non-finite energy", layer="output")
    return value


def action_gradient(params: EnergyParams, obs: Observation, action: np.ndarray) -> np.ndarray:
    """∇_a E_θ(o, a); 파라미터와 관측은 상수"""
    surface = ModelEnergy(params).bind([obs])
    action = np.asarray(action, dtype=np.float64).reshape(1, 1, -1)
    return surface.gradients(action)[0, 0]


def candidate_softmax(energy_values: np.ndarray) -> np.ndarray:
    """pᵢ = exp(−Eᵢ) / Σⱼ exp(−Eⱼ), log-sum-exp 이동으로 안정화"""
    values = -np.asarray(energy_values, dtype=np.float64)
    if values.size == 0:
        raise ValidationError("candidate_softmax needs at least one energy", field="energies")
    return np.exp(values - logsumexp(values))


class BoundModelEnergy:
    """관측 임베딩이 고정된 에너지 표면"""

    def __init__(self, params: EnergyParams, embeddings: np.ndarray):
        self._weights = as_tensors(params)
        self.embeddings = embeddings

    @property
    def batch_size(self) -> int:
        return int(self.embeddings.shape[0])

    def energies(self, actions: np.ndarray) -> np.ndarray:
        return head_energies(self._weights, self.embeddings, actions).data

    def gradients(self, actions: np.ndarray) -> np.ndarray:
        """행마다 독립이므로 Σ E 의 기울기가 곧 행별 ∇_a E"""
        with Graph() as graph:
            leaf = graph.watch(np.asarray(actions, dtype=np.float64))
            total = ops.sum(head_energies(self._weights, self.embeddings, leaf))
            grads = graph.backward(total)
        return grads.wrt(leaf)


class ModelEnergy:
    """학습된 파라미터를 EnergyFunction 인터페이스로 감쌈"""

    def __init__(self, params: EnergyParams):
        self.params = params

    @property
    def action_dim(self) -> int:
        return self.params.action_dim

    def bind(self, observations: Sequence[Observation]) -> BoundModelEnergy:
        emb = encode_observations(self.params.arrays, observations).data
        return BoundModelEnergy(self.params, emb)


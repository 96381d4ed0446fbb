"""
명시적 BC 기준선

암시적 모델과 같은 집합 인코더 뒤에 (D → 128 → 128 → n) 회귀 헤드를 붙인 정책입니다.
MSE 정책은 행동을 직접 내고, 가우시안 정책은 (μ, log σ) 를 내며 행동할 때는 평균을 씁니다.
배치 구성, 증강, 시드 파생은 암시적 학습과 같습니다.
"""

import logging
from typing import List, Optional, Sequence, Tuple

import numpy as np
from tqdm import tqdm

from logging_config import progress_enabled
from tools.autodiff import AdamState, Graph, Tensor, adam_step, ops
from tools.autodiff.core import ArrayLike
from tools.energy_model.checkpoint import read_checkpoint
from tools.energy_model.configs import ERROR_BAD_KIND
from tools.energy_model.layers import (
    ParamSet,
    SetEncoderConfig,
    encode_observations,
    init_mlp,
    init_set_encoder,
    mlp_forward,
)
from tools.energy_model.types import ActionBounds, Observation
from tools.error_handler import CheckpointFormatError, ConfigurationError, NumericalError
from utils.seeding import derive_rng

from .batching import augment_actions, epoch_batches
from .configs import (
    ERROR_NON_FINITE_LOSS,
    ERROR_UNKNOWN_LOSS,
    EXPLICIT_LOSSES,
    LOG_EPOCH,
    LOG_STD_RANGE,
    LOG_TRAIN_START,
    TrainConfig,
)
from .dataset import DemoDataset
from .implicit import TrainResult
from .losses import bc_mse_loss, gaussian_nll_tensor

logger = logging.getLogger(__name__)


class MsePolicyParams(ParamSet):
    """π(o) = 헤드(인코더(o)), 출력 폭 n"""

    MODEL_KIND = "explicit-mse"
    OUTPUTS_PER_DIM = 1

    @property
    def action_dim(self) -> int:
        n_head = sum(1 for name in self.arrays if name.startswith("policy.") and name.endswith(".weight"))
        return int(self.arrays[f"policy.{n_head - 1}.weight"].shape[1]) // self.OUTPUTS_PER_DIM


class GaussianPolicyParams(MsePolicyParams):
    """출력 폭 2n: 앞 n 개가 μ, 뒤 n 개가 log σ"""

    MODEL_KIND = "explicit-gaussian"
    OUTPUTS_PER_DIM = 2


_POLICY_TYPES = {cls.MODEL_KIND: cls for cls in (MsePolicyParams, GaussianPolicyParams)}
_LOSS_TO_KIND = {"mse": MsePolicyParams.MODEL_KIND, "gaussian-nll": GaussianPolicyParams.MODEL_KIND}


def check_loss_kind(loss_kind: str) -> str:
    if loss_kind not in EXPLICIT_LOSSES:
        raise ConfigurationError(ERROR_UNKNOWN_LOSS.format(loss_kind, ", ".join(EXPLICIT_LOSSES)),
                                 config_key="training.loss")
    return loss_kind


def init_policy_params(rng: np.random.Generator, action_dim: int, config: Optional[TrainConfig] = None,
                       loss_kind: str = "mse") -> MsePolicyParams:
    """암시적 모델과 같은 폭의 인코더 + 회귀 헤드"""
    config = config or TrainConfig()
    cls = _POLICY_TYPES[_LOSS_TO_KIND[check_loss_kind(loss_kind)]]
    encoder = SetEncoderConfig(point_widths=tuple(config.point_widths), embed_dim=config.embed_dim)
    arrays = init_set_encoder(rng, encoder)
    widths = (config.embed_dim,) + tuple(config.head_widths) + (cls.OUTPUTS_PER_DIM * action_dim,)
    arrays.update(init_mlp(rng, "policy", widths))
    return cls(arrays)


def policy_forward(params: MsePolicyParams, weights,
                   observations: Sequence[Observation]) -> Tuple[Tensor, Optional[Tensor]]:
    """(μ, log σ) 텐서; MSE 정책은 log σ 가 None"""
    out = mlp_forward(weights, "policy", encode_observations(weights, observations))
    if params.OUTPUTS_PER_DIM == 1:
        return out, None
    n = params.action_dim
    mean = ops.slice(out, (slice(None), slice(0, n)))
    log_std = ops.clamp(ops.slice(out, (slice(None), slice(n, 2 * n))), *LOG_STD_RANGE)
    return mean, log_std


def predict(params: MsePolicyParams, observations: Sequence[Observation]) -> np.ndarray:
    """(B, n) 예측 행동 (가우시안 정책은 평균)"""
    mean, _ = policy_forward(params, params.arrays, observations)
    return mean.data.copy()


def predict_action(params: MsePolicyParams, obs: Observation, bounds: ActionBounds) -> np.ndarray:
    return bounds.clip(predict(params, [obs])[0])


def _batch_loss(params: MsePolicyParams, weights, observations: Sequence[Observation],
                targets: ArrayLike) -> Tensor:
    mean, log_std = policy_forward(params, weights, observations)
    if log_std is None:
        return bc_mse_loss(mean, targets)
    return gaussian_nll_tensor(mean, log_std, targets)


def explicit_value_and_grads(params: MsePolicyParams, observations: Sequence[Observation],
                             targets: np.ndarray) -> Tuple[float, List[np.ndarray]]:
    with Graph() as graph:
        leaves = {name: graph.watch(value) for name, value in params.arrays.items()}
        loss = _batch_loss(params, leaves, observations, targets)
        grads = graph.backward(loss)
    return loss.item(), [grads.wrt(leaves[name]) for name in params.names]


def train_explicit(dataset: DemoDataset, config: Optional[TrainConfig] = None, loss_kind: str = "mse",
                   params: Optional[MsePolicyParams] = None, name: str = "") -> TrainResult:
    """
    명시적 정책 지도 학습

    Args:
        dataset: 시연 데이터셋
        config: TrainConfig (n_negatives, negative_sampler 는 쓰지 않음)
        loss_kind: "mse" 또는 "gaussian-nll"
        params: 시작 파라미터 (None 이면 seed 로 초기화)
        name: 로그 표시용 이름

    Returns:
        TrainResult (history 는 에폭별 표본당 평균 손실)
    """
    config = config or TrainConfig()
    name = name or _LOSS_TO_KIND[check_loss_kind(loss_kind)]
    observations, actions = dataset.require_pairs()
    bounds = dataset.bounds
    if params is None:
        params = init_policy_params(derive_rng(config.seed, "init"), bounds.dim, config, loss_kind)

    state = AdamState.for_params(params.as_list(), lr=config.learning_rate)
    num_batches = -(-len(observations) // config.batch_size)
    logger.info(LOG_TRAIN_START.format(name, len(observations), num_batches, config.epochs))

    history: List[float] = []
    progress = tqdm(range(config.epochs), desc=name, disable=not progress_enabled())
    for epoch in progress:
        total, count = 0.0, 0
        shuffle = derive_rng(config.seed, "shuffle", epoch)
        for batch, index in enumerate(epoch_batches(len(observations), config.batch_size, shuffle)):
            rng = derive_rng(config.seed, "batch", epoch, batch)
            targets = augment_actions(actions[index], bounds, config.noise_std, rng)
            try:
                loss, grads = explicit_value_and_grads(params, [observations[i] for i in index], targets)
            except NumericalError as e:
                e.details.update(epoch=epoch, batch=batch)
                raise
            if not np.isfinite(loss) or not all(np.isfinite(g).all() for g in grads):
                raise NumericalError(ERROR_NON_FINITE_LOSS.format(epoch, batch), epoch=epoch, batch=batch)
            params = params.replace(adam_step(params.as_list(), grads, state))
            total += loss
            count += len(index)
        history.append(total / count)
        progress.set_postfix(loss=f"{history[-1]:.4f}")
        logger.debug(LOG_EPOCH.format(name, epoch + 1, config.epochs, history[-1]))
    return TrainResult(params=params, history=history, method=name)


def load_policy_params(path: str) -> MsePolicyParams:
    kind, arrays = read_checkpoint(path)
    if kind not in _POLICY_TYPES:
        raise CheckpointFormatError(ERROR_BAD_KIND.format(kind, " or ".join(_POLICY_TYPES)), path=path)
    return _POLICY_TYPES[kind](arrays)

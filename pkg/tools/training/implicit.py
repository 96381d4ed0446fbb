"""
암시적 모델 학습 (InfoNCE)

배치마다 (o, a) 쌍 N 개를 뽑아 행동에 증강 잡음을 더하고, 쌍마다 음성 행동 N_neg 개를
균등 분포 또는 현재 모델의 Langevin 체인에서 뽑아 InfoNCE 합을 Adam 으로 최소화합니다.
모든 난수는 (seed, 용도, epoch, batch) 에서 파생되므로 같은 시드면 손실 이력이 같습니다.
"""

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np
from tqdm import tqdm

from logging_config import progress_enabled
from tools.autodiff import AdamState, Graph, adam_step
from tools.energy_model.core import EnergyParams, ModelEnergy, energies, head_energies, init_energy_params
from tools.energy_model.layers import ParamSet, encode_observations
from tools.energy_model.types import ActionBounds, Observation
from tools.error_handler import NumericalError
from tools.samplers.configs import LangevinConfig
from tools.samplers.langevin import ReplayBuffer, langevin_negatives
from utils.seeding import derive_rng

from .batching import augment_actions, epoch_batches, sample_uniform_negatives
from .configs import ERROR_NON_FINITE_LOSS, LOG_EPOCH, LOG_TRAIN_START, TrainConfig
from .dataset import DemoDataset
from .losses import infonce_loss, infonce_tensor

logger = logging.getLogger(__name__)


@dataclass
class TrainResult:
    """학습된 파라미터와 에폭별 평균(표본당) 손실"""

    params: ParamSet
    history: List[float] = field(default_factory=list)
    method: str = ""


def infonce_value_and_grads(params: EnergyParams, observations: Sequence[Observation], positives: np.ndarray,
                            negatives: np.ndarray):
    """배치 합 InfoNCE 와 파라미터 기울기"""
    candidates = np.concatenate([positives[:, None, :], negatives], axis=1)
    with Graph() as graph:
        leaves = {name: graph.watch(value) for name, value in params.arrays.items()}
        embeddings = encode_observations(leaves, observations)
        loss = infonce_tensor(head_energies(leaves, embeddings, candidates))
        grads = graph.backward(loss)
    return loss.item(), [grads.wrt(leaves[name]) for name in params.names]


def _draw_negatives(params: EnergyParams, observations: Sequence[Observation], bounds: ActionBounds,
                    config: TrainConfig, langevin: LangevinConfig, buffer: Optional[ReplayBuffer],
                    rng: np.random.Generator) -> np.ndarray:
    batch = len(observations)
    if config.negative_sampler == "uniform":
        return sample_uniform_negatives(bounds, batch * config.n_negatives, rng).reshape(
            batch, config.n_negatives, bounds.dim)
    n_langevin = int(round(config.langevin_fraction * config.n_negatives))
    parts = []
    if n_langevin:
        parts.append(langevin_negatives(ModelEnergy(params), observations, n_langevin, buffer, bounds,
                                        langevin, rng))
    if config.n_negatives - n_langevin:
        uniform = sample_uniform_negatives(bounds, batch * (config.n_negatives - n_langevin), rng)
        parts.append(uniform.reshape(batch, config.n_negatives - n_langevin, bounds.dim))
    return np.concatenate(parts, axis=1)


def train_implicit(dataset: DemoDataset, params: Optional[EnergyParams] = None,
                   config: Optional[TrainConfig] = None, langevin: Optional[LangevinConfig] = None,
                   name: str = "implicit") -> TrainResult:
    """
    InfoNCE 로 에너지 모델 학습

    Args:
        dataset: 시연 데이터셋 (비어 있으면 오류)
        params: 시작 파라미터 (None 이면 seed 로 초기화)
        config: TrainConfig (negative_sampler 로 음성 샘플러 선택)
        langevin: negative_sampler == "langevin" 일 때 사용할 체인 설정
        name: 로그/진행 막대 표시용 이름

    Returns:
        TrainResult (history[e] = e 번째 에폭의 표본당 평균 손실)
    """
    config = config or TrainConfig()
    langevin = langevin or LangevinConfig()
    observations, actions = dataset.require_pairs()
    bounds = dataset.bounds
    if params is None:
        params = init_energy_params(derive_rng(config.seed, "init"), config.model_config(bounds.dim))
    buffer = ReplayBuffer(langevin.buffer_capacity, bounds.dim, bounds) \
        if config.negative_sampler == "langevin" else None

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
            batch_obs = [observations[i] for i in index]
            positives = augment_actions(actions[index], bounds, config.noise_std, rng)
            negatives = _draw_negatives(params, batch_obs, bounds, config, langevin, buffer, rng)
            try:
                loss, grads = infonce_value_and_grads(params, batch_obs, positives, negatives)
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


def evaluate_infonce(params: EnergyParams, dataset: DemoDataset, config: TrainConfig, seed_key: str = "eval") -> float:
    """학습 없이 표본당 평균 InfoNCE (균등 음성, 증강 없음)"""
    observations, actions = dataset.require_pairs()
    rng = derive_rng(config.seed, seed_key)
    losses = []
    for start in range(0, len(observations), config.batch_size):
        batch_obs = observations[start:start + config.batch_size]
        negatives = sample_uniform_negatives(dataset.bounds, len(batch_obs) * config.n_negatives, rng)
        candidates = np.concatenate([actions[start:start + len(batch_obs), None, :],
                                     negatives.reshape(len(batch_obs), config.n_negatives, -1)], axis=1)
        values = energies(params, batch_obs, candidates)
        losses.extend(infonce_loss(row[0], row[1:]) for row in values)
    return float(np.mean(losses))

"""
학습 모듈 설정 및 상수 정의

InfoNCE 기반 암시적 모델 학습과 명시적 BC 기준선(MSE, 가우시안 NLL)의 기본값,
데이터셋 파일 형식 상수, 로그/오류 메시지를 정의합니다.
"""

import logging
from dataclasses import dataclass
from typing import Tuple

from tools.energy_model.configs import EnergyModelConfig
from tools.energy_model.layers import SetEncoderConfig
from tools.error_handler import ConfigurationError

logger = logging.getLogger(__name__)

NEGATIVE_SAMPLERS: Tuple[str, ...] = ("uniform", "langevin")
EXPLICIT_LOSSES: Tuple[str, ...] = ("mse", "gaussian-nll")
METHOD_NAMES: Tuple[str, ...] = ("explicit-mse", "explicit-gaussian", "implicit-uniform", "implicit-langevin")


@dataclass(frozen=True)
class TrainConfig:
    """배치 N, 음성 표본 수 N_neg, 에폭, Adam 학습률, 행동 증강 잡음, 음성 샘플러 종류"""

    batch_size: int = 100
    n_negatives: int = 256
    epochs: int = 100
    learning_rate: float = 1e-3
    noise_std: float = 0.01
    negative_sampler: str = "uniform"
    langevin_fraction: float = 1.0  # langevin 일 때 Langevin 음성 표본 비율 (나머지는 균등)
    point_widths: Tuple[int, ...] = (64, 128)
    embed_dim: int = 64
    head_widths: Tuple[int, ...] = (128, 128)
    seed: int = 0

    def __post_init__(self) -> None:
        if self.batch_size < 1:
            raise ConfigurationError("training batch_size must be >= 1", config_key="training.batch_size")
        if self.n_negatives < 1:
            raise ConfigurationError("training n_negatives must be >= 1", config_key="training.n_negatives")
        if self.epochs < 0:
            raise ConfigurationError("training epochs must be >= 0", config_key="training.epochs")
        if self.learning_rate <= 0:
            raise ConfigurationError("training learning_rate must be > 0", config_key="training.learning_rate")
        if self.noise_std < 0:
            raise ConfigurationError("training noise_std must be >= 0", config_key="training.noise_std")
        if self.negative_sampler not in NEGATIVE_SAMPLERS:
            raise ConfigurationError(
                f"unknown negative sampler '{self.negative_sampler}'; valid: {', '.join(NEGATIVE_SAMPLERS)}",
                config_key="training.negative_sampler")
        if not 0.0 <= self.langevin_fraction <= 1.0:
            raise ConfigurationError("training langevin_fraction must be in [0, 1]",
                                     config_key="training.langevin_fraction")

    def model_config(self, action_dim: int) -> EnergyModelConfig:
        return EnergyModelConfig(
            action_dim=action_dim,
            encoder=SetEncoderConfig(point_widths=tuple(self.point_widths), embed_dim=self.embed_dim),
            head_widths=tuple(self.head_widths),
        )


# 데이터셋 텍스트 형식
DATASET_MAGIC = "# ibc-dough-dataset"
DATASET_VERSION = 1

# 메시지
LOG_EPOCH = "[{}] epoch {}/{}: loss {:.6f}"
LOG_TRAIN_START = "[{}] training on {} pairs ({} batches/epoch, {} epochs)"
LOG_DATASET_WRITTEN = "dataset written: {} ({} trajectories, {} records)"
LOG_DATASET_READ = "dataset read: {} ({} trajectories, {} records)"
ERROR_EMPTY_DATASET = "dataset has no (observation, action) pairs"
ERROR_NON_FINITE_LOSS = "non-finite loss at epoch {} batch {}"
ERROR_BAD_DATASET_LINE = "malformed dataset line {} in {}: {}"
ERROR_UNKNOWN_LOSS = "unknown explicit loss '{}'; valid: {}"

# 가우시안 정책의 log σ 범위 (NLL 이 −∞ 로 발산하지 않도록 clamp)
LOG_STD_RANGE: Tuple[float, float] = (-7.0, 2.0)

"""
샘플러 설정 및 상수 정의

미분 없는 최적화기(DFO, 가중 GMM 재표본)와 Langevin MCMC 의 기본 하이퍼파라미터,
리플레이 버퍼 크기, 로그/오류 메시지를 정의합니다.
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from tools.error_handler import ConfigurationError

logger = logging.getLogger(__name__)

SAMPLER_METHODS: Tuple[str, ...] = ("dfo", "langevin")

# GMM
VARIANCE_FLOOR = 1e-6
EM_TOLERANCE = 1e-12
WEIGHT_SUM_TOLERANCE = 1e-6

# DFO 기본 σ_init = 0.33 × (a_max − a_min)
DEFAULT_SIGMA_FRACTION = 0.33


@dataclass(frozen=True)
class DfoConfig:
    """미분 없는 최적화기 설정"""

    n_samples: int = 1024
    n_iters: int = 3
    sigma_init: Optional[Tuple[float, ...]] = None  # None 이면 0.33 × 상자 폭
    shrink: float = 0.5
    n_components: int = 3
    em_iters: int = 10
    seed: int = 0

    def __post_init__(self) -> None:
        if not self.n_samples >= self.n_components >= 1:
            raise ConfigurationError(
                f"dfo needs n_samples >= n_components >= 1, got {self.n_samples}, {self.n_components}",
                config_key="samplers.dfo.n_components",
            )
        if self.n_iters < 0:
            raise ConfigurationError("dfo n_iters must be >= 0", config_key="samplers.dfo.n_iters")
        if not 0.0 < self.shrink < 1.0:
            raise ConfigurationError(f"dfo shrink must be in (0, 1), got {self.shrink}",
                                     config_key="samplers.dfo.shrink")
        if self.em_iters < 0:
            raise ConfigurationError("dfo em_iters must be >= 0", config_key="samplers.dfo.em_iters")
        if self.sigma_init is not None and not all(s > 0 for s in self.sigma_init):
            raise ConfigurationError("dfo sigma_init must be positive", config_key="samplers.dfo.sigma_init")

    def initial_sigma(self, width: np.ndarray) -> np.ndarray:
        if self.sigma_init is None:
            return DEFAULT_SIGMA_FRACTION * np.asarray(width, dtype=np.float64)
        sigma = np.asarray(self.sigma_init, dtype=np.float64)
        if sigma.size == 1:
            sigma = np.full(np.shape(width), float(sigma.reshape(-1)[0]))
        if sigma.shape != np.shape(width):
            raise ConfigurationError(f"dfo sigma_init has {sigma.size} entries, action has {np.size(width)}",
                                     config_key="samplers.dfo.sigma_init")
        return sigma


@dataclass(frozen=True)
class LangevinConfig:
    """
    Langevin MCMC 설정

    a ← a − (λ/2)∇E + ω, ω ~ N(0, σ²I). 매 스텝 λ 는 step_decay 배, σ 는 √step_decay 배가 됩니다.
    noise_scale 이 None 이면 σ = √λ 로 온도 1 의 볼츠만 분포를 목표로 합니다.
    """

    step_size: float = 0.1
    step_decay: float = 0.98
    noise_scale: Optional[float] = None
    chain_length: int = 100
    grad_clip: Optional[float] = 1.0
    num_chains: int = 64
    buffer_reuse: float = 0.95
    buffer_capacity: int = 10000
    seed: int = 0

    def __post_init__(self) -> None:
        if self.step_size <= 0:
            raise ConfigurationError("langevin step_size must be > 0", config_key="samplers.langevin.step_size")
        if self.noise_scale is not None and self.noise_scale <= 0:
            raise ConfigurationError("langevin noise_scale must be > 0", config_key="samplers.langevin.noise_scale")
        if not 0.0 < self.step_decay <= 1.0:
            raise ConfigurationError("langevin step_decay must be in (0, 1]",
                                     config_key="samplers.langevin.step_decay")
        if self.chain_length < 0:
            raise ConfigurationError("langevin chain_length must be >= 0",
                                     config_key="samplers.langevin.chain_length")
        if self.grad_clip is not None and self.grad_clip <= 0:
            raise ConfigurationError("langevin grad_clip must be > 0 or null",
                                     config_key="samplers.langevin.grad_clip")
        if self.num_chains < 1:
            raise ConfigurationError("langevin num_chains must be >= 1", config_key="samplers.langevin.num_chains")
        if not 0.0 <= self.buffer_reuse <= 1.0:
            raise ConfigurationError("langevin buffer_reuse must be in [0, 1]",
                                     config_key="samplers.langevin.buffer_reuse")
        if self.buffer_capacity < 1:
            raise ConfigurationError("langevin buffer_capacity must be >= 1",
                                     config_key="samplers.langevin.buffer_capacity")

    @property
    def sigma(self) -> float:
        return self.noise_scale if self.noise_scale is not None else math.sqrt(self.step_size)


# 메시지
LOG_DFO_DONE = "dfo finished: best energy {:.6f} after {} iterations"
LOG_EM_RESEED = "EM component {} is empty, re-seeded at the best sample"
LOG_NEGATIVES = "langevin negatives: {} chains, {} reused from buffer (buffer size {})"
ERROR_UNKNOWN_METHOD = "unknown inference method '{}'; valid methods: {}"
ERROR_TOO_FEW_SAMPLES = "EM needs at least {} samples for {} components, got {}"
ERROR_BAD_WEIGHTS = "EM weights must be non-negative and sum to 1 (sum={})"
ERROR_NON_FINITE_ENERGY = "non-finite energy during {} at iteration {}"
ERROR_NON_FINITE_GRADIENT = "non-finite action gradient in Langevin chain at step {}"
ERROR_INIT_OUT_OF_BOUNDS = "Langevin init lies outside the action bounds"

"""
궤적 최적화 설정 및 상수 정의

미분 가능한 시뮬레이터를 통해 행동열을 Adam 으로 최적화하는 전문가 시연 생성기의 기본값입니다.
"""

import logging
from dataclasses import dataclass

from tools.error_handler import ConfigurationError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TrajOptConfig:
    """Adam 스텝 수/학습률, 접촉 손실 가중치 λ_contact, 초기 행동 잡음"""

    steps: int = 1000
    learning_rate: float = 0.005
    contact_weight: float = 1.0
    init_noise: float = 0.0  # 0 이면 초기 행동열은 전부 0
    seed: int = 0

    def __post_init__(self) -> None:
        if self.steps < 1:
            raise ConfigurationError("traj_opt steps must be >= 1", config_key="traj_opt.steps")
        if self.learning_rate <= 0:
            raise ConfigurationError("traj_opt learning_rate must be > 0", config_key="traj_opt.learning_rate")
        if self.contact_weight < 0:
            raise ConfigurationError("traj_opt contact_weight must be >= 0", config_key="traj_opt.contact_weight")
        if self.init_noise < 0:
            raise ConfigurationError("traj_opt init_noise must be >= 0", config_key="traj_opt.init_noise")


DEFAULT_DEMO_COUNT = 150
PROGRESS_LOG_EVERY = 100

# 메시지
LOG_OPT_PROGRESS = "[{}] step {}/{}: loss {:.6f} (best {:.6f})"
LOG_OPT_DONE = "[{}] trajectory optimized: loss {:.6f} -> {:.6f}"
LOG_DEMO_DONE = "demo {} ({}) done: loss {:.6f}, normalized EMD {:.3f}"
LOG_DEMO_SKIPPED = "demo {} ({}) skipped: {}"
LOG_DEMOS_SUMMARY = "generated {} demonstrations ({} skipped), mean normalized EMD {:.3f}"
ERROR_NON_FINITE_TRAJ_LOSS = "non-finite trajectory loss at step {}"
ERROR_BAD_COUNT = "demo count must be >= 1, got {}"
ERROR_BAD_GRID = "grid pool size must be in 1..{}, got {}"

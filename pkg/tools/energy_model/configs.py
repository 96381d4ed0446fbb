"""
에너지 모델 설정 및 상수 정의

네트워크 폭, 초기화 검증 범위, 체크포인트 바이너리 형식 상수를 정의합니다.
"""

import logging
from dataclasses import dataclass, field
from typing import Tuple

from .layers import SetEncoderConfig

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class EnergyModelConfig:
    """E_θ(o, a) 구조: 집합 인코더 + (D+n → 128 → 128 → 1) tanh 헤드"""

    action_dim: int = 2
    encoder: SetEncoderConfig = field(default_factory=SetEncoderConfig)
    head_widths: Tuple[int, ...] = (128, 128)


# 체크포인트 형식: magic, version(u32), model kind(u32), layer count(u32),
# 층마다 이름 길이(u32) + UTF-8 이름, ndim(u32), dims(u32 × ndim), 행 우선 float64 little-endian 데이터
CHECKPOINT_MAGIC = b"IBCCKPT\x00"
CHECKPOINT_VERSION = 1
MODEL_KINDS = {
    "energy": 0,
    "explicit-mse": 1,
    "explicit-gaussian": 2,
}

# 초기화 직후 에너지 크기 상한 (무작위 입력 기준)
INIT_ENERGY_BOUND = 10.0

# 메시지
LOG_INIT = "energy model initialized: {} parameters (D={}, n={})"
LOG_CHECKPOINT_SAVED = "checkpoint saved: {} ({} arrays, kind={})"
LOG_CHECKPOINT_LOADED = "checkpoint loaded: {} ({} arrays, kind={})"
ERROR_BAD_MAGIC = "not a checkpoint file (bad magic): {}"
ERROR_BAD_VERSION = "unsupported checkpoint version {} (expected {})"
ERROR_BAD_KIND = "checkpoint holds model kind '{}', expected '{}'"
ERROR_TRUNCATED = "checkpoint file is truncated: {}"

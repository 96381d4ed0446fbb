"""
암시적 정책 추론: â = argmin_a E(o, a)

method 로 DFO 또는 Langevin 을 선택합니다. Langevin 은 상자에서 균등하게 시작한
num_chains 개 체인을 돌린 뒤, 모든 체인과 스텝 중 에너지가 가장 낮은 상태를 고릅니다.
"""

import logging
from typing import Optional

import numpy as np

from tools.energy_model.types import ActionBounds, Observation
from tools.error_handler import ConfigurationError

from .configs import ERROR_UNKNOWN_METHOD, SAMPLER_METHODS, DfoConfig, LangevinConfig
from .dfo import dfo_optimize
from .energy_fn import EnergyFunction
from .langevin import langevin_chain

logger = logging.getLogger(__name__)


def check_method(method: str) -> str:
    if method not in SAMPLER_METHODS:
        raise ConfigurationError(ERROR_UNKNOWN_METHOD.format(method, ", ".join(SAMPLER_METHODS)),
                                 config_key="method")
    return method


def act_implicit(energy_fn: EnergyFunction, obs: Observation, bounds: ActionBounds, method: str = "dfo",
                 dfo_config: Optional[DfoConfig] = None, langevin_config: Optional[LangevinConfig] = None,
                 rng: Optional[np.random.Generator] = None) -> np.ndarray:
    """
    관측 하나에 대한 암시적 정책 행동

    Args:
        energy_fn: 학습된 ModelEnergy 또는 임의의 EnergyFunction
        obs: 관측
        bounds: 행동 상자
        method: "dfo" 또는 "langevin"
        dfo_config: DFO 설정
        langevin_config: Langevin 설정
        rng: 난수 생성기 (None 이면 해당 설정의 seed)

    Returns:
        상자 안의 n 차원 행동
    """
    check_method(method)
    if method == "dfo":
        config = dfo_config or DfoConfig()
        rng = rng if rng is not None else np.random.default_rng(config.seed)
        return bounds.clip(dfo_optimize(energy_fn, obs, bounds, config, rng).action)

    config = langevin_config or LangevinConfig()
    rng = rng if rng is not None else np.random.default_rng(config.seed)
    init = bounds.sample_uniform(rng, (1, config.num_chains))
    result = langevin_chain(energy_fn, [obs], init, bounds, config, rng, record=True)
    return bounds.clip(result.best_states()[0])

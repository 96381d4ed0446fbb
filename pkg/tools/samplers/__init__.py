"""샘플러 모듈

암시적 정책의 추론/음성 표본 엔진: 가중 GMM 기반 미분 없는 최적화기와 리플레이 버퍼를 쓰는
Langevin MCMC 를 제공합니다.
"""

from .configs import SAMPLER_METHODS, VARIANCE_FLOOR, DfoConfig, LangevinConfig
from .core import act_implicit, check_method
from .dfo import DfoResult, dfo_optimize
from .energy_fn import (
    AnalyticEnergy,
    EnergyFunction,
    EnergySurface,
    constant_energy,
    double_well_energy,
    quadratic_energy,
    shifted_energy,
)
from .gmm import GmmParams, em_fit_gmm, gmm_sample, weighted_log_likelihood
from .langevin import (
    LangevinResult,
    ReplayBuffer,
    chain_trace_table,
    clip_gradient_norm,
    langevin_chain,
    langevin_negatives,
)

__all__ = [
    'SAMPLER_METHODS',
    'VARIANCE_FLOOR',
    'DfoConfig',
    'LangevinConfig',
    'act_implicit',
    'check_method',
    'DfoResult',
    'dfo_optimize',
    'AnalyticEnergy',
    'EnergyFunction',
    'EnergySurface',
    'constant_energy',
    'double_well_energy',
    'quadratic_energy',
    'shifted_energy',
    'GmmParams',
    'em_fit_gmm',
    'gmm_sample',
    'weighted_log_likelihood',
    'LangevinResult',
    'ReplayBuffer',
    'chain_trace_table',
    'clip_gradient_norm',
    'langevin_chain',
    'langevin_negatives',
]

"""에너지 모델 모듈

순열 불변 점군 인코더와 에너지 헤드 E_θ(o, a), 그리고 파라미터 체크포인트 입출력을 제공합니다.
"""

from .checkpoint import (
    decode_checkpoint,
    encode_checkpoint,
    load_energy_params,
    read_checkpoint,
    save_checkpoint,
)
from .configs import EnergyModelConfig
from .core import (
    BoundModelEnergy,
    EnergyParams,
    ModelEnergy,
    action_gradient,
    candidate_softmax,
    encode,
    energies,
    energy,
    head_energies,
    init_energy_params,
)
from .layers import ParamSet, SetEncoderConfig, encode_observations, init_mlp, mlp_forward
from .types import ActionBounds, Observation, stack_observations

__all__ = [
    'ActionBounds',
    'Observation',
    'stack_observations',
    'EnergyModelConfig',
    'SetEncoderConfig',
    'ParamSet',
    'EnergyParams',
    'init_energy_params',
    'init_mlp',
    'mlp_forward',
    'encode_observations',
    'head_energies',
    'encode',
    'energy',
    'energies',
    'action_gradient',
    'candidate_softmax',
    'ModelEnergy',
    'BoundModelEnergy',
    'encode_checkpoint',
    'decode_checkpoint',
    'save_checkpoint',
    'read_checkpoint',
    'load_energy_params',
]

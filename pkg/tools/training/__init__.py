"""학습 모듈

InfoNCE 암시적 모델 학습, 명시적 BC 기준선, 시연 데이터셋 형식, 1차원 벤치마크를 제공합니다.
"""

from .batching import augment_actions, epoch_batches, sample_uniform_negatives
from .benchmarks import (
    UNIT_BOUNDS,
    bimodal_dataset,
    step_eval_grid,
    step_function_dataset,
    step_target,
)
from .configs import EXPLICIT_LOSSES, METHOD_NAMES, NEGATIVE_SAMPLERS, TrainConfig
from .dataset import (
    NO_TASK,
    DemoDataset,
    DemoProvenance,
    DemoTrajectory,
    demo_for_task,
    format_dataset,
    parse_dataset,
    read_dataset,
    write_dataset,
)
from .explicit import (
    GaussianPolicyParams,
    MsePolicyParams,
    check_loss_kind,
    init_policy_params,
    load_policy_params,
    predict,
    predict_action,
    train_explicit,
)
from .implicit import TrainResult, evaluate_infonce, infonce_value_and_grads, train_implicit
from .losses import bc_mse_loss, gaussian_nll_loss, gaussian_nll_tensor, infonce_loss, infonce_tensor

__all__ = [
    'augment_actions',
    'epoch_batches',
    'sample_uniform_negatives',
    'UNIT_BOUNDS',
    'bimodal_dataset',
    'step_eval_grid',
    'step_function_dataset',
    'step_target',
    'EXPLICIT_LOSSES',
    'METHOD_NAMES',
    'NEGATIVE_SAMPLERS',
    'TrainConfig',
    'NO_TASK',
    'DemoDataset',
    'DemoProvenance',
    'DemoTrajectory',
    'demo_for_task',
    'format_dataset',
    'parse_dataset',
    'read_dataset',
    'write_dataset',
    'GaussianPolicyParams',
    'MsePolicyParams',
    'check_loss_kind',
    'init_policy_params',
    'load_policy_params',
    'predict',
    'predict_action',
    'train_explicit',
    'TrainResult',
    'evaluate_infonce',
    'infonce_value_and_grads',
    'train_implicit',
    'bc_mse_loss',
    'gaussian_nll_loss',
    'gaussian_nll_tensor',
    'infonce_loss',
    'infonce_tensor',
]

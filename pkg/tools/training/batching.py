"""배치 구성, 행동 증강 잡음, 균등 음성 표본"""

from typing import Iterator

import numpy as np

from tools.energy_model.types import ActionBounds
from tools.error_handler import ValidationError


def sample_uniform_negatives(bounds: ActionBounds, count: int, rng: np.random.Generator) -> np.ndarray:
    """상자 [a_min, a_max] 위 i.i.d. 균등 표본 (count, n)"""
    if count < 1:
        raise ValidationError(f"negative count must be >= 1, got {count}", field="count")
    return bounds.sample_uniform(rng, (count,))


def augment_actions(actions: np.ndarray, bounds: ActionBounds, noise_std: float,
                    rng: np.random.Generator) -> np.ndarray:
    """행동에 N(0, std²) 잡음을 더한 뒤 상자로 clamp; std = 0 이면 입력 그대로"""
    if noise_std == 0.0:
        return actions
    return bounds.clip(actions + noise_std * rng.standard_normal(actions.shape))


def epoch_batches(num_pairs: int, batch_size: int, rng: np.random.Generator) -> Iterator[np.ndarray]:
    """에폭마다 섞은 인덱스를 batch_size 씩 (마지막 배치는 작을 수 있음)"""
    order = rng.permutation(num_pairs)
    for start in range(0, num_pairs, batch_size):
        yield order[start:start + batch_size]

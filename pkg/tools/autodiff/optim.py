"""
Adam 옵티마이저

에너지 모델 학습과 궤적 최적화가 함께 사용합니다. 파라미터는 numpy 배열 목록이며
adam_step 은 새 배열 목록을 반환하고 상태(모멘트, 스텝 수)를 갱신합니다.
"""

from dataclasses import dataclass, field
from typing import List, Sequence

import numpy as np

from tools.error_handler import ShapeError

from .configs import DEFAULT_BETA1, DEFAULT_BETA2, DEFAULT_EPS, DEFAULT_LEARNING_RATE


@dataclass
class AdamState:
    """Adam 상태: 스텝 수, 1차/2차 모멘트, 하이퍼파라미터"""

    lr: float = DEFAULT_LEARNING_RATE
    beta1: float = DEFAULT_BETA1
    beta2: float = DEFAULT_BETA2
    eps: float = DEFAULT_EPS
    step: int = 0
    m: List[np.ndarray] = field(default_factory=list)
    v: List[np.ndarray] = field(default_factory=list)

    @classmethod
    def for_params(cls, params: Sequence[np.ndarray], lr: float = DEFAULT_LEARNING_RATE,
                   beta1: float = DEFAULT_BETA1, beta2: float = DEFAULT_BETA2,
                   eps: float = DEFAULT_EPS) -> "AdamState":
        return cls(
            lr=lr, beta1=beta1, beta2=beta2, eps=eps,
            m=[np.zeros_like(p, dtype=np.float64) for p in params],
            v=[np.zeros_like(p, dtype=np.float64) for p in params],
        )


def adam_step(params: Sequence[np.ndarray], grads: Sequence[np.ndarray],
              state: AdamState) -> List[np.ndarray]:
    """
    표준 Adam 업데이트 한 번

    Args:
        params: 파라미터 배열 목록
        grads: 같은 shape 의 기울기 목록
        state: AdamState (제자리 갱신, step += 1)

    Returns:
        갱신된 파라미터 목록 (입력 배열은 수정하지 않음)
    """
    if len(params) != len(grads) or len(params) != len(state.m):
        raise ShapeError("adam_step", (len(params),), (len(grads),), (len(state.m),))
    for p, g, m in zip(params, grads, state.m):
        if np.shape(p) != np.shape(g) or np.shape(p) != np.shape(m):
            raise ShapeError("adam_step", np.shape(p), np.shape(g), np.shape(m))

    state.step += 1
    t = state.step
    bias1 = 1.0 - state.beta1 ** t
    bias2 = 1.0 - state.beta2 ** t
    updated = []
    for i, (p, g) in enumerate(zip(params, grads)):
        state.m[i] = state.beta1 * state.m[i] + (1.0 - state.beta1) * g
        state.v[i] = state.beta2 * state.v[i] + (1.0 - state.beta2) * g * g
        m_hat = state.m[i] / bias1
        v_hat = state.v[i] / bias2
        updated.append(p - state.lr * m_hat / (np.sqrt(v_hat) + state.eps))
    return updated

"""
중앙 유한 차분 기울기

backward() 결과를 검증하는 기준값으로 사용합니다.
"""

from typing import Callable

import numpy as np

from ..error_handler import ValidationError
from .configs import DEFAULT_FD_STEP, RELATIVE_ERROR_FLOOR


def finite_difference_gradient(f: Callable[[np.ndarray], float], x: np.ndarray,
                               h: float = DEFAULT_FD_STEP) -> np.ndarray:
    """
    x 의 모든 좌표에 대해 (f(x+h·eᵢ) − f(x−h·eᵢ)) / 2h 계산

    Args:
        f: 스칼라를 돌려주는 함수
        x: 평가 지점
        h: 차분 간격 (양수)

    Returns:
        x 와 같은 shape 의 기울기 배열
    """
    if h <= 0:
        raise ValidationError(f"finite difference step must be positive, got {h}", field="h")
    x = np.asarray(x, dtype=np.float64)
    grad = np.zeros_like(x)
    flat = grad.reshape(-1)
    for i in range(x.size):
        plus = x.copy().reshape(-1)
        minus = x.copy().reshape(-1)
        plus[i] += h
        minus[i] -= h
        flat[i] = (float(f(plus.reshape(x.shape))) - float(f(minus.reshape(x.shape)))) / (2.0 * h)
    return grad


def relative_error(a: np.ndarray, b: np.ndarray, floor: float = RELATIVE_ERROR_FLOOR) -> float:
    """두 기울기의 상대 오차 ‖a − b‖∞ / max(‖a‖∞, ‖b‖∞, floor)"""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    scale = max(float(np.max(np.abs(a), initial=0.0)), float(np.max(np.abs(b), initial=0.0)), floor)
    return float(np.max(np.abs(a - b), initial=0.0)) / scale

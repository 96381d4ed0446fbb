"""
학습 손실 함수

InfoNCE (양성 1 개 대 음성 N_neg 개), 명시적 BC 의 제곱 오차와 가우시안 음의 로그우도.
스칼라 API 는 float 를 돌려주고, *_tensor 변형은 자동미분 그래프에 기록됩니다.
"""

import math

import numpy as np
from scipy.special import logsumexp

from tools.autodiff import Tensor, ops
from tools.autodiff.core import ArrayLike, as_tensor
from tools.error_handler import ShapeError, ValidationError

HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)


def infonce_loss(pos_energy: float, neg_energies: np.ndarray) -> float:
    """−log[exp(−E⁺) / (exp(−E⁺) + Σⱼ exp(−E⁻ⱼ))], log-sum-exp 로 안정화"""
    neg = np.asarray(neg_energies, dtype=np.float64).reshape(-1)
    energies = np.concatenate([[float(pos_energy)], neg])
    return max(0.0, float(pos_energy + logsumexp(-energies)))


def infonce_tensor(energies: Tensor) -> Tensor:
    """(B, 1+N_neg) 에너지, 0 번 열이 양성 -> 배치 합 손실"""
    batch = energies.shape[0]
    positive = ops.reshape(ops.slice(energies, (slice(None), slice(0, 1))), (batch,))
    return ops.sum(ops.add(positive, ops.logsumexp(ops.neg(energies), axis=1)))


def bc_mse_loss(predicted: ArrayLike, expert: ArrayLike) -> Tensor:
    """Σ ‖a − π(s)‖² (배치 합)"""
    predicted, expert = as_tensor(predicted), as_tensor(expert)
    if predicted.shape != expert.shape:
        raise ShapeError("bc_mse_loss", predicted.shape, expert.shape)
    return ops.sum(ops.square(ops.sub(predicted, expert)))


def gaussian_nll_tensor(mean: ArrayLike, log_std: ArrayLike, expert: ArrayLike) -> Tensor:
    """log σ 로 매개화한 대각 가우시안 NLL (상수항 포함, 배치 합)"""
    mean, log_std, expert = as_tensor(mean), as_tensor(log_std), as_tensor(expert)
    if not mean.shape == log_std.shape == expert.shape:
        raise ShapeError("gaussian_nll_loss", mean.shape, log_std.shape, expert.shape)
    z = ops.mul(ops.sub(expert, mean), ops.exp(ops.neg(log_std)))
    per_coord = ops.add(ops.add(log_std, ops.scale(ops.square(z), 0.5)), HALF_LOG_2PI)
    return ops.sum(per_coord)


def gaussian_nll_loss(mean: ArrayLike, sigma: ArrayLike, expert: ArrayLike) -> Tensor:
    """−log N(a; μ, diag σ²), σ > 0"""
    sigma = as_tensor(sigma)
    if np.any(sigma.data <= 0):
        raise ValidationError("gaussian NLL needs sigma > 0", field="sigma")
    return gaussian_nll_tensor(mean, ops.log(sigma), expert)

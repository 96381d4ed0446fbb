"""
가중 EM 으로 맞추는 대각 공분산 가우시안 혼합

DFO 는 매 반복 샘플 집합과 softmax 확률을 받아 GMM 을 맞추고, 거기서 다시 재표본합니다.
"""

import logging
from dataclasses import dataclass
from typing import List, Optional

import numpy as np
from scipy.special import logsumexp

from tools.error_handler import ValidationError

from .configs import (
    EM_TOLERANCE,
    ERROR_BAD_WEIGHTS,
    ERROR_TOO_FEW_SAMPLES,
    LOG_EM_RESEED,
    VARIANCE_FLOOR,
    WEIGHT_SUM_TOLERANCE,
)

logger = logging.getLogger(__name__)

_LOG_2PI = np.log(2.0 * np.pi)


@dataclass(frozen=True)
class GmmParams:
    """혼합 가중치 (K,), 평균 (K, n), 대각 분산 (K, n)"""

    weights: np.ndarray
    means: np.ndarray
    variances: np.ndarray

    def __post_init__(self) -> None:
        weights = np.asarray(self.weights, dtype=np.float64)
        means = np.asarray(self.means, dtype=np.float64)
        variances = np.asarray(self.variances, dtype=np.float64)
        if means.ndim != 2 or variances.shape != means.shape or weights.shape != (means.shape[0],):
            raise ValidationError(
                f"inconsistent GMM shapes: weights {weights.shape}, means {means.shape}, "
                f"variances {variances.shape}", field="gmm")
        if np.any(weights < 0) or abs(weights.sum() - 1.0) > 1e-9:
            raise ValidationError(f"GMM weights must lie on the simplex (sum={weights.sum()})", field="weights")
        if np.any(variances <= 0):
            raise ValidationError("GMM variances must be positive", field="variances")
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "means", means)
        object.__setattr__(self, "variances", variances)

    @property
    def n_components(self) -> int:
        return int(self.means.shape[0])

    def component_log_densities(self, samples: np.ndarray) -> np.ndarray:
        """(N, K) 행렬: log π_k + log N(x_i | μ_k, diag σ_k²)"""
        diff = samples[:, None, :] - self.means[None, :, :]
        log_pdf = -0.5 * np.sum(_LOG_2PI + np.log(self.variances)[None] + diff ** 2 / self.variances[None], axis=2)
        with np.errstate(divide="ignore"):
            return np.log(self.weights)[None, :] + log_pdf


def weighted_log_likelihood(gmm: GmmParams, samples: np.ndarray, weights: np.ndarray) -> float:
    """Σᵢ wᵢ log p(xᵢ)"""
    per_sample = logsumexp(gmm.component_log_densities(samples), axis=1)
    return float(np.dot(weights, per_sample))


def _weighted_variance(samples: np.ndarray, weights: np.ndarray, mean: np.ndarray) -> np.ndarray:
    return np.maximum(weights @ (samples - mean) ** 2, VARIANCE_FLOOR)


def _init_means(samples: np.ndarray, weights: np.ndarray, n_components: int,
                rng: np.random.Generator) -> np.ndarray:
    """가중치로 뽑은 서로 다른 샘플 K 개; 두 번째부터는 기존 평균과의 거리² 를 곱해 흩어지게 함"""
    n = samples.shape[0]
    chosen: List[int] = [int(rng.choice(n, p=weights))]
    nearest = np.sum((samples - samples[chosen[0]]) ** 2, axis=1)
    for _ in range(1, n_components):
        score = weights * nearest
        score[chosen] = 0.0
        if score.sum() <= 0.0:
            # 가중치 있는 샘플이 모두 선택됨: 남은 샘플 중 균등 선택
            remaining = np.setdiff1d(np.arange(n), chosen)
            index = int(rng.choice(remaining))
        else:
            index = int(rng.choice(n, p=score / score.sum()))
        chosen.append(index)
        nearest = np.minimum(nearest, np.sum((samples - samples[index]) ** 2, axis=1))
    return samples[chosen].copy()


def em_fit_gmm(samples: np.ndarray, weights: np.ndarray, n_components: int, max_iters: int,
               rng: np.random.Generator, history: Optional[List[float]] = None) -> GmmParams:
    """
    가중 샘플에 대각 공분산 GMM 을 EM 으로 맞춤

    Args:
        samples: (N, n) 샘플
        weights: (N,) 비음수, 합 1
        n_components: 혼합 성분 수 K
        max_iters: EM 반복 상한
        rng: 초기 평균 선택용 난수 생성기
        history: 주어지면 초기값과 매 반복 후의 가중 로그우도를 덧붙임

    Returns:
        GmmParams (분산은 VARIANCE_FLOOR 이상)
    """
    samples = np.asarray(samples, dtype=np.float64)
    weights = np.asarray(weights, dtype=np.float64)
    if samples.ndim != 2 or weights.shape != (samples.shape[0],):
        raise ValidationError(f"EM expects (N, n) samples and (N,) weights, got {samples.shape}, {weights.shape}",
                              field="samples")
    n = samples.shape[0]
    if n < n_components or n_components < 1:
        raise ValidationError(ERROR_TOO_FEW_SAMPLES.format(n_components, n_components, n), field="samples")
    if np.any(weights < 0) or abs(weights.sum() - 1.0) > WEIGHT_SUM_TOLERANCE:
        raise ValidationError(ERROR_BAD_WEIGHTS.format(weights.sum()), field="weights")
    weights = weights / weights.sum()

    global_mean = weights @ samples
    global_var = _weighted_variance(samples, weights, global_mean)
    best = samples[int(np.argmax(weights))]

    gmm = GmmParams(
        weights=np.full(n_components, 1.0 / n_components),
        means=_init_means(samples, weights, n_components, rng),
        variances=np.tile(global_var, (n_components, 1)),
    )
    previous = weighted_log_likelihood(gmm, samples, weights)
    if history is not None:
        history.append(previous)

    for _ in range(max_iters):
        # E-step
        log_joint = gmm.component_log_densities(samples)
        log_resp = log_joint - logsumexp(log_joint, axis=1, keepdims=True)
        resp = np.exp(log_resp) * weights[:, None]

        # M-step
        mass = resp.sum(axis=0)
        means = gmm.means.copy()
        variances = gmm.variances.copy()
        for k in range(n_components):
            if mass[k] < np.finfo(np.float64).tiny:
                logger.debug(LOG_EM_RESEED.format(k))
                means[k] = best
                variances[k] = global_var
                continue
            means[k] = resp[:, k] @ samples / mass[k]
            variances[k] = np.maximum(resp[:, k] @ (samples - means[k]) ** 2 / mass[k], VARIANCE_FLOOR)
        gmm = GmmParams(weights=mass / mass.sum(), means=means, variances=variances)

        current = weighted_log_likelihood(gmm, samples, weights)
        if history is not None:
            history.append(current)
        if abs(current - previous) <= EM_TOLERANCE * max(1.0, abs(previous)):
            break
        previous = current
    return gmm


def gmm_sample(gmm: GmmParams, count: int, rng: np.random.Generator) -> np.ndarray:
    """성분을 가중치로 고른 뒤 대각 가우시안에서 뽑은 (count, n) 샘플"""
    components = rng.choice(gmm.n_components, size=count, p=gmm.weights)
    noise = rng.standard_normal((count, gmm.means.shape[1]))
    return gmm.means[components] + np.sqrt(gmm.variances[components]) * noise

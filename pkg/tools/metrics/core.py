"""
Earth Mover's Distance 와 정규화 성능 지표

균등 가중치 점군 사이의 EMD 를 유클리드 거리 비용으로 계산합니다. 점 수가 같으면 최적 결합이
순열이므로 헝가리안 알고리즘(scipy.optimize.linear_sum_assignment)으로 정확히 풀고,
그 밖에는 로그 영역 Sinkhorn 으로 근사합니다.
"""

import logging
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment
from scipy.spatial.distance import cdist
from scipy.special import logsumexp

from tools.error_handler import ConvergenceError, ValidationError

from .configs import (
    DEFAULT_EPSILON,
    DEFAULT_MAX_ITERS,
    ERROR_BAD_CLOUD,
    ERROR_NOT_CONVERGED,
    ERROR_SOLVED_TASK,
    ERROR_TOO_MANY_POINTS,
    ERROR_UNEQUAL_COUNTS,
    LOG_SINKHORN_DONE,
    MARGINAL_TOLERANCE,
    MAX_EXACT_POINTS,
    MIN_INITIAL_DISTANCE,
)

logger = logging.getLogger(__name__)


def as_cloud(points: np.ndarray) -> np.ndarray:
    cloud = np.asarray(points, dtype=np.float64)
    if cloud.ndim != 2 or cloud.shape[1] != 2 or cloud.shape[0] < 1 or not np.isfinite(cloud).all():
        raise ValidationError(ERROR_BAD_CLOUD.format(cloud.shape), field="points")
    return cloud


def emd_exact(p: np.ndarray, q: np.ndarray) -> float:
    """같은 크기 균등 점군 사이의 정확한 EMD (평균 매칭 거리)"""
    p, q = as_cloud(p), as_cloud(q)
    if len(p) != len(q):
        raise ValidationError(ERROR_UNEQUAL_COUNTS.format(len(p), len(q)), field="points")
    if len(p) > MAX_EXACT_POINTS:
        raise ValidationError(ERROR_TOO_MANY_POINTS.format(MAX_EXACT_POINTS, len(p)), field="points")
    cost = cdist(p, q)
    rows, cols = linear_sum_assignment(cost)
    return float(cost[rows, cols].sum() / len(p))


@dataclass
class SinkhornResult:
    cost: float
    plan: np.ndarray
    iterations: int
    violation: float


def round_to_marginals(plan: np.ndarray, row_marginal: np.ndarray, col_marginal: np.ndarray) -> np.ndarray:
    """근사 결합을 정확한 수송 다면체 위로 옮김 (행/열 축소 후 잔차를 외적으로 보정)"""
    plan = plan * np.minimum(row_marginal / np.maximum(plan.sum(axis=1), 1e-300), 1.0)[:, None]
    plan = plan * np.minimum(col_marginal / np.maximum(plan.sum(axis=0), 1e-300), 1.0)[None, :]
    row_error = row_marginal - plan.sum(axis=1)
    col_error = col_marginal - plan.sum(axis=0)
    mass = row_error.sum()
    if mass > 0:
        plan = plan + np.outer(row_error, col_error) / mass
    return plan


def emd_sinkhorn(p: np.ndarray, q: np.ndarray, epsilon: float = DEFAULT_EPSILON,
                 max_iters: int = DEFAULT_MAX_ITERS, tolerance: float = MARGINAL_TOLERANCE) -> SinkhornResult:
    """
    엔트로피 정규화 수송 (로그 영역 Sinkhorn)

    Args:
        p: (M, 2) 점군
        q: (M', 2) 점군
        epsilon: 정규화 세기 ε > 0
        max_iters: 반복 상한
        tolerance: 행 주변분포 위반 허용치 (열은 매 반복 정확히 맞춤)

    Returns:
        SinkhornResult (cost 는 주변분포에 맞게 보정한 결합의 수송 비용)

    Raises:
        ConvergenceError: max_iters 안에 위반이 tolerance 아래로 내려가지 않을 때
    """
    if epsilon <= 0:
        raise ValidationError(f"sinkhorn epsilon must be > 0, got {epsilon}", field="epsilon")
    p, q = as_cloud(p), as_cloud(q)
    cost = cdist(p, q)
    row_marginal = np.full(len(p), 1.0 / len(p))
    col_marginal = np.full(len(q), 1.0 / len(q))
    log_row, log_col = np.log(row_marginal), np.log(col_marginal)

    f = np.zeros(len(p))
    g = np.zeros(len(q))
    violation = np.inf
    for iteration in range(1, max_iters + 1):
        f = epsilon * (log_row - logsumexp((g[None, :] - cost) / epsilon, axis=1))
        g = epsilon * (log_col - logsumexp((f[:, None] - cost) / epsilon, axis=0))
        plan = np.exp((f[:, None] + g[None, :] - cost) / epsilon)
        violation = float(np.max(np.abs(plan.sum(axis=1) - row_marginal)))
        if violation < tolerance:
            plan = round_to_marginals(plan, row_marginal, col_marginal)
            logger.debug(LOG_SINKHORN_DONE.format(iteration, violation))
            return SinkhornResult(float(np.sum(plan * cost)), plan, iteration, violation)
    raise ConvergenceError(ERROR_NOT_CONVERGED.format(max_iters, violation), violation=violation,
                           iterations=max_iters)


def emd(p: np.ndarray, q: np.ndarray) -> float:
    """보고용 EMD: 같은 크기면 정확한 경로, 아니면 Sinkhorn"""
    if len(p) == len(q) and len(p) <= MAX_EXACT_POINTS:
        return emd_exact(p, q)
    return emd_sinkhorn(p, q).cost


def normalized_performance(initial: np.ndarray, final: np.ndarray, goal: np.ndarray) -> float:
    """(D(P0, Pg) − D(PT, Pg)) / D(P0, Pg); 1 은 목표 도달, 0 은 진전 없음, 음수는 후퇴"""
    start = emd(initial, goal)
    if start <= MIN_INITIAL_DISTANCE:
        raise ValidationError(ERROR_SOLVED_TASK.format(start), field="initial")
    return (start - emd(final, goal)) / start

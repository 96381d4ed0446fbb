"""
미분 없는 최적화기 (가중 GMM 재표본 + 줄어드는 잡음)

상자에서 균등하게 뽑은 표본으로 시작해 매 반복 에너지 → softmax 확률 → 가중 EM 으로 GMM 적합 →
GMM 에서 재표본 → N(0, σ) 잡음 추가 → 상자로 clamp → σ ← K·σ 를 수행합니다.
반환값은 모든 반복에서 본 표본 중 에너지가 가장 낮은 것입니다 (마지막 집단만 보지 않음).
"""

import logging
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from tools.energy_model.core import candidate_softmax
from tools.energy_model.types import ActionBounds, Observation
from tools.error_handler import NumericalError

from .configs import ERROR_NON_FINITE_ENERGY, LOG_DFO_DONE, DfoConfig
from .energy_fn import EnergyFunction
from .gmm import em_fit_gmm, gmm_sample

logger = logging.getLogger(__name__)


@dataclass
class DfoResult:
    action: np.ndarray
    energy: float
    best_energy_history: List[float] = field(default_factory=list)


def _population_energies(surface, samples: np.ndarray, iteration: int) -> np.ndarray:
    values = surface.energies(samples[None])[0]
    if not np.all(np.isfinite(values)):
        raise NumericalError(ERROR_NON_FINITE_ENERGY.format("dfo", iteration), iteration=iteration)
    return values


def dfo_optimize(energy_fn: EnergyFunction, obs: Observation, bounds: ActionBounds,
                 config: Optional[DfoConfig] = None,
                 rng: Optional[np.random.Generator] = None) -> DfoResult:
    """
    argmin_a E(o, a) 를 표본 기반으로 근사

    Args:
        energy_fn: EnergyFunction (bind 가능한 에너지)
        obs: 고정 관측
        bounds: 행동 상자
        config: DfoConfig (기본값 사용 시 None)
        rng: 난수 생성기 (None 이면 config.seed 로 생성)

    Returns:
        DfoResult (best_energy_history 는 초기 집단 + 반복마다 하나씩, 단조 비증가)
    """
    config = config or DfoConfig()
    rng = rng if rng is not None else np.random.default_rng(config.seed)
    surface = energy_fn.bind([obs])

    samples = bounds.sample_uniform(rng, (config.n_samples,))
    sigma = config.initial_sigma(bounds.width)
    values = _population_energies(surface, samples, 0)

    best_index = int(np.argmin(values))
    best_action = samples[best_index].copy()
    best_energy = float(values[best_index])
    history = [best_energy]

    for iteration in range(1, config.n_iters + 1):
        probs = candidate_softmax(values)
        gmm = em_fit_gmm(samples, probs, config.n_components, config.em_iters, rng)
        samples = gmm_sample(gmm, config.n_samples, rng)
        samples = bounds.clip(samples + sigma * rng.standard_normal(samples.shape))
        sigma = config.shrink * sigma

        values = _population_energies(surface, samples, iteration)
        index = int(np.argmin(values))
        if values[index] < best_energy:
            best_energy = float(values[index])
            best_action = samples[index].copy()
        history.append(best_energy)

    logger.debug(LOG_DFO_DONE.format(best_energy, config.n_iters))
    return DfoResult(action=best_action, energy=best_energy, best_energy_history=history)

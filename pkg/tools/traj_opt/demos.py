"""
전문가 시연 생성

격자 과제 중에서 복원 추출로 count 개를 뽑아 각각 궤적을 최적화하고, 최적 행동열을
롤아웃해 (관측, 행동) 쌍을 저장합니다. 개별 실패는 기록 후 건너뜁니다.
결과는 추출 순서로 정렬되므로 worker 수와 무관하게 같은 데이터셋이 나옵니다.
"""

import logging
from collections import OrderedDict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np
import pandas as pd
from tqdm import tqdm

from logging_config import progress_enabled
from tools.dough_sim.configs import SimConfig
from tools.dough_sim.core import replay_actions
from tools.dough_sim.tasks import GRID_COUNT, TaskSpec, sample_configuration
from tools.error_handler import IbcError, ValidationError
from tools.metrics.core import normalized_performance
from tools.training.dataset import DemoDataset, DemoProvenance, DemoTrajectory
from utils.seeding import derive_rng

from .configs import (
    DEFAULT_DEMO_COUNT,
    ERROR_BAD_COUNT,
    ERROR_BAD_GRID,
    LOG_DEMO_DONE,
    LOG_DEMO_SKIPPED,
    LOG_DEMOS_SUMMARY,
    TrajOptConfig,
)
from .core import optimize_trajectory

logger = logging.getLogger(__name__)


@dataclass
class DemoOutcome:
    draw: int
    spec: TaskSpec
    trajectory: Optional[DemoTrajectory]
    final_loss: float
    score: float
    error: str = ""


def draw_configurations(count: int, seed: int, grid: int = GRID_COUNT) -> np.ndarray:
    """앞쪽 grid 개 격자 과제에서 count 번 균등 복원 추출"""
    if count < 1:
        raise ValidationError(ERROR_BAD_COUNT.format(count), field="count")
    if not 1 <= grid <= GRID_COUNT:
        raise ValidationError(ERROR_BAD_GRID.format(GRID_COUNT, grid), field="grid")
    return derive_rng(seed, "demos", "draws").integers(0, grid, size=count)


def run_demo(job: Tuple[int, int, TrajOptConfig, SimConfig]) -> DemoOutcome:
    """시연 하나 (프로세스 풀에서 호출되므로 모듈 최상위 함수)"""
    draw, index, cfg, sim_cfg = job
    spec = sample_configuration(index, sim_cfg)
    try:
        result = optimize_trajectory(spec, cfg, sim_cfg)
        replay = replay_actions(spec.initial_state(), result.actions, sim_cfg)
        score = normalized_performance(spec.initial_particles(), replay.final_state.particle_array(),
                                       spec.goal_cloud())
    except IbcError as e:
        logger.warning(LOG_DEMO_SKIPPED.format(draw, spec.name, e))
        return DemoOutcome(draw, spec, None, float("nan"), float("nan"), error=str(e))
    logger.info(LOG_DEMO_DONE.format(draw, spec.name, result.best_loss, score))
    trajectory = DemoTrajectory(draw, spec.name, replay.observations, replay.actions)
    return DemoOutcome(draw, spec, trajectory, result.best_loss, score)


def generate_demos(count: int = DEFAULT_DEMO_COUNT, cfg: Optional[TrajOptConfig] = None,
                   sim_cfg: Optional[SimConfig] = None, seed: int = 0, grid: int = GRID_COUNT,
                   workers: int = 1) -> DemoDataset:
    """
    시연 데이터셋 생성

    Args:
        count: 추출 횟수 (= 최대 궤적 수)
        cfg: TrajOptConfig
        sim_cfg: SimConfig
        seed: 과제 추출 시드
        grid: 추출 대상 격자 과제 수 (앞쪽부터)
        workers: 1 보다 크면 ProcessPoolExecutor 로 병렬 최적화

    Returns:
        DemoDataset (provenance 에 건너뛴 추출 포함)
    """
    cfg = cfg or TrajOptConfig()
    sim_cfg = sim_cfg or SimConfig()
    jobs = [(draw, int(index), cfg, sim_cfg) for draw, index in enumerate(draw_configurations(count, seed, grid))]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes: List[DemoOutcome] = list(tqdm(pool.map(run_demo, jobs), total=len(jobs), desc="demos",
                                                    disable=not progress_enabled()))
    else:
        outcomes = [run_demo(job) for job in tqdm(jobs, desc="demos", disable=not progress_enabled())]
    outcomes.sort(key=lambda o: o.draw)

    tasks: "OrderedDict[str, TaskSpec]" = OrderedDict()
    trajectories: List[DemoTrajectory] = []
    provenance: List[DemoProvenance] = []
    for outcome in outcomes:
        skipped = outcome.trajectory is None
        provenance.append(DemoProvenance(
            draw=outcome.draw, task_name=outcome.spec.name, config_index=outcome.spec.index,
            final_loss=outcome.final_loss, score=outcome.score, skipped=skipped, error=outcome.error))
        if not skipped:
            tasks.setdefault(outcome.spec.name, outcome.spec)
            trajectories.append(outcome.trajectory)

    dataset = DemoDataset(trajectories, sim_cfg.bounds(), tasks, provenance)
    logger.info(LOG_DEMOS_SUMMARY.format(len(dataset), dataset.skipped, dataset.mean_score()))
    return dataset


def provenance_table(dataset: DemoDataset) -> pd.DataFrame:
    """출처 CSV: draw, task, config_index, final_loss, score, skipped, error"""
    return pd.DataFrame([{
        "draw": p.draw,
        "task": p.task_name,
        "config_index": p.config_index,
        "final_loss": p.final_loss,
        "score": p.score,
        "skipped": p.skipped,
        "error": p.error,
    } for p in dataset.provenance], columns=["draw", "task", "config_index", "final_loss", "score", "skipped", "error"])

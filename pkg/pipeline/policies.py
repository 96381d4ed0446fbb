"""
평가용 정책 래퍼

체크포인트 종류로 명시적/암시적 정책을 고르고, 과제마다 시드를 새로 파생해
같은 설정이면 같은 롤아웃이 나오게 합니다.
"""

import logging
from typing import Callable, Optional, Union

import numpy as np

from configs.run_config_loader import RunConfig
from tools.dough_sim.tasks import TaskSpec
from tools.energy_model.checkpoint import read_checkpoint
from tools.energy_model.core import EnergyParams, ModelEnergy
from tools.energy_model.types import ActionBounds, Observation
from tools.error_handler import CheckpointFormatError, ValidationError
from tools.samplers import act_implicit, check_method
from tools.training.dataset import DemoDataset, demo_for_task
from tools.training.explicit import GaussianPolicyParams, MsePolicyParams, predict_action
from utils.seeding import derive_rng

logger = logging.getLogger(__name__)

PolicyFn = Callable[[Observation], np.ndarray]


class ExplicitPolicy:
    """π(o) 를 바로 계산 (가우시안 정책은 평균)"""

    def __init__(self, params: MsePolicyParams, bounds: ActionBounds):
        self.params = params
        self.bounds = bounds

    @property
    def label(self) -> str:
        return self.params.MODEL_KIND

    def for_task(self, spec: TaskSpec) -> PolicyFn:
        return lambda obs: predict_action(self.params, obs, self.bounds)


class ImplicitPolicy:
    """â = argmin_a E(o, a) 를 DFO 또는 Langevin 으로 계산"""

    def __init__(self, params: EnergyParams, bounds: ActionBounds, run: RunConfig, sampler: str,
                 seed_key: str = "eval"):
        self.energy_fn = ModelEnergy(params)
        self.bounds = bounds
        self.run = run
        self.sampler = check_method(sampler)
        self.seed_key = seed_key

    @property
    def label(self) -> str:
        return f"implicit-{self.sampler}"

    def for_task(self, spec: TaskSpec) -> PolicyFn:
        rng = derive_rng(self.run.seed, self.seed_key, self.sampler, spec.name)

        def act(obs: Observation) -> np.ndarray:
            return act_implicit(self.energy_fn, obs, self.bounds, self.sampler,
                                self.run.dfo, self.run.langevin, rng)
        return act


class ReplayPolicy:
    """데이터셋에 저장된 전문가 행동열 재생"""

    label = "expert"

    def __init__(self, dataset: DemoDataset):
        self.dataset = dataset

    def for_task(self, spec: TaskSpec) -> PolicyFn:
        demo = demo_for_task(self.dataset, spec.name)
        if demo is None:
            raise ValidationError(f"no demonstration stored for task {spec.name}", field="task")
        actions = iter(demo.actions)
        return lambda obs: next(actions)


Policy = Union[ExplicitPolicy, ImplicitPolicy, ReplayPolicy]


def load_policy(path: str, run: RunConfig, sampler: Optional[str] = None, seed_key: str = "eval") -> Policy:
    """
    체크포인트에서 정책 복원

    Args:
        path: 체크포인트 경로
        run: 실행 설정 (행동 상자, 샘플러 설정, 시드)
        sampler: 에너지 체크포인트의 추론 샘플러 (None 이면 dfo)
        seed_key: 평가 난수 파생 키

    Returns:
        ExplicitPolicy 또는 ImplicitPolicy
    """
    kind, arrays = read_checkpoint(path)
    bounds = run.sim.bounds()
    if kind == EnergyParams.MODEL_KIND:
        params = EnergyParams(arrays)
        if params.action_dim != bounds.dim:
            raise CheckpointFormatError(f"checkpoint action dim {params.action_dim} does not match the "
                                        f"simulator ({bounds.dim})", path=path)
        return ImplicitPolicy(params, bounds, run, sampler or "dfo", seed_key)
    if sampler:
        raise ValidationError(f"checkpoint {path} holds an explicit policy; --sampler does not apply",
                              field="sampler")
    cls = GaussianPolicyParams if kind == GaussianPolicyParams.MODEL_KIND else MsePolicyParams
    params = cls(arrays)
    if params.action_dim != bounds.dim:
        raise CheckpointFormatError(f"checkpoint action dim {params.action_dim} does not match the "
                                    f"simulator ({bounds.dim})", path=path)
    return ExplicitPolicy(params, bounds)

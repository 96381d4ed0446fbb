# -*- coding: utf-8 -*-
"""
실행 설정(YAML) 로더. configs/runs/*.yaml 을 읽어 불변 RunConfig 로 변환합니다.

섹션: seed, output_dir, sim, traj_opt, demos, training(defaults + 방법별), samplers(dfo, langevin,
langevin_training), evaluation. 알 수 없는 키와 잘못된 값은 ConfigurationError (종료 코드 2) 입니다.
"""
from __future__ import annotations

import dataclasses
import logging
import os
from dataclasses import dataclass, field
from typing import Any, Dict, Mapping, Optional, Tuple, Type, TypeVar

import yaml

from config import Config
from tools.dough_sim.configs import HELD_OUT_COUNT, SimConfig
from tools.dough_sim.tasks import GRID_COUNT
from tools.error_handler import ConfigurationError
from tools.samplers.configs import SAMPLER_METHODS, DfoConfig, LangevinConfig
from tools.training.configs import METHOD_NAMES, TrainConfig
from tools.traj_opt.configs import DEFAULT_DEMO_COUNT, TrajOptConfig
from utils.seeding import derive_int_seed

logger = logging.getLogger(__name__)

_BASE_DIR = os.path.abspath(os.path.join(os.path.dirname(__file__), os.pardir))
_RUNS_DIR = os.path.join(_BASE_DIR, "configs", "runs")

T = TypeVar("T")

# 방법 이름 -> (학습 종류, 음성 샘플러 또는 손실, 기본 추론 샘플러)
METHOD_TABLE: Dict[str, Tuple[str, str, str]] = {
    "explicit-mse": ("explicit", "mse", ""),
    "explicit-gaussian": ("explicit", "gaussian-nll", ""),
    "implicit-uniform": ("implicit", "uniform", "dfo"),
    "implicit-langevin": ("implicit", "langevin", "langevin"),
}


@dataclass(frozen=True)
class DemoSettings:
    count: int = DEFAULT_DEMO_COUNT
    grid: int = GRID_COUNT  # 앞쪽 grid 개 격자 과제에서만 추출
    workers: int = 1

    def __post_init__(self) -> None:
        if self.count < 1:
            raise ConfigurationError("demos count must be >= 1", config_key="demos.count")
        if not 1 <= self.grid <= GRID_COUNT:
            raise ConfigurationError(f"demos grid must be in 1..{GRID_COUNT}", config_key="demos.grid")
        if self.workers < 1:
            raise ConfigurationError("demos workers must be >= 1", config_key="demos.workers")


@dataclass(frozen=True)
class MethodSettings:
    """방법 하나의 학습 설정과 추론 샘플러"""

    name: str
    train: TrainConfig
    inference: str = ""

    @property
    def family(self) -> str:
        return METHOD_TABLE[self.name][0]

    @property
    def loss_kind(self) -> str:
        return METHOD_TABLE[self.name][1]

    @property
    def is_implicit(self) -> bool:
        return self.family == "implicit"


@dataclass(frozen=True)
class EvalSettings:
    seeds: Tuple[int, ...] = (0, 1, 2)
    methods: Tuple[str, ...] = METHOD_NAMES
    heldout_count: int = HELD_OUT_COUNT
    train_split: bool = False  # compare 에서 학습 격자 점수와 일반화 차이도 계산

    def __post_init__(self) -> None:
        if not self.seeds:
            raise ConfigurationError("evaluation needs at least one seed", config_key="evaluation.seeds")
        if any(int(s) < 0 for s in self.seeds):
            raise ConfigurationError("evaluation seeds must be >= 0", config_key="evaluation.seeds")
        unknown = [m for m in self.methods if m not in METHOD_NAMES]
        if unknown:
            raise ConfigurationError(
                f"unknown method(s) {', '.join(unknown)}; valid: {', '.join(METHOD_NAMES)}",
                config_key="evaluation.methods")
        if self.heldout_count < 1:
            raise ConfigurationError("evaluation heldout_count must be >= 1", config_key="evaluation.heldout_count")


@dataclass(frozen=True)
class RunConfig:
    """실행 설정 전체 (모든 단계가 같은 설정을 공유)"""

    seed: int = 0
    output_dir: str = "runs"
    sim: SimConfig = field(default_factory=SimConfig)
    traj_opt: TrajOptConfig = field(default_factory=TrajOptConfig)
    demos: DemoSettings = field(default_factory=DemoSettings)
    methods: Dict[str, MethodSettings] = field(default_factory=lambda: _build_methods(None))
    dfo: DfoConfig = field(default_factory=DfoConfig)
    langevin: LangevinConfig = field(default_factory=LangevinConfig)
    langevin_training: LangevinConfig = field(default_factory=LangevinConfig)
    evaluation: EvalSettings = field(default_factory=EvalSettings)
    source: str = ""

    def method(self, name: str) -> MethodSettings:
        if name not in self.methods:
            raise ConfigurationError(f"unknown method '{name}'; valid: {', '.join(METHOD_NAMES)}",
                                     config_key="method")
        return self.methods[name]

    def train_config(self, name: str, seed_index: int) -> TrainConfig:
        """평가 시드 seed_index 의 학습 설정 (방법끼리 같은 시드를 공유)"""
        return dataclasses.replace(self.method(name).train, seed=derive_int_seed(self.seed, "train", seed_index))

    def traj_opt_config(self) -> TrajOptConfig:
        return dataclasses.replace(self.traj_opt, seed=derive_int_seed(self.seed, "traj_opt"))


def _coerce(value: Any) -> Any:
    if isinstance(value, list):
        return tuple(_coerce(v) for v in value)
    return value


def build_section(cls: Type[T], data: Optional[Mapping[str, Any]], key: str, **overrides: Any) -> T:
    """dict -> 불변 dataclass. 알 수 없는 키는 거부"""
    if data is None:
        data = {}
    if not isinstance(data, Mapping):
        raise ConfigurationError(f"section '{key}' must be a mapping", config_key=key)
    names = {f.name for f in dataclasses.fields(cls)}
    unknown = sorted(set(data) - names)
    if unknown:
        raise ConfigurationError(f"unknown key(s) in '{key}': {', '.join(map(str, unknown))}; "
                                 f"valid: {', '.join(sorted(names))}", config_key=f"{key}.{unknown[0]}")
    values = {k: _coerce(v) for k, v in data.items()}
    values.update(overrides)
    try:
        return cls(**values)
    except TypeError as e:
        raise ConfigurationError(f"invalid section '{key}': {e}", config_key=key) from e


def _build_methods(section: Optional[Mapping[str, Any]]) -> Dict[str, MethodSettings]:
    section = dict(section or {})
    defaults = section.pop("defaults", None) or {}
    unknown = sorted(set(section) - set(METHOD_NAMES))
    if unknown:
        raise ConfigurationError(f"unknown method(s) in 'training': {', '.join(unknown)}; "
                                 f"valid: {', '.join(METHOD_NAMES)}", config_key=f"training.{unknown[0]}")
    methods: Dict[str, MethodSettings] = {}
    for name in METHOD_NAMES:
        family, kind, default_inference = METHOD_TABLE[name]
        merged = dict(defaults)
        merged.update(section.get(name) or {})
        inference = str(merged.pop("inference", default_inference))
        if family == "implicit":
            if merged.get("negative_sampler", kind) != kind:
                raise ConfigurationError(f"method {name} trains with '{kind}' negatives",
                                         config_key=f"training.{name}.negative_sampler")
            merged["negative_sampler"] = kind
            if inference not in SAMPLER_METHODS:
                raise ConfigurationError(f"unknown inference sampler '{inference}'; valid: "
                                         f"{', '.join(SAMPLER_METHODS)}", config_key=f"training.{name}.inference")
        elif inference:
            raise ConfigurationError(f"explicit method {name} takes no inference sampler",
                                     config_key=f"training.{name}.inference")
        methods[name] = MethodSettings(name, build_section(TrainConfig, merged, f"training.{name}"), inference)
    return methods


_TOP_LEVEL = ("seed", "output_dir", "sim", "traj_opt", "demos", "training", "samplers", "evaluation")
_SAMPLER_SECTIONS = ("dfo", "langevin", "langevin_training")


def parse_run_config(data: Optional[Mapping[str, Any]], source: str = "<dict>") -> RunConfig:
    data = data or {}
    if not isinstance(data, Mapping):
        raise ConfigurationError(f"run config must be a mapping: {source}", config_key="")
    unknown = sorted(set(data) - set(_TOP_LEVEL))
    if unknown:
        raise ConfigurationError(f"unknown section(s) {', '.join(map(str, unknown))} in {source}; "
                                 f"valid: {', '.join(_TOP_LEVEL)}", config_key=str(unknown[0]))
    samplers = data.get("samplers") or {}
    unknown = sorted(set(samplers) - set(_SAMPLER_SECTIONS))
    if unknown:
        raise ConfigurationError(f"unknown sampler section(s) {', '.join(unknown)}",
                                 config_key=f"samplers.{unknown[0]}")
    try:
        seed = int(data.get("seed", 0))
    except (TypeError, ValueError) as e:
        raise ConfigurationError(f"seed must be an integer: {data.get('seed')!r}", config_key="seed") from e
    if seed < 0:
        raise ConfigurationError("seed must be >= 0", config_key="seed")
    return RunConfig(
        seed=seed,
        output_dir=str(data.get("output_dir") or Config.OUTPUT_DIR),
        sim=build_section(SimConfig, data.get("sim"), "sim"),
        traj_opt=build_section(TrajOptConfig, data.get("traj_opt"), "traj_opt"),
        demos=build_section(DemoSettings, data.get("demos"), "demos"),
        methods=_build_methods(data.get("training")),
        dfo=build_section(DfoConfig, samplers.get("dfo"), "samplers.dfo"),
        langevin=build_section(LangevinConfig, samplers.get("langevin"), "samplers.langevin"),
        langevin_training=build_section(LangevinConfig, samplers.get("langevin_training"),
                                        "samplers.langevin_training"),
        evaluation=build_section(EvalSettings, data.get("evaluation"), "evaluation"),
        source=source,
    )


def run_config_path(name: str) -> str:
    """이름만 주면 configs/runs/<name>.yaml, 경로면 그대로"""
    if os.path.sep in name or name.endswith((".yaml", ".yml")):
        return name
    return os.path.join(_RUNS_DIR, f"{name}.yaml")


def load_run_config(path: Optional[str] = None) -> RunConfig:
    """
    YAML 실행 설정 로드

    Args:
        path: 파일 경로 또는 configs/runs 안의 이름 (None 이면 Config.default_run_config())

    Returns:
        검증된 RunConfig
    """
    path = run_config_path(path or Config.default_run_config())
    if not os.path.isfile(path):
        raise ConfigurationError(f"run config not found: {path}", config_key="config")
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = yaml.safe_load(f) or {}
    except yaml.YAMLError as e:
        raise ConfigurationError(f"run config is not valid YAML: {path} ({e})", config_key="config") from e
    config = parse_run_config(data, path)
    logger.info(f"run config loaded: {path} (seed={config.seed}, output_dir={config.output_dir})")
    return config

"""
시연 데이터셋과 텍스트 파일 형식

파일은 줄 단위 레코드입니다.

    # ibc-dough-dataset v1 action_dim=<n> low=<a_min,...> high=<a_max,...> skipped=<k>
    S <과제 이름> <split> <index> <반죽 cx> <cy> <반지름> <목표 cx> <cy> <롤러 cx> <cy> <롤러 r> <T> <M> <seed>
    P <draw> <과제 이름> <config index> <final loss> <score> <skipped>
    R <trajectory id> <timestep> <과제 이름> <M> <x0> <y0> ... <롤러 cx> <cy> <r> <a0> ... <a{n-1}>

실수는 repr(float) 로 써서 읽었을 때 비트 단위로 같습니다. 과제 없는 궤적의 이름은 "-" 입니다.
"""

import logging
from collections import OrderedDict
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from tools.dough_sim.tasks import TaskSpec
from tools.energy_model.types import POSE_DIM, ActionBounds, Observation
from tools.error_handler import DatasetIOError, ValidationError
from utils.atomic_io import write_text_atomic

from .configs import (
    DATASET_MAGIC,
    DATASET_VERSION,
    ERROR_BAD_DATASET_LINE,
    ERROR_EMPTY_DATASET,
    LOG_DATASET_READ,
    LOG_DATASET_WRITTEN,
)

logger = logging.getLogger(__name__)

NO_TASK = "-"


@dataclass
class DemoTrajectory:
    trajectory_id: int
    task_name: str
    observations: List[Observation]
    actions: np.ndarray

    def __post_init__(self) -> None:
        self.actions = np.asarray(self.actions, dtype=np.float64)
        if self.actions.ndim != 2 or len(self.observations) != len(self.actions):
            raise ValidationError(
                f"trajectory {self.trajectory_id}: {len(self.observations)} observations vs "
                f"actions of shape {self.actions.shape}", field="actions")

    def __len__(self) -> int:
        return len(self.observations)


@dataclass
class DemoProvenance:
    """궤적 최적화 한 건의 출처 기록"""

    draw: int
    task_name: str
    config_index: int
    final_loss: float
    score: float
    skipped: bool
    error: str = ""


@dataclass
class DemoDataset:
    """시연 궤적 목록 + 행동 경계 + 과제 사양 + 출처"""

    trajectories: List[DemoTrajectory]
    bounds: ActionBounds
    tasks: "OrderedDict[str, TaskSpec]" = field(default_factory=OrderedDict)
    provenance: List[DemoProvenance] = field(default_factory=list)

    def __post_init__(self) -> None:
        for traj in self.trajectories:
            if traj.actions.shape[1] != self.bounds.dim:
                raise ValidationError(f"trajectory {traj.trajectory_id} has action dim {traj.actions.shape[1]}, "
                                      f"bounds have {self.bounds.dim}", field="actions")
            if not self.bounds.contains(traj.actions):
                raise ValidationError(f"trajectory {traj.trajectory_id} has actions outside the bounds",
                                      field="actions")

    def __len__(self) -> int:
        return len(self.trajectories)

    @property
    def skipped(self) -> int:
        return sum(1 for p in self.provenance if p.skipped)

    @property
    def action_dim(self) -> int:
        return self.bounds.dim

    @property
    def num_pairs(self) -> int:
        return sum(len(t) for t in self.trajectories)

    def pairs(self) -> Tuple[List[Observation], np.ndarray]:
        """모든 궤적의 (관측, 행동) 쌍을 궤적·시간 순으로 펼침"""
        observations = [o for t in self.trajectories for o in t.observations]
        if not observations:
            return [], np.zeros((0, self.bounds.dim))
        return observations, np.concatenate([t.actions for t in self.trajectories], axis=0)

    def require_pairs(self) -> Tuple[List[Observation], np.ndarray]:
        observations, actions = self.pairs()
        if not observations:
            raise ValidationError(ERROR_EMPTY_DATASET, field="dataset")
        return observations, actions

    def mean_score(self) -> float:
        scores = [p.score for p in self.provenance if not p.skipped]
        return float(np.mean(scores)) if scores else float("nan")


# ---------------------------------------------------------------------------
# 직렬화
# ---------------------------------------------------------------------------

def _fmt(values: Sequence[float]) -> str:
    return " ".join(repr(float(v)) for v in values)


def _vector(values: np.ndarray) -> str:
    return ",".join(repr(float(v)) for v in values)


def _spec_line(spec: TaskSpec) -> str:
    numbers = _fmt([spec.dough_center[0], spec.dough_center[1], spec.blob_radius,
                    spec.target_center[0], spec.target_center[1],
                    spec.roller_center[0], spec.roller_center[1], spec.roller_radius])
    return f"S {spec.name} {spec.split} {spec.index} {numbers} {spec.horizon} {spec.num_particles} {spec.seed}"


def _parse_spec(fields: List[str]) -> TaskSpec:
    name, split, index = fields[0], fields[1], int(fields[2])
    v = [float(x) for x in fields[3:11]]
    return TaskSpec(
        name=name, split=split, index=index,
        dough_center=(v[0], v[1]), blob_radius=v[2], target_center=(v[3], v[4]),
        roller_center=(v[5], v[6]), roller_radius=v[7],
        horizon=int(fields[11]), num_particles=int(fields[12]), seed=int(fields[13]),
    )


def format_dataset(dataset: DemoDataset) -> str:
    lines = [
        f"{DATASET_MAGIC} v{DATASET_VERSION} action_dim={dataset.bounds.dim} "
        f"low={_vector(dataset.bounds.low)} high={_vector(dataset.bounds.high)} skipped={dataset.skipped}"
    ]
    lines.extend(_spec_line(spec) for spec in dataset.tasks.values())
    for p in dataset.provenance:
        lines.append(f"P {p.draw} {p.task_name} {p.config_index} {repr(float(p.final_loss))} "
                     f"{repr(float(p.score))} {int(p.skipped)}")
    for traj in dataset.trajectories:
        for t, (obs, action) in enumerate(zip(traj.observations, traj.actions)):
            lines.append(f"R {traj.trajectory_id} {t} {traj.task_name} {obs.num_points} "
                         f"{_fmt(obs.flatten().tolist())} {_fmt(action.tolist())}")
    return "\n".join(lines) + "\n"


def write_dataset(path: str, dataset: DemoDataset) -> None:
    """데이터셋 파일을 원자적으로 기록"""
    write_text_atomic(path, format_dataset(dataset))
    logger.info(LOG_DATASET_WRITTEN.format(path, len(dataset), dataset.num_pairs))


def _parse_header(line: str, path: str) -> Tuple[ActionBounds, int]:
    parts = line.split()
    if len(parts) < 3 or " ".join(parts[:2]) != DATASET_MAGIC or parts[2] != f"v{DATASET_VERSION}":
        raise ValidationError(f"not a v{DATASET_VERSION} dataset file: {path}", field="header")
    options = dict(p.split("=", 1) for p in parts[3:] if "=" in p)
    try:
        low = [float(x) for x in options["low"].split(",")]
        high = [float(x) for x in options["high"].split(",")]
        dim = int(options["action_dim"])
    except (KeyError, ValueError) as e:
        raise ValidationError(f"dataset header is incomplete: {path} ({e})", field="header") from e
    if len(low) != dim or len(high) != dim:
        raise ValidationError(f"dataset header bounds do not match action_dim={dim}: {path}", field="header")
    return ActionBounds(low, high), dim


def parse_dataset(text: str, path: str = "<text>") -> DemoDataset:
    lines = text.splitlines()
    if not lines:
        raise ValidationError(f"dataset file is empty: {path}", field="header")
    bounds, dim = _parse_header(lines[0], path)

    tasks: "OrderedDict[str, TaskSpec]" = OrderedDict()
    provenance: List[DemoProvenance] = []
    records: "OrderedDict[int, Tuple[str, List[Observation], List[np.ndarray]]]" = OrderedDict()
    for number, line in enumerate(lines[1:], start=2):
        if not line.strip() or line.startswith("#"):
            continue
        fields = line.split()
        try:
            if fields[0] == "S":
                spec = _parse_spec(fields[1:])
                tasks[spec.name] = spec
            elif fields[0] == "P":
                provenance.append(DemoProvenance(
                    draw=int(fields[1]), task_name=fields[2], config_index=int(fields[3]),
                    final_loss=float(fields[4]), score=float(fields[5]), skipped=bool(int(fields[6]))))
            elif fields[0] == "R":
                traj_id, timestep, task_name, count = int(fields[1]), int(fields[2]), fields[3], int(fields[4])
                values = np.array([float(x) for x in fields[5:]])
                if values.size != 2 * count + POSE_DIM + dim:
                    raise ValueError(f"expected {2 * count + POSE_DIM + dim} numbers, got {values.size}")
                obs = Observation(values[:2 * count].reshape(count, 2), values[2 * count:2 * count + POSE_DIM])
                entry = records.setdefault(traj_id, (task_name, [], []))
                if timestep != len(entry[1]):
                    raise ValueError(f"timestep {timestep} out of order")
                entry[1].append(obs)
                entry[2].append(values[2 * count + POSE_DIM:])
            else:
                raise ValueError(f"unknown record type '{fields[0]}'")
        except (IndexError, ValueError, ValidationError) as e:
            raise ValidationError(ERROR_BAD_DATASET_LINE.format(number, path, e), field="dataset") from e

    trajectories = [DemoTrajectory(traj_id, name, obs, np.stack(actions))
                    for traj_id, (name, obs, actions) in records.items()]
    return DemoDataset(trajectories, bounds, tasks, provenance)


def read_dataset(path: str) -> DemoDataset:
    try:
        with open(path, "r", encoding="utf-8") as f:
            text = f.read()
    except OSError as e:
        raise DatasetIOError(f"cannot read dataset {path}: {e}", path=path) from e
    dataset = parse_dataset(text, path)
    logger.info(LOG_DATASET_READ.format(path, len(dataset), dataset.num_pairs))
    return dataset


def demo_for_task(dataset: DemoDataset, task_name: str) -> Optional[DemoTrajectory]:
    """과제 이름으로 첫 시연 궤적 찾기"""
    for traj in dataset.trajectories:
        if traj.task_name == task_name:
            return traj
    return None

"""
CLI 명령 구현

gen-demos → train → eval → compare 순서의 파이프라인과 진단 명령(diag-chain, diag-energy, render)을
실행 설정 하나로 돌립니다. 모든 명령은 (설정 파일, 입력 파일, 시드) 의 순수 함수이고
결과를 딕셔너리로 돌려주며, 산출물 파일은 원자적으로 기록합니다.
"""

import logging
import os
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
import pandas as pd
from tqdm import tqdm

from config import Config
from configs.run_config_loader import RunConfig
from logging_config import progress_enabled
from tools.dough_sim.core import observe, render_table
from tools.dough_sim.tasks import (
    GRID_COUNT,
    TaskSpec,
    held_out_configurations,
    rollout_task,
    sample_configuration,
)
from tools.energy_model.checkpoint import load_energy_params, save_checkpoint
from tools.energy_model.core import ModelEnergy, energies
from tools.error_handler import DatasetIOError, ValidationError
from tools.metrics.core import normalized_performance
from tools.samplers.langevin import chain_trace_table, langevin_chain
from tools.training.dataset import DemoDataset, read_dataset, write_dataset
from tools.training.explicit import train_explicit
from tools.training.implicit import train_implicit
from tools.traj_opt.demos import generate_demos, provenance_table
from utils.atomic_io import write_text_atomic
from utils.seeding import derive_rng

from .artifacts import RunPaths, history_table, write_csv
from .plots import ChartGenerator
from .policies import Policy, ReplayPolicy, load_policy

logger = logging.getLogger(__name__)

SPLITS = ("train", "heldout")
EVAL_COLUMNS = ["config", "split", "dough_radius", "target_distance", "score"]
COMPARE_COLUMNS = ["method", "mean", "std", "n_seeds"]
EXPERT_LABEL = "expert"


def _success(**payload: Any) -> Dict[str, Any]:
    return {"status": "success", **payload}


def _load_dataset(paths: RunPaths, dataset_path: Optional[str] = None) -> DemoDataset:
    path = dataset_path or paths.dataset
    if not os.path.isfile(path):
        raise DatasetIOError(f"dataset not found: {path} (run gen-demos first)", path=path)
    return read_dataset(path)


def split_tasks(run: RunConfig, split: str) -> List[TaskSpec]:
    if split == "train":
        return [sample_configuration(i, run.sim) for i in range(GRID_COUNT)]
    if split == "heldout":
        return held_out_configurations(run.sim, run.evaluation.heldout_count)
    raise ValidationError(f"unknown split '{split}'; valid: {', '.join(SPLITS)}", field="split")


def find_task(run: RunConfig, name: str, dataset: Optional[DemoDataset] = None) -> TaskSpec:
    """grid-NNN, heldout-NN 또는 데이터셋에 저장된 과제 이름"""
    if dataset is not None and name in dataset.tasks:
        return dataset.tasks[name]
    if name.startswith("grid-") and name[5:].isdigit():
        return sample_configuration(int(name[5:]), run.sim)
    for spec in held_out_configurations(run.sim, run.evaluation.heldout_count):
        if spec.name == name:
            return spec
    raise ValidationError(f"unknown task '{name}' (expected grid-NNN or heldout-NN)", field="task")


# ---------------------------------------------------------------------------
# gen-demos
# ---------------------------------------------------------------------------

def cmd_gen_demos(run: RunConfig, count: Optional[int] = None, grid: Optional[int] = None,
                  workers: Optional[int] = None) -> Dict[str, Any]:
    """
    전문가 시연 생성 → 데이터셋 파일 + 출처 CSV

    Args:
        run: 실행 설정
        count: 시연 수 (None 이면 demos.count)
        grid: 추출 대상 격자 과제 수 (None 이면 demos.grid)
        workers: 병렬 프로세스 수 (None 이면 IBC_WORKERS, 그다음 demos.workers)

    Returns:
        요약 딕셔너리 (trajectories, skipped, mean_score, 파일 경로)
    """
    paths = RunPaths(run.output_dir)
    workers = workers or Config.WORKERS or run.demos.workers
    dataset = generate_demos(
        count=count or run.demos.count,
        cfg=run.traj_opt_config(),
        sim_cfg=run.sim,
        seed=run.seed,
        grid=grid or run.demos.grid,
        workers=workers,
    )
    write_dataset(paths.dataset, dataset)
    write_csv(paths.provenance, provenance_table(dataset))
    return _success(
        trajectories=len(dataset),
        skipped=dataset.skipped,
        mean_score=dataset.mean_score(),
        dataset=paths.dataset,
        provenance=paths.provenance,
    )


# ---------------------------------------------------------------------------
# train
# ---------------------------------------------------------------------------

def cmd_train(run: RunConfig, method: str, seed_index: int = 0,
              dataset_path: Optional[str] = None) -> Dict[str, Any]:
    """방법 하나 학습 → 체크포인트 + 손실 이력 CSV"""
    settings = run.method(method)
    paths = RunPaths(run.output_dir)
    dataset = _load_dataset(paths, dataset_path)
    train_cfg = run.train_config(method, seed_index)
    if settings.is_implicit:
        result = train_implicit(dataset, config=train_cfg, langevin=run.langevin_training, name=method)
    else:
        result = train_explicit(dataset, config=train_cfg, loss_kind=settings.loss_kind, name=method)

    checkpoint = paths.checkpoint(method, seed_index)
    save_checkpoint(checkpoint, result.params)
    write_csv(paths.history(method, seed_index), history_table(result.history))
    return _success(
        method=method,
        seed_index=seed_index,
        epochs=len(result.history),
        final_loss=result.history[-1] if result.history else float("nan"),
        checkpoint=checkpoint,
        history=paths.history(method, seed_index),
    )


# ---------------------------------------------------------------------------
# eval
# ---------------------------------------------------------------------------

def evaluate_policy(policy: Policy, specs: Sequence[TaskSpec], run: RunConfig, desc: str = "eval") -> pd.DataFrame:
    """과제마다 롤아웃하고 정규화 EMD 를 계산한 표"""
    rows = []
    progress = tqdm(specs, desc=desc, disable=not progress_enabled())
    for spec in progress:
        trajectory = rollout_task(policy.for_task(spec), spec, run.sim)
        score = normalized_performance(spec.initial_particles(), trajectory.final_state.particle_array(),
                                       spec.goal_cloud())
        rows.append({
            "config": spec.name,
            "split": spec.split,
            "dough_radius": spec.blob_radius,
            "target_distance": spec.target_distance,
            "score": score,
        })
    return pd.DataFrame(rows, columns=EVAL_COLUMNS)


def summarize_scores(table: pd.DataFrame) -> Dict[str, float]:
    scores = table["score"].to_numpy(dtype=float)
    return {"mean": float(np.mean(scores)), "std": float(np.std(scores)), "count": int(len(scores))}


def cmd_eval(run: RunConfig, checkpoint: Optional[str], split: str = "heldout", sampler: Optional[str] = None,
             expert: bool = False, plot: bool = False, dataset_path: Optional[str] = None) -> Dict[str, Any]:
    """
    정책 평가 → 과제별 점수 CSV + 평균 ± 표준편차

    Args:
        run: 실행 설정
        checkpoint: 체크포인트 경로 (expert=True 면 무시)
        split: "train" 또는 "heldout"
        sampler: 에너지 체크포인트의 추론 샘플러 ("dfo" 또는 "langevin")
        expert: True 면 데이터셋의 전문가 행동열을 재생 (시연이 있는 과제만)
        plot: True 면 점수 산점도 PNG 도 기록
        dataset_path: expert 재생용 데이터셋 경로

    Returns:
        요약 딕셔너리 (mean, std, count, 파일 경로)
    """
    paths = RunPaths(run.output_dir)
    if split not in SPLITS:
        raise ValidationError(f"unknown split '{split}'; valid: {', '.join(SPLITS)}", field="split")
    if expert:
        dataset = _load_dataset(paths, dataset_path)
        policy: Policy = ReplayPolicy(dataset)
        specs = [spec for spec in dataset.tasks.values() if spec.split == split]
        if not specs:
            raise ValidationError(f"no demonstrations on the {split} split", field="split")
        label = EXPERT_LABEL
    else:
        if not checkpoint:
            raise ValidationError("eval needs --checkpoint (or --expert)", field="checkpoint")
        policy = load_policy(checkpoint, run, sampler)
        specs = split_tasks(run, split)
        label = os.path.splitext(os.path.basename(checkpoint))[0]
        if sampler:
            label = f"{label}-{sampler}"

    table = evaluate_policy(policy, specs, run, desc=f"eval {label}")
    csv_path = paths.evaluation(label, split)
    write_csv(csv_path, table)
    summary = summarize_scores(table)
    result = _success(label=label, split=split, csv=csv_path, **summary)
    if plot:
        result["plot"] = ChartGenerator().score_scatter(
            table, paths.evaluation(label, split).replace(".csv", ".png"), title=f"{label} ({split})")
    return result


# ---------------------------------------------------------------------------
# compare
# ---------------------------------------------------------------------------

def expert_row(dataset: DemoDataset) -> Dict[str, Any]:
    scores = [p.score for p in dataset.provenance if not p.skipped]
    if not scores:
        return {"method": EXPERT_LABEL, "mean": float("nan"), "std": float("nan"), "n_seeds": 0}
    return {"method": EXPERT_LABEL, "mean": float(np.mean(scores)), "std": float(np.std(scores)), "n_seeds": 1}


def format_compare(table: pd.DataFrame) -> str:
    lines = [f"{'method':<20} {'mean':>8} {'std':>8} {'seeds':>6}"]
    for row in table.itertuples(index=False):
        lines.append(f"{row.method:<20} {row.mean:>8.4f} {row.std:>8.4f} {row.n_seeds:>6d}")
        if "gap" in table.columns:
            lines[-1] += f"   train {row.train_mean:.4f} gap {row.gap:+.4f}"
    return "\n".join(lines) + "\n"


def _method_scores(run: RunConfig, method: str, seed_index: int, split: str,
                   specs: Sequence[TaskSpec]) -> float:
    paths = RunPaths(run.output_dir)
    settings = run.method(method)
    policy = load_policy(paths.checkpoint(method, seed_index), run, settings.inference or None,
                         seed_key=f"eval-{seed_index}")
    table = evaluate_policy(policy, specs, run, desc=f"{method} seed {seed_index} {split}")
    write_csv(paths.evaluation(f"{method}-seed{seed_index}", split), table)
    return summarize_scores(table)["mean"]


def cmd_compare(run: RunConfig, retrain: bool = False) -> Dict[str, Any]:
    """
    설정된 모든 방법을 같은 시드들로 학습(체크포인트가 없을 때)·평가해 순위표 작성

    Returns:
        요약 딕셔너리 (rows: 평균 내림차순, csv/text 경로)
    """
    paths = RunPaths(run.output_dir)
    dataset = _load_dataset(paths)
    heldout = split_tasks(run, "heldout")
    train = split_tasks(run, "train") if run.evaluation.train_split else []

    rows = [expert_row(dataset)]
    for method in run.evaluation.methods:
        heldout_means, train_means = [], []
        for seed_index in run.evaluation.seeds:
            if retrain or not os.path.isfile(paths.checkpoint(method, seed_index)):
                cmd_train(run, method, seed_index)
            heldout_means.append(_method_scores(run, method, seed_index, "heldout", heldout))
            if train:
                train_means.append(_method_scores(run, method, seed_index, "train", train))
        row: Dict[str, Any] = {
            "method": method,
            "mean": float(np.mean(heldout_means)),
            "std": float(np.std(heldout_means)),
            "n_seeds": len(heldout_means),
        }
        if train:
            row["train_mean"] = float(np.mean(train_means))
            row["gap"] = row["train_mean"] - row["mean"]
        rows.append(row)

    columns = COMPARE_COLUMNS + (["train_mean", "gap"] if train else [])
    if train:
        rows[0].update(train_mean=rows[0]["mean"], gap=0.0)
    table = pd.DataFrame(rows, columns=columns)
    table = table.sort_values("mean", ascending=False, kind="mergesort", na_position="last").reset_index(drop=True)
    write_csv(paths.compare_csv, table)
    text = format_compare(table)
    write_text_atomic(paths.compare_text, text)
    return _success(rows=table.to_dict(orient="records"), text=text, csv=paths.compare_csv,
                    report=paths.compare_text)


# ---------------------------------------------------------------------------
# 진단
# ---------------------------------------------------------------------------

def cmd_diag_chain(run: RunConfig, checkpoint: str, task: str, plot: bool = False) -> Dict[str, Any]:
    """과제 초기 관측에서 Langevin 체인 궤적 CSV (step, chain, a0.., energy)"""
    paths = RunPaths(run.output_dir)
    params = load_energy_params(checkpoint)
    spec = find_task(run, task)
    bounds = run.sim.bounds()
    rng = derive_rng(run.seed, "diag-chain", spec.name)
    init = bounds.sample_uniform(rng, (1, run.langevin.num_chains))
    result = langevin_chain(ModelEnergy(params), [observe(spec.initial_state())], init, bounds,
                            run.langevin, rng, record=True)
    table = chain_trace_table(result)
    csv_path = paths.diagnostic(f"chain-{spec.name}")
    write_csv(csv_path, table)
    best = int(np.argmin(table["energy"].to_numpy()))
    summary = _success(csv=csv_path, rows=len(table), best_energy=float(table["energy"].iloc[best]))
    if plot:
        summary["plot"] = ChartGenerator().chain_traces(table, paths.diagnostic(f"chain-{spec.name}", "png"),
                                                        title=spec.name)
    return summary


def cmd_diag_energy(run: RunConfig, checkpoint: str, task: str, resolution: int = 41,
                    plot: bool = False) -> Dict[str, Any]:
    """행동 상자의 (a0, a1) 격자 위 에너지 CSV; 나머지 성분은 상자 중앙"""
    if resolution < 2:
        raise ValidationError("diag-energy resolution must be >= 2", field="resolution")
    paths = RunPaths(run.output_dir)
    params = load_energy_params(checkpoint)
    spec = find_task(run, task)
    bounds = run.sim.bounds()
    if bounds.dim < 2:
        raise ValidationError("diag-energy needs an action space with at least two dimensions", field="bounds")

    a0 = np.linspace(bounds.low[0], bounds.high[0], resolution)
    a1 = np.linspace(bounds.low[1], bounds.high[1], resolution)
    grid0, grid1 = np.meshgrid(a0, a1, indexing="ij")
    actions = np.tile(bounds.midpoint, (resolution * resolution, 1))
    actions[:, 0] = grid0.reshape(-1)
    actions[:, 1] = grid1.reshape(-1)
    values = energies(params, [observe(spec.initial_state())], actions[None])[0]
    table = pd.DataFrame({"a0": actions[:, 0], "a1": actions[:, 1], "energy": values})

    csv_path = paths.diagnostic(f"energy-{spec.name}")
    write_csv(csv_path, table)
    best = int(np.argmin(values))
    summary = _success(csv=csv_path, rows=len(table), argmin=actions[best].tolist(),
                       min_energy=float(values[best]))
    if plot:
        summary["plot"] = ChartGenerator().energy_heatmap(table, paths.diagnostic(f"energy-{spec.name}", "png"),
                                                          title=spec.name)
    return summary


def cmd_render(run: RunConfig, task: str, checkpoint: Optional[str] = None, sampler: Optional[str] = None,
               dataset_path: Optional[str] = None) -> Dict[str, Any]:
    """과제 하나의 스텝별 입자 좌표 CSV (체크포인트 정책 또는 전문가 재생)"""
    paths = RunPaths(run.output_dir)
    if checkpoint:
        spec = find_task(run, task)
        policy: Policy = load_policy(checkpoint, run, sampler, seed_key="render")
    else:
        dataset = _load_dataset(paths, dataset_path)
        spec = find_task(run, task, dataset)
        policy = ReplayPolicy(dataset)
    trajectory = rollout_task(policy.for_task(spec), spec, run.sim)
    table = render_table(trajectory)
    csv_path = paths.diagnostic(f"render-{spec.name}-{policy.label}")
    write_csv(csv_path, table)
    return _success(csv=csv_path, steps=trajectory.horizon, rows=len(table))


#!/usr/bin/env python
# -*- coding: utf-8 -*-

"""
ibc-dough - 에너지 기반 암시적 행동 복제 툴킷

전문가 시연 생성, 학습, 평가, 방법 비교와 진단 명령을 제공하는 CLI 진입점입니다.
종료 코드: 0 성공, 2 사용자/설정 오류, 3 입출력 오류, 4 수치 실패.
"""

import argparse
import json
import os
import sys
from typing import Any, Dict, List, Optional

# 프로젝트 모듈 임포트를 위한 경로 설정
current_script_dir = os.path.dirname(os.path.abspath(__file__))
if current_script_dir not in sys.path:
    sys.path.insert(0, current_script_dir)

from config import config  # noqa: E402
from logging_config import get_logger, setup_logging  # noqa: E402
from tools.error_handler import EXIT_OK, ErrorHandler  # noqa: E402
from tools.training.configs import METHOD_NAMES  # noqa: E402

logger = get_logger(__name__)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ibc-dough", description="Energy-based implicit behavioral cloning toolkit")
    parser.add_argument("--log-level", default=None, help="console log level (default: IBC_LOG_LEVEL or INFO)")
    parser.add_argument("--log-dir", default=None, help="log file directory (default: IBC_LOG_DIR)")
    parser.add_argument("--no-log-file", action="store_true", help="log to the console only")
    parser.add_argument("--json", action="store_true", help="print the command result as JSON")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, help_text: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", default=None, help="run config YAML path or name under configs/runs")
        p.add_argument("--output-dir", default=None, help="override output_dir from the run config")
        return p

    p = add("gen-demos", "generate expert demonstrations by trajectory optimization")
    p.add_argument("--count", type=int, default=None)
    p.add_argument("--grid", type=int, default=None, help="draw only from the first N grid configurations")
    p.add_argument("--workers", type=int, default=None)

    p = add("train", "train one method")
    p.add_argument("--method", required=True, help=f"one of: {', '.join(METHOD_NAMES)}")
    p.add_argument("--seed-index", type=int, default=0)
    p.add_argument("--dataset", default=None)

    p = add("eval", "evaluate a checkpoint (or the expert demos) on a split")
    p.add_argument("--checkpoint", default=None)
    p.add_argument("--split", default="heldout", choices=("train", "heldout"))
    p.add_argument("--sampler", default=None, choices=("dfo", "langevin"))
    p.add_argument("--expert", action="store_true", help="replay stored demonstrations")
    p.add_argument("--dataset", default=None)
    p.add_argument("--plot", action="store_true")

    p = add("compare", "train (if needed) and evaluate every configured method")
    p.add_argument("--retrain", action="store_true")

    p = add("diag-chain", "Langevin chain trace CSV for a task's first observation")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--task", required=True)
    p.add_argument("--plot", action="store_true")

    p = add("diag-energy", "energy landscape grid CSV over the action box")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--task", required=True)
    p.add_argument("--resolution", type=int, default=41)
    p.add_argument("--plot", action="store_true")

    p = add("render", "per-step particle CSV for one task")
    p.add_argument("--task", required=True)
    p.add_argument("--checkpoint", default=None, help="policy checkpoint (default: replay the stored demo)")
    p.add_argument("--sampler", default=None, choices=("dfo", "langevin"))
    p.add_argument("--dataset", default=None)
    return parser


def run_command(args: argparse.Namespace) -> Dict[str, Any]:
    """인자에 맞는 명령 실행 (지연 임포트로 --help 를 가볍게 유지)"""
    import dataclasses

    from configs.run_config_loader import load_run_config
    from pipeline import commands

    run = load_run_config(args.config)
    if args.output_dir:
        run = dataclasses.replace(run, output_dir=args.output_dir)

    if args.command == "gen-demos":
        return commands.cmd_gen_demos(run, args.count, args.grid, args.workers)
    if args.command == "train":
        return commands.cmd_train(run, args.method, args.seed_index, args.dataset)
    if args.command == "eval":
        return commands.cmd_eval(run, args.checkpoint, args.split, args.sampler, args.expert, args.plot,
                                 args.dataset)
    if args.command == "compare":
        return commands.cmd_compare(run, args.retrain)
    if args.command == "diag-chain":
        return commands.cmd_diag_chain(run, args.checkpoint, args.task, args.plot)
    if args.command == "diag-energy":
        return commands.cmd_diag_energy(run, args.checkpoint, args.task, args.resolution, args.plot)
    return commands.cmd_render(run, args.task, args.checkpoint, args.sampler, args.dataset)


def format_summary(command: str, result: Dict[str, Any]) -> str:
    """명령별 한 줄(또는 표) 요약"""
    if command == "gen-demos":
        return (f"trajectories={result['trajectories']} skipped={result['skipped']} "
                f"mean_normalized_emd={result['mean_score']:.4f} dataset={result['dataset']}")
    if command == "train":
        return (f"method={result['method']} epochs={result['epochs']} final_loss={result['final_loss']:.6f} "
                f"checkpoint={result['checkpoint']}")
    if command == "eval":
        return (f"{result['label']} {result['split']}: {result['mean']:.4f} ± {result['std']:.4f} "
                f"over {result['count']} configurations ({result['csv']})")
    if command == "compare":
        return result["text"].rstrip("\n")
    return " ".join(f"{k}={v}" for k, v in result.items() if k != "status")


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    setup_logging(log_level=args.log_level or config.LOG_LEVEL,
                  log_dir=None if args.no_log_file else (args.log_dir or config.LOG_DIR))
    logger.debug(f"command {args.command} (config={args.config or config.default_run_config()})")
    try:
        result = run_command(args)
    except Exception as e:  # noqa: BLE001
        response = ErrorHandler.handle_error(e, {"command": args.command, "config": args.config})
        print(f"error: {e}", file=sys.stderr)
        return response["exit_code"]

    if args.json:
        print(json.dumps(result, default=str, sort_keys=True))
    else:
        print(format_summary(args.command, result))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

"""파이프라인 모듈

CLI 명령(gen-demos, train, eval, compare, diag-chain, diag-energy, render)과
평가용 정책 래퍼, 산출물 입출력, 진단 차트를 제공합니다.
"""

from .artifacts import RunPaths, history_table, write_csv
from .commands import (
    cmd_compare,
    cmd_diag_chain,
    cmd_diag_energy,
    cmd_eval,
    cmd_gen_demos,
    cmd_render,
    cmd_train,
    evaluate_policy,
    find_task,
    split_tasks,
)
from .plots import ChartGenerator
from .policies import ExplicitPolicy, ImplicitPolicy, ReplayPolicy, load_policy

__all__ = [
    'RunPaths',
    'history_table',
    'write_csv',
    'cmd_compare',
    'cmd_diag_chain',
    'cmd_diag_energy',
    'cmd_eval',
    'cmd_gen_demos',
    'cmd_render',
    'cmd_train',
    'evaluate_policy',
    'find_task',
    'split_tasks',
    'ChartGenerator',
    'ExplicitPolicy',
    'ImplicitPolicy',
    'ReplayPolicy',
    'load_policy',
]

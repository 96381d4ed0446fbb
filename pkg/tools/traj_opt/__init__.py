"""궤적 최적화 모듈

미분 가능한 반죽 시뮬레이터를 통한 행동열 최적화와 전문가 시연 데이터셋 생성을 제공합니다.
"""

from .configs import DEFAULT_DEMO_COUNT, TrajOptConfig
from .core import (
    TrajOptResult,
    action_gradients,
    initial_actions,
    optimize_trajectory,
    rollout_loss_and_grad,
    simulate,
    trajectory_loss,
)
from .demos import DemoOutcome, draw_configurations, generate_demos, provenance_table, run_demo

__all__ = [
    'DEFAULT_DEMO_COUNT',
    'TrajOptConfig',
    'TrajOptResult',
    'action_gradients',
    'initial_actions',
    'optimize_trajectory',
    'rollout_loss_and_grad',
    'simulate',
    'trajectory_loss',
    'DemoOutcome',
    'draw_configurations',
    'generate_demos',
    'provenance_table',
    'run_demo',
]

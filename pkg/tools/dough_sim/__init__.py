"""반죽 시뮬레이터 모듈

입자 반죽과 원형 롤러의 미분 가능한 2D 전이, 과제/접촉 손실, 과제 구성을 제공합니다.
"""

from .configs import SimConfig
from .core import (
    DoughState,
    Trajectory,
    contact_loss,
    contact_losses,
    observe,
    render_table,
    replay_actions,
    rollout,
    stack_states,
    task_loss,
    task_losses,
    transition,
)
from .tasks import (
    GRID_COUNT,
    TaskSpec,
    grid_configurations,
    held_out_configurations,
    rollout_task,
    sample_configuration,
    split_configurations,
    sunflower_disk,
)

__all__ = [
    'SimConfig',
    'DoughState',
    'Trajectory',
    'transition',
    'contact_loss',
    'contact_losses',
    'task_loss',
    'task_losses',
    'stack_states',
    'observe',
    'rollout',
    'replay_actions',
    'render_table',
    'GRID_COUNT',
    'TaskSpec',
    'sample_configuration',
    'grid_configurations',
    'held_out_configurations',
    'split_configurations',
    'rollout_task',
    'sunflower_disk',
]

"""자동미분 모듈

테이프 기반 역방향 자동미분, Adam, 유한차분 검증 도구를 제공합니다.
"""

from . import ops
from .core import (
    GradientMap,
    Graph,
    Node,
    Tensor,
    active_graph,
    apply,
    as_tensor,
    backward,
    value_and_grad,
)
from .gradcheck import finite_difference_gradient, relative_error
from .optim import AdamState, adam_step

__all__ = [
    'ops',
    'GradientMap',
    'Graph',
    'Node',
    'Tensor',
    'active_graph',
    'apply',
    'as_tensor',
    'backward',
    'value_and_grad',
    'finite_difference_gradient',
    'relative_error',
    'AdamState',
    'adam_step',
]

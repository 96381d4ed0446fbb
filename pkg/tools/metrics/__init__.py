"""평가 지표 모듈

점군 사이의 Earth Mover's Distance (정확/Sinkhorn) 와 정규화 최종 EMD 성능을 제공합니다.
"""

from .core import (
    SinkhornResult,
    emd,
    emd_exact,
    emd_sinkhorn,
    normalized_performance,
    round_to_marginals,
)

__all__ = [
    'SinkhornResult',
    'emd',
    'emd_exact',
    'emd_sinkhorn',
    'normalized_performance',
    'round_to_marginals',
]

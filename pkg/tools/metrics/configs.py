"""
평가 지표 설정 및 상수 정의
"""

# 정확한 EMD (할당 문제) 를 쓰는 최대 점 수
MAX_EXACT_POINTS = 256

# Sinkhorn
DEFAULT_EPSILON = 0.01
DEFAULT_MAX_ITERS = 1000
MARGINAL_TOLERANCE = 1e-6

# normalized_performance 분모 하한
MIN_INITIAL_DISTANCE = 1e-9

LOG_SINKHORN_DONE = "sinkhorn converged after {} iterations (violation {:.2e})"
ERROR_UNEQUAL_COUNTS = "exact EMD needs equal point counts ({} vs {}); use emd_sinkhorn for unequal clouds"
ERROR_TOO_MANY_POINTS = "exact EMD supports at most {} points, got {}"
ERROR_NOT_CONVERGED = "sinkhorn did not converge in {} iterations (marginal violation {:.2e})"
ERROR_SOLVED_TASK = "initial cloud already matches the goal (EMD {:.3e}); task excluded from evaluation"
ERROR_BAD_CLOUD = "point cloud must be M×2 with M >= 1 and finite coordinates, got shape {}"

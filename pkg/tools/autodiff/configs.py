"""
자동미분 모듈의 설정 및 상수 정의

연산 종류 목록, Adam 기본값, 유한차분 기본 스텝, 메시지 템플릿을 모아 둡니다.
"""

# 지원 연산 종류 (apply 의 kind 인자)
OP_KINDS = (
    "add", "sub", "mul", "div", "scale", "neg", "matmul",
    "sum", "mean", "tanh", "softplus", "square", "exp", "log", "sqrt",
    "logsumexp", "concat", "slice", "reshape", "transpose", "expand",
    "max_reduce", "clamp",
)

# Adam 기본값
DEFAULT_LEARNING_RATE = 1e-3
DEFAULT_BETA1 = 0.9
DEFAULT_BETA2 = 0.999
DEFAULT_EPS = 1e-8

# 중앙 차분 기본 스텝
DEFAULT_FD_STEP = 1e-5
RELATIVE_ERROR_FLOOR = 1e-6

# 오류 메시지
ERROR_UNKNOWN_KIND = "unknown operation kind '{}'; expected one of {}"
ERROR_NON_SCALAR_ROOT = "backward() needs a scalar root, got shape {}"
ERROR_DETACHED_ROOT = "backward() root is not recorded on any active graph"
ERROR_FOREIGN_GRAPH = "tensor belongs to a different graph than the active one"
ERROR_BAD_INDEX = "slice only supports basic indexing (ints and slices), got {!r}"

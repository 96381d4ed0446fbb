"""
apply() 를 감싼 함수형 연산 모음

`from tools.autodiff import ops` 로 가져와 `ops.tanh(x)` 처럼 사용합니다.
"""

from typing import Any, Optional, Sequence, Tuple, Union

from .core import ArrayLike, Tensor, apply

Axis = Union[int, Tuple[int, ...]]


def add(a: ArrayLike, b: ArrayLike) -> Tensor:
    return apply("add", a, b)


def sub(a: ArrayLike, b: ArrayLike) -> Tensor:
    return apply("sub", a, b)


def mul(a: ArrayLike, b: ArrayLike) -> Tensor:
    return apply("mul", a, b)


def div(a: ArrayLike, b: ArrayLike) -> Tensor:
    return apply("div", a, b)


def scale(x: ArrayLike, factor: float) -> Tensor:
    return apply("scale", x, factor=factor)


def neg(x: ArrayLike) -> Tensor:
    return apply("neg", x)


def matmul(a: ArrayLike, b: ArrayLike) -> Tensor:
    return apply("matmul", a, b)


def sum(x: ArrayLike, axis: Optional[Axis] = None) -> Tensor:  # noqa: A001
    return apply("sum", x, axis=axis)


def mean(x: ArrayLike, axis: Optional[Axis] = None) -> Tensor:
    """축(정수 또는 정수 튜플) 평균"""
    return apply("mean", x, axis=axis)


def tanh(x: ArrayLike) -> Tensor:
    return apply("tanh", x)


def softplus(x: ArrayLike) -> Tensor:
    return apply("softplus", x)


def square(x: ArrayLike) -> Tensor:
    return apply("square", x)


def exp(x: ArrayLike) -> Tensor:
    return apply("exp", x)


def log(x: ArrayLike) -> Tensor:
    return apply("log", x)


def sqrt(x: ArrayLike) -> Tensor:
    return apply("sqrt", x)


def logsumexp(x: ArrayLike, axis: Optional[int] = None) -> Tensor:
    return apply("logsumexp", x, axis=axis)


def max_reduce(x: ArrayLike, axis: Optional[int] = None) -> Tensor:
    return apply("max_reduce", x, axis=axis)


def min_reduce(x: ArrayLike, axis: Optional[int] = None) -> Tensor:
    return neg(max_reduce(neg(x), axis=axis))


def concat(xs: Sequence[ArrayLike], axis: int = 0) -> Tensor:
    return apply("concat", *xs, axis=axis)


def slice(x: ArrayLike, index: Any) -> Tensor:  # noqa: A001
    return apply("slice", x, index=index)


def reshape(x: ArrayLike, shape: Tuple[int, ...]) -> Tensor:
    return apply("reshape", x, shape=tuple(shape))


def transpose(x: ArrayLike) -> Tensor:
    return apply("transpose", x)


def expand(x: ArrayLike, shape: Tuple[int, ...]) -> Tensor:
    return apply("expand", x, shape=tuple(shape))


def clamp(x: ArrayLike, lo: Any = None, hi: Any = None) -> Tensor:
    return apply("clamp", x, lo=lo, hi=hi)


def dense(x: ArrayLike, weight: ArrayLike, bias: ArrayLike) -> Tensor:
    """x @ W + b, 편향은 행 방향으로 명시적으로 expand"""
    out = matmul(x, weight)
    rows, cols = out.shape
    return add(out, expand(reshape(bias, (1, cols)), (rows, cols)))

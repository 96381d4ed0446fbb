"""
테이프 기반 역방향 자동미분

Graph 가 활성화된 동안 추적 중인 Tensor 를 입력으로 받는 연산은 노드로 기록되고,
backward(root) 는 기록 순서의 역순으로 벡터-야코비안 곱을 누적합니다.
모든 값은 float64 입니다. 브로드캐스팅은 스칼라(0차원)-텐서 조합만 허용하고,
그 외에는 expand/reshape 로 명시해야 합니다.
"""

import logging
import threading
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.special import logsumexp as _logsumexp

from tools.error_handler import NumericalError, ShapeError, ValidationError

from .configs import (
    ERROR_BAD_INDEX,
    ERROR_DETACHED_ROOT,
    ERROR_FOREIGN_GRAPH,
    ERROR_NON_SCALAR_ROOT,
    ERROR_UNKNOWN_KIND,
    OP_KINDS,
)

logger = logging.getLogger(__name__)

ArrayLike = Union["Tensor", np.ndarray, float, int, Sequence[float]]

_LOCAL = threading.local()


class Tensor:
    """float64 배열 + (선택적) 그래프 노드 핸들"""

    __slots__ = ("data", "node", "graph")
    __array_priority__ = 1000

    def __init__(self, data: Any, node: Optional[int] = None, graph: Optional["Graph"] = None):
        self.data = np.asarray(data, dtype=np.float64)
        self.node = node
        self.graph = graph

    @property
    def shape(self) -> Tuple[int, ...]:
        return self.data.shape

    @property
    def ndim(self) -> int:
        return self.data.ndim

    @property
    def size(self) -> int:
        return int(self.data.size)

    @property
    def tracked(self) -> bool:
        return self.node is not None

    def item(self) -> float:
        return float(self.data.reshape(-1)[0]) if self.data.size == 1 else float(self.data)

    def numpy(self) -> np.ndarray:
        return self.data

    def detach(self) -> "Tensor":
        return Tensor(self.data)

    def __repr__(self) -> str:
        return f"Tensor(shape={self.shape}, node={self.node})"

    # 연산자 오버로딩
    def __add__(self, other: ArrayLike) -> "Tensor":
        return apply("add", self, other)

    def __radd__(self, other: ArrayLike) -> "Tensor":
        return apply("add", other, self)

    def __sub__(self, other: ArrayLike) -> "Tensor":
        return apply("sub", self, other)

    def __rsub__(self, other: ArrayLike) -> "Tensor":
        return apply("sub", other, self)

    def __mul__(self, other: ArrayLike) -> "Tensor":
        return apply("mul", self, other)

    def __rmul__(self, other: ArrayLike) -> "Tensor":
        return apply("mul", other, self)

    def __truediv__(self, other: ArrayLike) -> "Tensor":
        return apply("div", self, other)

    def __rtruediv__(self, other: ArrayLike) -> "Tensor":
        return apply("div", other, self)

    def __neg__(self) -> "Tensor":
        return apply("neg", self)

    def __matmul__(self, other: ArrayLike) -> "Tensor":
        return apply("matmul", self, other)

    def __getitem__(self, index: Any) -> "Tensor":
        return apply("slice", self, index=index)


@dataclass
class Node:
    """그래프 노드: 연산 종류, 입력 노드 id, 순전파 시 저장한 값"""

    kind: str
    inputs: Tuple[Optional[int], ...]
    shape: Tuple[int, ...]
    saved: Dict[str, Any] = field(default_factory=dict)


class GradientMap:
    """backward() 결과: 노드 id -> 기울기"""

    def __init__(self, graph: "Graph", grads: List[Optional[np.ndarray]]):
        self._graph = graph
        self._grads = grads

    def __getitem__(self, node_id: int) -> Tensor:
        grad = self._grads[node_id]
        if grad is None:
            grad = np.zeros(self._graph.nodes[node_id].shape)
        return Tensor(grad)

    def __contains__(self, node_id: int) -> bool:
        return 0 <= node_id < len(self._grads) and self._grads[node_id] is not None

    def wrt(self, tensor: Tensor) -> np.ndarray:
        """텐서에 대한 기울기 (도달 불가능하면 0)"""
        if tensor.node is None or tensor.graph is not self._graph:
            return np.zeros(tensor.shape)
        grad = self._grads[tensor.node]
        return np.zeros(tensor.shape) if grad is None else grad


class Graph:
    """추가 전용 노드 테이프. with 블록 안에서만 기록합니다 (스레드별로 독립)."""

    def __init__(self) -> None:
        self.nodes: List[Node] = []

    def __enter__(self) -> "Graph":
        stack = getattr(_LOCAL, "stack", None)
        if stack is None:
            stack = _LOCAL.stack = []
        stack.append(self)
        return self

    def __exit__(self, *exc: Any) -> None:
        _LOCAL.stack.pop()

    def __len__(self) -> int:
        return len(self.nodes)

    def watch(self, value: ArrayLike) -> Tensor:
        """값을 이 그래프의 leaf 로 등록"""
        data = value.data if isinstance(value, Tensor) else np.asarray(value, dtype=np.float64)
        node_id = self._append(Node("leaf", (), data.shape))
        return Tensor(data.copy(), node_id, self)

    def _append(self, node: Node) -> int:
        self.nodes.append(node)
        return len(self.nodes) - 1

    def backward(self, root: Tensor) -> GradientMap:
        """
        스칼라 root 에 대한 모든 도달 가능 노드의 기울기를 계산

        Args:
            root: 이 그래프에 기록된 스칼라 텐서

        Returns:
            GradientMap (도달하지 못한 leaf 는 0)
        """
        if root.node is None or root.graph is not self:
            raise ValidationError(ERROR_DETACHED_ROOT, field="root")
        if root.size != 1:
            raise ValidationError(ERROR_NON_SCALAR_ROOT.format(root.shape), field="root")

        grads: List[Optional[np.ndarray]] = [None] * len(self.nodes)
        grads[root.node] = np.ones(root.shape)
        for node_id in range(root.node, -1, -1):
            upstream = grads[node_id]
            if upstream is None:
                continue
            node = self.nodes[node_id]
            if node.kind == "leaf":
                continue
            input_grads = _VJP[node.kind](upstream, node)
            for input_id, grad in zip(node.inputs, input_grads):
                if input_id is None or grad is None:
                    continue
                if grads[input_id] is None:
                    grads[input_id] = np.array(grad, dtype=np.float64)
                else:
                    grads[input_id] = grads[input_id] + grad
        return GradientMap(self, grads)


def active_graph() -> Optional[Graph]:
    """현재 스레드에서 활성화된 그래프"""
    stack = getattr(_LOCAL, "stack", None)
    return stack[-1] if stack else None


def as_tensor(value: ArrayLike) -> Tensor:
    return value if isinstance(value, Tensor) else Tensor(value)


# ---------------------------------------------------------------------------
# 순전파 구현: (값 목록, 속성) -> (출력, 저장값)
# ---------------------------------------------------------------------------

def _check_elementwise(kind: str, a: np.ndarray, b: np.ndarray) -> None:
    if a.shape != b.shape and a.ndim != 0 and b.ndim != 0:
        raise ShapeError(kind, a.shape, b.shape)


def _reduce_to(grad: np.ndarray, shape: Tuple[int, ...]) -> np.ndarray:
    """스칼라 피연산자 방향의 기울기를 합산"""
    if grad.shape == shape:
        return grad
    return np.asarray(grad.sum()).reshape(shape)


def _fwd_binary(kind: str) -> Callable[..., Tuple[np.ndarray, Dict[str, Any]]]:
    ufunc = {"add": np.add, "sub": np.subtract, "mul": np.multiply, "div": np.divide}[kind]

    def forward(values: List[np.ndarray], attrs: Dict[str, Any]) -> Tuple[np.ndarray, Dict[str, Any]]:
        a, b = values
        _check_elementwise(kind, a, b)
        return ufunc(a, b), {"a": a, "b": b}

    return forward


def _fwd_scale(values, attrs):
    (x,) = values
    return x * float(attrs["factor"]), {}


def _fwd_neg(values, attrs):
    return -values[0], {}


def _fwd_matmul(values, attrs):
    a, b = values
    if a.ndim != 2 or b.ndim != 2 or a.shape[1] != b.shape[0]:
        raise ShapeError("matmul", a.shape, b.shape)
    return a @ b, {"a": a, "b": b}


def _fwd_sum(values, attrs):
    (x,) = values
    return np.sum(x, axis=attrs.get("axis")), {"in_shape": x.shape}


def _fwd_mean(values, attrs):
    (x,) = values
    axis = attrs.get("axis")
    if x.size == 0:
        raise ShapeError("mean", x.shape)
    return np.mean(x, axis=axis), {"in_shape": x.shape}


def _fwd_tanh(values, attrs):
    out = np.tanh(values[0])
    return out, {"out": out}


def _fwd_softplus(values, attrs):
    (x,) = values
    return np.logaddexp(0.0, x), {"x": x}


def _fwd_square(values, attrs):
    (x,) = values
    return x * x, {"x": x}


def _fwd_exp(values, attrs):
    out = np.exp(values[0])
    return out, {"out": out}


def _fwd_log(values, attrs):
    (x,) = values
    return np.log(x), {"x": x}


def _fwd_sqrt(values, attrs):
    out = np.sqrt(values[0])
    return out, {"out": out}


def _fwd_logsumexp(values, attrs):
    (x,) = values
    axis = attrs.get("axis")
    if x.size == 0:
        raise ShapeError("logsumexp", x.shape)
    out = _logsumexp(x, axis=axis)
    return np.asarray(out), {"x": x, "out": np.asarray(out)}


def _fwd_max_reduce(values, attrs):
    (x,) = values
    if x.size == 0:
        raise ShapeError("max_reduce", x.shape)
    out = np.max(x, axis=attrs.get("axis"))
    return out, {"x": x, "out": out}


def _fwd_concat(values, attrs):
    axis = attrs.get("axis", 0)
    try:
        out = np.concatenate(values, axis=axis)
    except ValueError:
        raise ShapeError("concat", *[v.shape for v in values])
    return out, {"sizes": [v.shape[axis] for v in values]}


def _check_basic_index(index: Any) -> Tuple[Any, ...]:
    items = index if isinstance(index, tuple) else (index,)
    for item in items:
        if not isinstance(item, (int, np.integer, slice)) and item is not Ellipsis:
            raise ValidationError(ERROR_BAD_INDEX.format(item), field="index")
    return items


def _fwd_slice(values, attrs):
    (x,) = values
    index = attrs["index"]
    _check_basic_index(index)
    try:
        out = x[index]
    except IndexError:
        raise ShapeError("slice", x.shape)
    return np.array(out, dtype=np.float64), {"in_shape": x.shape}


def _fwd_reshape(values, attrs):
    (x,) = values
    shape = tuple(attrs["shape"])
    try:
        out = x.reshape(shape)
    except ValueError:
        raise ShapeError("reshape", x.shape, shape)
    return out, {"in_shape": x.shape}


def _fwd_transpose(values, attrs):
    (x,) = values
    if x.ndim != 2:
        raise ShapeError("transpose", x.shape)
    return x.T.copy(), {}


def _fwd_expand(values, attrs):
    (x,) = values
    shape = tuple(attrs["shape"])
    if x.ndim != len(shape) or any(s != t and s != 1 for s, t in zip(x.shape, shape)):
        raise ShapeError("expand", x.shape, shape)
    return np.broadcast_to(x, shape).copy(), {"in_shape": x.shape}


def _fwd_clamp(values, attrs):
    (x,) = values
    lo = attrs.get("lo")
    hi = attrs.get("hi")
    out = x
    mask = np.ones(x.shape, dtype=bool)
    if lo is not None:
        lo = np.asarray(lo, dtype=np.float64)
        mask &= x >= lo
        out = np.maximum(out, lo)
    if hi is not None:
        hi = np.asarray(hi, dtype=np.float64)
        mask &= x <= hi
        out = np.minimum(out, hi)
    if out.shape != x.shape:
        raise ShapeError("clamp", x.shape, out.shape)
    return out, {"mask": mask}


_FORWARD: Dict[str, Callable[[List[np.ndarray], Dict[str, Any]], Tuple[np.ndarray, Dict[str, Any]]]] = {
    "add": _fwd_binary("add"),
    "sub": _fwd_binary("sub"),
    "mul": _fwd_binary("mul"),
    "div": _fwd_binary("div"),
    "scale": _fwd_scale,
    "neg": _fwd_neg,
    "matmul": _fwd_matmul,
    "sum": _fwd_sum,
    "mean": _fwd_mean,
    "tanh": _fwd_tanh,
    "softplus": _fwd_softplus,
    "square": _fwd_square,
    "exp": _fwd_exp,
    "log": _fwd_log,
    "sqrt": _fwd_sqrt,
    "logsumexp": _fwd_logsumexp,
    "max_reduce": _fwd_max_reduce,
    "concat": _fwd_concat,
    "slice": _fwd_slice,
    "reshape": _fwd_reshape,
    "transpose": _fwd_transpose,
    "expand": _fwd_expand,
    "clamp": _fwd_clamp,
}


# ---------------------------------------------------------------------------
# 역전파 구현: (상류 기울기, 노드) -> 입력별 기울기
# ---------------------------------------------------------------------------

def _expand_reduced(grad: np.ndarray, in_shape: Tuple[int, ...], axis: Optional[Union[int, Tuple[int, ...]]]) -> np.ndarray:
    """축 축소 연산의 기울기를 입력 shape 으로 되돌림"""
    if axis is None:
        return np.broadcast_to(grad, in_shape)
    return np.broadcast_to(np.expand_dims(grad, axis), in_shape)


def _vjp_add(g, node):
    a, b = node.saved["a"], node.saved["b"]
    return _reduce_to(g, a.shape), _reduce_to(g, b.shape)


def _vjp_sub(g, node):
    a, b = node.saved["a"], node.saved["b"]
    return _reduce_to(g, a.shape), _reduce_to(-g, b.shape)


def _vjp_mul(g, node):
    a, b = node.saved["a"], node.saved["b"]
    return _reduce_to(g * b, a.shape), _reduce_to(g * a, b.shape)


def _vjp_div(g, node):
    a, b = node.saved["a"], node.saved["b"]
    return _reduce_to(g / b, a.shape), _reduce_to(-g * a / (b * b), b.shape)


def _vjp_scale(g, node):
    return (g * float(node.saved["factor"]),)


def _vjp_neg(g, node):
    return (-g,)


def _vjp_matmul(g, node):
    a, b = node.saved["a"], node.saved["b"]
    return g @ b.T, a.T @ g


def _vjp_sum(g, node):
    return (_expand_reduced(g, node.saved["in_shape"], node.saved.get("axis")),)


def _vjp_mean(g, node):
    in_shape = node.saved["in_shape"]
    axis = node.saved.get("axis")
    if axis is None:
        count = int(np.prod(in_shape))
    else:
        axes = axis if isinstance(axis, tuple) else (axis,)
        count = int(np.prod([in_shape[i] for i in axes]))
    return (_expand_reduced(g, in_shape, axis) / count,)


def _vjp_tanh(g, node):
    out = node.saved["out"]
    return (g * (1.0 - out * out),)


def _vjp_softplus(g, node):
    x = node.saved["x"]
    sigmoid = np.exp(-np.logaddexp(0.0, -x))
    return (g * sigmoid,)


def _vjp_square(g, node):
    return (2.0 * g * node.saved["x"],)


def _vjp_exp(g, node):
    return (g * node.saved["out"],)


def _vjp_log(g, node):
    return (g / node.saved["x"],)


def _vjp_sqrt(g, node):
    return (g * 0.5 / node.saved["out"],)


def _vjp_logsumexp(g, node):
    x, out = node.saved["x"], node.saved["out"]
    axis = node.saved.get("axis")
    if axis is None:
        return (g * np.exp(x - out),)
    return (np.expand_dims(g, axis) * np.exp(x - np.expand_dims(out, axis)),)


def _vjp_max_reduce(g, node):
    x, out = node.saved["x"], node.saved["out"]
    axis = node.saved.get("axis")
    if axis is None:
        mask = (x == out).astype(np.float64)
        return (g * mask / mask.sum(),)
    mask = (x == np.expand_dims(out, axis)).astype(np.float64)
    mask /= mask.sum(axis=axis, keepdims=True)
    return (np.expand_dims(g, axis) * mask,)


def _vjp_concat(g, node):
    axis = node.saved.get("axis", 0)
    bounds = np.cumsum(node.saved["sizes"])[:-1]
    return tuple(np.split(g, bounds, axis=axis))


def _vjp_slice(g, node):
    grad = np.zeros(node.saved["in_shape"])
    grad[node.saved["index"]] += g
    return (grad,)


def _vjp_reshape(g, node):
    return (g.reshape(node.saved["in_shape"]),)


def _vjp_transpose(g, node):
    return (g.T,)


def _vjp_expand(g, node):
    in_shape = node.saved["in_shape"]
    axes = tuple(i for i, (s, t) in enumerate(zip(in_shape, g.shape)) if s == 1 and t != 1)
    return (g.sum(axis=axes, keepdims=True) if axes else g,)


def _vjp_clamp(g, node):
    return (g * node.saved["mask"],)


_VJP: Dict[str, Callable[[np.ndarray, Node], Tuple[Optional[np.ndarray], ...]]] = {
    "add": _vjp_add,
    "sub": _vjp_sub,
    "mul": _vjp_mul,
    "div": _vjp_div,
    "scale": _vjp_scale,
    "neg": _vjp_neg,
    "matmul": _vjp_matmul,
    "sum": _vjp_sum,
    "mean": _vjp_mean,
    "tanh": _vjp_tanh,
    "softplus": _vjp_softplus,
    "square": _vjp_square,
    "exp": _vjp_exp,
    "log": _vjp_log,
    "sqrt": _vjp_sqrt,
    "logsumexp": _vjp_logsumexp,
    "max_reduce": _vjp_max_reduce,
    "concat": _vjp_concat,
    "slice": _vjp_slice,
    "reshape": _vjp_reshape,
    "transpose": _vjp_transpose,
    "expand": _vjp_expand,
    "clamp": _vjp_clamp,
}


def apply(kind: str, *inputs: ArrayLike, **attrs: Any) -> Tensor:
    """
    연산을 수행하고, 활성 그래프가 있고 추적 중인 입력이 있으면 노드를 기록

    Args:
        kind: 연산 종류 (OP_KINDS 중 하나)
        *inputs: 입력 텐서(또는 배열/스칼라 상수)
        **attrs: 연산 속성 (axis, shape, index, factor, lo, hi)

    Returns:
        결과 Tensor
    """
    if kind not in _FORWARD:
        raise ValidationError(ERROR_UNKNOWN_KIND.format(kind, ", ".join(OP_KINDS)), field="kind")
    tensors = [as_tensor(x) for x in inputs]
    out, saved = _FORWARD[kind]([t.data for t in tensors], attrs)

    graph = active_graph()
    tracked = [t for t in tensors if t.node is not None]
    if graph is None or not tracked:
        return Tensor(out)
    for t in tracked:
        if t.graph is not graph:
            raise ValidationError(ERROR_FOREIGN_GRAPH, field=kind)

    saved.update(attrs)
    node = Node(
        kind=kind,
        inputs=tuple(t.node if t.graph is graph else None for t in tensors),
        shape=np.shape(out),
        saved=saved,
    )
    return Tensor(out, graph._append(node), graph)


def backward(root: Tensor) -> GradientMap:
    """root 가 기록된 그래프에서 역전파"""
    if root.graph is None or root.node is None:
        raise ValidationError(ERROR_DETACHED_ROOT, field="root")
    return root.graph.backward(root)


def value_and_grad(fn: Callable[..., Tensor], *arrays: ArrayLike) -> Tuple[float, List[np.ndarray]]:
    """
    새 그래프에서 fn(*leaves) 를 기록하고 스칼라 값과 각 인자에 대한 기울기를 반환

    Raises:
        NumericalError: 값이 유한하지 않을 때
    """
    with Graph() as graph:
        leaves = [graph.watch(a) for a in arrays]
        root = fn(*leaves)
        if not isinstance(root, Tensor) or root.node is None:
            # 인자와 무관한 상수 함수
            value = float(as_tensor(root).item())
            return value, [np.zeros(np.shape(leaf.data)) for leaf in leaves]
        value = root.item()
        if not np.isfinite(value):
            raise NumericalError("non-finite value in value_and_grad", value=value)
        grads = graph.backward(root)
    return value, [grads.wrt(leaf) for leaf in leaves]

"""Minimal layer-graph engine with exact analytic gradients.

Tensors are float64 numpy arrays; a batch enters as (n, input_dim) and
flows through a small DAG of layers. Forward returns an opaque cache that
backward consumes exactly once. Gate math for the LSTM and the temporal
convolution run on the selected kernel backend (compiled or numpy).
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from . import _kernels as kernels
from .errors import InvalidGraph, NonFiniteInput, ShapeMismatch, StaleCache

INPUT_ID = "input"


# --- layer specs -------------------------------------------------------------

class Activation(enum.Enum):
    RELU = "relu"
    SOFTMAX = "softmax"
    LINEAR = "linear"


@dataclass(frozen=True)
class Dense:
    units: int
    activation: Activation = Activation.LINEAR

    def __post_init__(self):
        if self.units < 1:
            raise InvalidGraph(f"Dense units must be >= 1, got {self.units}")


@dataclass(frozen=True)
class Dropout:
    rate: float

    def __post_init__(self):
        if not 0.0 <= self.rate < 1.0:
            raise InvalidGraph(f"Dropout rate must be in [0, 1), got {self.rate}")


@dataclass(frozen=True)
class TemporalConv:
    """Valid-padding 1-D convolution with a fixed ReLU activation."""

    filters: int
    kernel_size: int

    def __post_init__(self):
        if self.filters < 1 or self.kernel_size < 1:
            raise InvalidGraph("TemporalConv filters and kernel_size must be >= 1")


@dataclass(frozen=True)
class Lstm:
    """Standard-gate LSTM emitting only the final hidden state."""

    units: int

    def __post_init__(self):
        if self.units < 1:
            raise InvalidGraph(f"Lstm units must be >= 1, got {self.units}")


@dataclass(frozen=True)
class Flatten:
    pass


@dataclass(frozen=True)
class Reshape:
    target_shape: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "target_shape", tuple(int(v) for v in self.target_shape))
        if any(v < 1 for v in self.target_shape):
            raise InvalidGraph(f"Reshape extents must be >= 1, got {self.target_shape}")


@dataclass(frozen=True)
class Concat:
    pass


@dataclass(frozen=True)
class GraphNode:
    id: str
    spec: object
    inputs: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "inputs", tuple(self.inputs))


@dataclass(frozen=True)
class NetworkGraph:
    """Ordered DAG of layers over a (n, input_dim) batch.

    Construction validates structure and propagates per-sample shapes end
    to end, so a held NetworkGraph is always internally consistent.
    """

    nodes: tuple[GraphNode, ...]
    input_dim: int
    output_id: str

    def __post_init__(self):
        object.__setattr__(self, "nodes", tuple(self.nodes))
        if self.input_dim < 1:
            raise InvalidGraph(f"input_dim must be >= 1, got {self.input_dim}")
        seen = {INPUT_ID}
        for node in self.nodes:
            if node.id in seen:
                raise InvalidGraph(f"duplicate or reserved node id {node.id!r}")
            if not node.inputs:
                raise InvalidGraph(f"node {node.id!r} has no inputs")
            for ref in node.inputs:
                if ref not in seen:
                    raise InvalidGraph(f"node {node.id!r} consumes unknown/later node {ref!r}")
            if not isinstance(node.spec, Concat) and len(node.inputs) != 1:
                raise InvalidGraph(f"node {node.id!r} takes exactly one input")
            seen.add(node.id)
        if self.output_id not in seen or self.output_id == INPUT_ID:
            raise InvalidGraph(f"output_id {self.output_id!r} is not a node")
        infer_shapes(self)  # raises on inconsistent wiring

    def node_map(self) -> dict:
        return {n.id: n for n in self.nodes}


def infer_shapes(graph: NetworkGraph) -> dict[str, tuple[int, ...]]:
    """Per-sample output shape of every node, keyed by id."""
    shapes: dict[str, tuple[int, ...]] = {INPUT_ID: (graph.input_dim,)}
    for node in graph.nodes:
        spec = node.spec
        ins = [shapes[i] for i in node.inputs]
        if isinstance(spec, Dense):
            if len(ins[0]) != 1:
                raise ShapeMismatch(node.id, f"Dense needs a flat input, got {ins[0]}")
            shapes[node.id] = (spec.units,)
        elif isinstance(spec, Dropout):
            shapes[node.id] = ins[0]
        elif isinstance(spec, TemporalConv):
            if len(ins[0]) != 2:
                raise ShapeMismatch(node.id, f"TemporalConv needs (steps, channels), got {ins[0]}")
            steps, _ = ins[0]
            if steps < spec.kernel_size:
                raise ShapeMismatch(node.id, f"kernel {spec.kernel_size} does not fit {steps} steps")
            shapes[node.id] = (steps - spec.kernel_size + 1, spec.filters)
        elif isinstance(spec, Lstm):
            if len(ins[0]) != 2:
                raise ShapeMismatch(node.id, f"Lstm needs (steps, channels), got {ins[0]}")
            shapes[node.id] = (spec.units,)
        elif isinstance(spec, Flatten):
            size = 1
            for v in ins[0]:
                size *= v
            shapes[node.id] = (size,)
        elif isinstance(spec, Reshape):
            size = 1
            for v in ins[0]:
                size *= v
            target = 1
            for v in spec.target_shape:
                target *= v
            if size != target:
                raise ShapeMismatch(node.id, f"cannot reshape {ins[0]} to {spec.target_shape}")
            shapes[node.id] = spec.target_shape
        elif isinstance(spec, Concat):
            if any(len(s) != 1 for s in ins):
                raise ShapeMismatch(node.id, f"Concat needs flat inputs, got {ins}")
            shapes[node.id] = (sum(s[0] for s in ins),)
        else:
            raise InvalidGraph(f"unknown layer spec {spec!r} at node {node.id!r}")
    return shapes


# --- parameters --------------------------------------------------------------

def param_shapes(graph: NetworkGraph) -> dict[str, dict[str, tuple[int, ...]]]:
    """Parameter tensor shapes per node, in canonical name order."""
    shapes = infer_shapes(graph)
    out: dict[str, dict[str, tuple[int, ...]]] = {}
    for node in graph.nodes:
        spec = node.spec
        in_shape = shapes[node.inputs[0]]
        if isinstance(spec, Dense):
            out[node.id] = {"W": (in_shape[0], spec.units), "b": (spec.units,)}
        elif isinstance(spec, TemporalConv):
            out[node.id] = {
                "W": (spec.kernel_size, in_shape[1], spec.filters),
                "b": (spec.filters,),
            }
        elif isinstance(spec, Lstm):
            u = spec.units
            out[node.id] = {
                "Wx": (in_shape[1], 4 * u),
                "Wh": (u, 4 * u),
                "b": (4 * u,),
            }
    return out


@dataclass
class ParamCountReport:
    per_node: dict[str, int]
    total: int


def param_count(graph: NetworkGraph) -> ParamCountReport:
    """Analytic parameter counts: per node and total.

    Dense (fan_in+1)*units; TemporalConv (kernel*in_channels+1)*filters;
    Lstm 4*((in+units)*units + units); all other layers 0.
    """
    shapes = param_shapes(graph)
    per_node = {}
    for node in graph.nodes:
        tensors = shapes.get(node.id, {})
        per_node[node.id] = int(sum(np.prod(s) for s in tensors.values()))
    return ParamCountReport(per_node, sum(per_node.values()))


class ParamStore:
    """Per-node named parameter tensors with mirrored gradient tensors."""

    def __init__(self, params: dict[str, dict[str, np.ndarray]]):
        self.params = params
        self.grads = {
            nid: {name: np.zeros_like(t) for name, t in tensors.items()}
            for nid, tensors in params.items()
        }

    def zero_grads(self) -> None:
        for tensors in self.grads.values():
            for g in tensors.values():
                g.fill(0.0)

    def copy(self) -> "ParamStore":
        return ParamStore(
            {nid: {n: t.copy() for n, t in tensors.items()} for nid, tensors in self.params.items()}
        )

    def named_tensors(self):
        """(node_id, name, tensor) in canonical node-then-name order."""
        for nid, tensors in self.params.items():
            for name, t in tensors.items():
                yield nid, name, t

    def total_count(self) -> int:
        return sum(t.size for _, _, t in self.named_tensors())


def _glorot_limit(shape: tuple[int, ...]) -> float:
    if len(shape) == 2:
        fan_in, fan_out = shape
    else:  # conv (kernel, in_channels, filters): receptive-field fans
        k, c, f = shape
        fan_in, fan_out = k * c, k * f
    return float(np.sqrt(6.0 / (fan_in + fan_out)))


def init_network(graph: NetworkGraph, seed: int) -> ParamStore:
    """Glorot-uniform weights, zero biases, LSTM forget-gate bias 1.0.

    Tensors are drawn from one PCG64(seed) stream in canonical order, so a
    seed pins the whole store bit-for-bit.
    """
    rng = np.random.Generator(np.random.PCG64(seed))
    params: dict[str, dict[str, np.ndarray]] = {}
    for nid, tensors in param_shapes(graph).items():
        params[nid] = {}
        for name, shape in tensors.items():
            if name == "b":
                b = np.zeros(shape)
                if "Wh" in tensors:  # LSTM: forget-gate slice starts one unit block in
                    u = shape[0] // 4
                    b[u:2 * u] = 1.0
                params[nid][name] = b
            else:
                limit = _glorot_limit(shape)
                params[nid][name] = rng.uniform(-limit, limit, shape)
    return ParamStore(params)


# --- forward / backward -------------------------------------------------------

class Mode(enum.Enum):
    TRAIN = "train"
    INFER = "infer"


class _Cache:
    """Single-use activation record tying a backward call to its forward."""

    def __init__(self, graph: NetworkGraph, mode: Mode, n: int):
        self.graph = graph
        self.mode = mode
        self.n = n
        self.records: dict[str, tuple] = {}
        self.consumed = False


def _relu(x: np.ndarray) -> np.ndarray:
    return np.maximum(x, 0.0)


def _softmax(x: np.ndarray) -> np.ndarray:
    shifted = x - x.max(axis=1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=1, keepdims=True)


def forward(
    graph: NetworkGraph,
    params: ParamStore,
    batch: np.ndarray,
    mode: Mode = Mode.INFER,
    seed: int = 0,
) -> tuple[np.ndarray, _Cache]:
    """Run the graph over a batch; returns (output, cache).

    In TRAIN mode each Dropout node draws its mask from a PCG64(seed)
    stream in node order (inverted dropout: survivors scale by 1/(1-rate)).
    INFER mode is deterministic and seed-independent.
    """
    batch = np.ascontiguousarray(batch, dtype=np.float64)
    if batch.ndim != 2 or batch.shape[1] != graph.input_dim:
        raise ShapeMismatch(INPUT_ID, f"expected (n, {graph.input_dim}), got {batch.shape}")
    if not np.all(np.isfinite(batch)):
        raise NonFiniteInput("batch contains non-finite values")

    n = batch.shape[0]
    cache = _Cache(graph, mode, n)
    rng = np.random.Generator(np.random.PCG64(seed)) if mode is Mode.TRAIN else None
    values: dict[str, np.ndarray] = {INPUT_ID: batch}

    for node in graph.nodes:
        spec = node.spec
        x = values[node.inputs[0]] if node.inputs else None
        if isinstance(spec, Dense):
            w, b = params.params[node.id]["W"], params.params[node.id]["b"]
            pre = x @ w + b
            if spec.activation is Activation.RELU:
                out = _relu(pre)
                cache.records[node.id] = (x, pre)
            elif spec.activation is Activation.SOFTMAX:
                out = _softmax(pre)
                cache.records[node.id] = (x, out)
            else:
                out = pre
                cache.records[node.id] = (x, None)
        elif isinstance(spec, Dropout):
            if mode is Mode.TRAIN:
                keep = rng.random(x.shape) >= spec.rate
                scale = 1.0 / (1.0 - spec.rate)
                out = x * keep * scale
                cache.records[node.id] = (keep, scale)
            else:
                out = x
                cache.records[node.id] = (None, 1.0)
        elif isinstance(spec, TemporalConv):
            w, b = params.params[node.id]["W"], params.params[node.id]["b"]
            pre = kernels.conv1d_forward(np.ascontiguousarray(x), w, b)
            out = _relu(pre)
            cache.records[node.id] = (x, pre)
        elif isinstance(spec, Lstm):
            p = params.params[node.id]
            x = np.ascontiguousarray(x)
            out, kcache = kernels.lstm_forward(x, p["Wx"], p["Wh"], p["b"])
            cache.records[node.id] = (x, kcache)
        elif isinstance(spec, Flatten):
            out = x.reshape(n, -1)
            cache.records[node.id] = (x.shape,)
        elif isinstance(spec, Reshape):
            out = x.reshape((n,) + spec.target_shape)
            cache.records[node.id] = (x.shape,)
        elif isinstance(spec, Concat):
            parts = [values[i] for i in node.inputs]
            out = np.concatenate(parts, axis=1)
            cache.records[node.id] = (tuple(p.shape[1] for p in parts),)
        else:
            raise InvalidGraph(f"unknown layer spec {spec!r}")
        values[node.id] = out

    return values[graph.output_id], cache


def backward(
    graph: NetworkGraph,
    params: ParamStore,
    cache: _Cache,
    output_grad: np.ndarray,
    at_output_preactivation: bool = False,
) -> np.ndarray:
    """Fill every parameter gradient; return the gradient w.r.t. the batch.

    ``at_output_preactivation=True`` treats output_grad as the gradient at
    the output Dense node's pre-activation, which is how the fused
    softmax + cross-entropy head injects (p - onehot)/n.
    """
    if cache.consumed:
        raise StaleCache("activation cache already consumed by a backward pass")
    if cache.graph != graph:
        raise StaleCache("activation cache does not belong to this graph")
    cache.consumed = True

    node_map = graph.node_map()
    if at_output_preactivation and not isinstance(node_map[graph.output_id].spec, Dense):
        raise InvalidGraph("pre-activation injection needs a Dense output node")

    params.zero_grads()
    shapes = infer_shapes(graph)
    grads: dict[str, np.ndarray] = {
        graph.output_id: np.ascontiguousarray(output_grad, dtype=np.float64)
    }
    expected = (cache.n,) + shapes[graph.output_id]
    if grads[graph.output_id].shape != expected:
        raise ShapeMismatch(graph.output_id, f"output_grad {output_grad.shape} != {expected}")

    def add_grad(nid: str, g: np.ndarray) -> None:
        if nid in grads:
            grads[nid] = grads[nid] + g
        else:
            grads[nid] = g

    for node in reversed(graph.nodes):
        g = grads.pop(node.id, None)
        if g is None:
            continue  # node does not feed the output
        spec = node.spec
        rec = cache.records[node.id]
        gstore = params.grads[node.id] if node.id in params.grads else None
        if isinstance(spec, Dense):
            x, saved = rec
            w = params.params[node.id]["W"]
            if node.id == graph.output_id and at_output_preactivation:
                dpre = g
            elif spec.activation is Activation.RELU:
                dpre = g * (saved > 0)
            elif spec.activation is Activation.SOFTMAX:
                p = saved
                dpre = p * (g - np.sum(g * p, axis=1, keepdims=True))
            else:
                dpre = g
            gstore["W"] += x.T @ dpre
            gstore["b"] += dpre.sum(axis=0)
            add_grad(node.inputs[0], dpre @ w.T)
        elif isinstance(spec, Dropout):
            keep, scale = rec
            add_grad(node.inputs[0], g if keep is None else g * keep * scale)
        elif isinstance(spec, TemporalConv):
            x, pre = rec
            dpre = np.ascontiguousarray(g * (pre > 0))
            dx, dw, db = kernels.conv1d_backward(x, params.params[node.id]["W"], dpre)
            gstore["W"] += dw
            gstore["b"] += db
            add_grad(node.inputs[0], dx)
        elif isinstance(spec, Lstm):
            x, kcache = rec
            p = params.params[node.id]
            dx, dwx, dwh, db = kernels.lstm_backward(
                x, p["Wx"], p["Wh"], kcache, np.ascontiguousarray(g)
            )
            gstore["Wx"] += dwx
            gstore["Wh"] += dwh
            gstore["b"] += db
            add_grad(node.inputs[0], dx)
        elif isinstance(spec, (Flatten, Reshape)):
            (in_shape,) = rec
            add_grad(node.inputs[0], g.reshape(in_shape))
        elif isinstance(spec, Concat):
            (widths,) = rec
            offset = 0
            for ref, width in zip(node.inputs, widths):
                add_grad(ref, g[:, offset:offset + width])
                offset += width
    return grads.get(INPUT_ID, np.zeros((cache.n, graph.input_dim)))

"""Feedforward network model and box-union output-set over-approximation.

Per layer, the pre-activation range of each neuron over an input box is
computed in closed form (the box vertex that minimizes/maximizes the
affine form, read off the weight signs), then mapped through the
activation: monotone activations take the interval endpoints, the
gaussian bell uses its exact four-case image.
"""

from __future__ import annotations

import enum
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import kernels
from .geometry import BoxUnion, HyperBox, Interval, PartitionSpec, as_union, interval_hull, partition_union


class Activation(enum.Enum):
    RELU = "relu"
    LOGISTIC = "logistic"
    TANH = "tanh"
    LINEAR = "linear"
    GAUSSIAN = "gaussian"

    @property
    def code(self) -> int:
        return _ACT_CODES[self]

    @property
    def is_monotone(self) -> bool:
        return self is not Activation.GAUSSIAN

    @classmethod
    def from_tag(cls, tag: str) -> "Activation":
        try:
            return cls(tag.strip().lower())
        except ValueError:
            known = ", ".join(a.value for a in cls)
            raise ValueError(f"unsupported activation {tag!r} (known: {known})") from None


_ACT_CODES = {
    Activation.RELU: kernels.ACT_RELU,
    Activation.LOGISTIC: kernels.ACT_LOGISTIC,
    Activation.TANH: kernels.ACT_TANH,
    Activation.LINEAR: kernels.ACT_LINEAR,
    Activation.GAUSSIAN: kernels.ACT_GAUSSIAN,
}


def eval_activation(kind: Activation, z):
    """Apply the scalar activation elementwise; accepts scalars or arrays."""
    z = np.asarray(z, dtype=np.float64)
    if kind is Activation.RELU:
        out = np.maximum(z, 0.0)
    elif kind is Activation.LOGISTIC:
        out = 1.0 / (1.0 + np.exp(-z))
    elif kind is Activation.TANH:
        out = np.tanh(z)
    elif kind is Activation.LINEAR:
        out = z
    elif kind is Activation.GAUSSIAN:
        out = np.exp(-(z * z))
    else:
        raise ValueError(f"unsupported activation {kind}")
    return out if out.ndim else float(out)


class Layer:
    """One fully-connected layer: weights (n_out, n_in), bias (n_out,), activation."""

    __slots__ = ("weights", "bias", "activation")

    def __init__(self, weights, bias, activation: Activation):
        w = np.ascontiguousarray(weights, dtype=np.float64)
        b = np.ascontiguousarray(bias, dtype=np.float64)
        if w.ndim != 2:
            raise ValueError(f"weights must be 2-D, got shape {w.shape}")
        if b.shape != (w.shape[0],):
            raise ValueError(
                f"bias length {b.shape} does not match {w.shape[0]} weight rows")
        if not (np.all(np.isfinite(w)) and np.all(np.isfinite(b))):
            raise ValueError("layer parameters must be finite")
        if not isinstance(activation, Activation):
            raise ValueError(f"activation must be an Activation, got {activation!r}")
        w.flags.writeable = False
        b.flags.writeable = False
        self.weights = w
        self.bias = b
        self.activation = activation

    @property
    def input_dim(self) -> int:
        return self.weights.shape[1]

    @property
    def output_dim(self) -> int:
        return self.weights.shape[0]

    def __repr__(self):
        return (f"Layer({self.input_dim}->{self.output_dim}, "
                f"{self.activation.value})")


class NetworkModel:
    """Feedforward composition of layers; immutable and thread-safe."""

    __slots__ = ("layers",)

    def __init__(self, layers):
        layers = tuple(layers)
        if not layers:
            raise ValueError("a network needs at least one layer")
        for prev, nxt in zip(layers, layers[1:]):
            if nxt.input_dim != prev.output_dim:
                raise ValueError(
                    f"layer input {nxt.input_dim} does not match previous "
                    f"output {prev.output_dim}")
        self.layers = layers

    @property
    def input_dim(self) -> int:
        return self.layers[0].input_dim

    @property
    def output_dim(self) -> int:
        return self.layers[-1].output_dim

    @property
    def depth(self) -> int:
        return len(self.layers)

    def __repr__(self):
        dims = [self.input_dim] + [ly.output_dim for ly in self.layers]
        return f"NetworkModel({'->'.join(map(str, dims))})"


def eval_network(net: NetworkModel, inputs) -> np.ndarray:
    """Forward pass for a single input vector."""
    x = np.asarray(inputs, dtype=np.float64)
    if x.shape != (net.input_dim,):
        raise ValueError(f"input must have shape ({net.input_dim},), got {x.shape}")
    for layer in net.layers:
        x = eval_activation(layer.activation, layer.weights @ x + layer.bias)
    return x


def eval_network_batch(net: NetworkModel, inputs) -> np.ndarray:
    """Forward pass for a batch of input vectors, shape (n, input_dim)."""
    x = np.asarray(inputs, dtype=np.float64)
    if x.ndim != 2 or x.shape[1] != net.input_dim:
        raise ValueError(f"inputs must have shape (n, {net.input_dim}), got {x.shape}")
    for layer in net.layers:
        x = eval_activation(layer.activation, x @ layer.weights.T + layer.bias)
    return x


def affine_bounds(w_row, theta: float, box: HyperBox) -> Interval:
    """Exact range of w_row @ eta + theta over the box.

    The optimum picks, per coordinate, the lower endpoint when the weight
    is non-negative and the upper endpoint otherwise (and vice versa for
    the maximum), so no LP solve is needed.
    """
    w = np.ascontiguousarray(w_row, dtype=np.float64)
    if w.ndim != 1 or w.size != box.dim:
        raise ValueError(f"weight row length {w.size} != box dimension {box.dim}")
    zlo, zhi = kernels.affine_bounds_batch(
        box.lo[None, :], box.hi[None, :], w[None, :],
        np.array([theta], dtype=np.float64))
    return Interval(float(zlo[0, 0]), float(zhi[0, 0]))


def layer_output_box(layer: Layer, in_box: HyperBox) -> HyperBox:
    """Box containing the layer image of every point of `in_box`."""
    if in_box.dim != layer.input_dim:
        raise ValueError(
            f"box dimension {in_box.dim} != layer input {layer.input_dim}")
    zlo, zhi = kernels.affine_bounds_batch(
        in_box.lo[None, :], in_box.hi[None, :], layer.weights, layer.bias)
    ulo, uhi = kernels.interval_activation_batch(zlo, zhi, layer.activation.code)
    return HyperBox(ulo[0], uhi[0])


def _propagate_chunk(net: NetworkModel, los: np.ndarray, his: np.ndarray):
    lo = np.ascontiguousarray(los)
    hi = np.ascontiguousarray(his)
    for layer in net.layers:
        zlo, zhi = kernels.affine_bounds_batch(lo, hi, layer.weights, layer.bias)
        lo, hi = kernels.interval_activation_batch(zlo, zhi, layer.activation.code)
    return lo, hi


def reach_mlp(net: NetworkModel, h, spec: PartitionSpec, *,
              workers: int = 1, epsilon: float = 0.0) -> BoxUnion:
    """Over-approximate the network image of `h` as a union of boxes.

    The interval hull of `h` is gridded per `spec`, cells not meeting `h`
    are dropped, and each remaining cell is pushed through every layer.
    Result boxes keep their source cell's lexicographic grid index.
    Cells may be processed by several worker threads; results are
    identical for any `workers` because each cell is independent.
    """
    h = as_union(h)
    if h.dim != net.input_dim:
        raise ValueError(f"input set dimension {h.dim} != network input {net.input_dim}")
    if len(spec.counts) != h.dim:
        raise ValueError(
            f"partition has {len(spec.counts)} dimensions, input set has {h.dim}")
    cells = partition_union(h, interval_hull(h), spec)
    n = len(cells)
    if workers <= 1 or n < 64:
        out_lo, out_hi = _propagate_chunk(net, cells.los, cells.his)
    else:
        out_lo = np.empty((n, net.output_dim), dtype=np.float64)
        out_hi = np.empty((n, net.output_dim), dtype=np.float64)
        bounds = np.linspace(0, n, workers + 1, dtype=int)
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = {
                pool.submit(_propagate_chunk, net,
                            cells.los[a:b], cells.his[a:b]): (a, b)
                for a, b in zip(bounds[:-1], bounds[1:]) if b > a}
            for fut, (a, b) in futures.items():
                lo, hi = fut.result()
                out_lo[a:b] = lo
                out_hi[a:b] = hi
    union = BoxUnion(out_lo, out_hi, cell_index=cells.cell_index)
    return union.inflate(epsilon)

"""
Multilayer perceptron with hand-written reverse mode.

Arrays are float64 numpy arrays. A single input is a 1-D vector; a batch
is a 2-D array with one sample per row, and outputs keep the input's rank.
Weights are stored (out_dim, in_dim) so a layer computes act(x @ W.T + b).
"""
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
import numpy.typing as npt

from adcrl.utils.errors import DimensionError

Tensor2 = npt.NDArray[np.float64]

ACTIVATIONS = ("relu", "tanh", "sigmoid", "identity")

# central-difference step used by finite_diff_grad
FD_STEP = 1e-5


def _activate(tag: str, z: np.ndarray) -> np.ndarray:
    if tag == "relu":
        return np.maximum(z, 0.0)
    if tag == "tanh":
        return np.tanh(z)
    if tag == "sigmoid":
        # split by sign so exp never overflows
        out = np.empty_like(z)
        pos = z >= 0
        out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
        ez = np.exp(z[~pos])
        out[~pos] = ez / (1.0 + ez)
        return out
    return z


def _activation_grad(tag: str, z: np.ndarray, a: np.ndarray) -> np.ndarray:
    if tag == "relu":
        return (z > 0.0).astype(np.float64)
    if tag == "tanh":
        return 1.0 - a * a
    if tag == "sigmoid":
        return a * (1.0 - a)
    return np.ones_like(z)


@dataclass
class Layer:
    weight: Tensor2
    bias: np.ndarray
    activation: str

    @property
    def in_dim(self) -> int:
        return self.weight.shape[1]

    @property
    def out_dim(self) -> int:
        return self.weight.shape[0]


class Mlp:
    """Chain of dense layers. Parameter count and shapes never change after construction."""

    def __init__(self, layers: Sequence[Layer]):
        if not layers:
            raise DimensionError("an Mlp needs at least one layer")
        for k, layer in enumerate(layers):
            if layer.activation not in ACTIVATIONS:
                raise ValueError(f"unknown activation {layer.activation!r} in layer {k}")
            if layer.bias.shape != (layer.out_dim,):
                raise DimensionError(
                    f"layer {k}: bias shape {layer.bias.shape} does not match output dim {layer.out_dim}")
            if k > 0 and layers[k - 1].out_dim != layer.in_dim:
                raise DimensionError(
                    f"layer {k}: input dim {layer.in_dim} does not chain with previous output dim "
                    f"{layers[k - 1].out_dim}")
        self.layers: List[Layer] = [
            Layer(np.array(l.weight, dtype=np.float64), np.array(l.bias, dtype=np.float64), l.activation)
            for l in layers
        ]

    @classmethod
    def build(
        cls,
        input_dim: int,
        hidden: Sequence[int],
        output_dim: int,
        rng: np.random.Generator,
        hidden_activation: str = "relu",
        output_activation: str = "identity",
    ) -> "Mlp":
        """Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) initialisation for weights and biases."""
        dims = [input_dim, *hidden, output_dim]
        layers = []
        for k in range(len(dims) - 1):
            fan_in, fan_out = dims[k], dims[k + 1]
            bound = 1.0 / np.sqrt(fan_in)
            weight = rng.uniform(-bound, bound, size=(fan_out, fan_in))
            bias = rng.uniform(-bound, bound, size=fan_out)
            activation = output_activation if k == len(dims) - 2 else hidden_activation
            layers.append(Layer(weight, bias, activation))
        return cls(layers)

    @property
    def input_dim(self) -> int:
        return self.layers[0].in_dim

    @property
    def output_dim(self) -> int:
        return self.layers[-1].out_dim

    @property
    def dims(self) -> List[int]:
        return [self.input_dim] + [layer.out_dim for layer in self.layers]

    @property
    def activations(self) -> List[str]:
        return [layer.activation for layer in self.layers]

    @property
    def architecture(self) -> Tuple[Tuple[int, ...], Tuple[str, ...]]:
        return tuple(self.dims), tuple(self.activations)

    def parameters(self) -> List[np.ndarray]:
        """Live parameter arrays, [W0, b0, W1, b1, ...]. Mutating them mutates the network."""
        params = []
        for layer in self.layers:
            params.append(layer.weight)
            params.append(layer.bias)
        return params

    def num_parameters(self) -> int:
        return sum(p.size for p in self.parameters())

    def copy(self) -> "Mlp":
        return Mlp(self.layers)

    def load_parameters(self, params: Sequence[np.ndarray]) -> None:
        """Overwrite parameters in place from arrays shaped like parameters()."""
        own = self.parameters()
        if len(params) != len(own):
            raise DimensionError(f"expected {len(own)} parameter arrays, found {len(params)}")
        for k, (dst, src) in enumerate(zip(own, params)):
            if dst.shape != np.shape(src):
                raise DimensionError(f"parameter {k}: expected shape {dst.shape}, found {np.shape(src)}")
            dst[...] = src

    def _as_batch(self, x) -> Tuple[np.ndarray, bool]:
        arr = np.asarray(x, dtype=np.float64)
        single = arr.ndim == 1
        if single:
            arr = arr[None, :]
        if arr.ndim != 2 or arr.shape[1] != self.input_dim:
            raise DimensionError(
                f"input dimension mismatch: network expects {self.input_dim}, "
                f"got shape {np.shape(x)}")
        return arr, single

    def _forward_cached(self, x: np.ndarray) -> Tuple[np.ndarray, list]:
        cache = []
        h = x
        for layer in self.layers:
            z = h @ layer.weight.T + layer.bias
            a = _activate(layer.activation, z)
            cache.append((h, z, a))
            h = a
        return h, cache

    def forward(self, x) -> np.ndarray:
        """Evaluate the network. Pure: identical inputs give bit-identical outputs."""
        batch, single = self._as_batch(x)
        out, _ = self._forward_cached(batch)
        return out[0] if single else out

    __call__ = forward

    def backward(self, x, upstream_grad) -> Tuple[List[np.ndarray], np.ndarray]:
        """
        Reverse-mode pass.

        Args:
            x: input vector or batch
            upstream_grad: d(scalar)/d(output), same leading shape as the output

        Returns:
            (param_grads, input_grad): param_grads aligned with parameters() and
            summed over the batch; input_grad shaped like x.
        """
        batch, single = self._as_batch(x)
        g = np.asarray(upstream_grad, dtype=np.float64)
        if single:
            g = g[None, :] if g.ndim == 1 else g
        if g.shape != (batch.shape[0], self.output_dim):
            raise DimensionError(
                f"upstream gradient mismatch: expected {(batch.shape[0], self.output_dim)}, got {np.shape(upstream_grad)}")

        _, cache = self._forward_cached(batch)
        grads: List[Optional[np.ndarray]] = [None] * (2 * len(self.layers))
        for k in range(len(self.layers) - 1, -1, -1):
            layer = self.layers[k]
            h, z, a = cache[k]
            gz = g * _activation_grad(layer.activation, z, a)
            grads[2 * k] = gz.T @ h
            grads[2 * k + 1] = gz.sum(axis=0)
            g = gz @ layer.weight
        return grads, (g[0] if single else g)


def soft_update(target: Mlp, source: Mlp, tau: float) -> Mlp:
    """Polyak update in place: target <- tau * source + (1 - tau) * target."""
    if not 0.0 <= tau <= 1.0:
        raise ValueError(f"tau must lie in [0, 1], got {tau}")
    if target.architecture != source.architecture:
        raise DimensionError(
            f"architecture mismatch: target {target.architecture}, source {source.architecture}")
    for t, s in zip(target.parameters(), source.parameters()):
        t[...] = tau * s + (1.0 - tau) * t
    return target


def finite_diff_grad(
    net: Mlp,
    x,
    scalar_head: Callable[[np.ndarray], float],
    h: float = FD_STEP,
) -> List[np.ndarray]:
    """Central-difference gradient of scalar_head(net(x)) w.r.t. every parameter. net is not modified."""
    probe = net.copy()
    grads = []
    for p in probe.parameters():
        g = np.zeros_like(p)
        flat = p.reshape(-1)
        gflat = g.reshape(-1)
        for i in range(flat.size):
            original = flat[i]
            flat[i] = original + h
            f_plus = float(scalar_head(probe.forward(x)))
            flat[i] = original - h
            f_minus = float(scalar_head(probe.forward(x)))
            flat[i] = original
            gflat[i] = (f_plus - f_minus) / (2.0 * h)
        grads.append(g)
    return grads


def max_relative_error(analytic: Sequence[np.ndarray], numeric: Sequence[np.ndarray], floor: float = 1e-8) -> float:
    """max |a - n| / max(|a|, |n|, floor) over all entries."""
    worst = 0.0
    for a, n in zip(analytic, numeric):
        a = np.asarray(a, dtype=np.float64)
        n = np.asarray(n, dtype=np.float64)
        if a.shape != n.shape:
            raise DimensionError(f"gradient shape mismatch: {a.shape} vs {n.shape}")
        if a.size == 0:
            continue
        denom = np.maximum(np.maximum(np.abs(a), np.abs(n)), floor)
        worst = max(worst, float(np.max(np.abs(a - n) / denom)))
    return worst


def relu_margin(net: Mlp, x) -> float:
    """Smallest |pre-activation| over every relu unit and sample; inf when the net has no relu layer."""
    h, _ = net._as_batch(x)
    margin = np.inf
    for layer in net.layers:
        z = h @ layer.weight.T + layer.bias
        if layer.activation == "relu":
            margin = min(margin, float(np.min(np.abs(z))))
        h = _activate(layer.activation, z)
    return margin

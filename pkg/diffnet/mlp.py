"""Tanh multilayer perceptron with exact reverse-mode gradients."""

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from errors import DimensionMismatchError


@dataclass(frozen=True, eq=False)
class Mlp:
    """
    Fully connected net: tanh on hidden layers, identity on the output.

    Attributes:
        layer_sizes: Widths from input to output, e.g. (20, 64, 64, 2)
        params: Flat vector; per layer the (in x out) weight matrix in
            row-major order followed by the out-length bias
    """

    layer_sizes: Tuple[int, ...]
    params: np.ndarray

    def __post_init__(self) -> None:
        sizes = tuple(int(n) for n in self.layer_sizes)
        if len(sizes) < 2 or min(sizes) < 1:
            raise DimensionMismatchError(f"Invalid layer sizes {sizes}")
        params = np.array(self.params, dtype=np.float64).ravel()
        if params.size != param_count(sizes):
            raise DimensionMismatchError(
                f"Expected {param_count(sizes)} params for {sizes}, got {params.size}"
            )
        params.setflags(write=False)
        object.__setattr__(self, "layer_sizes", sizes)
        object.__setattr__(self, "params", params)

    @property
    def n_inputs(self) -> int:
        return self.layer_sizes[0]

    @property
    def n_outputs(self) -> int:
        return self.layer_sizes[-1]

    def with_params(self, params: np.ndarray) -> "Mlp":
        return Mlp(self.layer_sizes, params)

    def layers(self) -> List[Tuple[np.ndarray, np.ndarray]]:
        """(weight, bias) views into params, one pair per layer."""
        return _unpack(self.layer_sizes, self.params)


def param_count(layer_sizes: Sequence[int]) -> int:
    """Sum over layers of in*out + out."""
    return sum(n_in * n_out + n_out for n_in, n_out in zip(layer_sizes, layer_sizes[1:]))


def _unpack(
    layer_sizes: Sequence[int], flat: np.ndarray
) -> List[Tuple[np.ndarray, np.ndarray]]:
    layers = []
    offset = 0
    for n_in, n_out in zip(layer_sizes, layer_sizes[1:]):
        weight = flat[offset : offset + n_in * n_out].reshape(n_in, n_out)
        offset += n_in * n_out
        bias = flat[offset : offset + n_out]
        offset += n_out
        layers.append((weight, bias))
    return layers


def init_mlp(
    layer_sizes: Sequence[int],
    rng: np.random.Generator,
    output_bias: float = 0.0,
) -> Mlp:
    """
    Glorot-uniform weights in +-sqrt(6 / (fan_in + fan_out)), zero biases.

    Args:
        layer_sizes: Widths from input to output
        rng: Source of randomness
        output_bias: Constant written into the last layer's bias
    """
    chunks = []
    sizes = list(layer_sizes)
    for index, (n_in, n_out) in enumerate(zip(sizes, sizes[1:])):
        limit = np.sqrt(6.0 / (n_in + n_out))
        chunks.append(rng.uniform(-limit, limit, size=n_in * n_out))
        is_last = index == len(sizes) - 2
        chunks.append(np.full(n_out, output_bias if is_last else 0.0))
    return Mlp(tuple(sizes), np.concatenate(chunks))


def _as_batch(net: Mlp, x: np.ndarray) -> Tuple[np.ndarray, bool]:
    x = np.asarray(x, dtype=np.float64)
    single = x.ndim == 1
    batch = x[None, :] if single else x
    if batch.ndim != 2 or batch.shape[1] != net.n_inputs:
        raise DimensionMismatchError(
            f"Input shape {x.shape} does not match input width {net.n_inputs}"
        )
    return batch, single


def _forward_trace(net: Mlp, batch: np.ndarray) -> List[np.ndarray]:
    """Activations entering each layer, followed by the network output."""
    trace = [batch]
    layers = net.layers()
    for index, (weight, bias) in enumerate(layers):
        z = trace[-1] @ weight + bias
        trace.append(z if index == len(layers) - 1 else np.tanh(z))
    return trace


def forward(net: Mlp, x: np.ndarray) -> np.ndarray:
    """
    Evaluate the net on one input vector or a (n, in) batch.

    Raises:
        DimensionMismatchError: If x has the wrong width
    """
    batch, single = _as_batch(net, x)
    out = _forward_trace(net, batch)[-1]
    return out[0] if single else out


def backward(
    net: Mlp, x: np.ndarray, upstream: np.ndarray
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Vector-Jacobian product for parameters and inputs.

    For a batch, the parameter gradient is summed over rows and the input
    cotangent is returned per row.

    Args:
        net: Network
        x: Input vector or (n, in) batch
        upstream: dL/d(output), same leading shape as the output

    Returns:
        Tuple of (parameter gradient aligned with net.params, input cotangent)
    """
    batch, single = _as_batch(net, x)
    delta = np.asarray(upstream, dtype=np.float64)
    delta = delta[None, :] if delta.ndim == 1 else delta
    if delta.shape != (len(batch), net.n_outputs):
        raise DimensionMismatchError(
            f"Upstream shape {np.shape(upstream)} does not match output width "
            f"{net.n_outputs}"
        )

    trace = _forward_trace(net, batch)
    layers = net.layers()
    chunks: List[Optional[np.ndarray]] = [None] * (2 * len(layers))
    for index in range(len(layers) - 1, -1, -1):
        weight, _ = layers[index]
        inputs = trace[index]
        chunks[2 * index] = (inputs.T @ delta).ravel()
        chunks[2 * index + 1] = delta.sum(axis=0)
        delta = delta @ weight.T
        if index > 0:
            # tanh'(z) = 1 - tanh(z)^2, and trace[index] holds tanh(z)
            delta = delta * (1.0 - inputs**2)

    grad = np.concatenate(chunks)
    return grad, (delta[0] if single else delta)

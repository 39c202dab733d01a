"""
Feed-forward network with ReLU hidden layers, a linear output and analytic gradients.
"""

from dataclasses import dataclass
from typing import Any, Dict, List, Sequence, Tuple

import numpy as np

from dwsl.config import FINAL_LAYER_SCALE
from dwsl.utils.errors import DatasetFormatError, InputDomainError


@dataclass(frozen=True, eq=False)
class Mlp:
    """
    Layer sizes plus parameters laid out as [W0, b0, W1, b1, ...].

    W_l has shape (sizes[l], sizes[l + 1]); all values are float64.
    """

    sizes: Tuple[int, ...]
    params: Tuple[np.ndarray, ...]

    @property
    def input_size(self) -> int:
        return self.sizes[0]

    @property
    def output_size(self) -> int:
        return self.sizes[-1]

    def with_params(self, params: Sequence[np.ndarray]) -> "Mlp":
        return Mlp(sizes=self.sizes, params=tuple(params))

    def is_finite(self) -> bool:
        return all(np.all(np.isfinite(p)) for p in self.params)


def init_mlp(
    sizes: Sequence[int], seed: int, final_scale: float = FINAL_LAYER_SCALE
) -> Mlp:
    """
    Seeded uniform initialisation in [-1/sqrt(fan_in), 1/sqrt(fan_in)].

    The last layer is multiplied by ``final_scale`` so an untrained network
    produces near-zero logits.
    """
    sizes = tuple(int(s) for s in sizes)
    if len(sizes) < 2 or min(sizes) < 1:
        raise InputDomainError(f"invalid layer sizes {sizes}")
    rng = np.random.default_rng(seed)
    params: List[np.ndarray] = []
    for layer, (fan_in, fan_out) in enumerate(zip(sizes[:-1], sizes[1:])):
        bound = 1.0 / np.sqrt(fan_in)
        W = rng.uniform(-bound, bound, size=(fan_in, fan_out))
        b = rng.uniform(-bound, bound, size=fan_out)
        if layer == len(sizes) - 2:
            W, b = W * final_scale, b * final_scale
        params.extend([W, b])
    return Mlp(sizes=sizes, params=tuple(params))


def _activations(net: Mlp, x: np.ndarray) -> List[np.ndarray]:
    x = np.asarray(x, dtype=np.float64)
    if x.ndim == 1:
        x = x[None, :]
    if x.shape[1] != net.input_size:
        raise InputDomainError(
            f"input dimension {x.shape[1]} does not match "
            f"network input {net.input_size}"
        )
    outputs = [x]
    n_layers = len(net.params) // 2
    for layer in range(n_layers):
        W, b = net.params[2 * layer], net.params[2 * layer + 1]
        h = outputs[-1] @ W + b
        if layer < n_layers - 1:
            h = np.maximum(h, 0.0)
        outputs.append(h)
    return outputs


def forward(net: Mlp, x: np.ndarray) -> np.ndarray:
    """
    Logits for a feature vector or a batch of feature vectors.

    Returns:
        Array (n, output_size); a single vector yields n = 1
    """
    return _activations(net, x)[-1]


def backward(net: Mlp, x: np.ndarray, grad_logits: np.ndarray) -> List[np.ndarray]:
    """
    Parameter gradients of sum(grad_logits * forward(net, x)).

    Args:
        net: The network
        x: Inputs (n, input_size)
        grad_logits: Upstream gradient at the logits (n, output_size)

    Returns:
        Gradients in the layout of ``net.params``
    """
    outputs = _activations(net, x)
    delta = np.asarray(grad_logits, dtype=np.float64).reshape(outputs[-1].shape)
    n_layers = len(net.params) // 2
    grads: List[np.ndarray] = [None] * len(net.params)
    for layer in reversed(range(n_layers)):
        W = net.params[2 * layer]
        grads[2 * layer] = outputs[layer].T @ delta
        grads[2 * layer + 1] = delta.sum(axis=0)
        if layer > 0:
            delta = (delta @ W.T) * (outputs[layer] > 0.0)
    return grads


def flatten_params(net: Mlp) -> np.ndarray:
    return np.concatenate([p.ravel() for p in net.params])


def mlp_to_record(net: Mlp) -> Dict[str, Any]:
    return {"sizes": list(net.sizes), "params": flatten_params(net).tolist()}


def mlp_from_record(record: Dict[str, Any]) -> Mlp:
    """Rebuild a network from ``mlp_to_record`` output."""
    try:
        sizes = tuple(int(s) for s in record["sizes"])
        flat = np.asarray(record["params"], dtype=np.float64)
    except (KeyError, TypeError, ValueError) as e:
        raise DatasetFormatError(f"malformed network record: {e}") from e
    shapes = [
        shape
        for fan_in, fan_out in zip(sizes[:-1], sizes[1:])
        for shape in ((fan_in, fan_out), (fan_out,))
    ]
    expected = sum(int(np.prod(shape)) for shape in shapes)
    if flat.ndim != 1 or len(flat) != expected:
        raise DatasetFormatError(
            f"network record holds {flat.size} parameters, sizes imply {expected}"
        )
    params = []
    offset = 0
    for shape in shapes:
        count = int(np.prod(shape))
        params.append(flat[offset : offset + count].reshape(shape))
        offset += count
    return Mlp(sizes=sizes, params=tuple(params))

"""
Plain-text network checkpoints.

    MLP v1 <num_layers> <dims...> <activation tags...>
    <all parameters, whitespace separated, layer order, weights row-major then bias>

Floats are written with 17 significant digits, which round-trips float64 exactly.
"""
from pathlib import Path
from typing import List, Sequence, Tuple, Union

import numpy as np

from adcrl.nn.mlp import ACTIVATIONS, Layer, Mlp
from adcrl.utils.errors import CheckpointError

MAGIC = ("MLP", "v1")


def format_floats(values) -> str:
    return " ".join(f"{float(v):.17g}" for v in values)


def dump_mlp(net: Mlp) -> str:
    header = " ".join([*MAGIC, str(len(net.layers)), *map(str, net.dims), *net.activations])
    flat = np.concatenate([p.reshape(-1) for p in net.parameters()])
    return header + "\n" + format_floats(flat) + "\n"


def parse_mlp(lines: Sequence[str]) -> Tuple[Mlp, int]:
    """Parse a network starting at lines[0]. Returns (net, number of lines consumed)."""
    if len(lines) < 2:
        raise CheckpointError("truncated network checkpoint")
    tokens = lines[0].split()
    if tuple(tokens[:2]) != MAGIC:
        raise CheckpointError(f"not an MLP v1 header: {lines[0][:60]!r}")
    try:
        num_layers = int(tokens[2])
        dims = [int(t) for t in tokens[3:4 + num_layers]]
    except (IndexError, ValueError) as e:
        raise CheckpointError(f"malformed MLP header: {e}")
    activations = tokens[4 + num_layers:]
    if len(dims) != num_layers + 1 or len(activations) != num_layers:
        raise CheckpointError(
            f"MLP header declares {num_layers} layers but lists {len(dims)} dims and {len(activations)} activations")
    unknown = [a for a in activations if a not in ACTIVATIONS]
    if unknown:
        raise CheckpointError(f"unknown activation tags {unknown}")

    try:
        values = np.array([float(t) for t in lines[1].split()], dtype=np.float64)
    except ValueError as e:
        raise CheckpointError(f"non-numeric parameter: {e}")
    expected = sum(dims[k + 1] * dims[k] + dims[k + 1] for k in range(num_layers))
    if values.size != expected:
        raise CheckpointError(f"expected {expected} parameters, found {values.size}")
    if not np.all(np.isfinite(values)):
        raise CheckpointError("checkpoint holds non-finite parameters")

    layers: List[Layer] = []
    offset = 0
    for k in range(num_layers):
        n_in, n_out = dims[k], dims[k + 1]
        weight = values[offset:offset + n_out * n_in].reshape(n_out, n_in)
        offset += n_out * n_in
        bias = values[offset:offset + n_out]
        offset += n_out
        layers.append(Layer(weight, bias, activations[k]))
    return Mlp(layers), 2


def save_mlp(net: Mlp, path: Union[str, Path]) -> Path:
    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    p.write_text(dump_mlp(net), encoding="utf-8")
    return p


def load_mlp(path: Union[str, Path]) -> Mlp:
    p = Path(path)
    try:
        lines = p.read_text(encoding="utf-8").splitlines()
    except OSError as e:
        raise CheckpointError(f"cannot read {p}: {e}")
    net, _ = parse_mlp(lines)
    return net

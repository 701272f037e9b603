"""
Dense-network engine: forward/backward passes, Adam, Polyak updates, checkpoints.
"""
from adcrl.nn.mlp import ACTIVATIONS, Layer, Mlp, finite_diff_grad, max_relative_error, relu_margin, soft_update
from adcrl.nn.optim import AdamState, adam_step
from adcrl.nn.checkpoint import dump_mlp, load_mlp, parse_mlp, save_mlp

__all__ = [
    "ACTIVATIONS", "Layer", "Mlp", "finite_diff_grad", "max_relative_error", "relu_margin", "soft_update",
    "AdamState", "adam_step", "dump_mlp", "load_mlp", "parse_mlp", "save_mlp",
]

"""
Experience replay: the main buffer plus reward-classified high/low buffers.
"""
from adcrl.replay.buffers import (
    DEFAULT_CUTOFFS, Placement, RingBuffer, Transition, TransitionBatch, TripleReplay, nearest_rank_quantile,
)

__all__ = [
    "DEFAULT_CUTOFFS", "Placement", "RingBuffer", "Transition", "TransitionBatch", "TripleReplay",
    "nearest_rank_quantile",
]

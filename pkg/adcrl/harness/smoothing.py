"""
Sliding-average filtering of learning curves.
"""
from typing import List, Sequence

import numpy as np


def smooth(series: Sequence[float], window: int) -> List[float]:
    """Trailing mean: element i averages raw elements max(0, i - window + 1) .. i."""
    if window < 1:
        raise ValueError("window must be >= 1")
    values = np.asarray(series, dtype=np.float64)
    return [float(np.mean(values[max(0, i - window + 1):i + 1])) for i in range(len(values))]


def window_stderr(series: Sequence[float], window: int) -> float:
    """Standard error of the mean over the last `window` elements."""
    tail = np.asarray(series, dtype=np.float64)[-window:]
    if tail.size < 2:
        return 0.0
    return float(np.std(tail, ddof=1) / np.sqrt(tail.size))

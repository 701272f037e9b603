"""
Ring buffers of transitions and the three-buffer store used by the director.

Every transition goes to the main buffer; it also goes to the high buffer
when its reward is strictly above the cutoff R, otherwise to the low buffer.
The cutoff in force at insertion time is stored next to each element so the
classification can be audited later.
"""
import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Dict, Iterable, Iterator, List, Optional

import numpy as np

from adcrl.utils.errors import DimensionError, InsufficientSamples

# Default reward cutoffs. Chosen so roughly the top third of random-policy
# rewards classify as high.
DEFAULT_CUTOFFS: Dict[str, float] = {
    "pendulum": -1.0,
    "pointmass": -0.3,
}


class Placement(str, Enum):
    HIGH = "high"
    LOW = "low"


@dataclass(frozen=True)
class Transition:
    state: np.ndarray
    action: np.ndarray
    reward: float
    next_state: np.ndarray
    truncated: bool = False
    terminal: bool = False


@dataclass
class TransitionBatch:
    states: np.ndarray
    actions: np.ndarray
    rewards: np.ndarray
    next_states: np.ndarray
    terminals: np.ndarray
    truncated: np.ndarray

    def __len__(self) -> int:
        return self.rewards.shape[0]


class RingBuffer:
    """Fixed-capacity FIFO store; the oldest element is overwritten on overflow."""

    def __init__(self, capacity: int, obs_dim: int, action_dim: int):
        if capacity < 1:
            raise ValueError("capacity must be >= 1")
        self.capacity = capacity
        self.obs_dim = obs_dim
        self.action_dim = action_dim
        self._states: Optional[np.ndarray] = None
        self._ptr = 0
        self.size = 0

    def _allocate(self):
        self._states = np.zeros((self.capacity, self.obs_dim))
        self._actions = np.zeros((self.capacity, self.action_dim))
        self._rewards = np.zeros(self.capacity)
        self._next_states = np.zeros((self.capacity, self.obs_dim))
        self._terminals = np.zeros(self.capacity, dtype=bool)
        self._truncated = np.zeros(self.capacity, dtype=bool)
        self._cutoffs = np.full(self.capacity, np.nan)

    def __len__(self) -> int:
        return self.size

    def add(self, t: Transition, cutoff: float = math.nan) -> None:
        if np.shape(t.state) != (self.obs_dim,) or np.shape(t.next_state) != (self.obs_dim,):
            raise DimensionError(f"transition state dims {np.shape(t.state)}, buffer expects ({self.obs_dim},)")
        if np.shape(t.action) != (self.action_dim,):
            raise DimensionError(f"transition action dims {np.shape(t.action)}, buffer expects ({self.action_dim},)")
        if not math.isfinite(t.reward):
            raise ValueError(f"non-finite reward {t.reward}")
        if self._states is None:
            self._allocate()
        i = self._ptr
        self._states[i] = t.state
        self._actions[i] = t.action
        self._rewards[i] = t.reward
        self._next_states[i] = t.next_state
        self._terminals[i] = t.terminal
        self._truncated[i] = t.truncated
        self._cutoffs[i] = cutoff
        self._ptr = (self._ptr + 1) % self.capacity
        self.size = min(self.size + 1, self.capacity)

    def _order(self) -> np.ndarray:
        """Storage indices from oldest to newest."""
        start = (self._ptr - self.size) % self.capacity
        return (start + np.arange(self.size)) % self.capacity

    def rewards(self) -> np.ndarray:
        if self.size == 0:
            return np.zeros(0)
        return self._rewards[self._order()].copy()

    def insertion_cutoffs(self) -> np.ndarray:
        if self.size == 0:
            return np.zeros(0)
        return self._cutoffs[self._order()].copy()

    def __iter__(self) -> Iterator[Transition]:
        if self.size == 0:
            return iter(())
        return (
            Transition(
                state=self._states[i].copy(),
                action=self._actions[i].copy(),
                reward=float(self._rewards[i]),
                next_state=self._next_states[i].copy(),
                truncated=bool(self._truncated[i]),
                terminal=bool(self._terminals[i]),
            )
            for i in self._order()
        )

    def sample(self, n: int, rng: np.random.Generator) -> TransitionBatch:
        """n uniform draws with replacement."""
        if self.size < n or n < 1:
            raise InsufficientSamples(self.size, n)
        idx = rng.integers(0, self.size, size=n)
        # indices below size are all live slots, whatever the ring position
        return TransitionBatch(
            states=self._states[idx],
            actions=self._actions[idx],
            rewards=self._rewards[idx],
            next_states=self._next_states[idx],
            terminals=self._terminals[idx],
            truncated=self._truncated[idx],
        )


def nearest_rank_quantile(values: np.ndarray, q: float) -> float:
    """Nearest-rank q-quantile: the ceil(q*n)-th smallest value.

    q is taken at its decimal value, so q=0.07 with n=100 is rank 7 even though
    0.07 * 100 evaluates to 7.000000000000001 in floating point.
    """
    n = len(values)
    if n == 0:
        raise ValueError("quantile of an empty sample")
    rank = max(1, math.ceil(Fraction(repr(float(q))) * n))
    return float(np.partition(np.asarray(values, dtype=np.float64), rank - 1)[rank - 1])


class TripleReplay:
    """Main buffer B, high-quality buffer B1 and low-quality buffer B2 split by cutoff R."""

    def __init__(
        self,
        obs_dim: int,
        action_dim: int,
        cutoff: float,
        main_capacity: int = 1_000_000,
        high_capacity: int = 100_000,
        low_capacity: int = 100_000,
        quantile: Optional[float] = None,
        reservoir_size: int = 10_000,
        seed: int = 0,
    ):
        self.main = RingBuffer(main_capacity, obs_dim, action_dim)
        self.high = RingBuffer(high_capacity, obs_dim, action_dim)
        self.low = RingBuffer(low_capacity, obs_dim, action_dim)
        self.cutoff = float(cutoff)
        self.quantile = quantile
        self.reservoir_size = reservoir_size
        self._reservoir: List[float] = []
        self._seen = 0
        self._pending: List[float] = []
        self._rng = np.random.default_rng(seed)

    @property
    def adaptive(self) -> bool:
        return self.quantile is not None

    def classify_and_store(self, t: Transition) -> Placement:
        self.main.add(t, self.cutoff)
        if self.adaptive:
            self._pending.append(float(t.reward))
        if t.reward > self.cutoff:
            self.high.add(t, self.cutoff)
            return Placement.HIGH
        self.low.add(t, self.cutoff)
        return Placement.LOW

    def take_pending_rewards(self) -> List[float]:
        pending, self._pending = self._pending, []
        return pending

    def update_cutoff(self, recent_rewards: Iterable[float]) -> float:
        """Fold rewards into the reservoir and set R to its q-quantile. Stored elements keep their class."""
        if not self.adaptive:
            raise ValueError("update_cutoff requires adaptive-quantile mode")
        for r in recent_rewards:
            self._seen += 1
            if len(self._reservoir) < self.reservoir_size:
                self._reservoir.append(float(r))
            else:
                j = int(self._rng.integers(0, self._seen))
                if j < self.reservoir_size:
                    self._reservoir[j] = float(r)
        if self._reservoir:
            self.cutoff = nearest_rank_quantile(np.asarray(self._reservoir), self.quantile)
        return self.cutoff

    def sizes(self) -> Dict[str, int]:
        return {"main": len(self.main), "high": len(self.high), "low": len(self.low)}

    def check_invariants(self) -> bool:
        """True when every stored element satisfies its buffer's predicate at insertion time."""
        high_ok = bool(np.all(self.high.rewards() > self.high.insertion_cutoffs()))
        low_ok = bool(np.all(self.low.rewards() <= self.low.insertion_cutoffs()))
        return high_ok and low_ok

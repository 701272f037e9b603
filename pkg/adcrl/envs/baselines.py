"""
Random-policy baseline bands used as the reference for learning checks.

A band is mean +/- 2 standard errors of per-episode random returns over the
10k-episode oracle run. Bands are recorded in the baseline file, either by
scripts/record_baselines.py or the first time a band is requested.
"""
import json
import logging
from pathlib import Path
from typing import Dict, Optional, Tuple, Union

import numpy as np

from adcrl.envs.base import episode_returns, make_env
from adcrl.utils.config import Config

logger = logging.getLogger(__name__)

ORACLE_EPISODES = 10_000
BAND_STDERRS = 2.0


def baseline_band(env_id: str, episodes: int = ORACLE_EPISODES, seed: int = 0,
                  progress: bool = False) -> Tuple[float, float]:
    returns = episode_returns(make_env(env_id), seed, episodes, progress=progress)
    mean = float(np.mean(returns))
    stderr = float(np.std(returns, ddof=1) / np.sqrt(episodes)) if episodes > 1 else 0.0
    return mean - BAND_STDERRS * stderr, mean + BAND_STDERRS * stderr


def _read_record(path: Path) -> Dict[str, dict]:
    if not path.is_file():
        return {}
    return json.loads(path.read_text(encoding="utf-8"))


def _write_record(path: Path, record: Dict[str, dict]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(record, indent=2, sort_keys=True), encoding="utf-8")


def _band_entry(env_id: str, episodes: int, seed: int) -> dict:
    low, high = baseline_band(env_id, episodes, seed, progress=True)
    logger.info("[OK] %s random baseline band: [%.3f, %.3f]", env_id, low, high)
    return {"low": low, "high": high, "episodes": episodes, "seed": seed}


def record_baselines(path: Union[str, Path], episodes: int = ORACLE_EPISODES, seed: int = 0) -> Dict[str, dict]:
    from adcrl.envs.base import ENV_IDS

    record = {env_id: _band_entry(env_id, episodes, seed) for env_id in ENV_IDS}
    _write_record(Path(path), record)
    return record


def load_baseline_band(env_id: str, path: Optional[Union[str, Path]] = None,
                       episodes: int = ORACLE_EPISODES, seed: int = 0) -> Tuple[float, float]:
    """Recorded band for env_id; runs the oracle and records it when the file has none."""
    p = Path(path or Config.BASELINE_FILE)
    record = _read_record(p)
    if env_id not in record:
        logger.warning("No recorded baseline for %s in %s; running the %d-episode oracle and recording it",
                       env_id, p, episodes)
        record[env_id] = _band_entry(env_id, episodes, seed)
        _write_record(p, record)
    return float(record[env_id]["low"]), float(record[env_id]["high"])

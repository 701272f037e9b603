"""
Training pipeline: one environment stream, one agent, evaluation every
eval_interval steps, metrics flushed as they are produced.
"""
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional

import numpy as np
from tqdm import tqdm

from adcrl.envs.base import make_env
from adcrl.harness.evaluation import estimate_value_bias, evaluate
from adcrl.harness.metrics_io import CsvWriter
from adcrl.harness.smoothing import smooth
from adcrl.models.metrics import METRICS_HEADER, VALUE_BIAS_HEADER, MetricsRow, StepReport
from adcrl.models.run_config import RunConfig
from adcrl.replay.buffers import DEFAULT_CUTOFFS, Transition, TripleReplay
from adcrl.services.agent import Ctd3Agent
from adcrl.services.checkpoint import save_agent
from adcrl.utils.config import write_config_file
from adcrl.utils.errors import TrainingAborted
from adcrl.utils.logger import run_log

logger = logging.getLogger(__name__)

# Evaluation episodes use seeds disjoint from the training resets.
EVAL_SEED_OFFSET = 1_000_003
RESET_SEED_BOUND = 2**31 - 1

METRICS_FILE = "metrics.csv"
VALUE_BIAS_FILE = "value_bias.csv"
CHECKPOINT_FILE = "checkpoint.txt"
EFFECTIVE_CONFIG_FILE = "effective_config.ini"


@dataclass
class RunResult:
    rows: List[MetricsRow]
    output_dir: Path
    metrics_path: Path
    checkpoint_path: Path
    agent: Ctd3Agent
    value_bias_path: Optional[Path] = None
    raw_returns: List[float] = field(default_factory=list)


def build_replay(config: RunConfig, obs_dim: int, action_dim: int) -> TripleReplay:
    agent_cfg = config.agent
    cutoff = agent_cfg.cutoff if agent_cfg.cutoff is not None else DEFAULT_CUTOFFS[config.env_id]
    return TripleReplay(
        obs_dim,
        action_dim,
        cutoff,
        main_capacity=agent_cfg.main_capacity,
        high_capacity=agent_cfg.high_capacity,
        low_capacity=agent_cfg.low_capacity,
        quantile=agent_cfg.cutoff_quantile,
        reservoir_size=agent_cfg.reservoir_size,
        seed=config.seed,
    )


class _LatestLosses:
    """Most recent value of each learning quantity, carried between evaluation points."""

    KEYS = ("loss_q1", "loss_q2", "director_v", "actor_j")

    def __init__(self):
        self.values: Dict[str, Optional[float]] = {k: None for k in self.KEYS}
        self.learning = False

    def update(self, report: StepReport) -> None:
        if not report.learned:
            return
        self.learning = True
        for k in self.KEYS:
            value = getattr(report, k)
            if value is not None:
                self.values[k] = value


def run_training(config: RunConfig) -> RunResult:
    """Train one agent for config.total_steps environment steps."""
    out_dir = Path(config.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    with run_log(out_dir):
        return _train(config, out_dir)


def _train(config: RunConfig, out_dir: Path) -> RunResult:
    write_config_file(out_dir / EFFECTIVE_CONFIG_FILE, config.sections())

    env = make_env(config.env_id)
    eval_env = make_env(config.env_id)
    spec = env.spec
    agent = Ctd3Agent(spec, config.agent, seed=config.seed)
    buffers = build_replay(config, spec.obs_dim, spec.action_dim)
    reset_rng = np.random.default_rng([config.seed, 1])
    eval_seed = config.seed + EVAL_SEED_OFFSET

    logger.info("=" * 60)
    logger.info("TRAINING RUN: %s on %s", config.agent.variant, config.env_id)
    logger.info("=" * 60)
    logger.info("Seed: %d", config.seed)
    logger.info("Steps: %d (warmup %d, eval every %d)",
                config.total_steps, config.agent.warmup_steps, config.eval_interval)
    logger.info("Reward cutoff: %s", "adaptive q=%s" % config.agent.cutoff_quantile
                if buffers.adaptive else buffers.cutoff)
    logger.info("Output: %s", out_dir)
    logger.info("=" * 60)

    rows: List[MetricsRow] = []
    raw_returns: List[float] = []
    latest = _LatestLosses()
    metrics = CsvWriter(out_dir / METRICS_FILE, METRICS_HEADER)
    bias_writer = CsvWriter(out_dir / VALUE_BIAS_FILE, VALUE_BIAS_HEADER) if config.track_value_bias else None

    obs = env.reset(seed=int(reset_rng.integers(RESET_SEED_BOUND)))
    try:
        steps = tqdm(range(1, config.total_steps + 1), desc=config.agent.variant,
                     disable=not config.progress, leave=False)
        for t in steps:
            if t <= config.agent.warmup_steps:
                action = agent.random_action()
            else:
                action = agent.select_action(obs, explore=True)
            result = env.step(action)
            transition = Transition(
                state=obs,
                action=action,
                reward=result.reward,
                next_state=result.observation,
                truncated=result.truncated,
                terminal=result.terminal,
            )
            latest.update(agent.train_step(buffers, transition))
            obs = result.observation
            if result.done:
                obs = env.reset(seed=int(reset_rng.integers(RESET_SEED_BOUND)))

            if t % config.eval_interval == 0:
                raw_returns.append(evaluate(agent, eval_env, config.eval_episodes, eval_seed))
                sizes = buffers.sizes()
                row = MetricsRow(
                    step=t,
                    return_raw=raw_returns[-1],
                    return_smooth=smooth(raw_returns, config.smoothing_window)[-1],
                    gamma_d=agent.current_director_weight(),
                    buf_main=sizes["main"],
                    buf_high=sizes["high"],
                    buf_low=sizes["low"],
                    learning=latest.learning,
                    **latest.values,
                )
                rows.append(row)
                metrics.write(row.csv_values())
                logger.info("Step %d: return %.2f (smoothed %.2f), buffers %d/%d/%d",
                            t, row.return_raw, row.return_smooth,
                            row.buf_main, row.buf_high, row.buf_low)
                if bias_writer is not None:
                    bias = estimate_value_bias(agent, eval_env, config.eval_episodes, eval_seed)
                    bias_writer.write([t, bias.q_estimate, bias.mc_return, bias.bias])
    except Exception as e:
        logger.error("Training aborted at step %d: %s", agent.t, e)
        raise TrainingAborted(f"training aborted at step {agent.t}: {e}", rows=rows) from e
    finally:
        metrics.close()
        if bias_writer is not None:
            bias_writer.close()

    checkpoint = save_agent(agent, out_dir / CHECKPOINT_FILE, config.env_id)
    logger.info("=" * 60)
    logger.info("[OK] Training complete: final smoothed return %.2f",
                rows[-1].return_smooth if rows else float("nan"))
    logger.info("=" * 60)
    return RunResult(
        rows=rows,
        output_dir=out_dir,
        metrics_path=metrics.path,
        checkpoint_path=checkpoint,
        agent=agent,
        value_bias_path=bias_writer.path if bias_writer is not None else None,
        raw_returns=raw_returns,
    )

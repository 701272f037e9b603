"""
Command-line entry point.

    python -m adcrl train   --env pendulum --seed 0 --steps 50000
    python -m adcrl eval    --checkpoint runs/checkpoint.txt --episodes 10
    python -m adcrl ablate  --env pointmass --seeds 0,1,2,3,4
    python -m adcrl grad-check

Settings come from an optional `key = value` file (--config) with [agent]
and [run] sections; flags override file values.
"""
import argparse
import logging
import sys
from pathlib import Path
from typing import Dict, List, Optional

from pydantic import ValidationError

from adcrl.envs.base import ENV_IDS, make_env
from adcrl.harness.ablation import run_ablation
from adcrl.harness.evaluation import evaluate
from adcrl.harness.trainer import run_training
from adcrl.models.run_config import RunConfig
from adcrl.services.checkpoint import check_compatible, load_agent
from adcrl.services.gradcheck import TOLERANCE, run_all
from adcrl.utils.config import Config, load_config_file
from adcrl.utils.errors import AdcError, ConfigError

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2

DEFAULT_SEEDS = "0,1,2,3,4"

# flag dest -> (section, key)
OVERRIDES = {
    "env": ("run", "env_id"),
    "seed": ("run", "seed"),
    "steps": ("run", "total_steps"),
    "eval_interval": ("run", "eval_interval"),
    "output_dir": ("run", "output_dir"),
    "adcf": ("agent", "adcf_enabled"),
    "idem": ("agent", "idem_enabled"),
    "cutoff": ("agent", "cutoff"),
}


def _add_run_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="Config file with [agent] and [run] sections")
    p.add_argument("--env", choices=ENV_IDS, help="Environment id")
    p.add_argument("--seed", type=int, help="Seed (falls back to ADC_SEED)")
    p.add_argument("--steps", type=int, help="Total environment steps")
    p.add_argument("--eval-interval", type=int, help="Environment steps between evaluation points")
    p.add_argument("--output-dir", help="Directory for metrics, checkpoint and echoed config")
    p.add_argument("--adcf", action=argparse.BooleanOptionalAction, default=None,
                   help="Enable the director term in the actor objective")
    p.add_argument("--idem", action=argparse.BooleanOptionalAction, default=None,
                   help="Enable two averaged target critics per critic")
    p.add_argument("--cutoff", type=float, help="Reward cutoff R for the high/low buffers")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="adcrl", description="Actor-director-critic training and evaluation")
    sub = parser.add_subparsers(dest="command", required=True)

    train = sub.add_parser("train", help="Train one agent")
    _add_run_flags(train)

    ev = sub.add_parser("eval", help="Evaluate a saved agent")
    ev.add_argument("--checkpoint", required=True, help="Checkpoint written by train")
    ev.add_argument("--env", choices=ENV_IDS, help="Environment id (default: the checkpoint's)")
    ev.add_argument("--episodes", type=int, default=10, help="Deterministic evaluation episodes")
    ev.add_argument("--seed", type=int, default=0, help="Seed of the first evaluation episode")

    ablate = sub.add_parser("ablate", help="Run TD3, TD3+ADCF, TD3+IDEM and CTD3")
    _add_run_flags(ablate)
    ablate.add_argument("--seeds", default=DEFAULT_SEEDS, help="Comma-separated seed list")
    ablate.add_argument("--workers", type=int, default=1, help="Arms trained in parallel")
    ablate.add_argument("--threshold", type=float, help="Report the first step reaching this smoothed return")

    grad = sub.add_parser("grad-check", help="Finite-difference check of every gradient path")
    grad.add_argument("--instances", type=int, default=100, help="Random networks per path")
    grad.add_argument("--seed", type=int, default=0, help="Seed for the random instances")
    return parser


def _describe_validation_error(e: ValidationError) -> ConfigError:
    first = e.errors()[0]
    key = ".".join(str(part) for part in first["loc"]) or "config"
    return ConfigError(f"{key}: {first['msg']}", key=key)


def build_run_config(args: argparse.Namespace) -> RunConfig:
    """File values, then flag overrides, validated by RunConfig."""
    sections: Dict[str, Dict[str, object]] = {"agent": {}, "run": {}}
    if getattr(args, "config", None):
        sections = load_config_file(args.config)
    if "output_dir" not in sections["run"]:
        sections["run"]["output_dir"] = Config.OUTPUT_DIR

    if getattr(args, "seed", None) is None and "seed" not in sections["run"]:
        fallback = Config.fallback_seed()
        if fallback is not None:
            sections["run"]["seed"] = fallback

    for dest, (section, key) in OVERRIDES.items():
        value = getattr(args, dest, None)
        if value is not None:
            sections[section][key] = value

    try:
        return RunConfig(**sections["run"], agent=sections["agent"])
    except ValidationError as e:
        raise _describe_validation_error(e)
    except TypeError as e:
        raise ConfigError(str(e))


def _parse_seeds(text: str) -> List[int]:
    try:
        seeds = [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise ConfigError(f"--seeds must be comma-separated integers, got {text!r}", key="seeds")
    if not seeds:
        raise ConfigError("--seeds is empty", key="seeds")
    return seeds


def eval_command(checkpoint: str, env_id: Optional[str] = None, episodes: int = 10, seed: int = 0) -> float:
    """Load a checkpoint, verify it fits the environment, and return its mean evaluation return."""
    if episodes < 1:
        raise ConfigError("--episodes must be >= 1", key="episodes")
    agent, saved_env = load_agent(checkpoint)
    env = make_env(env_id or saved_env)
    check_compatible(agent, env.spec)
    return evaluate(agent, env, episodes, seed)


def _train(args: argparse.Namespace) -> int:
    config = build_run_config(args)
    result = run_training(config)
    print(f"metrics: {result.metrics_path}")
    print(f"checkpoint: {result.checkpoint_path}")
    if result.rows:
        print(f"final smoothed return: {result.rows[-1].return_smooth:.17g}")
    return EXIT_OK


def _eval(args: argparse.Namespace) -> int:
    value = eval_command(args.checkpoint, args.env, args.episodes, args.seed)
    print(f"{value:.17g}")
    return EXIT_OK


def _ablate(args: argparse.Namespace) -> int:
    config = build_run_config(args)
    seeds = _parse_seeds(args.seeds)
    if args.workers < 1:
        raise ConfigError("--workers must be >= 1", key="workers")
    result = run_ablation(config, seeds=seeds, workers=args.workers, threshold=args.threshold)
    print(f"summary: {result.summary_path}")
    print(f"report: {result.report_path}")
    for arm in result.failed():
        print(f"failed: {arm.variant} seed {arm.seed}: {arm.error}", file=sys.stderr)
    return EXIT_FAILURE if result.failed() else EXIT_OK


def _grad_check(args: argparse.Namespace) -> int:
    if args.instances < 1:
        raise ConfigError("--instances must be >= 1", key="instances")
    results = run_all(args.instances, args.seed)
    worst = max(r.max_rel_error for r in results)
    for r in results:
        print(f"{r.path}: {r.max_rel_error:.3e}")
    print(f"max relative error: {worst:.3e}")
    return EXIT_OK if worst <= TOLERANCE else EXIT_FAILURE


COMMANDS = {
    "train": _train,
    "eval": _eval,
    "ablate": _ablate,
    "grad-check": _grad_check,
}


def parse_and_dispatch(argv: Optional[List[str]] = None) -> int:
    """Run one command and return its exit status. Expected errors become a one-line diagnostic."""
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except ConfigError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except AdcError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_FAILURE


def main(argv: Optional[List[str]] = None) -> int:
    from adcrl.utils.logger import setup_logger

    setup_logger()
    return parse_and_dispatch(argv)


if __name__ == "__main__":
    sys.exit(main())

#!/usr/bin/env python
"""Record random-policy baseline bands for every built-in environment.

Usage:
  python scripts/record_baselines.py --episodes 10000 --seed 0 --output data/random_baselines.json

Run once; learning checks read the recorded bands instead of repeating the
10k-episode rollout. Re-running overwrites the file.
"""
import argparse
import sys
from pathlib import Path

from dotenv import load_dotenv

load_dotenv()
sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

from adcrl.envs.baselines import ORACLE_EPISODES, record_baselines
from adcrl.utils.config import Config
from adcrl.utils.logger import setup_logger


def main():
    parser = argparse.ArgumentParser(description="Record random-policy baseline bands")
    parser.add_argument("--episodes", type=int, default=ORACLE_EPISODES, help="Random episodes per environment")
    parser.add_argument("--seed", type=int, default=0, help="Seed for the episode resets and actions")
    parser.add_argument("--output", default=Config.BASELINE_FILE, help="JSON file to write")

    args = parser.parse_args()
    setup_logger()
    Config.display()
    record = record_baselines(args.output, args.episodes, args.seed)
    for env_id, band in sorted(record.items()):
        print(f"{env_id}: [{band['low']:.6f}, {band['high']:.6f}] over {band['episodes']} episodes")
    print(f"Wrote {args.output}")


if __name__ == "__main__":
    main()

"""
Ablation runner: TD3, TD3+ADCF, TD3+IDEM and CTD3 on identical budgets and seeds.
"""
import logging
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence

from adcrl.harness.metrics_io import REPORT_HEADER, SUMMARY_HEADER, write_rows
from adcrl.harness.smoothing import window_stderr
from adcrl.harness.trainer import run_training
from adcrl.models.metrics import MetricsRow
from adcrl.models.run_config import RunConfig
from adcrl.utils.logger import PACKAGE_LOGGER, setup_logger

logger = logging.getLogger(__name__)

# (name, adcf_enabled, idem_enabled), weakest to strongest
VARIANTS = (
    ("TD3", False, False),
    ("TD3+ADCF", True, False),
    ("TD3+IDEM", False, True),
    ("CTD3", True, True),
)

SUMMARY_FILE = "summary.csv"
REPORT_FILE = "ablation_report.csv"


@dataclass
class ArmResult:
    variant: str
    seed: int
    output_dir: Path
    final_smooth_return: Optional[float] = None
    final_window_stderr: Optional[float] = None
    error: Optional[str] = None

    @property
    def ok(self) -> bool:
        return self.error is None


@dataclass
class AblationResult:
    env_id: str
    arms: List[ArmResult]
    summary_path: Path
    report_path: Path
    medians: Dict[str, float] = field(default_factory=dict)
    tie_tolerance: float = 0.0

    def failed(self) -> List[ArmResult]:
        return [a for a in self.arms if not a.ok]

    def ordering_holds(self) -> Dict[str, bool]:
        """Each variant's median against TD3's, allowing ties within one window standard error."""
        base = self.medians.get("TD3")
        if base is None:
            return {}
        return {name: value >= base - self.tie_tolerance
                for name, value in self.medians.items() if name != "TD3"}


def steps_to_threshold(rows: Sequence[MetricsRow], threshold: float) -> Optional[int]:
    """First evaluation step whose smoothed return reaches threshold, None if never."""
    for row in rows:
        if row.return_smooth >= threshold:
            return row.step
    return None


def arm_config(base: RunConfig, variant: str, adcf: bool, idem: bool, seed: int) -> RunConfig:
    agent = base.agent.model_copy(update={"adcf_enabled": adcf, "idem_enabled": idem})
    slug = variant.lower().replace("+", "_")
    return base.model_copy(update={
        "agent": agent,
        "seed": seed,
        "output_dir": Path(base.output_dir) / slug / f"seed_{seed}",
    })


def _init_worker(level: str) -> None:
    setup_logger(level=level, worker=True)


def _run_arm(variant: str, config: RunConfig, threshold: Optional[float] = None) -> ArmResult:
    arm = ArmResult(variant=variant, seed=config.seed, output_dir=Path(config.output_dir))
    try:
        result = run_training(config)
    except Exception as e:
        logger.error("Arm %s seed %d failed: %s", variant, config.seed, e)
        arm.error = str(e)
        return arm
    arm.final_smooth_return = result.rows[-1].return_smooth
    arm.final_window_stderr = window_stderr(result.raw_returns, config.smoothing_window)
    if threshold is not None:
        reached = steps_to_threshold(result.rows, threshold)
        logger.info("Arm %s seed %d reaches %.2f at step %s", variant, config.seed, threshold,
                    reached if reached is not None else "never")
    return arm


def summarize_ablation(env_id: str, arms: Sequence[ArmResult],
                       output_dir: Path) -> AblationResult:
    """Write the per-arm summary and the per-variant median report."""
    output_dir = Path(output_dir)
    summary_path = write_rows(output_dir / SUMMARY_FILE, SUMMARY_HEADER, [
        (a.variant, env_id, a.seed, a.final_smooth_return) for a in arms if a.ok
    ])

    medians: Dict[str, float] = {}
    report = []
    for name, _, _ in VARIANTS:
        finals = [a.final_smooth_return for a in arms if a.variant == name and a.ok]
        if not finals:
            continue
        medians[name] = float(statistics.median(finals))
        report.append((name, env_id, medians[name], len(finals)))
    report_path = write_rows(output_dir / REPORT_FILE, REPORT_HEADER, report)

    stderrs = [a.final_window_stderr for a in arms if a.variant == "TD3" and a.ok]
    tolerance = float(statistics.median(stderrs)) if stderrs else 0.0
    return AblationResult(
        env_id=env_id,
        arms=list(arms),
        summary_path=summary_path,
        report_path=report_path,
        medians=medians,
        tie_tolerance=tolerance,
    )


def run_ablation(base: RunConfig, seeds: Optional[Sequence[int]] = None, workers: int = 1,
                 threshold: Optional[float] = None) -> AblationResult:
    """Run every variant for every seed. A failing arm is recorded and the rest continue."""
    seeds = list(seeds) if seeds else [base.seed]
    jobs = []
    for seed in seeds:
        for name, adcf, idem in VARIANTS:
            config = arm_config(base, name, adcf, idem, seed)
            if workers > 1:
                config = config.model_copy(update={"progress": False})
            jobs.append((name, config))

    logger.info("=" * 60)
    logger.info("ABLATION: %s", base.env_id)
    logger.info("=" * 60)
    logger.info("Variants: %s", ", ".join(name for name, _, _ in VARIANTS))
    logger.info("Seeds: %s", seeds)
    logger.info("Steps per arm: %d", base.total_steps)
    logger.info("Workers: %d", workers)
    logger.info("=" * 60)

    if workers > 1:
        level = logging.getLevelName(logging.getLogger(PACKAGE_LOGGER).getEffectiveLevel())
        with ProcessPoolExecutor(max_workers=workers, initializer=_init_worker, initargs=(level,)) as pool:
            futures = [pool.submit(_run_arm, name, config, threshold) for name, config in jobs]
            arms = [f.result() for f in futures]
    else:
        arms = [_run_arm(name, config, threshold) for name, config in jobs]

    result = summarize_ablation(base.env_id, arms, Path(base.output_dir))
    for name, median in result.medians.items():
        logger.info("%-9s median final smoothed return %.2f", name, median)
    for name, holds in result.ordering_holds().items():
        logger.info("%s %s TD3", name, "matches or beats" if holds else "trails")
    if result.failed():
        logger.warning("%d of %d arms failed", len(result.failed()), len(arms))
    else:
        logger.info("[OK] All %d arms completed", len(arms))
    return result

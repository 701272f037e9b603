import numpy as np
import pytest

from adcrl.envs.baselines import load_baseline_band
from adcrl.envs.base import make_env
from adcrl.harness import ablation
from adcrl.harness.ablation import (
    AblationResult,
    ArmResult,
    VARIANTS,
    run_ablation,
    steps_to_threshold,
    summarize_ablation,
)
from adcrl.harness.evaluation import estimate_value_bias, evaluate
from adcrl.harness.metrics_io import read_metrics
from adcrl.harness.smoothing import smooth, window_stderr
from adcrl.harness.trainer import run_training
from adcrl.models import AgentConfig, MetricsRow, RunConfig
from adcrl.models.metrics import METRICS_HEADER
from adcrl.services.agent import Ctd3Agent
from adcrl.utils.config import load_config_file
from adcrl.utils.errors import NonFiniteError, TrainingAborted


def metrics_row(step, smooth_value):
    return MetricsRow(step=step, return_raw=smooth_value, return_smooth=smooth_value)


# ---------------------------------------------------------------- smoothing

def test_smooth_examples():
    assert smooth([0.0, 10.0], 2) == [0.0, 5.0]
    assert smooth([3.0, -1.0, 7.0], 1) == [3.0, -1.0, 7.0]
    assert smooth([4.0] * 6, 3) == [4.0] * 6
    assert smooth([], 5) == []


def test_smooth_is_trailing_window_mean():
    series = list(np.random.default_rng(0).normal(size=50))
    out = smooth(series, 7)
    assert len(out) == len(series)
    for i, value in enumerate(out):
        assert value == pytest.approx(np.mean(series[max(0, i - 6):i + 1]), abs=1e-12)


def test_smooth_is_linear():
    rng = np.random.default_rng(1)
    a, b = rng.normal(size=20), rng.normal(size=20)
    combined = smooth(list(2.0 * a + b), 4)
    np.testing.assert_allclose(combined, 2.0 * np.array(smooth(list(a), 4)) + np.array(smooth(list(b), 4)),
                               atol=1e-12)


def test_smooth_rejects_zero_window():
    with pytest.raises(ValueError):
        smooth([1.0], 0)


def test_window_stderr():
    assert window_stderr([5.0], 3) == 0.0
    assert window_stderr([0.0, 100.0, 1.0, 3.0], 2) == pytest.approx(np.std([1.0, 3.0], ddof=1) / np.sqrt(2))


# ---------------------------------------------------------------- evaluation

def test_evaluate_is_deterministic_and_pure(tiny_agent_config):
    env = make_env("pointmass")
    agent = Ctd3Agent(env.spec, tiny_agent_config, seed=0)
    params = {name: [p.copy() for p in net.parameters()] for name, net in agent.networks().items()}
    rng_state = agent.rng.bit_generator.state
    first = evaluate(agent, env, episodes=3, seed=11)
    assert evaluate(agent, env, episodes=3, seed=11) == first
    assert agent.rng.bit_generator.state == rng_state
    for name, net in agent.networks().items():
        assert all(np.array_equal(a, b) for a, b in zip(net.parameters(), params[name]))


def test_evaluate_requires_an_episode(tiny_agent_config):
    env = make_env("pointmass")
    with pytest.raises(ValueError):
        evaluate(Ctd3Agent(env.spec, tiny_agent_config), env, episodes=0, seed=0)


def test_value_bias_is_estimate_minus_return(tiny_agent_config):
    env = make_env("pendulum")
    agent = Ctd3Agent(env.spec, tiny_agent_config, seed=0)
    bias = estimate_value_bias(agent, env, episodes=2, seed=0)
    assert np.isfinite(bias.q_estimate) and np.isfinite(bias.mc_return)
    assert bias.bias == pytest.approx(bias.q_estimate - bias.mc_return)
    assert bias.mc_return < 0.0


# ---------------------------------------------------------------- training

def test_training_writes_metrics_checkpoint_and_config(tiny_run_config):
    result = run_training(tiny_run_config)
    out = tiny_run_config.output_dir
    assert result.metrics_path == out / "metrics.csv"
    assert (out / "checkpoint.txt").is_file()
    assert (out / "effective_config.ini").is_file()
    run_log_text = (out / "train.log").read_text()
    assert "TRAINING RUN: CTD3 on pointmass" in run_log_text
    assert "[OK] Training complete" in run_log_text

    lines = result.metrics_path.read_text().splitlines()
    assert lines[0] == ",".join(METRICS_HEADER)
    assert len(lines) == 1 + 4

    rows = read_metrics(result.metrics_path)
    assert [r.step for r in rows] == [100, 200, 300, 400]
    assert [r.return_raw for r in rows] == [r.return_raw for r in result.rows]
    mains = [r.buf_main for r in rows]
    assert mains == sorted(mains) and mains[-1] == 400
    assert all(r.buf_high + r.buf_low == r.buf_main for r in rows)
    assert all(r.learning for r in result.rows)
    assert result.rows[-1].loss_q1 is not None and result.rows[-1].actor_j is not None
    raw = [r.return_raw for r in result.rows]
    for row, expected in zip(result.rows, smooth(raw, tiny_run_config.smoothing_window)):
        assert row.return_smooth == pytest.approx(expected, abs=1e-12)


def test_training_is_bit_reproducible(tiny_run_config, tmp_path):
    first = run_training(tiny_run_config)
    second = run_training(tiny_run_config.model_copy(update={"output_dir": tmp_path / "again"}))
    assert first.metrics_path.read_bytes() == second.metrics_path.read_bytes()
    assert first.checkpoint_path.read_bytes() == second.checkpoint_path.read_bytes()


def test_echoed_config_reproduces_the_run_config(tiny_run_config):
    run_training(tiny_run_config)
    sections = load_config_file(tiny_run_config.output_dir / "effective_config.ini")
    reloaded = RunConfig(**sections["run"], agent=sections["agent"])
    assert reloaded.model_dump() == tiny_run_config.model_dump()


def test_budget_equal_to_warmup_has_no_learning_rows(tiny_run_config):
    agent = tiny_run_config.agent.model_copy(update={"warmup_steps": 100})
    config = tiny_run_config.model_copy(update={"total_steps": 100, "eval_interval": 50, "agent": agent})
    result = run_training(config)
    assert [r.step for r in result.rows] == [50, 100]
    assert not any(r.learning for r in result.rows)
    assert all(r.loss_q1 is None and r.director_v is None for r in result.rows)


def test_value_bias_tracking_writes_file(tiny_run_config):
    result = run_training(tiny_run_config.model_copy(update={"track_value_bias": True}))
    lines = result.value_bias_path.read_text().splitlines()
    assert lines[0] == "step,q_estimate,mc_return,bias"
    assert len(lines) == 5


def test_failure_aborts_with_partial_metrics(tiny_run_config, monkeypatch):
    original = Ctd3Agent.train_step

    def failing(self, buffers, transition):
        if self.t >= 250:
            raise NonFiniteError("critic 1: non-finite loss nan")
        return original(self, buffers, transition)

    monkeypatch.setattr(Ctd3Agent, "train_step", failing)
    with pytest.raises(TrainingAborted) as info:
        run_training(tiny_run_config)
    assert [r.step for r in info.value.rows] == [100, 200]
    assert "non-finite" in str(info.value)
    flushed = (tiny_run_config.output_dir / "metrics.csv").read_text().splitlines()
    assert len(flushed) == 3
    assert not (tiny_run_config.output_dir / "checkpoint.txt").exists()


def test_run_config_validation(tiny_agent_config, tmp_path):
    with pytest.raises(ValueError, match="divide"):
        RunConfig(total_steps=1000, eval_interval=300, agent=tiny_agent_config)
    with pytest.raises(ValueError, match="warmup"):
        RunConfig(total_steps=10, eval_interval=10, agent=tiny_agent_config)


def test_director_half_life_defaults_to_fraction_of_budget():
    assert RunConfig(total_steps=50_000).agent.director_half_life == 10_000.0
    assert RunConfig(total_steps=5000).agent.director_half_life == 1000.0


def test_shared_agent_config_gets_half_life_per_run():
    shared = AgentConfig()
    short = RunConfig(total_steps=1000, agent=shared)
    long = RunConfig(total_steps=50_000, agent=shared)
    assert short.agent.director_half_life == 200.0
    assert long.agent.director_half_life == 10_000.0
    assert "director_half_life" not in shared.model_fields_set
    assert shared.director_half_life == AgentConfig().director_half_life


# ---------------------------------------------------------------- ablation

def test_steps_to_threshold():
    rows = [metrics_row(100, -50.0), metrics_row(200, -20.0), metrics_row(300, -5.0)]
    assert steps_to_threshold(rows, -20.0) == 200
    assert steps_to_threshold(rows, 0.0) is None


def test_ablation_runs_four_arms_on_one_grid(tiny_run_config):
    base = tiny_run_config.model_copy(update={"total_steps": 200})
    result = run_ablation(base, seeds=[0])
    assert [a.variant for a in result.arms] == [name for name, _, _ in VARIANTS]
    assert not result.failed()
    grids = [[r.step for r in read_metrics(a.output_dir / "metrics.csv")] for a in result.arms]
    assert all(g == [100, 200] for g in grids)

    summary = result.summary_path.read_text().splitlines()
    assert summary[0] == "variant,env,seed,final_smooth_return"
    assert [line.split(",")[0] for line in summary[1:]] == ["TD3", "TD3+ADCF", "TD3+IDEM", "CTD3"]
    report = result.report_path.read_text().splitlines()
    assert report[0] == "variant,env,median_final_smooth_return,seeds"
    assert len(report) == 5


def test_plain_td3_arm_matches_standalone_run(tiny_run_config, tmp_path):
    base = tiny_run_config.model_copy(update={"total_steps": 200})
    result = run_ablation(base, seeds=[3])
    td3_arm = next(a for a in result.arms if a.variant == "TD3")
    agent = base.agent.model_copy(update={"adcf_enabled": False, "idem_enabled": False})
    standalone = run_training(base.model_copy(update={
        "agent": agent, "seed": 3, "output_dir": tmp_path / "standalone"}))
    assert (td3_arm.output_dir / "metrics.csv").read_bytes() == standalone.metrics_path.read_bytes()


def test_failing_arm_is_recorded_and_others_continue(tiny_run_config, monkeypatch):
    real = ablation.run_training

    def flaky(config):
        if config.agent.variant == "TD3+IDEM":
            raise TrainingAborted("training aborted at step 7: boom")
        return real(config)

    monkeypatch.setattr(ablation, "run_training", flaky)
    base = tiny_run_config.model_copy(update={"total_steps": 200})
    result = run_ablation(base, seeds=[0])
    failed = result.failed()
    assert [a.variant for a in failed] == ["TD3+IDEM"]
    assert "boom" in failed[0].error
    assert set(result.medians) == {"TD3", "TD3+ADCF", "CTD3"}


def test_summary_medians_and_ordering(tmp_path):
    arms = []
    finals = {"TD3": [1.0, 2.0, 9.0], "TD3+ADCF": [2.0, 3.0, 4.0], "TD3+IDEM": [1.5, 1.8, 1.9], "CTD3": [5.0, 6.0, 7.0]}
    for name, values in finals.items():
        for seed, value in enumerate(values):
            arms.append(ArmResult(name, seed, tmp_path, final_smooth_return=value, final_window_stderr=0.25))
    result = summarize_ablation("pendulum", arms, tmp_path)
    assert result.medians == {"TD3": 2.0, "TD3+ADCF": 3.0, "TD3+IDEM": 1.8, "CTD3": 6.0}
    assert result.tie_tolerance == 0.25
    assert result.ordering_holds() == {"TD3+ADCF": True, "TD3+IDEM": True, "CTD3": True}
    report = result.report_path.read_text().splitlines()
    assert report[1] == "TD3,pendulum,2,3"


def test_ordering_flags_a_clear_loss(tmp_path):
    result = AblationResult("pointmass", [], tmp_path / "s.csv", tmp_path / "r.csv",
                            medians={"TD3": 0.0, "CTD3": -1.0}, tie_tolerance=0.1)
    assert result.ordering_holds() == {"CTD3": False}


# ---------------------------------------------------------------- desk-scale runs

@pytest.mark.slow
def test_pendulum_learns_beyond_random_baseline(tmp_path):
    low, high = load_baseline_band("pendulum")
    width = high - low
    beaten = 0
    for seed in range(5):
        config = RunConfig(env_id="pendulum", seed=seed, total_steps=50_000, output_dir=tmp_path / str(seed),
                           progress=False)
        final = run_training(config).rows[-1].return_smooth
        beaten += final >= high + 3.0 * width
    assert beaten >= 4


@pytest.mark.slow
@pytest.mark.parametrize("env_id", ["pendulum", "pointmass"])
def test_ablation_ordering_at_desk_scale(env_id, tmp_path):
    base = RunConfig(env_id=env_id, total_steps=50_000, output_dir=tmp_path, progress=False)
    result = run_ablation(base, seeds=[0, 1, 2, 3, 4], workers=4)
    assert not result.failed()
    assert all(result.ordering_holds().values())

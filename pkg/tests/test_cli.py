import pytest

from adcrl.cli import build_parser, build_run_config, eval_command, parse_and_dispatch
from adcrl.envs.base import make_env
from adcrl.harness.evaluation import evaluate
from adcrl.services.checkpoint import load_agent
from adcrl.utils.config import load_config_file

SMALL_RUN = """
[run]
env_id = pendulum
total_steps = 200
eval_interval = 100
eval_episodes = 1
progress = false

[agent]
actor_hidden = 8,8
critic_hidden = 8,8
director_hidden = 8,8
batch_size = 8
warmup_steps = 50
"""


@pytest.fixture
def config_file(tmp_path):
    path = tmp_path / "small.ini"
    path.write_text(SMALL_RUN)
    return path


@pytest.fixture
def trained(tmp_path, config_file, capsys):
    out = tmp_path / "trained"
    assert parse_and_dispatch(["train", "--config", str(config_file), "--output-dir", str(out)]) == 0
    return out


def test_exactly_one_command_required():
    with pytest.raises(SystemExit) as info:
        build_parser().parse_args([])
    assert info.value.code == 2


def test_train_writes_outputs(trained, capsys):
    assert (trained / "metrics.csv").is_file()
    assert (trained / "checkpoint.txt").is_file()
    assert "final smoothed return" in capsys.readouterr().out


def test_flags_override_file_values(tmp_path, config_file):
    out = tmp_path / "override"
    code = parse_and_dispatch(["train", "--config", str(config_file), "--env", "pointmass", "--seed", "4",
                               "--no-adcf", "--cutoff", "-0.5", "--output-dir", str(out)])
    assert code == 0
    echoed = load_config_file(out / "effective_config.ini")
    assert echoed["run"]["env_id"] == "pointmass"
    assert echoed["run"]["seed"] == "4"
    assert echoed["agent"]["adcf_enabled"] == "false"
    assert echoed["agent"]["cutoff"] == "-0.5"
    assert echoed["agent"]["batch_size"] == "8"


def test_seed_falls_back_to_environment(monkeypatch, config_file):
    monkeypatch.setenv("ADC_SEED", "7")
    args = build_parser().parse_args(["train", "--config", str(config_file)])
    assert build_run_config(args).seed == 7
    args = build_parser().parse_args(["train", "--config", str(config_file), "--seed", "2"])
    assert build_run_config(args).seed == 2


def test_bad_fallback_seed_is_a_config_error(monkeypatch, config_file, capsys):
    monkeypatch.setenv("ADC_SEED", "seven")
    assert parse_and_dispatch(["train", "--config", str(config_file)]) == 2
    assert "ADC_SEED" in capsys.readouterr().err


def test_unknown_key_is_named(tmp_path, capsys):
    path = tmp_path / "bad.ini"
    path.write_text("[agent]\nlearning_speed = 3\n")
    assert parse_and_dispatch(["train", "--config", str(path)]) == 2
    assert "agent.learning_speed" in capsys.readouterr().err


def test_out_of_range_value_is_named(tmp_path, capsys):
    path = tmp_path / "bad.ini"
    path.write_text("[agent]\ngamma_q = 2\n")
    assert parse_and_dispatch(["train", "--config", str(path)]) == 2
    assert "agent.gamma_q" in capsys.readouterr().err


def test_unknown_section_is_named(tmp_path, capsys):
    path = tmp_path / "bad.ini"
    path.write_text("[critic]\nlr = 1\n")
    assert parse_and_dispatch(["train", "--config", str(path)]) == 2
    assert "[critic]" in capsys.readouterr().err


def test_missing_config_file(tmp_path, capsys):
    assert parse_and_dispatch(["train", "--config", str(tmp_path / "absent.ini")]) == 2
    assert "not found" in capsys.readouterr().err


def test_eval_matches_in_process_evaluation(trained, capsys):
    capsys.readouterr()
    checkpoint = trained / "checkpoint.txt"
    assert parse_and_dispatch(["eval", "--checkpoint", str(checkpoint), "--episodes", "2", "--seed", "3"]) == 0
    printed = float(capsys.readouterr().out.strip())
    agent, env_id = load_agent(checkpoint)
    assert printed == evaluate(agent, make_env(env_id), 2, 3)
    assert eval_command(str(checkpoint), "pendulum", 2, 3) == printed


def test_eval_missing_checkpoint_prints_nothing(tmp_path, capsys):
    assert parse_and_dispatch(["eval", "--checkpoint", str(tmp_path / "none.txt")]) == 1
    captured = capsys.readouterr()
    assert captured.out == ""
    assert "cannot read" in captured.err


def test_eval_corrupt_bounds_is_a_diagnostic(trained, capsys):
    capsys.readouterr()
    checkpoint = trained / "checkpoint.txt"
    lines = checkpoint.read_text().splitlines()
    lines[3] = "LOW abc"
    checkpoint.write_text("\n".join(lines) + "\n")
    assert parse_and_dispatch(["eval", "--checkpoint", str(checkpoint)]) == 1
    captured = capsys.readouterr()
    assert captured.out == ""
    assert captured.err.startswith("error: ") and "bad action bounds" in captured.err


def test_eval_rejects_incompatible_environment(trained, capsys, monkeypatch):
    capsys.readouterr()

    def no_rollouts(*args, **kwargs):
        raise AssertionError("evaluation must not start")

    monkeypatch.setattr("adcrl.cli.evaluate", no_rollouts)
    code = parse_and_dispatch(["eval", "--checkpoint", str(trained / "checkpoint.txt"), "--env", "pointmass"])
    assert code == 1
    captured = capsys.readouterr()
    assert captured.out == ""
    assert "expected obs_dim=4 action_dim=2, found obs_dim=3 action_dim=1" in captured.err


def test_grad_check_passes(capsys):
    assert parse_and_dispatch(["grad-check"]) == 0
    assert "max relative error" in capsys.readouterr().out


def test_ablate_writes_summary(tmp_path, config_file, capsys):
    out = tmp_path / "ablation"
    code = parse_and_dispatch(["ablate", "--config", str(config_file), "--env", "pointmass", "--seeds", "1",
                               "--output-dir", str(out)])
    assert code == 0
    assert (out / "summary.csv").is_file()
    assert (out / "ablation_report.csv").is_file()
    for slug in ("td3", "td3_adcf", "td3_idem", "ctd3"):
        assert (out / slug / "seed_1" / "metrics.csv").is_file()


def test_ablate_rejects_bad_seed_list(config_file, capsys):
    assert parse_and_dispatch(["ablate", "--config", str(config_file), "--seeds", "a,b"]) == 2
    assert "--seeds" in capsys.readouterr().err

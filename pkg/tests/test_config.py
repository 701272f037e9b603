import logging

import pytest
from pydantic import ValidationError

from adcrl.models import AgentConfig, RunConfig
from adcrl.models.metrics import METRICS_HEADER, MetricsRow
from adcrl.utils.config import Config, format_config_value, load_config_file, write_config_file
from adcrl.utils.errors import ConfigError
from adcrl.utils.logger import RUN_LOG_FILE, run_log, setup_logger


def test_fallback_seed_reads_environment(monkeypatch):
    monkeypatch.setenv("ADC_SEED", "12")
    assert Config.fallback_seed() == 12
    monkeypatch.setenv("ADC_SEED", "twelve")
    with pytest.raises(ConfigError) as info:
        Config.fallback_seed()
    assert info.value.key == "ADC_SEED"


def test_fallback_seed_absent(monkeypatch):
    monkeypatch.delenv("ADC_SEED", raising=False)
    monkeypatch.setattr(Config, "SEED", None)
    assert Config.fallback_seed() is None


@pytest.mark.parametrize("value, text", [
    (True, "true"),
    (False, "false"),
    (0.1, "0.1"),
    (1e-08, "1e-08"),
    ([256, 256], "256,256"),
    (None, "none"),
    ("pendulum", "pendulum"),
    (7, "7"),
])
def test_format_config_value(value, text):
    assert format_config_value(value) == text


def test_config_file_round_trip(tmp_path):
    path = write_config_file(tmp_path / "c.ini", {
        "agent": {"tau": 0.01, "actor_hidden": [32, 16], "cutoff": None},
        "run": {"env_id": "pointmass", "seed": 3},
    })
    sections = load_config_file(path)
    assert sections == {
        "agent": {"tau": "0.01", "actor_hidden": "32,16", "cutoff": "none"},
        "run": {"env_id": "pointmass", "seed": "3"},
    }
    config = RunConfig(**sections["run"], agent=sections["agent"])
    assert config.agent.actor_hidden == [32, 16]
    assert config.agent.cutoff is None
    assert config.agent.tau == 0.01


def test_missing_sections_default_to_empty(tmp_path):
    path = tmp_path / "c.ini"
    path.write_text("[run]\nseed = 1\n")
    assert load_config_file(path) == {"agent": {}, "run": {"seed": "1"}}


def test_key_case_is_preserved(tmp_path):
    path = tmp_path / "c.ini"
    path.write_text("[agent]\nGamma_Q = 0.9\n")
    with pytest.raises(ValidationError):
        AgentConfig(**load_config_file(path)["agent"])


def test_agent_config_ranges():
    with pytest.raises(ValidationError):
        AgentConfig(tau=0.0)
    with pytest.raises(ValidationError):
        AgentConfig(policy_delay=0)
    with pytest.raises(ValidationError):
        AgentConfig(actor_hidden=[16, 0])
    with pytest.raises(ValidationError):
        AgentConfig(target_schedule="sometimes")


def test_assignment_is_validated():
    config = AgentConfig()
    with pytest.raises(ValidationError):
        config.gamma_q = 1.5


@pytest.mark.parametrize("adcf, idem, name", [
    (False, False, "TD3"),
    (True, False, "TD3+ADCF"),
    (False, True, "TD3+IDEM"),
    (True, True, "CTD3"),
])
def test_variant_names(adcf, idem, name):
    assert AgentConfig(adcf_enabled=adcf, idem_enabled=idem).variant == name


def test_run_config_sections_are_file_ready():
    sections = RunConfig(total_steps=2000).sections()
    assert set(sections) == {"agent", "run"}
    assert "agent" not in sections["run"]
    assert isinstance(sections["run"]["output_dir"], str)


def test_logger_writes_to_log_file(tmp_path, monkeypatch):
    log_file = tmp_path / "logs" / "run.log"
    monkeypatch.setenv("LOG_FILE", str(log_file))
    log = setup_logger("adcrl_test_file_handler", "DEBUG")
    log.debug("checkpoint written")
    for handler in log.handlers:
        handler.flush()
    assert "DEBUG - checkpoint written" in log_file.read_text()
    for handler in list(log.handlers):
        handler.close()
        log.removeHandler(handler)


def test_logger_does_not_duplicate_handlers(monkeypatch):
    monkeypatch.delenv("LOG_FILE", raising=False)
    first = setup_logger("adcrl_test_dupes", "INFO")
    count = len(first.handlers)
    assert setup_logger("adcrl_test_dupes", "INFO").handlers == first.handlers
    assert count == 1
    assert first.level == logging.INFO
    first.handlers.clear()


def test_metrics_row_values_follow_header():
    row = MetricsRow(step=100, return_raw=-3.5, return_smooth=-4.0, buf_main=100)
    values = row.csv_values()
    assert len(values) == len(METRICS_HEADER)
    assert values[0] == 100
    assert values[METRICS_HEADER.index("loss_q1")] is None
    assert values[METRICS_HEADER.index("buf_main")] == 100


def test_run_log_captures_records_only_inside_the_block(tmp_path):
    package = logging.getLogger("adcrl")
    level_before = package.level
    child = logging.getLogger("adcrl.harness.example")
    child.info("before the run")
    with run_log(tmp_path / "run") as path:
        child.info("inside the run")
        child.debug("too detailed")
    child.info("after the run")

    assert path == tmp_path / "run" / RUN_LOG_FILE
    text = path.read_text()
    assert "INFO - inside the run" in text
    assert "before the run" not in text
    assert "after the run" not in text
    assert "too detailed" not in text
    assert package.level == level_before
    assert not any(getattr(h, "baseFilename", None) == str(path) for h in package.handlers)

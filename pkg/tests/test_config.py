from pathlib import Path

import pytest
from pydantic import ValidationError

from report_fault_injector.config import ExperimentConfig, InjectionConfig, StepBudget


def test_defaults():
    config = ExperimentConfig()
    assert config.budgets == [5, 10, 30, 100]
    assert config.n_suite_samples == 50
    assert config.sample_band == (0.10, 0.30)
    assert config.scope_mode == "project"
    assert config.exact_threshold == 12
    assert InjectionConfig().n_faults == 100
    assert StepBudget().max_steps == 1_000_000


def test_later_sources_win(tmp_path):
    cfg = tmp_path / "experiment.cfg"
    cfg.write_text("# settings\nBUDGETS=1,2\nSEED=3\nN_SUITE_SAMPLES=7\n", encoding="utf-8")
    config = ExperimentConfig.resolve(cfg, environ={})
    assert (config.budgets, config.seed, config.n_suite_samples) == ([1, 2], 3, 7)

    config = ExperimentConfig.resolve(cfg, environ={"FAULTINJ_SEED": "5", "OTHER_SEED": "8"})
    assert config.seed == 5

    config = ExperimentConfig.resolve(cfg, {"seed": 9, "jobs": None}, environ={"FAULTINJ_SEED": "5"})
    assert config.seed == 9
    assert config.jobs == 1


def test_env_ignores_unknown_keys():
    assert ExperimentConfig.from_env({"FAULTINJ_NOPE": "1", "FAULTINJ_JOBS": "4"}) == {"jobs": "4"}


def test_band_from_text():
    config = ExperimentConfig.resolve(environ={"FAULTINJ_SAMPLE_BAND": "0.2, 0.4"})
    assert config.sample_band == (0.2, 0.4)


@pytest.mark.parametrize(
    "field, value",
    [
        ("budgets", "10,5"),
        ("budgets", "5,5"),
        ("budgets", ""),
        ("sample_band", "0.5,0.2"),
        ("sample_band", "0,0.3"),
        ("scope_mode", "module"),
        ("seed", "-1"),
        ("n_suite_samples", "0"),
    ],
)
def test_invalid_values(field, value):
    with pytest.raises(ValidationError):
        ExperimentConfig.resolve(environ={f"FAULTINJ_{field.upper()}": value})


def test_missing_config_file(tmp_path):
    with pytest.raises(FileNotFoundError):
        ExperimentConfig.resolve(tmp_path / "absent.cfg", environ={})


def test_injection_view():
    config = ExperimentConfig(seed=4, top_files=3, top_statements=9, jobs=2, patterns_file=Path("p.json"))
    injection = config.injection(7, frozenset({"src/a.mj"}))
    assert injection == InjectionConfig(
        n_faults=7, top_files=3, top_statements=9, scope=frozenset({"src/a.mj"}), seed=4, jobs=2,
        patterns_file=Path("p.json"),
    )
    assert config.budget() == StepBudget(max_steps=config.step_budget)

"""Configuration models for injection runs and experiments."""

import os
from pathlib import Path
from typing import Any, Literal, Mapping, Optional

from dotenv import dotenv_values
from pydantic import BaseModel, ConfigDict, Field, PositiveInt, field_validator

ENV_PREFIX = "FAULTINJ_"


class StepBudget(BaseModel):
    """Interpreter step budget replacing a wall-clock timeout."""

    model_config = ConfigDict(frozen=True)

    max_steps: PositiveInt = Field(1_000_000, description="Interpreter steps before a test times out")


class InjectionConfig(BaseModel):
    """
    Parameters of one injection run.

    ``scope`` is an optional allow-list of source file paths, relative to the
    corpus root. When set, only statements in those files are mutated.
    """

    model_config = ConfigDict(frozen=True)

    n_faults: PositiveInt = Field(100, description="Number of viable mutants requested")
    top_files: PositiveInt = Field(20, description="Files kept from file-level localization")
    top_statements: PositiveInt = Field(50, description="Statements kept from statement-level localization")
    scope: Optional[frozenset[str]] = Field(None, description="Allow-list of source files")
    seed: int = Field(0, ge=0, lt=2**64, description="Seed for every random stream")
    jobs: PositiveInt = Field(1, description="Worker threads for candidate checking")
    patterns_file: Optional[Path] = Field(None, description="Alternative pattern priority file")


def _split_list(value: Any) -> Any:
    if isinstance(value, str):
        return [item.strip() for item in value.split(",") if item.strip()]
    return value


class ExperimentConfig(BaseModel):
    """
    Configuration of a full experiment run.

    Values are merged from defaults, an optional key-value file, ``FAULTINJ_*``
    environment variables and explicit command-line flags, later sources
    winning.
    """

    corpus_root: Path = Field(Path("corpora/seeded"), description="Corpus root or collection of corpora")
    budgets: list[PositiveInt] = Field(default_factory=lambda: [5, 10, 30, 100], description="Fault budgets")
    n_suite_samples: PositiveInt = Field(50, description="Sampled test suites per target")
    sample_band: tuple[float, float] = Field((0.10, 0.30), description="Suite size band as fractions of all tests")
    seed: int = Field(0, ge=0, lt=2**64, description="Root seed")
    scope_mode: Literal["project", "target_file"] = Field("project", description="Mutation scope")
    top_files: PositiveInt = Field(20, description="Files kept from file-level localization")
    top_statements: PositiveInt = Field(50, description="Statements kept from statement-level localization")
    step_budget: PositiveInt = Field(1_000_000, description="Interpreter steps per test")
    exact_threshold: PositiveInt = Field(12, description="Largest combined sample size tested exactly")
    jobs: PositiveInt = Field(1, description="Worker threads")
    patterns_file: Optional[Path] = Field(None, description="Alternative pattern priority file")

    @field_validator("budgets", "sample_band", mode="before")
    @classmethod
    def _parse_lists(cls, value: Any) -> Any:
        return _split_list(value)

    @field_validator("budgets")
    @classmethod
    def _increasing(cls, value: list[int]) -> list[int]:
        if not value:
            raise ValueError("at least one budget is required")
        if any(b <= a for a, b in zip(value, value[1:])):
            raise ValueError("budgets must be strictly increasing")
        return value

    @field_validator("sample_band")
    @classmethod
    def _band(cls, value: tuple[float, float]) -> tuple[float, float]:
        lo, hi = value
        if not 0 < lo <= hi < 1:
            raise ValueError("sample band must satisfy 0 < lo <= hi < 1")
        return value

    @classmethod
    def from_file(cls, path: Path) -> dict[str, str]:
        """Read a key-value config file into raw, lower-cased field values."""
        if not Path(path).is_file():
            raise FileNotFoundError(f"config file not found: {path}")
        values = dotenv_values(path)
        return {key.lower(): value for key, value in values.items() if value is not None}

    @classmethod
    def from_env(cls, environ: Optional[Mapping[str, str]] = None) -> dict[str, str]:
        """Collect ``FAULTINJ_*`` variables into raw field values."""
        environ = os.environ if environ is None else environ
        fields = set(cls.model_fields)
        out: dict[str, str] = {}
        for key, value in environ.items():
            if not key.startswith(ENV_PREFIX):
                continue
            name = key[len(ENV_PREFIX):].lower()
            if name in fields:
                out[name] = value
        return out

    @classmethod
    def resolve(
        cls,
        config_file: Optional[Path] = None,
        overrides: Optional[Mapping[str, Any]] = None,
        environ: Optional[Mapping[str, str]] = None,
    ) -> "ExperimentConfig":
        data: dict[str, Any] = {}
        if config_file is not None:
            data.update(cls.from_file(config_file))
        data.update(cls.from_env(environ))
        data.update({k: v for k, v in (overrides or {}).items() if v is not None})
        return cls.model_validate(data)

    def injection(self, n_faults: int, scope: Optional[frozenset[str]] = None) -> InjectionConfig:
        return InjectionConfig(
            n_faults=n_faults,
            top_files=self.top_files,
            top_statements=self.top_statements,
            scope=scope,
            seed=self.seed,
            jobs=self.jobs,
            patterns_file=self.patterns_file,
        )

    def budget(self) -> StepBudget:
        return StepBudget(max_steps=self.step_budget)

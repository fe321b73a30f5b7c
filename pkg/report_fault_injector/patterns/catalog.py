"""Pattern catalog: priorities, categories and enablement loaded from TOML."""

import logging
import tomllib
from enum import Enum
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Optional

from pydantic import BaseModel, ConfigDict, Field, PositiveInt, ValidationError

from ..errors import FaultInjectorError
from .recipes import RECIPES, Pattern

logger = logging.getLogger(__name__)


class Category(str, Enum):
    INSERT_STATEMENT = "insert_statement"
    MUTATE_CONDITIONAL_EXPRESSION = "mutate_conditional_expression"
    MUTATE_DATA_TYPE = "mutate_data_type"
    MUTATE_FLOAT_DIVISION = "mutate_float_division"
    MUTATE_LITERAL_EXPRESSION = "mutate_literal_expression"
    MUTATE_METHOD_INVOCATION = "mutate_method_invocation"
    MUTATE_RETURN_STATEMENT = "mutate_return_statement"
    MUTATE_VARIABLE = "mutate_variable"
    MOVE_STATEMENT = "move_statement"
    REMOVE_STATEMENT = "remove_statement"
    MUTATE_OPERATORS = "mutate_operators"


class PatternSpec(BaseModel):
    model_config = ConfigDict(frozen=True)

    pattern_id: str
    category: Category
    priority: PositiveInt
    enabled: bool = Field(True, description="Disabled rows never match")
    baseline: bool = Field(False, description="Row belongs to the classical-mutation baseline")


class Catalog:
    """Loaded pattern catalog with one :class:`Pattern` instance per row."""

    def __init__(self, specs: dict[str, PatternSpec], families: dict[str, list[str]]):
        unknown = sorted(set(specs) - set(RECIPES))
        if unknown:
            raise FaultInjectorError(f"pattern catalog names unknown patterns: {', '.join(unknown)}")
        self.specs = specs
        self.families = families
        self._patterns = {pid: RECIPES[pid](pid, spec.priority, families) for pid, spec in specs.items()}

    @classmethod
    def load(cls, path: Optional[Path] = None) -> "Catalog":
        if path is None:
            text = resources.files("report_fault_injector").joinpath("data/patterns.toml").read_text(encoding="utf-8")
        else:
            text = Path(path).read_text(encoding="utf-8")
        try:
            data = tomllib.loads(text)
            specs = {
                pid: PatternSpec(pattern_id=pid, **row) for pid, row in data.get("patterns", {}).items()
            }
        except (tomllib.TOMLDecodeError, ValidationError, TypeError) as e:
            raise FaultInjectorError(f"invalid pattern catalog {path or 'patterns.toml'}: {e}") from e
        families = {name: list(ops) for name, ops in data.get("families", {}).items()}
        return cls(specs, families)

    def get(self, pattern_id: str) -> Pattern:
        try:
            return self._patterns[pattern_id]
        except KeyError:
            raise FaultInjectorError(f"unknown pattern {pattern_id!r}") from None

    def patterns(self, baseline: bool = False) -> list[Pattern]:
        """Enabled patterns in priority order; only baseline rows when ``baseline``."""
        chosen = [
            self._patterns[pid]
            for pid, spec in self.specs.items()
            if spec.enabled and (spec.baseline or not baseline)
        ]
        return sorted(chosen, key=lambda p: (p.priority, p.pattern_id))


@lru_cache(maxsize=None)
def default_catalog() -> Catalog:
    return Catalog.load()

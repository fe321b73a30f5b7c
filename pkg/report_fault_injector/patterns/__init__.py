"""Fault patterns: inverted fix patterns matched against localized statements."""

from .catalog import Catalog, Category, PatternSpec, default_catalog
from .matching import PatternApplication, apply_pattern, match_patterns, mutate_source
from .recipes import RECIPES, Donor, Edit, Pattern
from .scope import ProgramContext, StatementSite

__all__ = [
    "RECIPES",
    "Catalog",
    "Category",
    "Donor",
    "Edit",
    "Pattern",
    "PatternApplication",
    "PatternSpec",
    "ProgramContext",
    "StatementSite",
    "apply_pattern",
    "default_catalog",
    "match_patterns",
    "mutate_source",
]

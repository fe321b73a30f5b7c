"""The MiniJ language: parser, type checker, interpreter and test runner."""

from .nodes import SourceUnit, Span, statement_paths
from .parser import parse, parse_expression, parse_statement
from .runner import Outcome, TestVerdict, run_tests, test_names
from .typecheck import TypeTable, check_program, typecheck
from .unparse import unparse

__all__ = [
    "Outcome",
    "SourceUnit",
    "Span",
    "TestVerdict",
    "TypeTable",
    "check_program",
    "parse",
    "parse_expression",
    "parse_statement",
    "run_tests",
    "statement_paths",
    "test_names",
    "typecheck",
    "unparse",
]

"""Test runner: executes ``test_*`` functions and classifies the outcome."""

import logging
from enum import Enum
from typing import Iterable, Optional, Sequence

from pydantic import BaseModel, ConfigDict

from ..config import StepBudget
from ..errors import ExecutionError, UnknownTest
from .interpreter import AssertionFailed, BudgetExhausted, FatalError, Interpreter, MiniJThrow
from .nodes import SourceUnit

logger = logging.getLogger(__name__)


class Outcome(str, Enum):
    PASS = "pass"
    FAIL_ASSERT = "fail_assert"
    FAIL_ERROR = "fail_error"
    FAIL_TIMEOUT = "fail_timeout"


class TestVerdict(BaseModel):
    """Outcome of one test function; ``detail`` is informational only."""

    __test__ = False
    model_config = ConfigDict(frozen=True)

    test_name: str
    outcome: Outcome
    detail: str = ""

    @property
    def passed(self) -> bool:
        return self.outcome is Outcome.PASS


def test_names(units: Iterable[SourceUnit]) -> list[str]:
    """Names of the zero-argument ``test_*`` functions, in declaration order."""
    return [
        f.name
        for unit in units
        for f in unit.functions()
        if f.name.startswith("test_") and not f.params
    ]


test_names.__test__ = False


def run_tests(
    program: Sequence[SourceUnit],
    tests: Optional[Sequence[str]] = None,
    budget: Optional[StepBudget] = None,
) -> list[TestVerdict]:
    """
    Run the selected tests of a type-checked program.

    Every test starts from freshly initialized globals. Verdicts come back in
    the order of ``tests`` (all tests in declaration order when omitted).

    Raises:
        UnknownTest: a selected name is not a test function of the program
        ExecutionError: the interpreter itself failed
    """
    budget = budget or StepBudget()
    available = test_names(program)
    selected = list(available if tests is None else tests)
    missing = [name for name in selected if name not in available]
    if missing:
        raise UnknownTest(f"unknown test(s): {', '.join(missing)}")

    interpreter = Interpreter(program, budget.max_steps)
    return [_run_one(interpreter, name) for name in selected]


def _run_one(interpreter: Interpreter, name: str) -> TestVerdict:
    try:
        interpreter.reset()
        interpreter.call(name, [])
    except AssertionFailed as e:
        return TestVerdict(test_name=name, outcome=Outcome.FAIL_ASSERT, detail=str(e))
    except MiniJThrow as e:
        return TestVerdict(test_name=name, outcome=Outcome.FAIL_ERROR, detail=f"uncaught exception: {e.payload}")
    except FatalError as e:
        return TestVerdict(test_name=name, outcome=Outcome.FAIL_ERROR, detail=str(e))
    except RecursionError:
        return TestVerdict(test_name=name, outcome=Outcome.FAIL_ERROR, detail="stack overflow")
    except BudgetExhausted:
        return TestVerdict(test_name=name, outcome=Outcome.FAIL_TIMEOUT, detail="step budget exhausted")
    except Exception as e:
        logger.error(f"Interpreter failure in {name}: {e}", exc_info=True)
        raise ExecutionError(f"interpreter failure in {name}: {e}") from e
    return TestVerdict(test_name=name, outcome=Outcome.PASS)

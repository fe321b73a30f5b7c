import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import CALC, CALC_TESTS, TEXT, TEXT_TESTS
from report_fault_injector.config import StepBudget
from report_fault_injector.errors import UnknownTest
from report_fault_injector.minij import Outcome, parse, run_tests, test_names
from report_fault_injector.minij.interpreter import (
    MAX_CALL_DEPTH,
    FatalError,
    Interpreter,
    MiniJThrow,
    float_to_int,
    to_text,
    wrap32,
)

INT32 = st.integers(-(2**31), 2**31 - 1)


def call(text: str, name: str, *args, max_steps: int = 100_000):
    interpreter = Interpreter([parse(text)], max_steps)
    interpreter.reset()
    return interpreter.call(name, list(args))


def outcomes(text: str, budget: int = 10_000) -> dict[str, Outcome]:
    verdicts = run_tests([parse(text)], budget=StepBudget(max_steps=budget))
    return {v.test_name: v.outcome for v in verdicts}


def test_calc_program_passes():
    program = [parse(t) for t in (CALC, TEXT, CALC_TESTS, TEXT_TESTS)]
    verdicts = run_tests(program)
    assert [v.test_name for v in verdicts] == test_names(program)
    assert all(v.passed for v in verdicts)


def test_selected_tests_keep_requested_order():
    program = [parse(CALC), parse(CALC_TESTS)]
    verdicts = run_tests(program, tests=["test_half", "test_add"])
    assert [v.test_name for v in verdicts] == ["test_half", "test_add"]


def test_unknown_test_rejected():
    with pytest.raises(UnknownTest, match="test_missing"):
        run_tests([parse(CALC_TESTS)], tests=["test_missing"])


def test_helpers_with_arguments_are_not_tests():
    unit = parse("void test_helper(int a) {\n}\n\nvoid test_real() {\n}\n")
    assert test_names([unit]) == ["test_real"]


def test_outcome_classification():
    text = """\
void test_ok() {
    assert(1 + 1 == 2);
}

void test_assert() {
    assert(1 + 1 == 3);
}

void test_divide() {
    int zero = 0;
    print(1 / zero);
}

void test_loop() {
    while (true) {
    }
}

void test_uncaught() {
    throw "boom";
}

int deep(int n) {
    return deep(n + 1);
}

void test_overflow() {
    deep(0);
}
"""
    assert outcomes(text) == {
        "test_ok": Outcome.PASS,
        "test_assert": Outcome.FAIL_ASSERT,
        "test_divide": Outcome.FAIL_ERROR,
        "test_loop": Outcome.FAIL_TIMEOUT,
        "test_uncaught": Outcome.FAIL_ERROR,
        "test_overflow": Outcome.FAIL_ERROR,
    }


def test_failure_details():
    text = "void test_a() {\n    assert(false);\n}\n\nvoid test_b() {\n    int[] xs = new int[2];\n    xs[2] = 1;\n}\n"
    verdicts = run_tests([parse(text)])
    assert verdicts[0].detail == "assertion failed at line 2"
    assert verdicts[1].detail == "uncaught exception: index 2 out of bounds for length 2"


def test_globals_reset_between_tests():
    text = """\
int counter = 0;

void test_first() {
    counter += 1;
    assert(counter == 1);
}

void test_second() {
    counter += 1;
    assert(counter == 1);
}
"""
    assert set(outcomes(text).values()) == {Outcome.PASS}


def test_stack_overflow_is_not_catchable():
    text = "int deep(int n) {\n    return deep(n + 1);\n}\n"
    with pytest.raises(FatalError, match="stack overflow"):
        call(text, "deep", 0)
    assert MAX_CALL_DEPTH == 48


def test_try_catch_binds_message():
    text = """\
string safe(int a, int b) {
    try {
        return "" + a / b;
    } catch (e) {
        return e;
    }
}
"""
    assert call(text, "safe", 7, 2) == "3"
    assert call(text, "safe", 1, 0) == "/ by zero"


def test_throw_escapes_without_handler():
    with pytest.raises(MiniJThrow) as info:
        call('void f() {\n    throw "bad";\n}\n', "f")
    assert info.value.payload == "bad"


def test_integer_semantics():
    text = "int div(int a, int b) {\n    return a / b;\n}\n\nint mod(int a, int b) {\n    return a % b;\n}\n"
    assert call(text, "div", -7, 2) == -3
    assert call(text, "mod", -7, 2) == -1
    assert call(text, "div", -(2**31), -1) == -(2**31)
    assert call("int f(int a) {\n    return a * a;\n}\n", "f", 65536) == 0
    assert call("int f(int a) {\n    return a << 33;\n}\n", "f", 1) == 2


def test_float_semantics():
    text = "float div(float a, float b) {\n    return a / b;\n}\n"
    assert call(text, "div", 1.0, 0.0) == math.inf
    assert call(text, "div", -1.0, 0.0) == -math.inf
    assert math.isnan(call(text, "div", 0.0, 0.0))
    assert call("float f(int a) {\n    return a;\n}\n", "f", 3) == 3.0
    assert isinstance(call("float f(int a) {\n    return a;\n}\n", "f", 3), float)


def test_string_concatenation():
    text = 'string f(float x, bool b) {\n    string s = "v=";\n    s += x;\n    return s + " " + b;\n}\n'
    assert call(text, "f", 6.0, True) == "v=6.0 true"


def test_arrays_and_len():
    text = """\
int sum(int[] xs) {
    int total = 0;
    int i = 0;
    while (i < len(xs)) {
        total += xs[i];
        i++;
    }
    return total;
}

int f() {
    int[] xs = [1, 2, 3];
    return sum(xs) + len("abcd");
}
"""
    assert call(text, "f") == 10


def test_increment_prefix_and_postfix():
    text = "int f() {\n    int i = 5;\n    int a = i++;\n    int b = ++i;\n    return a * 100 + b;\n}\n"
    assert call(text, "f") == 507


def test_compound_assignment_truncates_to_int():
    assert call("int f() {\n    int x = 7;\n    x *= 1.5;\n    return x;\n}\n", "f") == 10


def test_short_circuit():
    text = "bool f(int[] xs) {\n    return len(xs) > 0 && xs[0] == 1;\n}\n\nbool g() {\n    return f(new int[0]);\n}\n"
    assert call(text, "g") is False


def test_else_if_chain_runs():
    text = """\
string sign(int n) {
    if (n < 0) {
        return "neg";
    } else if (n == 0) {
        return "zero";
    } else {
        return "pos";
    }
}
"""
    assert [call(text, "sign", n) for n in (-4, 0, 9)] == ["neg", "zero", "pos"]


def test_float_to_int_conversion():
    assert float_to_int(-2.7) == -2
    assert float_to_int(math.nan) == 0
    assert float_to_int(1e20) == 2**31 - 1
    assert float_to_int(-1e20) == -(2**31)


def test_to_text():
    assert to_text(math.inf) == "Infinity"
    assert to_text(0.1) == "0.1"
    assert to_text(False) == "false"


@settings(max_examples=1500, deadline=None)
@given(INT32, INT32, st.sampled_from(["+", "-", "*"]))
def test_int_arithmetic_matches_int32(a, b, op):
    left = np.array([a], dtype=np.int32)
    right = np.array([b], dtype=np.int32)
    expected = {"+": left + right, "-": left - right, "*": left * right}[op]
    assert Interpreter.int_op(op, a, b) == int(expected[0])


@settings(max_examples=1500, deadline=None)
@given(INT32, INT32.filter(lambda b: b != 0))
def test_division_truncates_toward_zero(a, b):
    q = Interpreter.int_op("/", a, b)
    r = Interpreter.int_op("%", a, b)
    assert wrap32(q * b + r) == a
    assert abs(r) < abs(b)
    assert r == 0 or (r < 0) == (a < 0)

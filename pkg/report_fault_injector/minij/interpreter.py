"""Deterministic tree-walking interpreter for type-checked MiniJ programs.

Integers behave like 32-bit Java ``int``; floats are IEEE doubles. Division by
zero, bad array indices and ``throw`` raise catchable MiniJ exceptions; failed
assertions, stack overflow, memory exhaustion and the step budget are not
catchable.
"""

import math
from typing import Any, Optional, Sequence

from .nodes import (
    ArrayLit,
    Assign,
    Binary,
    Block,
    BoolLit,
    Call,
    Cast,
    Empty,
    Expr,
    ExprStmt,
    FloatLit,
    FuncDecl,
    If,
    Index,
    IntLit,
    Name,
    NewArray,
    Postfix,
    Return,
    SourceUnit,
    Stmt,
    StrLit,
    Throw,
    Try,
    Unary,
    VarDecl,
    While,
)
from .typecheck import BOOL, FLOAT, INT, STRING, Type

MAX_CALL_DEPTH = 48
MAX_ARRAY_LENGTH = 1_000_000
MAX_STRING_LENGTH = 1_000_000


class MiniJThrow(Exception):
    """A catchable MiniJ exception carrying a string payload."""

    def __init__(self, payload: str):
        super().__init__(payload)
        self.payload = payload


class AssertionFailed(Exception):
    pass


class FatalError(Exception):
    """Uncatchable runtime failure (stack overflow, memory exhaustion)."""


class BudgetExhausted(Exception):
    pass


class _Return(Exception):
    def __init__(self, value: Any):
        self.value = value


class ArrayValue:
    __slots__ = ("elem", "items")

    def __init__(self, elem: Type, items: list):
        self.elem = elem
        self.items = items


def wrap32(value: int) -> int:
    return ((value + 2**31) % 2**32) - 2**31


def float_to_int(value: float) -> int:
    """Java ``(int)`` conversion of a double."""
    if math.isnan(value):
        return 0
    if value >= 2**31 - 1:
        return 2**31 - 1
    if value <= -(2**31):
        return -(2**31)
    return int(value)


def zero_of(t: Type) -> Any:
    if t.dims:
        return ArrayValue(t.element(), [])
    if t == INT:
        return 0
    if t == FLOAT:
        return 0.0
    if t == BOOL:
        return False
    if t == STRING:
        return ""
    return None


def coerce(value: Any, t: Type) -> Any:
    if t == FLOAT and isinstance(value, int) and not isinstance(value, bool):
        return float(value)
    return value


def type_of_value(value: Any) -> Type:
    if isinstance(value, bool):
        return BOOL
    if isinstance(value, int):
        return INT
    if isinstance(value, float):
        return FLOAT
    if isinstance(value, str):
        return STRING
    return value.elem.array_of()


def to_text(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        if math.isnan(value):
            return "NaN"
        if math.isinf(value):
            return "Infinity" if value > 0 else "-Infinity"
        return repr(value)
    if isinstance(value, ArrayValue):
        return f"{value.elem}[{len(value.items)}]"
    return str(value)


class Interpreter:
    """Executes functions of one program; a fresh global state per test."""

    def __init__(self, units: Sequence[SourceUnit], max_steps: int):
        self.functions: dict[tuple[str, int], FuncDecl] = {}
        self.global_decls: list[VarDecl] = []
        for unit in units:
            for decl in unit.decls:
                if isinstance(decl, FuncDecl):
                    self.functions[(decl.name, len(decl.params))] = decl
                else:
                    self.global_decls.append(decl)
        self.max_steps = max_steps
        self.steps = 0
        self.depth = 0
        self.globals: dict[str, list] = {}
        self.scopes: list[dict[str, list]] = []
        self.output: list[str] = []

    def reset(self) -> None:
        self.steps = 0
        self.depth = 0
        self.output = []
        self.scopes = []
        self.globals = {}
        for decl in self.global_decls:
            t = Type.of(decl.type)
            value = zero_of(t) if decl.init is None else coerce(self.eval(decl.init), t)
            self.globals[decl.name] = [t, value]

    def tick(self) -> None:
        self.steps += 1
        if self.steps > self.max_steps:
            raise BudgetExhausted()

    def call(self, name: str, args: Sequence[Any]) -> Any:
        decl = self.functions[(name, len(args))]
        if self.depth >= MAX_CALL_DEPTH:
            raise FatalError("stack overflow")
        saved = self.scopes
        self.scopes = [{p.name: [Type.of(p.type), coerce(a, Type.of(p.type))] for p, a in zip(decl.params, args)}]
        self.depth += 1
        self.tick()
        try:
            self.exec_block(decl.body)
            return None
        except _Return as r:
            return coerce(r.value, Type.of(decl.ret))
        finally:
            self.depth -= 1
            self.scopes = saved

    # variables

    def cell(self, name: str) -> list:
        for scope in reversed(self.scopes):
            if name in scope:
                return scope[name]
        return self.globals[name]

    # statements

    def exec_block(self, block: Block, extra: Optional[dict[str, list]] = None) -> None:
        self.scopes.append(extra or {})
        try:
            for stmt in block.stmts:
                self.exec(stmt)
        finally:
            self.scopes.pop()

    def exec(self, node: Stmt) -> None:
        self.tick()
        if isinstance(node, ExprStmt):
            self.eval(node.expr)
        elif isinstance(node, VarDecl):
            t = Type.of(node.type)
            value = zero_of(t) if node.init is None else coerce(self.eval(node.init), t)
            self.scopes[-1][node.name] = [t, value]
        elif isinstance(node, If):
            if self.eval(node.cond):
                self.exec_block(node.then)
            elif isinstance(node.orelse, Block):
                self.exec_block(node.orelse)
            elif node.orelse is not None:
                self.exec(node.orelse)
        elif isinstance(node, While):
            while self.eval(node.cond):
                self.exec_block(node.body)
                self.tick()
        elif isinstance(node, Return):
            raise _Return(None if node.value is None else self.eval(node.value))
        elif isinstance(node, Throw):
            raise MiniJThrow(self.eval(node.value))
        elif isinstance(node, Try):
            depth = len(self.scopes)
            try:
                self.exec_block(node.body)
            except MiniJThrow as thrown:
                del self.scopes[depth:]
                self.exec_block(node.handler, {node.catch_name: [STRING, thrown.payload]})
        elif isinstance(node, Block):
            self.exec_block(node)
        elif isinstance(node, Empty):
            pass
        else:
            raise TypeError(f"cannot execute {type(node).__name__}")

    # expressions

    def eval(self, node: Expr) -> Any:
        if isinstance(node, (IntLit, FloatLit, BoolLit)):
            return wrap32(node.value) if isinstance(node, IntLit) else node.value
        if isinstance(node, StrLit):
            return node.value
        if isinstance(node, Name):
            return self.cell(node.id)[1]
        if isinstance(node, Binary):
            return self.binary(node)
        if isinstance(node, Unary):
            if node.op == "!":
                return not self.eval(node.operand)
            if node.op == "-":
                value = self.eval(node.operand)
                return -value if isinstance(value, float) else wrap32(-value)
            return self.increment(node.operand, 1 if node.op == "++" else -1, prefix=True)
        if isinstance(node, Postfix):
            return self.increment(node.operand, 1 if node.op == "++" else -1, prefix=False)
        if isinstance(node, Assign):
            return self.assign(node)
        if isinstance(node, Call):
            return self.invoke(node)
        if isinstance(node, Index):
            array = self.eval(node.target)
            return array.items[self.check_index(array, self.eval(node.index))]
        if isinstance(node, Cast):
            value = self.eval(node.operand)
            if node.type.name == "int":
                return float_to_int(value) if isinstance(value, float) else value
            if node.type.name == "float":
                return float(value)
            return value
        if isinstance(node, NewArray):
            size = self.eval(node.size)
            if size < 0:
                raise MiniJThrow(f"negative array size {size}")
            if size > MAX_ARRAY_LENGTH:
                raise FatalError("out of memory")
            elem = Type.of(node.type)
            return ArrayValue(elem, [zero_of(elem) for _ in range(size)])
        if isinstance(node, ArrayLit):
            values = [self.eval(e) for e in node.elements]
            elem = type_of_value(values[0])
            return ArrayValue(elem, [coerce(v, elem) for v in values])
        raise TypeError(f"cannot evaluate {type(node).__name__}")

    def check_index(self, array: ArrayValue, index: int) -> int:
        if index < 0 or index >= len(array.items):
            raise MiniJThrow(f"index {index} out of bounds for length {len(array.items)}")
        return index

    def invoke(self, node: Call) -> Any:
        args = [self.eval(a) for a in node.args]
        if node.func == "assert":
            if not args[0]:
                line = node.span.start_line if node.span else "?"
                raise AssertionFailed(f"assertion failed at line {line}")
            return None
        if node.func == "print":
            self.output.append(to_text(args[0]))
            return None
        if node.func == "len":
            value = args[0]
            return len(value) if isinstance(value, str) else len(value.items)
        return self.call(node.func, args)

    def binary(self, node: Binary) -> Any:
        op = node.op
        if op == "&&":
            return bool(self.eval(node.left)) and bool(self.eval(node.right))
        if op == "||":
            return bool(self.eval(node.left)) or bool(self.eval(node.right))
        return self.apply(op, self.eval(node.left), self.eval(node.right))

    def apply(self, op: str, a: Any, b: Any) -> Any:
        if op == "+" and (isinstance(a, str) or isinstance(b, str)):
            text = to_text(a) + to_text(b)
            if len(text) > MAX_STRING_LENGTH:
                raise FatalError("out of memory")
            return text
        if op in ("==", "!="):
            equal = a == b
            return equal if op == "==" else not equal
        if op == "<":
            return a < b
        if op == "<=":
            return a <= b
        if op == ">":
            return a > b
        if op == ">=":
            return a >= b
        if isinstance(a, bool):
            if op == "&":
                return a and b
            if op == "|":
                return a or b
            return a != b
        if op in ("<<", ">>"):
            shift = b & 31
            return wrap32(a << shift) if op == "<<" else a >> shift
        if isinstance(a, float) or isinstance(b, float):
            return self.float_op(op, float(a), float(b))
        return self.int_op(op, a, b)

    @staticmethod
    def int_op(op: str, a: int, b: int) -> int:
        if op == "+":
            return wrap32(a + b)
        if op == "-":
            return wrap32(a - b)
        if op == "*":
            return wrap32(a * b)
        if op in ("/", "%"):
            if b == 0:
                raise MiniJThrow("/ by zero")
            quotient = abs(a) // abs(b)
            if (a < 0) != (b < 0):
                quotient = -quotient
            if op == "/":
                return wrap32(quotient)
            return wrap32(a - b * quotient)
        if op == "&":
            return a & b
        if op == "|":
            return a | b
        if op == "^":
            return a ^ b
        raise TypeError(f"unknown int operator {op}")

    @staticmethod
    def float_op(op: str, a: float, b: float) -> float:
        if op == "+":
            return a + b
        if op == "-":
            return a - b
        if op == "*":
            return a * b
        if op == "/":
            if b == 0.0:
                if a == 0.0 or math.isnan(a):
                    return math.nan
                return math.copysign(math.inf, a) * math.copysign(1.0, b)
            return a / b
        if op == "%":
            if b == 0.0 or math.isinf(a) or math.isnan(a) or math.isnan(b):
                return math.nan
            return math.fmod(a, b)
        raise TypeError(f"unknown float operator {op}")

    # assignment targets

    def load_store(self, target: Expr):
        """Return (getter, setter, static type) for an assignable expression."""
        if isinstance(target, Name):
            cell = self.cell(target.id)

            def store(value: Any) -> None:
                cell[1] = coerce(value, cell[0])

            return (lambda: cell[1]), store, cell[0]
        array = self.eval(target.target)
        index = self.check_index(array, self.eval(target.index))

        def store_item(value: Any) -> None:
            array.items[index] = coerce(value, array.elem)

        return (lambda: array.items[index]), store_item, array.elem

    def assign(self, node: Assign) -> Any:
        load, store, t = self.load_store(node.target)
        value = self.eval(node.value)
        if node.op != "=":
            current = load()
            value = self.apply(node.op[0], current, value)
            if t == INT and isinstance(value, float):
                value = float_to_int(value)
        store(value)
        return load()

    def increment(self, target: Expr, delta: int, prefix: bool) -> Any:
        load, store, _ = self.load_store(target)
        old = load()
        store(old + delta if isinstance(old, float) else wrap32(old + delta))
        return load() if prefix else old

"""Static type checker for MiniJ programs.

This is the compile filter of the injection loop: a mutant that fails here is
stillborn. Types are recorded in a :class:`TypeTable` keyed by node identity,
so trees that share subtrees with the original never overwrite its entries.
"""

from dataclasses import dataclass, field
from typing import Optional, Sequence

from ..errors import MiniJTypeError
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
    Node,
    Postfix,
    Return,
    SourceUnit,
    Stmt,
    StrLit,
    Throw,
    Try,
    TypeRef,
    Unary,
    VarDecl,
    While,
)


@dataclass(frozen=True)
class Type:
    name: str
    dims: int = 0

    @classmethod
    def of(cls, ref: TypeRef) -> "Type":
        return cls(ref.name, ref.dims)

    @property
    def is_array(self) -> bool:
        return self.dims > 0

    @property
    def is_numeric(self) -> bool:
        return self.dims == 0 and self.name in ("int", "float")

    @property
    def is_scalar(self) -> bool:
        return self.dims == 0 and self.name != "void"

    def element(self) -> "Type":
        return Type(self.name, self.dims - 1)

    def array_of(self) -> "Type":
        return Type(self.name, self.dims + 1)

    def ref(self) -> TypeRef:
        return TypeRef(self.name, self.dims)

    def __str__(self) -> str:
        return self.name + "[]" * self.dims


INT = Type("int")
FLOAT = Type("float")
BOOL = Type("bool")
STRING = Type("string")
VOID = Type("void")

BUILTIN_NAMES = frozenset({"assert", "print", "len"})
ARITHMETIC = frozenset({"+", "-", "*", "/", "%"})
RELATIONAL = frozenset({"<", "<=", ">", ">="})
EQUALITY = frozenset({"==", "!="})
LOGICAL = frozenset({"&&", "||"})
BITWISE = frozenset({"&", "|", "^"})
SHIFT = frozenset({"<<", ">>"})


def assignable(src: Type, dst: Type) -> bool:
    return src == dst or (src == INT and dst == FLOAT)


def default_value(t: Type) -> Expr:
    """Literal expression holding the zero value of a scalar type."""
    if t == INT:
        return IntLit(0, "0")
    if t == FLOAT:
        return FloatLit(0.0, "0.0")
    if t == BOOL:
        return BoolLit(False)
    if t == STRING:
        return StrLit("")
    return NewArray(t.element().ref(), IntLit(0, "0"))


@dataclass(frozen=True)
class FunctionSig:
    name: str
    params: tuple[Type, ...]
    ret: Type
    path: str
    decl: FuncDecl = field(compare=False, repr=False)

    @property
    def arity(self) -> int:
        return len(self.params)

    @property
    def is_test(self) -> bool:
        return self.name.startswith("test_")


@dataclass
class TypeTable:
    """Resolved types of expressions and call targets of one checked program."""

    types: dict[int, Type] = field(default_factory=dict)
    calls: dict[int, FunctionSig] = field(default_factory=dict)
    functions: dict[tuple[str, int], FunctionSig] = field(default_factory=dict)
    global_types: dict[str, Type] = field(default_factory=dict)
    # keeps checked nodes alive so their ids stay unique
    _nodes: list[Node] = field(default_factory=list, repr=False)

    def record(self, node: Node, t: Type) -> Type:
        self.types[id(node)] = t
        self._nodes.append(node)
        return t

    def type_of(self, node: Node) -> Optional[Type]:
        return self.types.get(id(node))

    def signature(self, call: Call) -> Optional[FunctionSig]:
        return self.calls.get(id(call))

    def overloads(self, name: str) -> list[FunctionSig]:
        return sorted((s for (n, _), s in self.functions.items() if n == name), key=lambda s: s.arity)


def completes_normally(stmt: Stmt) -> bool:
    if isinstance(stmt, (Return, Throw)):
        return False
    if isinstance(stmt, Block):
        return all(completes_normally(s) for s in stmt.stmts)
    if isinstance(stmt, If):
        if stmt.orelse is None:
            return True
        return completes_normally(stmt.then) or completes_normally(stmt.orelse)
    if isinstance(stmt, While):
        return not (isinstance(stmt.cond, BoolLit) and stmt.cond.value)
    if isinstance(stmt, Try):
        return completes_normally(stmt.body) or completes_normally(stmt.handler)
    return True


class _Checker:
    def __init__(self, table: TypeTable):
        self.table = table
        self.scopes: list[dict[str, Type]] = []
        self.function: Optional[FunctionSig] = None
        self.path: str = ""

    def fail(self, message: str, node: Node) -> MiniJTypeError:
        prefix = f"{self.path}: " if self.path else ""
        return MiniJTypeError(prefix + message, node.span)

    # scopes

    def lookup(self, name: str, node: Node) -> Type:
        for scope in reversed(self.scopes):
            if name in scope:
                return scope[name]
        if name in self.table.global_types:
            return self.table.global_types[name]
        raise self.fail(f"undefined variable {name!r}", node)

    def declare(self, name: str, t: Type, node: Node) -> None:
        if any(name in scope for scope in self.scopes):
            raise self.fail(f"variable {name!r} is already defined", node)
        self.scopes[-1][name] = t

    # expressions

    def check_expr(self, node: Expr) -> Type:
        return self.table.record(node, self._expr(node))

    def _expr(self, node: Expr) -> Type:
        if isinstance(node, IntLit):
            return INT
        if isinstance(node, FloatLit):
            return FLOAT
        if isinstance(node, BoolLit):
            return BOOL
        if isinstance(node, StrLit):
            return STRING
        if isinstance(node, Name):
            return self.lookup(node.id, node)
        if isinstance(node, Binary):
            return self._binary(node)
        if isinstance(node, (Unary, Postfix)):
            t = self.check_expr(node.operand)
            if node.op == "!":
                if t != BOOL:
                    raise self.fail(f"operator ! needs bool, got {t}", node)
                return BOOL
            if not t.is_numeric:
                raise self.fail(f"operator {node.op} needs a number, got {t}", node)
            return t
        if isinstance(node, Assign):
            return self._assign(node)
        if isinstance(node, Call):
            return self._call(node)
        if isinstance(node, Index):
            target = self.check_expr(node.target)
            index = self.check_expr(node.index)
            if not target.is_array:
                raise self.fail(f"cannot index a value of type {target}", node)
            if index != INT:
                raise self.fail(f"array index must be int, got {index}", node)
            return target.element()
        if isinstance(node, Cast):
            operand = self.check_expr(node.operand)
            target = Type.of(node.type)
            if target.is_numeric and operand.is_numeric:
                return target
            if operand == target:
                return target
            raise self.fail(f"cannot cast {operand} to {target}", node)
        if isinstance(node, NewArray):
            size = self.check_expr(node.size)
            if size != INT:
                raise self.fail(f"array size must be int, got {size}", node)
            return Type.of(node.type).array_of()
        if isinstance(node, ArrayLit):
            types = [self.check_expr(e) for e in node.elements]
            first = types[0]
            if first == VOID:
                raise self.fail("array elements cannot be void", node)
            for t in types[1:]:
                if not assignable(t, first):
                    raise self.fail(f"array element of type {t} in {first}[] literal", node)
            return first.array_of()
        raise self.fail(f"unsupported expression {type(node).__name__}", node)

    def _binary(self, node: Binary) -> Type:
        lt = self.check_expr(node.left)
        rt = self.check_expr(node.right)
        op = node.op
        if op == "+" and (lt == STRING or rt == STRING):
            if lt.is_scalar and rt.is_scalar:
                return STRING
        elif op in ARITHMETIC:
            if lt.is_numeric and rt.is_numeric:
                return INT if lt == rt == INT else FLOAT
        elif op in RELATIONAL:
            if lt.is_numeric and rt.is_numeric:
                return BOOL
        elif op in EQUALITY:
            if (lt.is_numeric and rt.is_numeric) or (lt == rt and lt in (BOOL, STRING)):
                return BOOL
        elif op in LOGICAL:
            if lt == rt == BOOL:
                return BOOL
        elif op in BITWISE:
            if lt == rt and lt in (INT, BOOL):
                return lt
        elif op in SHIFT:
            if lt == rt == INT:
                return INT
        raise self.fail(f"operator {op} cannot be applied to {lt} and {rt}", node)

    def _assign(self, node: Assign) -> Type:
        if not isinstance(node.target, (Name, Index)):
            raise self.fail("invalid assignment target", node)
        tt = self.check_expr(node.target)
        vt = self.check_expr(node.value)
        if node.op == "=":
            if assignable(vt, tt):
                return tt
        elif node.op == "+=" and tt == STRING:
            if vt.is_scalar:
                return tt
        elif tt.is_numeric and vt.is_numeric:
            return tt
        raise self.fail(f"cannot apply {node.op} to {tt} and {vt}", node)

    def _call(self, node: Call) -> Type:
        args = [self.check_expr(a) for a in node.args]
        if node.func in BUILTIN_NAMES:
            if len(args) != 1:
                raise self.fail(f"{node.func} takes exactly one argument", node)
            (arg,) = args
            if node.func == "assert":
                if arg != BOOL:
                    raise self.fail(f"assert needs bool, got {arg}", node)
                return VOID
            if node.func == "print":
                if arg == VOID:
                    raise self.fail("cannot print a void value", node)
                return VOID
            if not (arg.is_array or arg == STRING):
                raise self.fail(f"len needs an array or string, got {arg}", node)
            return INT
        sig = self.table.functions.get((node.func, len(args)))
        if sig is None:
            raise self.fail(f"no function {node.func}/{len(args)}", node)
        for i, (arg, param) in enumerate(zip(args, sig.params)):
            if not assignable(arg, param):
                raise self.fail(f"argument {i + 1} of {node.func}: expected {param}, got {arg}", node)
        self.table.calls[id(node)] = sig
        return sig.ret

    # statements

    def check_block(self, block: Block) -> None:
        self.scopes.append({})
        try:
            for stmt in block.stmts:
                self.check_stmt(stmt)
        finally:
            self.scopes.pop()

    def check_stmt(self, node: Stmt) -> None:
        if isinstance(node, Block):
            self.check_block(node)
        elif isinstance(node, VarDecl):
            t = Type.of(node.type)
            if t == VOID:
                raise self.fail("variables cannot have type void", node)
            if node.init is not None:
                vt = self.check_expr(node.init)
                if not assignable(vt, t):
                    raise self.fail(f"cannot initialize {t} {node.name} with {vt}", node)
            self.declare(node.name, t, node)
        elif isinstance(node, ExprStmt):
            self.check_expr(node.expr)
        elif isinstance(node, (If, While)):
            cond = self.check_expr(node.cond)
            if cond != BOOL:
                raise self.fail(f"condition must be bool, got {cond}", node)
            if isinstance(node, If):
                self.check_block(node.then)
                if node.orelse is not None:
                    self.check_stmt(node.orelse)
            else:
                self.check_block(node.body)
        elif isinstance(node, Return):
            ret = self.function.ret
            if node.value is None:
                if ret != VOID:
                    raise self.fail(f"missing return value of type {ret}", node)
            else:
                vt = self.check_expr(node.value)
                if ret == VOID:
                    raise self.fail("void function cannot return a value", node)
                if not assignable(vt, ret):
                    raise self.fail(f"cannot return {vt} from a function returning {ret}", node)
        elif isinstance(node, Throw):
            vt = self.check_expr(node.value)
            if vt != STRING:
                raise self.fail(f"throw needs a string, got {vt}", node)
        elif isinstance(node, Try):
            self.check_block(node.body)
            self.scopes.append({})
            try:
                self.declare(node.catch_name, STRING, node)
                self.check_block(node.handler)
            finally:
                self.scopes.pop()
        elif isinstance(node, Empty):
            pass
        else:
            raise self.fail(f"unsupported statement {type(node).__name__}", node)

    def check_function(self, sig: FunctionSig) -> None:
        decl = sig.decl
        self.function = sig
        self.scopes = [{}]
        for param in decl.params:
            self.declare(param.name, Type.of(param.type), param)
        self.check_block(decl.body)
        if sig.ret != VOID and completes_normally(decl.body):
            raise self.fail(f"function {decl.name} can finish without returning {sig.ret}", decl)
        self.scopes = []
        self.function = None


def check_program(units: Sequence[tuple[str, SourceUnit]]) -> TypeTable:
    """Type-check a whole program given as ``(path, unit)`` pairs.

    Raises :class:`MiniJTypeError` on the first inconsistency.
    """
    table = TypeTable()
    checker = _Checker(table)

    for path, unit in units:
        checker.path = path
        for decl in unit.functions():
            key = (decl.name, len(decl.params))
            if decl.name in BUILTIN_NAMES:
                raise checker.fail(f"{decl.name} is a builtin and cannot be redefined", decl)
            if key in table.functions:
                raise checker.fail(f"function {decl.name}/{key[1]} is already defined", decl)
            params = tuple(Type.of(p.type) for p in decl.params)
            table.functions[key] = FunctionSig(decl.name, params, Type.of(decl.ret), path, decl)

    for path, unit in units:
        checker.path = path
        for decl in unit.globals():
            t = Type.of(decl.type)
            if decl.name in table.global_types:
                raise checker.fail(f"global {decl.name!r} is already defined", decl)
            if decl.init is not None:
                vt = checker.check_expr(decl.init)
                if not assignable(vt, t):
                    raise checker.fail(f"cannot initialize {t} {decl.name} with {vt}", decl)
            table.global_types[decl.name] = t

    for sig in list(table.functions.values()):
        checker.path = sig.path
        checker.check_function(sig)
    return table


def typecheck(unit: SourceUnit, path: str = "") -> TypeTable:
    """Check a single unit as a complete program."""
    return check_program([(path, unit)])


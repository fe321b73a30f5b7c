"""Context predicates, donor selection and rewrite recipes for every pattern.

A pattern looks at one AST node of a localized statement. ``applies`` decides
whether the node is a valid context, ``donors`` lists the material a recipe
may use (at most :data:`MAX_DONORS`, nearest first) and ``rewrite`` builds the
edit. Rewrites never look at types, so they can be replayed on any tree.
"""

from dataclasses import dataclass, replace
from functools import cached_property
from typing import TYPE_CHECKING, Any, NamedTuple, Optional, Sequence

from ..minij.nodes import (
    Assign,
    Binary,
    Block,
    BoolLit,
    Call,
    Cast,
    Expr,
    ExprStmt,
    FloatLit,
    FuncDecl,
    If,
    IntLit,
    Name,
    Node,
    Path,
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
    get_at,
    replace_at,
    walk_preorder,
)
from ..minij.typecheck import BOOL, INT, VOID, Type, assignable, default_value
from ..minij.unparse import unparse

if TYPE_CHECKING:
    from .scope import StatementSite

MAX_DONORS = 5
CATCH_NAMES = ("e", "ex", "err") + tuple(f"e{i}" for i in range(1, 10))


@dataclass(frozen=True)
class Donor:
    """Material a parameterized recipe uses; ``label`` is the printable descriptor."""

    label: str
    node: Optional[Node] = None
    value: Any = None


class Edit(NamedTuple):
    """Replace the node at ``path`` (absolute, within the unit) by ``node``."""

    path: Path
    node: Node


@dataclass(frozen=True)
class Where:
    """Position of a candidate node inside its file."""

    unit: SourceUnit
    stmt_path: Path
    node_path: Path

    @cached_property
    def abs_path(self) -> Path:
        return self.stmt_path + self.node_path

    @cached_property
    def parent(self) -> Node:
        return get_at(self.unit, self.abs_path[:-1])

    @property
    def step(self):
        return self.abs_path[-1]

    @property
    def is_root(self) -> bool:
        return not self.node_path

    @cached_property
    def block_slot(self) -> Optional[tuple[Path, int]]:
        """``(block path, index)`` when the node is the root statement of a block."""
        if self.is_root and isinstance(self.parent, Block) and self.step[0] == "stmts":
            return self.abs_path[:-1], self.step[1]
        return None

    @cached_property
    def function_path(self) -> Path:
        return self.abs_path[:1]

    @cached_property
    def function(self) -> FuncDecl:
        return get_at(self.unit, self.function_path)

    @property
    def in_function_body(self) -> bool:
        slot = self.block_slot
        return slot is not None and slot[0] == self.function_path + (("body", None),)


def _cap(donors: Sequence[Donor]) -> list[Donor]:
    seen: set[str] = set()
    out: list[Donor] = []
    for donor in donors:
        if donor.label in seen:
            continue
        seen.add(donor.label)
        out.append(donor)
        if len(out) == MAX_DONORS:
            break
    return out


def _block_stmts(where: Where) -> tuple[Path, list[Stmt], int]:
    block_path, index = where.block_slot
    block = get_at(where.unit, block_path)
    return block_path, list(block.stmts), index


def _block_edit(where: Where, stmts: Sequence[Stmt]) -> Edit:
    block_path = where.block_slot[0]
    block = get_at(where.unit, block_path)
    return Edit(block_path, replace(block, stmts=tuple(stmts)))


def _text(node: Node) -> str:
    return unparse(node)


def _declared_names(node: Node) -> set[str]:
    return {n.name for _, n in walk_preorder(node) if isinstance(n, VarDecl)}


def _integral_float(node: Node) -> bool:
    return (
        isinstance(node, FloatLit)
        and node.value == node.value
        and abs(node.value) < 2**31
        and float(node.value).is_integer()
    )


def _as_int_literal(node: FloatLit) -> IntLit:
    value = int(node.value)
    return IntLit(value, str(value))


def _int_literal(value: int) -> Expr:
    if value < 0:
        return Unary("-", IntLit(-value, str(-value)))
    return IntLit(value, str(value))


class Pattern:
    """Base class of all fault patterns."""

    def __init__(self, pattern_id: str, priority: int, families: dict[str, list[str]]):
        self.pattern_id = pattern_id
        self.priority = priority
        self.families = families

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.pattern_id!r}, priority={self.priority})"

    def applies(self, node: Node, where: Where, site: "StatementSite") -> bool:
        raise NotImplementedError

    def donors(self, node: Node, where: Where, site: "StatementSite") -> list[Optional[Donor]]:
        return [None]

    def rewrite(self, node: Node, where: Where, donor: Optional[Donor]) -> Edit:
        raise NotImplementedError


class _StatementPattern(Pattern):
    """Patterns acting on the localized statement within its block."""

    def applies(self, node, where, site) -> bool:
        return where.block_slot is not None


def _positions(node: Node) -> tuple[str, ...]:
    return ("before",) if isinstance(node, (Return, Throw)) else ("before", "after")


def _insert(where: Where, stmt: Stmt, position: str) -> Edit:
    _, stmts, index = _block_stmts(where)
    stmts.insert(index if position == "before" else index + 1, stmt)
    return _block_edit(where, stmts)


class InsertMethodCall(_StatementPattern):
    """Insert a call to a void function next to the statement."""

    def donors(self, node, where, site):
        variables = site.visible(where.abs_path)
        donors = []
        for sig in site.callables():
            if sig.ret != VOID:
                continue
            args = []
            for param in sig.params:
                var = next((v for v in variables if assignable(v.type, param)), None)
                if var is None:
                    break
                args.append(Name(var.name))
            else:
                call = ExprStmt(Call(sig.name, tuple(args)))
                for position in _positions(node):
                    donors.append(Donor(f"{position}: {_text(call)}", call, position))
        return _cap(donors)

    def rewrite(self, node, where, donor):
        return _insert(where, donor.node, donor.value)


class InsertReturn(_StatementPattern):
    def applies(self, node, where, site) -> bool:
        return where.block_slot is not None and not isinstance(node, Return)

    def donors(self, node, where, site):
        ret = site.signature.ret
        if ret == VOID:
            values = [Return(None)]
        else:
            values = [Return(default_value(ret))]
            values += [Return(Name(v.name)) for v in site.visible(where.abs_path) if assignable(v.type, ret)]
        donors = []
        for stmt in values:
            for position in _positions(node):
                donors.append(Donor(f"{position}: {_text(stmt)}", stmt, position))
        return _cap(donors)

    def rewrite(self, node, where, donor):
        return _insert(where, donor.node, donor.value)


class WrapTryCatch(_StatementPattern):
    def applies(self, node, where, site) -> bool:
        return where.block_slot is not None and not isinstance(node, Try)

    def donors(self, node, where, site):
        taken = {v.name for v in site.visible(where.abs_path)} | _declared_names(node)
        name = next((n for n in CATCH_NAMES if n not in taken), None)
        return [] if name is None else [Donor(f"catch ({name})", value=name)]

    def rewrite(self, node, where, donor):
        _, stmts, index = _block_stmts(where)
        stmts[index] = Try(Block((node,)), donor.value, Block(()))
        return _block_edit(where, stmts)


class WrapIf(_StatementPattern):
    def donors(self, node, where, site):
        variables = site.visible(where.abs_path)
        names = {v.name for v in variables}
        pool: list[Expr] = [BoolLit(False), BoolLit(True)]
        pool += [Name(v.name) for v in variables if v.type == BOOL]
        own = getattr(node, "cond", None) if isinstance(node, (If, While)) else None
        for cond in site.function_conditions():
            if cond is not own and _free(cond) <= names:
                pool.append(cond)
        return _cap([Donor(f"if ({_text(c)})", c) for c in pool])

    def rewrite(self, node, where, donor):
        _, stmts, index = _block_stmts(where)
        stmts[index] = If(donor.node, Block((node,)), None)
        return _block_edit(where, stmts)


def _free(expr: Node) -> set[str]:
    return {n.id for _, n in walk_preorder(expr) if isinstance(n, Name)}


class RemoveConditional(Pattern):
    def applies(self, node, where, site) -> bool:
        return isinstance(node, Binary) and node.op in ("&&", "||")

    def donors(self, node, where, site):
        return [Donor("keep left", value="left"), Donor("keep right", value="right")]

    def rewrite(self, node, where, donor):
        return Edit(where.abs_path, getattr(node, donor.value))


class InsertConditional(Pattern):
    def applies(self, node, where, site) -> bool:
        return isinstance(where.parent, (If, While)) and where.step == ("cond", None) and not where.is_root

    def donors(self, node, where, site):
        variables = site.visible(where.abs_path)
        names = {v.name for v in variables}
        pool: list[Expr] = [Name(v.name) for v in variables if v.type == BOOL]
        pool += [c for c in site.function_conditions() if c is not node and _free(c) <= names]
        donors = []
        for expr in pool:
            if expr == node:
                continue
            for op in ("&&", "||"):
                donors.append(Donor(f"{op} {_text(expr)}", expr, op))
        return _cap(donors)

    def rewrite(self, node, where, donor):
        return Edit(where.abs_path, Binary(donor.value, node, donor.node))


class ChangeConditionalOperator(Pattern):
    def applies(self, node, where, site) -> bool:
        return isinstance(node, Binary) and node.op in ("&&", "||")

    def rewrite(self, node, where, donor):
        return Edit(where.abs_path, replace(node, op="||" if node.op == "&&" else "&&"))


_SWAP_NUMERIC = {"int": "float", "float": "int"}


class ChangeDeclaredType(Pattern):
    def applies(self, node, where, site) -> bool:
        return isinstance(node, VarDecl) and node.type.dims == 0 and node.type.name in _SWAP_NUMERIC

    def rewrite(self, node, where, donor):
        return Edit(where.abs_path, replace(node, type=TypeRef(_SWAP_NUMERIC[node.type.name])))


class ChangeCastType(Pattern):
    def applies(self, node, where, site) -> bool:
        return isinstance(node, Cast) and node.type.name in _SWAP_NUMERIC

    def rewrite(self, node, where, donor):
        return Edit(where.abs_path, replace(node, type=TypeRef(_SWAP_NUMERIC[node.type.name])))


def _float_operand(node: Node) -> Optional[Expr]:
    """The integer-typed replacement of a float cast or integral float literal."""
    if isinstance(node, Cast) and node.type.name == "float":
        return node.operand
    if _integral_float(node):
        return _as_int_literal(node)
    return None


class RemoveDivisorCast(Pattern):
    side = "right"

    def applies(self, node, where, site) -> bool:
        return isinstance(node, Binary) and node.op == "/" and _float_operand(getattr(node, self.side)) is not None

    def rewrite(self, node, where, donor):
        stripped = _float_operand(getattr(node, self.side))
        return Edit(where.abs_path, replace(node, **{self.side: stripped}))


class RemoveDividendCast(RemoveDivisorCast):
    side = "left"


def _reciprocal_divisor(node: Node) -> Optional[Expr]:
    if (
        isinstance(node, Binary)
        and node.op == "/"
        and isinstance(node.left, FloatLit)
        and node.left.value == 1.0
    ):
        return node.right
    return None


class FloatMultToIntDiv(Pattern):
    """``(1.0 / d) * n`` becomes ``n / d`` and ``0.5 * x`` becomes ``x / 2``."""

    def _rewritten(self, node: Node) -> Optional[Expr]:
        if not (isinstance(node, Binary) and node.op == "*"):
            return None
        for factor, other in ((node.left, node.right), (node.right, node.left)):
            divisor = _reciprocal_divisor(factor)
            if divisor is not None:
                return Binary("/", other, divisor)
            if isinstance(factor, FloatLit) and factor.value == 0.5:
                return Binary("/", other, IntLit(2, "2"))
        return None

    def applies(self, node, where, site) -> bool:
        return self._rewritten(node) is not None

    def rewrite(self, node, where, donor):
        return Edit(where.abs_path, self._rewritten(node))


_LITERAL_EXTRAS = {
    IntLit: lambda: [_int_literal(0), _int_literal(1), _int_literal(-1)],
    FloatLit: lambda: [FloatLit(0.0, "0.0"), FloatLit(1.0, "1.0")],
    StrLit: lambda: [StrLit("")],
}


def _literal_value(node: Node) -> Any:
    if isinstance(node, Unary) and node.op == "-" and isinstance(node.operand, IntLit):
        return -node.operand.value
    return node.value


class ReplaceLiteral(Pattern):
    def applies(self, node, where, site) -> bool:
        return isinstance(node, (IntLit, FloatLit, BoolLit, StrLit))

    def donors(self, node, where, site):
        if isinstance(node, BoolLit):
            replacement = BoolLit(not node.value)
            return [Donor(_text(replacement), replacement)]
        kind = type(node)
        pool = [replace(lit, span=None) for lit in site.file_literals(kind)]
        pool += _LITERAL_EXTRAS[kind]()
        seen = {node.value}
        donors = []
        for lit in pool:
            value = _literal_value(lit)
            if value in seen:
                continue
            seen.add(value)
            donors.append(Donor(_text(lit), lit))
        return _cap(donors)

    def rewrite(self, node, where, donor):
        return Edit(where.abs_path, donor.node)


class ReplaceMethodCall(Pattern):
    def applies(self, node, where, site) -> bool:
        return isinstance(node, Call) and site.table.signature(node) is not None

    def donors(self, node, where, site):
        sig = site.table.signature(node)
        arg_types = [site.table.type_of(a) for a in node.args]
        statement_call = isinstance(where.parent, ExprStmt)
        donors = []
        for cand in site.callables():
            if cand.arity != sig.arity or cand.name == sig.name:
                continue
            if not all(t is not None and assignable(t, p) for t, p in zip(arg_types, cand.params)):
                continue
            if not statement_call and (cand.ret == VOID or not assignable(cand.ret, sig.ret)):
                continue
            donors.append(Donor(cand.name, value=cand.name))
        return _cap(donors)

    def rewrite(self, node, where, donor):
        return Edit(where.abs_path, replace(node, func=donor.value))


class ReplaceArgument(Pattern):
    def applies(self, node, where, site) -> bool:
        return isinstance(node, Call) and bool(node.args)

    def donors(self, node, where, site):
        variables = site.visible(where.abs_path)
        donors = []
        for i, arg in enumerate(node.args):
            t = site.table.type_of(arg)
            for var in variables:
                if var.type != t or (isinstance(arg, Name) and arg.id == var.name):
                    continue
                donors.append(Donor(f"arg {i}: {var.name}", Name(var.name), i))
        return _cap(donors)

    def rewrite(self, node, where, donor):
        args = list(node.args)
        args[donor.value] = donor.node
        return Edit(where.abs_path, replace(node, args=tuple(args)))


class RemoveArgument(Pattern):
    def applies(self, node, where, site) -> bool:
        return (
            isinstance(node, Call)
            and site.table.signature(node) is not None
            and bool(node.args)
            and (node.func, len(node.args) - 1) in site.table.functions
        )

    def donors(self, node, where, site):
        return [Donor(f"drop arg {i}", value=i) for i in range(len(node.args))][:MAX_DONORS]

    def rewrite(self, node, where, donor):
        args = list(node.args)
        del args[donor.value]
        return Edit(where.abs_path, replace(node, args=tuple(args)))


class AddArgument(Pattern):
    def applies(self, node, where, site) -> bool:
        return (
            isinstance(node, Call)
            and site.table.signature(node) is not None
            and (node.func, len(node.args) + 1) in site.table.functions
        )

    def donors(self, node, where, site):
        target = site.table.functions[(node.func, len(node.args) + 1)]
        param: Type = target.params[-1]
        pool: list[Expr] = [Name(v.name) for v in site.visible(where.abs_path) if assignable(v.type, param)]
        pool.append(default_value(param))
        return _cap([Donor(f"append {_text(e)}", e) for e in pool])

    def rewrite(self, node, where, donor):
        return Edit(where.abs_path, replace(node, args=node.args + (donor.node,)))


class ReplaceReturnExpression(Pattern):
    def applies(self, node, where, site) -> bool:
        return isinstance(node, Return) and node.value is not None

    def donors(self, node, where, site):
        ret = site.signature.ret
        variables = site.visible(where.abs_path)
        names = {v.name for v in variables}
        pool: list[Expr] = [v for v in site.function_returns() if v is not node.value and _free(v) <= names]
        pool += [Name(v.name) for v in variables if assignable(v.type, ret)]
        pool.append(default_value(ret))
        return _cap([Donor(f"return {_text(e)}", e) for e in pool if e != node.value])

    def rewrite(self, node, where, donor):
        return Edit(where.abs_path, Return(donor.node))


class ReplaceVariable(Pattern):
    def applies(self, node, where, site) -> bool:
        return isinstance(node, Name) and site.table.type_of(node) is not None

    def donors(self, node, where, site):
        t = site.table.type_of(node)
        return _cap(
            [Donor(v.name, Name(v.name)) for v in site.visible(where.abs_path) if v.type == t and v.name != node.id]
        )

    def rewrite(self, node, where, donor):
        return Edit(where.abs_path, donor.node)


class MoveStatement(_StatementPattern):
    def applies(self, node, where, site) -> bool:
        if where.block_slot is None:
            return False
        _, stmts, index = _block_stmts(where)
        return index + 1 < len(stmts)

    def rewrite(self, node, where, donor):
        _, stmts, index = _block_stmts(where)
        stmts[index], stmts[index + 1] = stmts[index + 1], stmts[index]
        return _block_edit(where, stmts)


class RemoveStatement(_StatementPattern):
    def rewrite(self, node, where, donor):
        _, stmts, index = _block_stmts(where)
        del stmts[index]
        return _block_edit(where, stmts)


class RemoveMethod(Pattern):
    """Replace the enclosing function body by a default-value return."""

    def applies(self, node, where, site) -> bool:
        return where.in_function_body

    def rewrite(self, node, where, donor):
        ret = Type.of(where.function.ret)
        body = Block(()) if ret == VOID else Block((Return(default_value(ret)),))
        return Edit(where.function_path + (("body", None),), body)


class _OperatorPattern(Pattern):
    family: str = ""
    node_type: type = Binary

    def operators(self, node: Node, site: "StatementSite") -> list[str]:
        return self.families[self.family]

    def applies(self, node, where, site) -> bool:
        return isinstance(node, self.node_type) and node.op in self.operators(node, site)

    def donors(self, node, where, site):
        return [Donor(op, value=op) for op in self.operators(node, site) if op != node.op]

    def rewrite(self, node, where, donor):
        return Edit(where.abs_path, replace(node, op=donor.value))


class ReplaceArithmeticOperator(_OperatorPattern):
    family = "arithmetic"


class ReplaceAssignmentOperator(_OperatorPattern):
    family = "assignment"
    node_type = Assign


class ReplaceRelationalOperator(_OperatorPattern):
    family = "relational"


class ReplaceLogicalOperator(_OperatorPattern):
    family = "logical"

    def applies(self, node, where, site) -> bool:
        return super().applies(node, where, site) and site.table.type_of(node) == BOOL


class ReplaceBitwiseOperator(_OperatorPattern):
    def operators(self, node, site):
        if isinstance(node, Binary) and node.op in self.families["shift"]:
            return self.families["shift"]
        return self.families["bitwise"]

    def applies(self, node, where, site) -> bool:
        return super().applies(node, where, site) and site.table.type_of(node) == INT


def _unary_form(node: Node) -> Optional[str]:
    if isinstance(node, Unary) and node.op in ("++", "--"):
        return node.op + "x"
    if isinstance(node, Postfix):
        return "x" + node.op
    return None


class ReplaceUnaryOperator(Pattern):
    def applies(self, node, where, site) -> bool:
        return _unary_form(node) in self.families["unary"]

    def donors(self, node, where, site):
        current = _unary_form(node)
        return [Donor(form, value=form) for form in self.families["unary"] if form != current]

    def rewrite(self, node, where, donor):
        form = donor.value
        if form.startswith("x"):
            return Edit(where.abs_path, Postfix(form[1:], node.operand))
        return Edit(where.abs_path, Unary(form[:-1], node.operand))


def _spine(node: Node, side: str, ops: Sequence[str]) -> Path:
    path: Path = ()
    while isinstance(node, Binary) and node.op in ops:
        path += ((side, None),)
        node = getattr(node, side)
    return path


class ReorderOperands(Pattern):
    """Swap the leftmost and rightmost operands of an arithmetic expression."""

    def _paths(self, node: Node) -> tuple[Path, Path]:
        ops = self.families["arithmetic"]
        return _spine(node, "left", ops), _spine(node, "right", ops)

    def applies(self, node, where, site) -> bool:
        if not (isinstance(node, Binary) and node.op in self.families["arithmetic"]):
            return False
        left, right = self._paths(node)
        return get_at(node, left) != get_at(node, right)

    def rewrite(self, node, where, donor):
        left, right = self._paths(node)
        first, last = get_at(node, left), get_at(node, right)
        swapped = replace_at(replace_at(node, left, last), right, first)
        return Edit(where.abs_path, swapped)


RECIPES: dict[str, type[Pattern]] = {
    "insert_method_call": InsertMethodCall,
    "insert_return": InsertReturn,
    "wrap_try_catch": WrapTryCatch,
    "wrap_if": WrapIf,
    "remove_conditional": RemoveConditional,
    "insert_conditional": InsertConditional,
    "change_conditional_operator": ChangeConditionalOperator,
    "change_declared_type": ChangeDeclaredType,
    "change_cast_type": ChangeCastType,
    "remove_divisor_cast": RemoveDivisorCast,
    "remove_dividend_cast": RemoveDividendCast,
    "float_mult_to_int_div": FloatMultToIntDiv,
    "replace_literal": ReplaceLiteral,
    "replace_method_call": ReplaceMethodCall,
    "replace_argument": ReplaceArgument,
    "remove_argument": RemoveArgument,
    "add_argument": AddArgument,
    "replace_return_expression": ReplaceReturnExpression,
    "replace_variable": ReplaceVariable,
    "move_statement": MoveStatement,
    "remove_statement": RemoveStatement,
    "remove_method": RemoveMethod,
    "replace_arithmetic_operator": ReplaceArithmeticOperator,
    "replace_assignment_operator": ReplaceAssignmentOperator,
    "replace_relational_operator": ReplaceRelationalOperator,
    "replace_logical_operator": ReplaceLogicalOperator,
    "replace_bitwise_operator": ReplaceBitwiseOperator,
    "replace_unary_operator": ReplaceUnaryOperator,
    "reorder_operands": ReorderOperands,
}

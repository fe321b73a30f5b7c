"""MiniJ abstract syntax tree.

Nodes are frozen dataclasses. Structural equality ignores source spans, so a
statement re-parsed from its extracted text compares equal to the original.
Child positions are addressed by *paths*: tuples of ``(field, index)`` steps,
where ``index`` is ``None`` for single-node fields.
"""

from collections import deque
from dataclasses import dataclass, field, replace
from typing import ClassVar, Iterator, Optional, Union

Step = tuple[str, Optional[int]]
Path = tuple[Step, ...]


@dataclass(frozen=True)
class Span:
    """Source range; lines and columns are 1-based, offsets index the raw text."""

    start_line: int
    start_col: int
    end_line: int
    end_col: int
    start: int
    end: int

    def as_tuple(self) -> tuple[int, int, int, int]:
        return (self.start_line, self.start_col, self.end_line, self.end_col)


@dataclass(frozen=True)
class Node:
    CHILDREN: ClassVar[tuple[str, ...]] = ()

    span: Optional[Span] = field(default=None, compare=False, repr=False, kw_only=True)


@dataclass(frozen=True)
class TypeRef(Node):
    name: str
    dims: int = 0


# Expressions


@dataclass(frozen=True)
class Expr(Node):
    pass


@dataclass(frozen=True)
class IntLit(Expr):
    value: int
    text: str


@dataclass(frozen=True)
class FloatLit(Expr):
    value: float
    text: str


@dataclass(frozen=True)
class BoolLit(Expr):
    value: bool


@dataclass(frozen=True)
class StrLit(Expr):
    value: str


@dataclass(frozen=True)
class Name(Expr):
    id: str


@dataclass(frozen=True)
class Unary(Expr):
    """Prefix operator: ``-``, ``!``, ``++`` or ``--``."""

    CHILDREN: ClassVar[tuple[str, ...]] = ("operand",)
    op: str
    operand: Expr


@dataclass(frozen=True)
class Postfix(Expr):
    CHILDREN: ClassVar[tuple[str, ...]] = ("operand",)
    op: str
    operand: Expr


@dataclass(frozen=True)
class Binary(Expr):
    CHILDREN: ClassVar[tuple[str, ...]] = ("left", "right")
    op: str
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Assign(Expr):
    CHILDREN: ClassVar[tuple[str, ...]] = ("target", "value")
    op: str
    target: Expr
    value: Expr


@dataclass(frozen=True)
class Call(Expr):
    CHILDREN: ClassVar[tuple[str, ...]] = ("args",)
    func: str
    args: tuple[Expr, ...] = ()


@dataclass(frozen=True)
class Index(Expr):
    CHILDREN: ClassVar[tuple[str, ...]] = ("target", "index")
    target: Expr
    index: Expr


@dataclass(frozen=True)
class Cast(Expr):
    CHILDREN: ClassVar[tuple[str, ...]] = ("type", "operand")
    type: TypeRef
    operand: Expr


@dataclass(frozen=True)
class NewArray(Expr):
    """``new T[size]``; ``type`` is the element type."""

    CHILDREN: ClassVar[tuple[str, ...]] = ("type", "size")
    type: TypeRef
    size: Expr


@dataclass(frozen=True)
class ArrayLit(Expr):
    CHILDREN: ClassVar[tuple[str, ...]] = ("elements",)
    elements: tuple[Expr, ...]


# Statements


@dataclass(frozen=True)
class Stmt(Node):
    pass


@dataclass(frozen=True)
class Block(Stmt):
    CHILDREN: ClassVar[tuple[str, ...]] = ("stmts",)
    stmts: tuple[Stmt, ...] = ()


@dataclass(frozen=True)
class VarDecl(Stmt):
    CHILDREN: ClassVar[tuple[str, ...]] = ("type", "init")
    type: TypeRef
    name: str
    init: Optional[Expr] = None


@dataclass(frozen=True)
class ExprStmt(Stmt):
    CHILDREN: ClassVar[tuple[str, ...]] = ("expr",)
    expr: Expr


@dataclass(frozen=True)
class If(Stmt):
    CHILDREN: ClassVar[tuple[str, ...]] = ("cond", "then", "orelse")
    cond: Expr
    then: Block
    orelse: Optional[Union[Block, "If"]] = None


@dataclass(frozen=True)
class While(Stmt):
    CHILDREN: ClassVar[tuple[str, ...]] = ("cond", "body")
    cond: Expr
    body: Block


@dataclass(frozen=True)
class Return(Stmt):
    CHILDREN: ClassVar[tuple[str, ...]] = ("value",)
    value: Optional[Expr] = None


@dataclass(frozen=True)
class Throw(Stmt):
    CHILDREN: ClassVar[tuple[str, ...]] = ("value",)
    value: Expr


@dataclass(frozen=True)
class Try(Stmt):
    CHILDREN: ClassVar[tuple[str, ...]] = ("body", "handler")
    body: Block
    catch_name: str
    handler: Block


@dataclass(frozen=True)
class Empty(Stmt):
    pass


# Declarations


@dataclass(frozen=True)
class Param(Node):
    CHILDREN: ClassVar[tuple[str, ...]] = ("type",)
    type: TypeRef
    name: str


@dataclass(frozen=True)
class FuncDecl(Node):
    CHILDREN: ClassVar[tuple[str, ...]] = ("ret", "params", "body")
    ret: TypeRef
    name: str
    params: tuple[Param, ...]
    body: Block


@dataclass(frozen=True)
class SourceUnit(Node):
    """One parsed ``.mj`` file: functions and global variable declarations."""

    CHILDREN: ClassVar[tuple[str, ...]] = ("decls",)
    decls: tuple[Union[FuncDecl, VarDecl], ...] = ()

    def functions(self) -> list[FuncDecl]:
        return [d for d in self.decls if isinstance(d, FuncDecl)]

    def globals(self) -> list[VarDecl]:
        return [d for d in self.decls if isinstance(d, VarDecl)]


# Traversal helpers


def iter_children(node: Node) -> Iterator[tuple[Step, Node]]:
    for name in node.CHILDREN:
        value = getattr(node, name)
        if value is None:
            continue
        if isinstance(value, tuple):
            for i, child in enumerate(value):
                yield (name, i), child
        else:
            yield (name, None), value


def child_at(node: Node, step: Step) -> Node:
    name, index = step
    value = getattr(node, name)
    if index is None:
        if value is None:
            raise LookupError(f"empty field {name!r} on {type(node).__name__}")
        return value
    return value[index]


def get_at(node: Node, path: Path) -> Node:
    for step in path:
        node = child_at(node, step)
    return node


def replace_at(node: Node, path: Path, new: Node) -> Node:
    """Return a copy of ``node`` with the subtree at ``path`` replaced.

    Untouched subtrees are shared with the input, which is never modified.
    """
    if not path:
        return new
    (name, index), rest = path[0], path[1:]
    value = getattr(node, name)
    if index is None:
        return replace(node, **{name: replace_at(value, rest, new)})
    items = list(value)
    items[index] = replace_at(items[index], rest, new)
    return replace(node, **{name: tuple(items)})


def walk_bfs(root: Node) -> list[tuple[Path, Node]]:
    out: list[tuple[Path, Node]] = []
    queue: deque[tuple[Path, Node]] = deque([((), root)])
    while queue:
        path, node = queue.popleft()
        out.append((path, node))
        for step, child in iter_children(node):
            queue.append((path + (step,), child))
    return out


def walk_preorder(root: Node, path: Path = ()) -> Iterator[tuple[Path, Node]]:
    yield path, root
    for step, child in iter_children(root):
        yield from walk_preorder(child, path + (step,))


def is_statement(node: Node) -> bool:
    return isinstance(node, Stmt)


def statement_paths(unit: SourceUnit) -> list[Path]:
    """Paths of every statement inside function bodies, in source order.

    A function body block itself is not a statement, nor are the blocks that
    form the branches of ``if``/``while``/``try``.
    """
    paths: list[Path] = []

    def visit_block(block: Block, path: Path) -> None:
        for i, stmt in enumerate(block.stmts):
            visit_stmt(stmt, path + (("stmts", i),))

    def visit_stmt(stmt: Stmt, path: Path) -> None:
        paths.append(path)
        if isinstance(stmt, Block):
            visit_block(stmt, path)
        elif isinstance(stmt, If):
            visit_block(stmt.then, path + (("then", None),))
            if isinstance(stmt.orelse, Block):
                visit_block(stmt.orelse, path + (("orelse", None),))
            elif isinstance(stmt.orelse, If):
                visit_stmt(stmt.orelse, path + (("orelse", None),))
        elif isinstance(stmt, While):
            visit_block(stmt.body, path + (("body", None),))
        elif isinstance(stmt, Try):
            visit_block(stmt.body, path + (("body", None),))
            visit_block(stmt.handler, path + (("handler", None),))

    for i, decl in enumerate(unit.decls):
        if isinstance(decl, FuncDecl):
            visit_block(decl.body, (("decls", i), ("body", None)))
    return paths


def enclosing_function(unit: SourceUnit, path: Path) -> tuple[Path, FuncDecl]:
    if not path or path[0][0] != "decls":
        raise LookupError("path does not start at a declaration")
    func_path = path[:1]
    decl = get_at(unit, func_path)
    if not isinstance(decl, FuncDecl):
        raise LookupError("path is not inside a function")
    return func_path, decl

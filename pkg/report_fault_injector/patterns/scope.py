"""Scope and donor information for statements of a type-checked corpus."""

from dataclasses import dataclass, field
from functools import cached_property

from ..corpus import Corpus, SourceFile, StatementRef
from ..minij.nodes import (
    Block,
    Expr,
    FloatLit,
    FuncDecl,
    If,
    IntLit,
    Name,
    Node,
    Path,
    Return,
    Stmt,
    StrLit,
    Try,
    VarDecl,
    While,
    child_at,
    get_at,
    walk_preorder,
)
from ..minij.typecheck import STRING, FunctionSig, Type, TypeTable, check_program


@dataclass(frozen=True)
class VarInfo:
    name: str
    type: Type
    order: int
    is_global: bool = False


def visible_variables(unit_root: Node, path: Path, global_types: dict[str, Type]) -> list[VarInfo]:
    """
    Variables in scope at the node ``path`` of a unit, nearest declaration first.

    Locals come first (most recently declared first), then the globals they do
    not shadow, by name.
    """
    found: dict[str, VarInfo] = {}
    order = 0
    node = unit_root
    for step in path:
        name, index = step
        if isinstance(node, FuncDecl):
            for param in node.params:
                found[param.name] = VarInfo(param.name, Type.of(param.type), order)
                order += 1
        elif isinstance(node, Block) and name == "stmts":
            for stmt in node.stmts[:index]:
                if isinstance(stmt, VarDecl):
                    found[stmt.name] = VarInfo(stmt.name, Type.of(stmt.type), order)
                    order += 1
        elif isinstance(node, Try) and name == "handler":
            found[node.catch_name] = VarInfo(node.catch_name, STRING, order)
            order += 1
        node = child_at(node, step)
    locals_ = sorted(found.values(), key=lambda v: -v.order)
    globals_ = [
        VarInfo(name, t, -1, is_global=True) for name, t in sorted(global_types.items()) if name not in found
    ]
    return locals_ + globals_


def free_names(expr: Node) -> set[str]:
    return {node.id for _, node in walk_preorder(expr) if isinstance(node, Name)}


def line_of(node: Node) -> int:
    return node.span.start_line if node.span is not None else 0


@dataclass
class ProgramContext:
    """A corpus together with the type table of its original program."""

    corpus: Corpus
    table: TypeTable = field(init=False)

    def __post_init__(self) -> None:
        self.table = check_program(self.corpus.program())

    @cached_property
    def source_paths(self) -> frozenset[str]:
        return frozenset(f.path for f in self.corpus.sources)

    @cached_property
    def source_functions(self) -> list[FunctionSig]:
        """Non-test functions defined in source files."""
        return [s for s in self.table.functions.values() if s.path in self.source_paths and not s.is_test]

    def site(self, ref: StatementRef) -> "StatementSite":
        source = self.corpus.source(ref.file_path)
        return StatementSite(self, source, ref, source.statement_paths[ref.index])


@dataclass
class StatementSite:
    """One localized statement and everything donors are drawn from."""

    context: ProgramContext
    source: SourceFile
    ref: StatementRef
    path: Path

    @property
    def unit(self):
        return self.source.unit

    @property
    def table(self) -> TypeTable:
        return self.context.table

    @cached_property
    def statement(self) -> Stmt:
        return get_at(self.unit, self.path)

    @cached_property
    def function(self) -> FuncDecl:
        return get_at(self.unit, self.path[:1])

    @cached_property
    def signature(self) -> FunctionSig:
        return self.table.functions[(self.function.name, len(self.function.params))]

    def visible(self, abs_path: Path) -> list[VarInfo]:
        return visible_variables(self.unit, abs_path, self.table.global_types)

    def callables(self) -> list[FunctionSig]:
        """Source functions other than the enclosing one, nearest declaration first."""
        here = line_of(self.statement)

        def key(sig: FunctionSig):
            if sig.path == self.source.path:
                return (0, abs(line_of(sig.decl) - here), sig.name, sig.arity)
            return (1, 0, sig.name, sig.arity)

        return sorted((s for s in self.context.source_functions if s != self.signature), key=key)

    def function_conditions(self) -> list[Expr]:
        """Conditions of ``if``/``while`` statements in the enclosing function, nearest first."""
        conds = [n.cond for _, n in walk_preorder(self.function.body) if isinstance(n, (If, While))]
        here = line_of(self.statement)
        return sorted(conds, key=lambda c: abs(line_of(c) - here))

    def function_returns(self) -> list[Expr]:
        values = [
            n.value for _, n in walk_preorder(self.function.body) if isinstance(n, Return) and n.value is not None
        ]
        here = line_of(self.statement)
        return sorted(values, key=lambda v: abs(line_of(v) - here))

    def file_literals(self, kind: type) -> list[Node]:
        """Literals of one kind in the statement's file, nearest first."""
        here = line_of(self.statement)
        found = [n for _, n in walk_preorder(self.unit) if type(n) is kind]
        return sorted(found, key=lambda n: (abs(line_of(n) - here), _literal_key(n)))


def _literal_key(node: Node):
    if isinstance(node, (IntLit, FloatLit)):
        return (node.value, "")
    if isinstance(node, StrLit):
        return (0, node.value)
    return (0, "")


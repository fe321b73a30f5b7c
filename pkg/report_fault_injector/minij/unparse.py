"""Canonical pretty-printer for MiniJ trees.

``unparse(node)`` prints fresh canonical text. :class:`Unparser` can also be
given the original file text and the set of nodes taken from it; those nodes
are then copied verbatim from the source instead of re-printed, so a mutant's
text differs from the original only around the edit.
"""

from typing import AbstractSet, Optional

from .nodes import (
    ArrayLit,
    Assign,
    Binary,
    Block,
    BoolLit,
    Call,
    Cast,
    Empty,
    ExprStmt,
    FloatLit,
    FuncDecl,
    If,
    Index,
    IntLit,
    Name,
    NewArray,
    Node,
    Param,
    Postfix,
    Return,
    SourceUnit,
    StrLit,
    Throw,
    Try,
    TypeRef,
    Unary,
    VarDecl,
    While,
)

INDENT = "    "

BINARY_PRECEDENCE = {
    "||": 2,
    "&&": 3,
    "|": 4,
    "^": 5,
    "&": 6,
    "==": 7,
    "!=": 7,
    "<": 8,
    "<=": 8,
    ">": 8,
    ">=": 8,
    "<<": 9,
    ">>": 9,
    "+": 10,
    "-": 10,
    "*": 11,
    "/": 11,
    "%": 11,
}
ASSIGN_PREC = 1
UNARY_PREC = 12
POSTFIX_PREC = 13
PRIMARY_PREC = 14

_ESCAPE = {"\\": "\\\\", '"': '\\"', "\n": "\\n", "\t": "\\t", "\r": "\\r", "\0": "\\0"}


def precedence(node: Node) -> int:
    if isinstance(node, Assign):
        return ASSIGN_PREC
    if isinstance(node, Binary):
        return BINARY_PRECEDENCE[node.op]
    if isinstance(node, (Unary, Cast)):
        return UNARY_PREC
    if isinstance(node, (Postfix, Index)):
        return POSTFIX_PREC
    return PRIMARY_PREC


def quote(value: str) -> str:
    return '"' + "".join(_ESCAPE.get(ch, ch) for ch in value) + '"'


def type_text(ref: TypeRef) -> str:
    return ref.name + "[]" * ref.dims


def _line_indent(text: str, offset: int) -> str:
    line_start = text.rfind("\n", 0, offset) + 1
    end = line_start
    while end < len(text) and text[end] in " \t":
        end += 1
    return text[line_start:end]


class Unparser:
    def __init__(self, source: Optional[str] = None, originals: AbstractSet[int] = frozenset()):
        self.source = source
        self.originals = originals

    def _reused(self, node: Node, indent: str) -> Optional[str]:
        if self.source is None or node.span is None or id(node) not in self.originals:
            return None
        text = self.source[node.span.start : node.span.end]
        if "\n" not in text:
            return text
        old = _line_indent(self.source, node.span.start)
        if old == indent:
            return text
        lines = text.split("\n")
        shifted = [lines[0]]
        for line in lines[1:]:
            shifted.append(indent + line[len(old) :] if line.startswith(old) else line)
        return "\n".join(shifted)

    # expressions

    def expr(self, node: Node) -> str:
        reused = self._reused(node, "")
        if reused is not None:
            return reused
        if isinstance(node, IntLit):
            return node.text
        if isinstance(node, FloatLit):
            return node.text
        if isinstance(node, BoolLit):
            return "true" if node.value else "false"
        if isinstance(node, StrLit):
            return quote(node.value)
        if isinstance(node, Name):
            return node.id
        if isinstance(node, Binary):
            prec = BINARY_PRECEDENCE[node.op]
            left = self.wrap(node.left, precedence(node.left) < prec)
            right = self.wrap(node.right, precedence(node.right) <= prec)
            return f"{left} {node.op} {right}"
        if isinstance(node, Assign):
            target = self.wrap(node.target, precedence(node.target) < POSTFIX_PREC)
            value = self.wrap(node.value, precedence(node.value) < ASSIGN_PREC)
            return f"{target} {node.op} {value}"
        if isinstance(node, Unary):
            operand = self.wrap(node.operand, precedence(node.operand) < UNARY_PREC)
            if node.op in ("-", "++", "--") and operand[:1] in ("-", "+"):
                operand = f"({operand})"
            return f"{node.op}{operand}"
        if isinstance(node, Postfix):
            operand = self.wrap(node.operand, precedence(node.operand) < POSTFIX_PREC)
            return f"{operand}{node.op}"
        if isinstance(node, Cast):
            operand = self.wrap(node.operand, precedence(node.operand) < UNARY_PREC)
            return f"({type_text(node.type)}) {operand}"
        if isinstance(node, Call):
            return f"{node.func}({', '.join(self.expr(a) for a in node.args)})"
        if isinstance(node, Index):
            target = self.wrap(node.target, precedence(node.target) < POSTFIX_PREC)
            return f"{target}[{self.expr(node.index)}]"
        if isinstance(node, NewArray):
            return f"new {type_text(node.type)}[{self.expr(node.size)}]"
        if isinstance(node, ArrayLit):
            return f"[{', '.join(self.expr(e) for e in node.elements)}]"
        raise TypeError(f"not an expression: {type(node).__name__}")

    def wrap(self, node: Node, parens: bool) -> str:
        text = self.expr(node)
        return f"({text})" if parens else text

    # statements

    def stmt(self, node: Node, indent: str = "") -> str:
        """Text of ``node``; the first line carries no indentation."""
        reused = self._reused(node, indent)
        if reused is not None:
            return reused
        if isinstance(node, Block):
            if not node.stmts:
                return "{ }"
            inner = indent + INDENT
            body = "".join(f"{inner}{self.stmt(s, inner)}\n" for s in node.stmts)
            return "{\n" + body + indent + "}"
        if isinstance(node, VarDecl):
            head = f"{type_text(node.type)} {node.name}"
            if node.init is None:
                return head + ";"
            return f"{head} = {self.expr(node.init)};"
        if isinstance(node, ExprStmt):
            return self.expr(node.expr) + ";"
        if isinstance(node, If):
            text = f"if ({self.expr(node.cond)}) {self.stmt(node.then, indent)}"
            if node.orelse is not None:
                text += f" else {self.stmt(node.orelse, indent)}"
            return text
        if isinstance(node, While):
            return f"while ({self.expr(node.cond)}) {self.stmt(node.body, indent)}"
        if isinstance(node, Return):
            return "return;" if node.value is None else f"return {self.expr(node.value)};"
        if isinstance(node, Throw):
            return f"throw {self.expr(node.value)};"
        if isinstance(node, Try):
            body = self.stmt(node.body, indent)
            handler = self.stmt(node.handler, indent)
            return f"try {body} catch ({node.catch_name}) {handler}"
        if isinstance(node, Empty):
            return ";"
        if isinstance(node, Param):
            return f"{type_text(node.type)} {node.name}"
        if isinstance(node, FuncDecl):
            params = ", ".join(self.stmt(p) for p in node.params)
            return f"{type_text(node.ret)} {node.name}({params}) {self.stmt(node.body, indent)}"
        if isinstance(node, SourceUnit):
            parts = []
            previous = None
            for decl in node.decls:
                if previous is not None:
                    both_globals = isinstance(previous, VarDecl) and isinstance(decl, VarDecl)
                    parts.append("\n" if both_globals else "\n\n")
                parts.append(self.stmt(decl))
                previous = decl
            return "".join(parts) + ("\n" if parts else "")
        if isinstance(node, TypeRef):
            return type_text(node)
        return self.expr(node)


def unparse(node: Node, indent: str = "") -> str:
    return Unparser().stmt(node, indent)


def splice(source: str, original: Node, replacement: Node, originals: AbstractSet[int]) -> str:
    """Replace the text of ``original`` in ``source`` by the rendering of ``replacement``.

    Subtrees of ``replacement`` whose ids are in ``originals`` are copied from
    ``source`` verbatim.
    """
    if original.span is None:
        raise ValueError("original node carries no source span")
    indent = _line_indent(source, original.span.start)
    text = Unparser(source, originals).stmt(replacement, indent)
    return source[: original.span.start] + text + source[original.span.end :]

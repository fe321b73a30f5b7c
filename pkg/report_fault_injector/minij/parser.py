"""Recursive-descent parser producing :mod:`.nodes` trees.

The accepted language is documented in ``docs/minij-grammar.ebnf``.
"""

from typing import Callable, Optional

from ..errors import ParseError
from .lexer import TYPE_KEYWORDS, Token, tokenize
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
    Param,
    Postfix,
    Return,
    SourceUnit,
    Span,
    Stmt,
    StrLit,
    Throw,
    Try,
    TypeRef,
    Unary,
    VarDecl,
    While,
)

ASSIGN_OPS = ("=", "+=", "-=", "*=", "/=")

# Binary precedence levels, loosest first.
BINARY_LEVELS: tuple[tuple[str, ...], ...] = (
    ("||",),
    ("&&",),
    ("|",),
    ("^",),
    ("&",),
    ("==", "!="),
    ("<", "<=", ">", ">="),
    ("<<", ">>"),
    ("+", "-"),
    ("*", "/", "%"),
)

INT_MAX = 2**31 - 1


class Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = tokenize(text)
        self.i = 0

    # token helpers

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def peek(self, k: int = 1) -> Token:
        return self.tokens[min(self.i + k, len(self.tokens) - 1)]

    def at(self, text: str) -> bool:
        tok = self.tok
        return tok.kind in ("op", "keyword") and tok.text == text

    def error(self, message: str, tok: Optional[Token] = None) -> ParseError:
        tok = tok or self.tok
        found = "end of input" if tok.kind == "eof" else repr(tok.text)
        return ParseError(f"{message}, found {found}", tok.line, tok.col)

    def advance(self) -> Token:
        tok = self.tok
        if tok.kind != "eof":
            self.i += 1
        return tok

    def expect(self, text: str) -> Token:
        if not self.at(text):
            raise self.error(f"expected {text!r}")
        return self.advance()

    def expect_ident(self) -> Token:
        if self.tok.kind != "ident":
            raise self.error("expected identifier")
        return self.advance()

    def span_from(self, start: Token) -> Span:
        last = self.tokens[self.i - 1]
        return Span(start.line, start.col, last.end_line, last.end_col, start.offset, last.end)

    # declarations

    def parse_unit(self) -> SourceUnit:
        start = self.tok
        decls = []
        while self.tok.kind != "eof":
            decls.append(self.parse_decl())
        if not decls:
            return SourceUnit((), span=Span(1, 1, 1, 1, 0, 0))
        return SourceUnit(tuple(decls), span=self.span_from(start))

    def parse_decl(self):
        start = self.tok
        type_ref = self.parse_type()
        name = self.expect_ident().text
        if self.at("("):
            return self.parse_function(start, type_ref, name)
        if type_ref.name == "void":
            raise self.error("variables cannot have type void", start)
        init = None
        if self.at("="):
            self.advance()
            init = self.parse_expr()
        self.expect(";")
        return VarDecl(type_ref, name, init, span=self.span_from(start))

    def parse_function(self, start: Token, ret: TypeRef, name: str) -> FuncDecl:
        self.expect("(")
        params = []
        if not self.at(")"):
            while True:
                pstart = self.tok
                ptype = self.parse_type()
                if ptype.name == "void":
                    raise self.error("parameters cannot have type void", pstart)
                pname = self.expect_ident().text
                params.append(Param(ptype, pname, span=self.span_from(pstart)))
                if not self.at(","):
                    break
                self.advance()
        self.expect(")")
        body = self.parse_block()
        return FuncDecl(ret, name, tuple(params), body, span=self.span_from(start))

    def at_type(self) -> bool:
        return self.tok.kind == "keyword" and self.tok.text in TYPE_KEYWORDS

    def parse_type(self, allow_dims: bool = True) -> TypeRef:
        start = self.tok
        if not self.at_type():
            raise self.error("expected type")
        name = self.advance().text
        dims = 0
        while allow_dims and self.at("[") and self.peek().text == "]":
            self.advance()
            self.advance()
            dims += 1
        if name == "void" and dims:
            raise self.error("arrays of void are not allowed", start)
        return TypeRef(name, dims, span=self.span_from(start))

    # statements

    def parse_block(self) -> Block:
        start = self.expect("{")
        stmts = []
        while not self.at("}"):
            if self.tok.kind == "eof":
                raise self.error("expected '}'")
            stmts.append(self.parse_statement())
        self.advance()
        return Block(tuple(stmts), span=self.span_from(start))

    def parse_statement(self) -> Stmt:
        start = self.tok
        if self.at("{"):
            return self.parse_block()
        if self.at(";"):
            self.advance()
            return Empty(span=self.span_from(start))
        if self.at("if"):
            return self.parse_if()
        if self.at("while"):
            self.advance()
            self.expect("(")
            cond = self.parse_expr()
            self.expect(")")
            body = self.parse_block()
            return While(cond, body, span=self.span_from(start))
        if self.at("return"):
            self.advance()
            value = None if self.at(";") else self.parse_expr()
            self.expect(";")
            return Return(value, span=self.span_from(start))
        if self.at("throw"):
            self.advance()
            value = self.parse_expr()
            self.expect(";")
            return Throw(value, span=self.span_from(start))
        if self.at("try"):
            self.advance()
            body = self.parse_block()
            self.expect("catch")
            self.expect("(")
            name = self.expect_ident().text
            self.expect(")")
            handler = self.parse_block()
            return Try(body, name, handler, span=self.span_from(start))
        if self.at_type():
            type_ref = self.parse_type()
            if type_ref.name == "void":
                raise self.error("variables cannot have type void", start)
            name = self.expect_ident().text
            init = None
            if self.at("="):
                self.advance()
                init = self.parse_expr()
            self.expect(";")
            return VarDecl(type_ref, name, init, span=self.span_from(start))
        expr = self.parse_expr()
        self.expect(";")
        return ExprStmt(expr, span=self.span_from(start))

    def parse_if(self) -> If:
        start = self.expect("if")
        self.expect("(")
        cond = self.parse_expr()
        self.expect(")")
        then = self.parse_block()
        orelse = None
        if self.at("else"):
            self.advance()
            orelse = self.parse_if() if self.at("if") else self.parse_block()
        return If(cond, then, orelse, span=self.span_from(start))

    # expressions

    def parse_expr(self) -> Expr:
        start = self.tok
        left = self.parse_binary(0)
        if self.tok.kind == "op" and self.tok.text in ASSIGN_OPS:
            if not isinstance(left, (Name, Index)):
                raise self.error("invalid assignment target", start)
            op = self.advance().text
            value = self.parse_expr()
            return Assign(op, left, value, span=self.span_from(start))
        return left

    def parse_binary(self, level: int) -> Expr:
        if level == len(BINARY_LEVELS):
            return self.parse_unary()
        start = self.tok
        ops = BINARY_LEVELS[level]
        left = self.parse_binary(level + 1)
        while self.tok.kind == "op" and self.tok.text in ops:
            op = self.advance().text
            right = self.parse_binary(level + 1)
            left = Binary(op, left, right, span=self.span_from(start))
        return left

    def parse_unary(self) -> Expr:
        start = self.tok
        if self.tok.kind == "op" and self.tok.text in ("-", "!", "++", "--"):
            op = self.advance().text
            operand = self.parse_unary()
            if op in ("++", "--") and not isinstance(operand, (Name, Index)):
                raise self.error(f"operand of {op} must be a variable", start)
            return Unary(op, operand, span=self.span_from(start))
        if self.at("(") and self.peek().kind == "keyword" and self.peek().text in TYPE_KEYWORDS:
            self.advance()
            type_ref = self.parse_type(allow_dims=False)
            self.expect(")")
            operand = self.parse_unary()
            return Cast(type_ref, operand, span=self.span_from(start))
        return self.parse_postfix()

    def parse_postfix(self) -> Expr:
        start = self.tok
        expr = self.parse_primary()
        while True:
            if self.at("["):
                self.advance()
                index = self.parse_expr()
                self.expect("]")
                expr = Index(expr, index, span=self.span_from(start))
            elif self.tok.kind == "op" and self.tok.text in ("++", "--"):
                if not isinstance(expr, (Name, Index)):
                    raise self.error("operand of postfix operator must be a variable")
                op = self.advance().text
                expr = Postfix(op, expr, span=self.span_from(start))
            else:
                return expr

    def parse_primary(self) -> Expr:
        start = self.tok
        kind = start.kind
        if kind == "int":
            self.advance()
            if start.value > INT_MAX + 1:
                raise ParseError("integer literal out of range", start.line, start.col)
            return IntLit(start.value, start.text, span=self.span_from(start))
        if kind == "float":
            self.advance()
            return FloatLit(start.value, start.text, span=self.span_from(start))
        if kind == "string":
            self.advance()
            return StrLit(start.value, span=self.span_from(start))
        if self.at("true") or self.at("false"):
            self.advance()
            return BoolLit(start.text == "true", span=self.span_from(start))
        if kind == "ident":
            self.advance()
            if self.at("("):
                self.advance()
                args = self.parse_args(")")
                return Call(start.text, args, span=self.span_from(start))
            return Name(start.text, span=self.span_from(start))
        if self.at("("):
            self.advance()
            expr = self.parse_expr()
            self.expect(")")
            return expr
        if self.at("new"):
            self.advance()
            elem = self.parse_type(allow_dims=False)
            if elem.name == "void":
                raise self.error("arrays of void are not allowed", start)
            self.expect("[")
            size = self.parse_expr()
            self.expect("]")
            return NewArray(elem, size, span=self.span_from(start))
        if self.at("["):
            self.advance()
            elements = self.parse_args("]")
            if not elements:
                raise self.error("array literal must not be empty", start)
            return ArrayLit(elements, span=self.span_from(start))
        raise self.error("expected expression")

    def parse_args(self, closer: str) -> tuple[Expr, ...]:
        args = []
        if not self.at(closer):
            while True:
                args.append(self.parse_expr())
                if not self.at(","):
                    break
                self.advance()
        self.expect(closer)
        return tuple(args)


def _run(text: str, rule: Callable[[Parser], object], path: Optional[str]):
    try:
        parser = Parser(text)
        node = rule(parser)
        if parser.tok.kind != "eof":
            raise parser.error("unexpected trailing input")
        return node
    except ParseError as e:
        raise e.with_path(path) if path else e


def parse(text: str, path: Optional[str] = None) -> SourceUnit:
    """Parse a whole ``.mj`` file."""
    return _run(text, Parser.parse_unit, path)


def parse_statement(text: str) -> Stmt:
    return _run(text, Parser.parse_statement, None)


def parse_expression(text: str) -> Expr:
    return _run(text, Parser.parse_expr, None)

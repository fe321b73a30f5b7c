"""Tokenizer for MiniJ source text."""

import re
from dataclasses import dataclass
from typing import Optional, Union

from ..errors import ParseError

TYPE_KEYWORDS = frozenset({"int", "float", "bool", "string", "void"})
KEYWORDS = TYPE_KEYWORDS | frozenset(
    {"if", "else", "while", "return", "true", "false", "throw", "try", "catch", "new"}
)
BUILTINS = frozenset({"assert", "print", "len"})

# Longest operators first.
OPERATORS = (
    "++", "--", "+=", "-=", "*=", "/=", "==", "!=", "<=", ">=", "&&", "||", "<<", ">>",
    "+", "-", "*", "/", "%", "=", "<", ">", "!", "&", "|", "^",
    "(", ")", "{", "}", "[", "]", ";", ",",
)

_NUMBER = re.compile(r"\d+(\.\d+)?([eE][+-]?\d+)?([dDfF])?")
_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_ESCAPES = {"n": "\n", "t": "\t", '"': '"', "\\": "\\", "r": "\r", "0": "\0"}


@dataclass(frozen=True)
class Token:
    kind: str  # "ident", "keyword", "int", "float", "string", "op", "eof"
    text: str
    value: Optional[Union[int, float, str]]
    line: int
    col: int
    offset: int
    end: int
    end_line: int
    end_col: int


class Lexer:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self.line = 1
        self.col = 1

    def _advance(self, n: int) -> None:
        for ch in self.text[self.pos : self.pos + n]:
            if ch == "\n":
                self.line += 1
                self.col = 1
            else:
                self.col += 1
        self.pos += n

    def _skip_trivia(self) -> None:
        text = self.text
        while self.pos < len(text):
            ch = text[self.pos]
            if ch in " \t\r\n":
                self._advance(1)
            elif text.startswith("//", self.pos):
                end = text.find("\n", self.pos)
                self._advance((len(text) if end < 0 else end) - self.pos)
            elif text.startswith("/*", self.pos):
                end = text.find("*/", self.pos + 2)
                if end < 0:
                    raise ParseError("unterminated comment", self.line, self.col)
                self._advance(end + 2 - self.pos)
            else:
                return

    def _make(self, kind: str, length: int, value) -> Token:
        line, col, start = self.line, self.col, self.pos
        raw = self.text[start : start + length]
        self._advance(length)
        return Token(kind, raw, value, line, col, start, self.pos, self.line, self.col)

    def _string(self) -> Token:
        text = self.text
        i = self.pos + 1
        chars: list[str] = []
        while True:
            if i >= len(text) or text[i] == "\n":
                raise ParseError("unterminated string literal", self.line, self.col)
            ch = text[i]
            if ch == '"':
                break
            if ch == "\\":
                nxt = text[i + 1] if i + 1 < len(text) else ""
                if nxt not in _ESCAPES:
                    raise ParseError(f"invalid escape \\{nxt}", self.line, self.col + i - self.pos)
                chars.append(_ESCAPES[nxt])
                i += 2
                continue
            chars.append(ch)
            i += 1
        return self._make("string", i + 1 - self.pos, "".join(chars))

    def next_token(self) -> Token:
        self._skip_trivia()
        text = self.text
        if self.pos >= len(text):
            return Token("eof", "", None, self.line, self.col, self.pos, self.pos, self.line, self.col)
        ch = text[self.pos]
        if ch.isdigit():
            m = _NUMBER.match(text, self.pos)
            raw = m.group(0)
            if m.group(1) or m.group(2) or m.group(3):
                digits = raw[:-1] if m.group(3) else raw
                return self._make("float", len(raw), float(digits))
            return self._make("int", len(raw), int(raw))
        if ch.isalpha() or ch == "_":
            m = _IDENT.match(text, self.pos)
            word = m.group(0)
            return self._make("keyword" if word in KEYWORDS else "ident", len(word), word)
        if ch == '"':
            return self._string()
        for op in OPERATORS:
            if text.startswith(op, self.pos):
                return self._make("op", len(op), op)
        raise ParseError(f"unexpected character {ch!r}", self.line, self.col)


def tokenize(text: str) -> list[Token]:
    lexer = Lexer(text)
    tokens = []
    while True:
        tok = lexer.next_token()
        tokens.append(tok)
        if tok.kind == "eof":
            return tokens

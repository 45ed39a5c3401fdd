"""Hand-written lexer for the contract language."""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ParseError
from .nodes import SourcePos

KEYWORDS = {
    "contract", "function", "constructor", "returns", "query",
    "public", "private", "internal",
    "if", "else", "for", "while", "return",
    "require", "assert", "revert",
    "true", "false", "msg",
    "bool", "address", "string", "mapping",
}

# longest first so the scanner is greedy
SYMBOLS = [
    "=>", "==", "!=", "<=", ">=", "&&", "||",
    "+=", "-=", "*=", "/=", "%=",
    "{", "}", "(", ")", "[", "]", ";", ",", ".",
    "<", ">", "=", "+", "-", "*", "/", "%", "!",
]

_ESCAPES = {"n": "\n", "t": "\t", '"': '"', "\\": "\\", "r": "\r", "0": "\0"}


@dataclass(frozen=True)
class Token:
    kind: str  # "ident" | "keyword" | "int" | "string" | "sym" | "eof"
    text: str
    value: object
    pos: SourcePos

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"Token({self.kind}, {self.text!r}@{self.pos})"


def tokenize(source: str) -> list[Token]:
    toks: list[Token] = []
    i, line, col = 0, 1, 1
    n = len(source)

    def pos() -> SourcePos:
        return SourcePos(line, col, i)

    while i < n:
        ch = source[i]
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if ch == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if source.startswith("//", i):
            while i < n and source[i] != "\n":
                i += 1
                col += 1
            continue
        if source.startswith("/*", i):
            start = pos()
            i += 2
            col += 2
            while i < n and not source.startswith("*/", i):
                if source[i] == "\n":
                    line += 1
                    col = 1
                else:
                    col += 1
                i += 1
            if i >= n:
                raise ParseError("unterminated block comment", start)
            i += 2
            col += 2
            continue
        if ch.isalpha() or ch == "_":
            p = pos()
            start = i
            while i < n and (source[i].isalnum() or source[i] == "_"):
                i += 1
            word = source[start:i]
            col += i - start
            kind = "keyword" if word in KEYWORDS else "ident"
            toks.append(Token(kind, word, word, p))
            continue
        if ch.isdigit():
            p = pos()
            start = i
            while i < n and source[i].isdigit():
                i += 1
            text = source[start:i]
            col += i - start
            if i < n and (source[i].isalpha() or source[i] == "_"):
                raise ParseError(f"malformed number {text + source[i]!r}", p)
            toks.append(Token("int", text, int(text), p))
            continue
        if ch == '"':
            p = pos()
            i += 1
            col += 1
            out: list[str] = []
            while True:
                if i >= n or source[i] == "\n":
                    raise ParseError("unterminated string literal", p)
                c = source[i]
                if c == '"':
                    i += 1
                    col += 1
                    break
                if c == "\\":
                    if i + 1 >= n or source[i + 1] not in _ESCAPES:
                        raise ParseError("bad escape in string literal", pos())
                    out.append(_ESCAPES[source[i + 1]])
                    i += 2
                    col += 2
                    continue
                out.append(c)
                i += 1
                col += 1
            toks.append(Token("string", "".join(out), "".join(out), p))
            continue
        matched = False
        for sym in SYMBOLS:
            if source.startswith(sym, i):
                toks.append(Token("sym", sym, sym, pos()))
                i += len(sym)
                col += len(sym)
                matched = True
                break
        if not matched:
            raise ParseError(f"unexpected character {ch!r}", pos())
    toks.append(Token("eof", "", None, pos()))
    return toks

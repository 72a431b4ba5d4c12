"""Tokenizer with a deliberately small line-based preprocessor.

There is no external preprocessor: `#include <...>` of the known standard
headers is dropped (their supported declarations are built in), quoted
includes of user files are inlined, and object-like `#define` macros with
constant bodies are substituted at the token level.  Anything else is a
frontend error.
"""

from __future__ import annotations

import os
import re
from dataclasses import dataclass

from ..lang import FrontendError, SourceLocation

KEYWORDS = {
    "int", "char", "short", "long", "signed", "unsigned", "void", "_Bool",
    "if", "else", "while", "for", "break", "continue", "return",
}

KNOWN_HEADERS = {
    "assert.h", "stdio.h", "stdlib.h", "pthread.h", "limits.h", "stdbool.h",
}

_PUNCTUATORS = [
    "<<=", ">>=", "<<", ">>", "<=", ">=", "==", "!=", "&&", "||", "++", "--",
    "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=",
    "(", ")", "{", "}", "[", "]", ";", ",", "=", "<", ">", "+", "-", "*", "/",
    "%", "&", "|", "^", "!", "~", "?", ":",
]
_PUNCT_RE = re.compile("|".join(re.escape(p) for p in _PUNCTUATORS))
_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_NUMBER_RE = re.compile(r"0[xX][0-9a-fA-F]+|[0-9]+[uUlL]*")

_ESCAPES = {"n": 10, "t": 9, "r": 13, "0": 0, "\\": 92, "'": 39, '"': 34, "a": 7, "b": 8}


@dataclass
class Token:
    kind: str  # ident, keyword, number, char, string, punct, eof
    text: str
    value: int
    loc: SourceLocation


def _strip_comments(source, filename):
    out = []
    i, n = 0, len(source)
    in_block = False
    while i < n:
        c = source[i]
        if in_block:
            if source.startswith("*/", i):
                in_block = False
                i += 2
            else:
                out.append("\n" if c == "\n" else " ")
                i += 1
        elif source.startswith("//", i):
            while i < n and source[i] != "\n":
                i += 1
        elif source.startswith("/*", i):
            in_block = True
            i += 2
        elif c in "\"'":
            quote = c
            out.append(c)
            i += 1
            while i < n:
                out.append(source[i])
                if source[i] == "\\" and i + 1 < n:
                    out.append(source[i + 1])
                    i += 2
                    continue
                if source[i] == quote:
                    i += 1
                    break
                i += 1
        else:
            out.append(c)
            i += 1
    if in_block:
        raise FrontendError("unterminated block comment", SourceLocation(filename, 1))
    return "".join(out)


class Lexer:
    def __init__(self, source, filename, defines=None, include_paths=()):
        self.defines = dict(defines or {})  # name -> token list (or None)
        self.include_paths = list(include_paths)
        self.tokens: list[Token] = []
        self._lex_file(source, filename)
        last = self.tokens[-1].loc if self.tokens else SourceLocation(filename, 1)
        self.tokens.append(Token("eof", "", 0, last))

    def _lex_file(self, source, filename):
        source = _strip_comments(source, filename)
        for lineno, line in enumerate(source.split("\n"), start=1):
            loc = SourceLocation(filename, lineno)
            stripped = line.strip()
            if stripped.startswith("#"):
                self._directive(stripped, loc)
            else:
                self._lex_line(line, loc)

    def _directive(self, line, loc):
        m = re.match(r"#\s*(\w+)\s*(.*)", line)
        if not m:
            raise FrontendError(f"malformed preprocessor directive: {line}", loc)
        name, rest = m.group(1), m.group(2).strip()
        if name == "include":
            self._include(rest, loc)
        elif name == "define":
            self._define(rest, loc)
        else:
            raise FrontendError(f"unsupported preprocessor directive #{name}", loc)

    def _include(self, rest, loc):
        m = re.match(r"<([^>]+)>", rest)
        if m:
            header = m.group(1)
            if header not in KNOWN_HEADERS:
                raise FrontendError(f"unknown system header <{header}>", loc)
            return  # built-in declarations are injected by the typechecker
        m = re.match(r'"([^"]+)"', rest)
        if not m:
            raise FrontendError(f"malformed #include: {rest}", loc)
        name = m.group(1)
        for base in [os.path.dirname(loc.file) or "."] + self.include_paths:
            path = os.path.join(base, name)
            if os.path.exists(path):
                with open(path, encoding="utf-8") as f:
                    self._lex_file(f.read(), path)
                return
        raise FrontendError(f'include file "{name}" not found', loc)

    def _define(self, rest, loc):
        m = re.match(r"([A-Za-z_]\w*)(?:\s+(.*))?$", rest)
        if not m or (rest and "(" in rest.split()[0]):
            raise FrontendError(f"unsupported #define: {rest}", loc)
        name, body = m.group(1), (m.group(2) or "").strip()
        body_tokens = []
        if body:
            sub = Lexer.__new__(Lexer)
            sub.defines, sub.include_paths, sub.tokens = {}, [], []
            sub._lex_line(body, loc)
            body_tokens = sub.tokens
        self.defines[name] = body_tokens

    def _lex_line(self, line, loc):
        i, n = 0, len(line)
        while i < n:
            c = line[i]
            if c in " \t\r\f\v":
                i += 1
                continue
            m = _IDENT_RE.match(line, i)
            if m:
                text = m.group()
                i = m.end()
                if text in self.defines:
                    for tok in self.defines[text]:
                        self.tokens.append(Token(tok.kind, tok.text, tok.value, loc))
                    continue
                kind = "keyword" if text in KEYWORDS else "ident"
                self.tokens.append(Token(kind, text, 0, loc))
                continue
            m = _NUMBER_RE.match(line, i)
            if m:
                text = m.group()
                i = m.end()
                digits = text.rstrip("uUlL")
                value = int(digits, 16) if digits.lower().startswith("0x") else int(digits)
                self.tokens.append(Token("number", text, value, loc))
                continue
            if c == "'":
                value, i = self._char_literal(line, i, loc)
                self.tokens.append(Token("char", line[i - 1], value, loc))
                continue
            if c == '"':
                text, i = self._string_literal(line, i, loc)
                self.tokens.append(Token("string", text, 0, loc))
                continue
            m = _PUNCT_RE.match(line, i)
            if m:
                self.tokens.append(Token("punct", m.group(), 0, loc))
                i = m.end()
                continue
            raise FrontendError(f"unexpected character {c!r}", loc)

    def _char_literal(self, line, i, loc):
        i += 1
        if i >= len(line):
            raise FrontendError("unterminated character literal", loc)
        if line[i] == "\\":
            i += 1
            esc = line[i] if i < len(line) else ""
            if esc not in _ESCAPES:
                raise FrontendError(f"unsupported escape \\{esc}", loc)
            value = _ESCAPES[esc]
            i += 1
        else:
            value = ord(line[i])
            i += 1
        if i >= len(line) or line[i] != "'":
            raise FrontendError("unterminated character literal", loc)
        return value, i + 1

    def _string_literal(self, line, i, loc):
        i += 1
        chars = []
        while i < len(line) and line[i] != '"':
            if line[i] == "\\":
                i += 1
                esc = line[i] if i < len(line) else ""
                if esc not in _ESCAPES:
                    raise FrontendError(f"unsupported escape \\{esc}", loc)
                chars.append(chr(_ESCAPES[esc]))
                i += 1
            else:
                chars.append(line[i])
                i += 1
        if i >= len(line):
            raise FrontendError("unterminated string literal", loc)
        return "".join(chars), i + 1


def parse_define_option(text):
    """-D name or -D name=value from the command line."""
    if "=" in text:
        name, value = text.split("=", 1)
    else:
        name, value = text, "1"
    sub = Lexer(value, "<command-line>")
    return name, sub.tokens[:-1]

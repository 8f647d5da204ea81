"""Maximal-munch C99 tokenizer."""

from __future__ import annotations

import re

from .tokens import KEYWORDS, FrontendError, SourceSpan, Token

PUNCTUATORS = sorted(
    """
    ... <<= >>= -> ++ -- << >> <= >= == != && || *= /= %= += -= &= ^= |= ##
    [ ] ( ) { } . & * + - ~ ! / % < > ^ | ? : ; = , #
    """.split(),
    key=len,
    reverse=True,
)

_IDENT = re.compile(r"[A-Za-z_][A-Za-z_0-9]*")
_PPNUMBER = re.compile(r"\.?[0-9](?:[eEpP][+-]|[A-Za-z_0-9.])*")
INT_RE = re.compile(r"(0[xX][0-9a-fA-F]+|0[0-7]*|[1-9][0-9]*)([uUlL]*)$")
FLOAT_RE = re.compile(
    r"(?:(?:[0-9]*\.[0-9]+|[0-9]+\.)(?:[eE][+-]?[0-9]+)?|[0-9]+[eE][+-]?[0-9]+)[fFlL]?$"
)
_INT_SUFFIXES = {"", "u", "l", "ul", "lu", "ll", "ull", "llu"}


def parse_int(text: str) -> tuple[int, str]:
    """Value and lower-cased suffix of an integer constant."""
    m = INT_RE.match(text)
    digits = m.group(1)
    if digits[:2] in ("0x", "0X"):
        value = int(digits, 16)
    elif digits.startswith("0") and len(digits) > 1:
        value = int(digits, 8)
    else:
        value = int(digits)
    return value, m.group(2).lower()


def classify_number(text: str) -> str | None:
    m = INT_RE.match(text)
    if m and m.group(2).lower() in _INT_SUFFIXES:
        return "integer-constant"
    if FLOAT_RE.match(text):
        return "floating-constant"
    return None


class Lexer:
    def __init__(self, text: str, file_id: str = "<input>"):
        self.text = text
        self.file_id = file_id
        self.pos = 0
        self.line = 1
        self.col = 1

    def error(self, message, line=None, col=None):
        span = SourceSpan(self.file_id, line or self.line, col or self.col, 1)
        return FrontendError(message, span)

    def advance(self, n: int):
        for ch in self.text[self.pos : self.pos + n]:
            if ch == "\n":
                self.line += 1
                self.col = 1
            else:
                self.col += 1
        self.pos += n

    def tokens(self) -> list[Token]:
        out: list[Token] = []
        text = self.text
        bol = True
        space = False
        trivia: list[str] = []
        while self.pos < len(text):
            ch = text[self.pos]
            if ch == "\n":
                self.advance(1)
                bol, space = True, False
                continue
            if ch in " \t\r\f\v":
                self.advance(1)
                space = True
                continue
            if ch == "\\" and text.startswith("\n", self.pos + 1):
                self.advance(2)
                space = True
                continue
            if text.startswith("//", self.pos):
                end = text.find("\n", self.pos)
                end = len(text) if end < 0 else end
                trivia.append(text[self.pos : end])
                self.advance(end - self.pos)
                space = True
                continue
            if text.startswith("/*", self.pos):
                end = text.find("*/", self.pos + 2)
                if end < 0:
                    raise self.error("unterminated comment")
                trivia.append(text[self.pos : end + 2])
                self.advance(end + 2 - self.pos)
                space = True
                continue

            line, col = self.line, self.col
            kind, length = self.scan(ch)
            lexeme = text[self.pos : self.pos + length]
            self.advance(length)
            out.append(
                Token(
                    kind,
                    lexeme,
                    SourceSpan(self.file_id, line, col, length),
                    trivia=tuple(trivia),
                    bol=bol,
                    space=space,
                )
            )
            bol = space = False
            trivia = []
        return out

    def scan(self, ch: str) -> tuple[str, int]:
        text, pos = self.text, self.pos
        if ch in "\"'" or (ch == "L" and text[pos + 1 : pos + 2] in ("'", '"')):
            return self.scan_quoted()
        m = _IDENT.match(text, pos)
        if m:
            word = m.group()
            return ("keyword" if word in KEYWORDS else "identifier"), len(word)
        m = _PPNUMBER.match(text, pos)
        if m:
            kind = classify_number(m.group())
            if kind is None:
                raise self.error(f"invalid numeric constant '{m.group()}'")
            return kind, len(m.group())
        for p in PUNCTUATORS:
            if text.startswith(p, pos):
                return "punctuator", len(p)
        raise self.error(f"stray character {ch!r}")

    def scan_quoted(self) -> tuple[str, int]:
        text, start = self.text, self.pos
        i = start + 1 if text[start] == "L" else start
        quote = text[i]
        i += 1
        while True:
            if i >= len(text) or text[i] == "\n":
                what = "string literal" if quote == '"' else "character constant"
                raise self.error(f"unterminated {what}")
            if text[i] == "\\":
                i += 2
                continue
            if text[i] == quote:
                break
            i += 1
        length = i + 1 - start
        if quote == "'":
            if length <= 2 + (text[start] == "L"):
                raise self.error("empty character constant")
            return "character-constant", length
        return "string-literal", length


def lex(text: str, file_id: str = "<input>") -> list[Token]:
    """Tokenize directive-free source text.

    Comments are kept as trivia on the token that follows them.
    """
    return Lexer(text, file_id).tokens()


_ESCAPES = {
    "n": 10, "t": 9, "r": 13, "0": 0, "a": 7, "b": 8, "f": 12, "v": 11,
    "\\": 92, "'": 39, '"': 34, "?": 63,
}


def decode_escapes(body: str) -> list[int]:
    """Return the code units denoted by the inside of a quoted literal."""
    out = []
    i = 0
    while i < len(body):
        c = body[i]
        if c != "\\":
            out.append(ord(c))
            i += 1
            continue
        nxt = body[i + 1]
        if nxt in "01234567":
            m = re.match(r"[0-7]{1,3}", body[i + 1 :])
            out.append(int(m.group(), 8) & 0xFF)
            i += 1 + len(m.group())
        elif nxt == "x":
            m = re.match(r"[0-9a-fA-F]+", body[i + 2 :])
            if not m:
                raise ValueError("\\x used with no following hex digits")
            out.append(int(m.group(), 16) & 0xFF)
            i += 2 + len(m.group())
        elif nxt in _ESCAPES:
            out.append(_ESCAPES[nxt])
            i += 2
        else:
            raise ValueError(f"unknown escape sequence '\\{nxt}'")
    return out

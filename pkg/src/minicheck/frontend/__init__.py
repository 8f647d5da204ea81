"""Lexing, preprocessing and parsing of MiniC sources."""

from __future__ import annotations

from .ast import TranslationUnit
from .lexer import lex
from .parser import parse
from .preprocessor import PreprocessResult, preprocess
from .tokens import (
    DIRECT,
    FrontendError,
    MacroOrigin,
    SourceSpan,
    Token,
    UnsupportedConstruct,
)


def parse_source(
    source: str,
    file_id: str = "<input>",
    defines=None,
    include_paths=(),
    typedef_names=(),
) -> TranslationUnit:
    """Preprocess and parse one translation unit."""
    pp = preprocess(source, defines=defines, include_paths=include_paths, file_id=file_id)
    unit = parse(pp.tokens, typedef_names=typedef_names)
    unit.conditionals = list(pp.conditionals)
    unit.includes = list(pp.includes)
    return unit


__all__ = [
    "DIRECT",
    "FrontendError",
    "MacroOrigin",
    "PreprocessResult",
    "SourceSpan",
    "Token",
    "TranslationUnit",
    "UnsupportedConstruct",
    "lex",
    "parse",
    "parse_source",
    "preprocess",
]

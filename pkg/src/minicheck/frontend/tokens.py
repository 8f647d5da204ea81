from __future__ import annotations

from dataclasses import dataclass, field

KEYWORDS = frozenset(
    """
    auto break case char const continue default do double else enum extern
    float for goto if inline int long register restrict return short signed
    sizeof static struct switch typedef union unsigned void volatile while
    _Bool
    """.split()
)

# C99 keywords that MiniC rejects outright.
UNSUPPORTED_KEYWORDS = frozenset({"_Complex", "_Imaginary"})

TOKEN_KINDS = (
    "identifier",
    "keyword",
    "integer-constant",
    "floating-constant",
    "character-constant",
    "string-literal",
    "punctuator",
)


@dataclass(frozen=True, order=True)
class SourceSpan:
    file_id: str
    line: int
    column: int
    length: int = 0

    def __post_init__(self):
        if self.line < 1 or self.column < 1 or self.length < 0:
            raise ValueError(f"invalid span {self!r}")

    def __str__(self):
        return f"{self.file_id}:{self.line}:{self.column}"


@dataclass(frozen=True)
class MacroStep:
    name: str
    definition: SourceSpan


@dataclass(frozen=True)
class MacroOrigin:
    """Chain of macro expansions that produced a token, outermost first.

    An empty chain means the token was written directly in the source.
    """

    chain: tuple[MacroStep, ...] = ()

    @property
    def direct(self) -> bool:
        return not self.chain

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(step.name for step in self.chain)

    def extend(self, name: str, definition: SourceSpan) -> MacroOrigin:
        return MacroOrigin(self.chain + (MacroStep(name, definition),))

    def render(self) -> str:
        return ">".join(self.names) if self.chain else "direct"


DIRECT = MacroOrigin()


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    span: SourceSpan
    origin: MacroOrigin = DIRECT
    # Comments immediately preceding the token; never interpreted.
    trivia: tuple[str, ...] = field(default=(), compare=False)
    # Preprocessor bookkeeping: first token on its line, whitespace before
    # it, and the set of macros that may no longer expand it.
    bol: bool = field(default=False, compare=False)
    space: bool = field(default=False, compare=False)
    hideset: frozenset = field(default=frozenset(), compare=False)

    def __post_init__(self):
        if not self.text:
            raise ValueError("token text must be non-empty")

    def is_punct(self, text: str) -> bool:
        return self.kind == "punctuator" and self.text == text

    def is_keyword(self, text: str) -> bool:
        return self.kind == "keyword" and self.text == text


class FrontendError(Exception):
    """Fatal lexing, preprocessing or parsing error."""

    def __init__(self, message: str, span: SourceSpan | None = None):
        super().__init__(message)
        self.message = message
        self.span = span

    def __str__(self):
        if self.span is None:
            return self.message
        return f"{self.span}: {self.message}"


class UnsupportedConstruct(FrontendError):
    """Valid C that lies outside the MiniC subset."""

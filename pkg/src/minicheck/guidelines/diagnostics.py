"""Findings and their verdicts."""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional

from ..frontend.tokens import DIRECT, MacroOrigin, SourceSpan
from .registry import rule_key

DEFINITE = "definite"
POSSIBLE = "possible"
OVER = "over-approx"
UNDER = "under-approx"
EXACT = "exact"


@dataclass(frozen=True)
class Verdict:
    kind: str  # definite | possible
    relation: str  # over-approx | under-approx | exact

    def __post_init__(self):
        if self.kind not in (DEFINITE, POSSIBLE):
            raise ValueError(f"bad verdict kind {self.kind!r}")
        if self.relation not in (OVER, UNDER, EXACT):
            raise ValueError(f"bad relation {self.relation!r}")


@dataclass(frozen=True)
class Diagnostic:
    rule_id: str
    check_id: str
    verdict: Verdict
    span: SourceSpan
    message: str
    origin: MacroOrigin = DIRECT
    suppressed_by: Optional[str] = None

    @property
    def definite(self) -> bool:
        return self.verdict.kind == DEFINITE

    def sort_key(self):
        s = self.span
        return (s.file_id, s.line, s.column, rule_key(self.rule_id), self.check_id, self.message,
                self.verdict.kind, self.verdict.relation, self.origin.render(), self.suppressed_by or "")

    def suppressed(self, ref: str) -> "Diagnostic":
        return replace(self, suppressed_by=ref)


def make(rule_id, check_id, kind, relation, node_or_span, message) -> Diagnostic:
    """Diagnostic located at a node (taking its origin) or a bare span."""
    if isinstance(node_or_span, SourceSpan):
        span, origin = node_or_span, DIRECT
    else:
        span, origin = node_or_span.span, node_or_span.origin
    return Diagnostic(rule_id, check_id, Verdict(kind, relation), span, message, origin)


def sort_diagnostics(diags) -> list[Diagnostic]:
    return sorted(set(diags), key=Diagnostic.sort_key)

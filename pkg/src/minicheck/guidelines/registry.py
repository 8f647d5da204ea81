"""Metadata for the 37 undecidable MISRA C:2012 rules.

Each row records why the rule is undecidable, which kinds of sound
approximation are available and how good they are (grades "none", "∘",
"∘∘", "∘∘∘"), and which check of this package, if any, implements one.
"""

from __future__ import annotations

from dataclasses import dataclass
from types import MappingProxyType
from typing import Mapping, Optional

CATEGORIES = ("mandatory", "required", "advisory")
CAUSES = ("flow", "numeric", "pointee", "side-effects")
APPROXIMATIONS = ("flow-insensitive", "type-based", "other")
GRADES = ("none", "∘", "∘∘", "∘∘∘")


@dataclass(frozen=True)
class GuidelineInfo:
    id: str
    category: str
    undecidability_causes: frozenset
    approx_available: Mapping[str, str]
    needs_coverage: bool = False
    not_provable: bool = False
    definition_issues: bool = False
    implemented_check: Optional[str] = None

    def grade(self, approximation: str) -> str:
        return self.approx_available[approximation]


def _row(rule, category, causes, fi=0, ty=0, other=0, coverage=False,
         not_provable=False, definition=False, check=None) -> GuidelineInfo:
    grades = {"flow-insensitive": GRADES[fi], "type-based": GRADES[ty], "other": GRADES[other]}
    return GuidelineInfo(
        id=rule,
        category=category,
        undecidability_causes=frozenset(causes.split()) if causes else frozenset(),
        approx_available=MappingProxyType(grades),
        needs_coverage=coverage,
        not_provable=not_provable,
        definition_issues=definition,
        implemented_check=check,
    )


M, R, A = CATEGORIES
_F, _FN, _FP, _FNP = "flow", "flow numeric", "flow pointee", "flow numeric pointee"

_ROWS = (
    _row("R1.2", A, "", definition=True),
    _row("R1.3", R, "flow numeric pointee side-effects"),
    _row("R2.1", R, _F, coverage=True, check="unreachable-code-r2-1"),
    _row("R2.2", R, _F, not_provable=True, definition=True),
    _row("R8.13", A, _F, ty=3, check="const-candidates-r8-13"),
    _row("R9.1", M, _FP, other=1, check="init-at-decl-r9-1"),
    _row("R12.2", R, _FN),
    _row("R13.1", R, "flow side-effects", fi=1, other=3),
    _row("R13.2", R, "flow pointee side-effects", other=1, definition=True),
    _row("R13.5", R, "flow side-effects", fi=1, other=3),
    _row("R14.1", R, _FN, other=1, check="determinate-for-r14-1-2"),
    _row("R14.2", R, _FNP, other=1, check="determinate-for-r14-1-2"),
    _row("R14.3", R, _F, coverage=True, check="invariant-condition-r14-3"),
    _row("R17.2", R, _FP, ty=1, check="no-recursion-r17-2"),
    _row("R17.5", A, _FP),
    _row("R17.8", A, _FP, ty=3, check="readonly-params-r17-8"),
    _row("R18.1", R, _FNP),
    _row("R18.2", R, _FP, fi=1),
    _row("R18.3", R, _FP, fi=1),
    _row("R18.6", R, _FP, other=1),
    _row("R19.1", M, _FP, fi=1),
    _row("R21.13", M, _FN, ty=2, check="eof-domain-r21-13"),
    _row("R21.14", R, _FP, ty=2, check="cstring-r21-14-19"),
    _row("R21.17", M, _FNP),
    _row("R21.18", M, _FNP),
    _row("R21.19", M, _FP, ty=2, check="cstring-r21-14-19"),
    _row("R21.20", M, _FP),
    _row("R22.1", R, _FP, other=1, check="stream-ownership-r22-1"),
    _row("R22.2", M, _FP, other=1),
    _row("R22.3", R, _F, definition=True),
    _row("R22.4", M, _FP, ty=2),
    _row("R22.5", M, _F, fi=2, check="file-deref-r22-5"),
    _row("R22.6", M, _F, other=1),
    _row("R22.7", R, _F, ty=2),
    _row("R22.8", R, _F, other=2, check="errno-protocol-r22-8-9-10"),
    _row("R22.9", R, _F, other=2, check="errno-protocol-r22-8-9-10"),
    _row("R22.10", R, _F, other=2, check="errno-protocol-r22-8-9-10"),
)

_BY_ID = {g.id: g for g in _ROWS}


def registry() -> list[GuidelineInfo]:
    """All rows, in rule-number order."""
    return list(_ROWS)


def lookup(rule_id: str) -> Optional[GuidelineInfo]:
    return _BY_ID.get(rule_id)


def rule_key(rule_id: str) -> tuple:
    """Natural sort key: R2.2 < R14.1 < R22.10 < non-rule ids."""
    if rule_id.startswith("R"):
        try:
            return (0,) + tuple(int(p) for p in rule_id[1:].split(".")) + ("",)
        except ValueError:
            pass
    return (1, rule_id)


def check_ids() -> list[str]:
    return sorted({g.implemented_check for g in _ROWS if g.implemented_check})


def render_table(rows=None) -> str:
    """Aligned text transcription, one rule per line."""
    rows = registry() if rows is None else rows
    header = ("rule", "category", "causes", "flow-ins", "type", "other", "cov", "np", "def", "check")
    body = []
    for g in rows:
        body.append((
            g.id,
            g.category,
            ",".join(c for c in CAUSES if c in g.undecidability_causes) or "-",
            g.approx_available["flow-insensitive"],
            g.approx_available["type-based"],
            g.approx_available["other"],
            "x" if g.needs_coverage else "-",
            "x" if g.not_provable else "-",
            "x" if g.definition_issues else "-",
            g.implemented_check or "-",
        ))
    widths = [max(len(r[i]) for r in [header] + body) for i in range(len(header))]
    lines = ["  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in [header] + body]
    return "\n".join(lines) + "\n"

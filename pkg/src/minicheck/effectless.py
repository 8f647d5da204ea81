"""Effectless code: detection, justification and reporting.

An operation is effectless when removing it would not change what the
program does.  Such code is *justified* when it is the by-product of an
abstraction (a macro, a sizeof, a regular enumeration, loop control, a
configuration-dependent function) or when a ledger entry records the human
judgment; otherwise it is *unjustified*.
"""

from __future__ import annotations

import os
import re
from dataclasses import dataclass, field
from typing import Optional

from .frontend import ast
from .frontend.tokens import DIRECT, MacroOrigin, SourceSpan
from .guidelines.common import own_exprs, strip_casts
from .guidelines.checks import lvalue_root, modified_target
from .guidelines.diagnostics import POSSIBLE, UNDER, Diagnostic, Verdict
from .sema import types as T
from .sema.consteval import fold

CHECK_ID = "effectless"

NO_EFFECT_STATEMENT = "no-effect-expression-statement"
NEUTRAL_OPERAND = "neutral-operand-operation"
DEAD_STORE = "dead-store"
NO_EFFECT_CALL = "no-effect-call-candidate"

MACRO = "macro-abstraction"
SIZEOF = "sizeof-abstraction"
ENUM_SERIES = "enum-series"
LOOP_CONTROL = "loop-control"
CONFIG_FUNCTION = "config-function"
LEDGER = "ledger-entry"

JUSTIFIED = "justified"
UNJUSTIFIED = "unjustified"

DIRECTIVE = "directive"
STRICT_R2_2 = "strict-r2-2"
MODES = (DIRECTIVE, STRICT_R2_2)


class LedgerError(ValueError):
    pass


@dataclass(frozen=True)
class LedgerEntry:
    file: str
    line: int
    check_id: str
    reason: str
    author: Optional[str]
    ref: str

    def matches(self, span: SourceSpan, check_id: str) -> bool:
        if self.line != span.line or self.check_id != check_id:
            return False
        if self.file == span.file_id:
            return True
        return "/" not in self.file and os.path.basename(span.file_id) == self.file


@dataclass
class JustificationLedger:
    entries: list[LedgerEntry] = field(default_factory=list)

    _LINE = re.compile(r"^(?P<file>[^:\s][^:]*):(?P<line>[0-9]+):(?P<check>[a-z0-9.\-]+):\s*(?P<reason>\S.*)$")

    @classmethod
    def parse(cls, text: str, known_checks, source: str = "<ledger>") -> "JustificationLedger":
        entries = []
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            m = cls._LINE.match(line)
            if m is None:
                raise LedgerError(f"{source}:{lineno}: malformed ledger entry")
            if m["check"] not in known_checks:
                raise LedgerError(f"{source}:{lineno}: unknown check id '{m['check']}'")
            reason, author = m["reason"].strip(), None
            tail = re.search(r"\s@(\S+)$", reason)
            if tail:
                author, reason = tail.group(1), reason[: tail.start()].rstrip()
            entries.append(LedgerEntry(m["file"], int(m["line"]), m["check"], reason, author, f"{source}:{lineno}"))
        return cls(entries)

    @classmethod
    def load(cls, path: str, known_checks) -> "JustificationLedger":
        with open(path, encoding="utf-8") as fh:
            return cls.parse(fh.read(), known_checks, path)

    def lookup(self, span: SourceSpan, check_id: str) -> Optional[LedgerEntry]:
        for e in self.entries:
            if e.matches(span, check_id):
                return e
        return None

    def apply(self, diagnostics) -> list[Diagnostic]:
        """Mark matching diagnostics as suppressed; nothing is dropped."""
        out = []
        for d in diagnostics:
            e = self.lookup(d.span, d.check_id)
            out.append(d.suppressed(e.ref) if e is not None and d.suppressed_by is None else d)
        return out


@dataclass(eq=False)
class EffectlessFinding:
    node: ast.Node
    operation_kind: str
    message: str
    # Neutral-operand findings: the neutral operand and its origin.
    neutral_operand: Optional[ast.Expr] = None
    neutral_origin: MacroOrigin = DIRECT
    # Set when a neutral-operand operation is also an unused statement.
    statement_unused: bool = False
    symbol: object = None
    classification: Optional[str] = None
    reason: Optional[str] = None
    ledger_ref: Optional[str] = None

    @property
    def span(self) -> SourceSpan:
        return self.node.span

    @property
    def justified(self) -> bool:
        return self.classification == JUSTIFIED


# -- detection -----------------------------------------------------------------


def has_side_effect(unit, e) -> bool:
    for n in e.walk():
        if isinstance(n, (ast.Assign, ast.Call)) or modified_target(n) is not None:
            return True
        if isinstance(n, ast.Expr) and n in unit.expr_types:
            t = unit.type_of(n)
            if t.volatile and isinstance(n, (ast.Ident, ast.Unary, ast.Index, ast.Member)):
                return True
    return False


def _all_ones(value, t) -> bool:
    if not isinstance(t, (T.IntType, T.EnumType)):
        return False
    return value == -1 if t.signed else value == (1 << t.width) - 1


def neutral_operand(unit, e) -> Optional[ast.Expr]:
    """The operand that makes ``e`` a no-op, if any."""
    if isinstance(e, ast.Binary):
        op, left, right = e.op, e.left, e.right
        optype = unit.arith_types.get(e, unit.type_of(e))
    elif isinstance(e, ast.Assign) and e.op != "=":
        op, left, right = e.op[:-1], None, e.value
        optype = unit.arith_types.get(e, unit.type_of(e.target))
    else:
        return None
    lv = fold(unit, left) if left is not None else None
    rv = fold(unit, right)
    if op in ("+", "|", "^"):
        if rv == 0:
            return right
        if lv == 0:
            return left
    elif op in ("-", "<<", ">>"):
        if rv == 0:
            return right
    elif op == "*":
        if rv == 1:
            return right
        if lv == 1:
            return left
    elif op == "/":
        if rv == 1:
            return right
    elif op == "&":
        if rv is not None and _all_ones(rv, optype):
            return right
        if lv is not None and _all_ones(lv, optype):
            return left
    return None


def _origin_of(node) -> MacroOrigin:
    for n in node.walk():
        if not n.origin.direct:
            return n.origin
    return DIRECT


def _is_empty(stmt) -> bool:
    if isinstance(stmt, ast.Compound):
        return all(_is_empty(s) for s in stmt.items)
    return isinstance(stmt, ast.ExprStmt) and stmt.expr is None


def _op_text(e) -> str:
    return e.op if isinstance(e, (ast.Binary, ast.Assign)) else type(e).__name__


def detect_effectless(unit, facts) -> list[EffectlessFinding]:
    found: list[EffectlessFinding] = []
    merged = set()
    for n in unit.ast.walk():
        if isinstance(n, ast.ExprStmt) and n.expr is not None:
            e = n.expr
            if isinstance(e, ast.Cast) and isinstance(unit.type_of(e), T.VoidType):
                continue  # explicit discard
            if has_side_effect(unit, e):
                continue
            neutral = neutral_operand(unit, e)
            if neutral is not None:
                merged.add(e)
                found.append(_neutral(unit, e, neutral, statement_unused=True))
            else:
                found.append(EffectlessFinding(e, NO_EFFECT_STATEMENT, "expression statement has no effect"))
    for n in unit.ast.walk():
        if isinstance(n, (ast.Binary, ast.Assign)) and n not in merged:
            neutral = neutral_operand(unit, n)
            if neutral is not None:
                found.append(_neutral(unit, n, neutral))
    functions = unit.functions
    for n in unit.ast.walk():
        if isinstance(n, ast.Call):
            sym = unit.callee(n)
            fn = functions.get(sym.name) if sym is not None and not sym.builtin else None
            if fn is not None and _is_empty(fn.body):
                found.append(EffectlessFinding(n, NO_EFFECT_CALL, f"call to '{fn.name}' whose body is empty"))
    stmts = None
    for owner, sym in sorted(facts.dead_stores, key=lambda k: (k[0], k[1].name)):
        if stmts is None:
            stmts = {s.stmt_id: s for s in unit.ast.statements()}
        store = _store_node(unit, stmts[owner], sym)
        if store is not None:
            found.append(EffectlessFinding(store, DEAD_STORE, f"value stored to '{sym.name}' is never read",
                                           symbol=sym))
    return found


def _neutral(unit, e, neutral, statement_unused=False) -> EffectlessFinding:
    value = fold(unit, neutral)
    what = "unused expression statement; " if statement_unused else ""
    return EffectlessFinding(
        e, NEUTRAL_OPERAND, f"{what}operation '{_op_text(e)}' has neutral operand {value}",
        neutral_operand=neutral, neutral_origin=_origin_of(neutral), statement_unused=statement_unused,
    )


def _store_node(unit, stmt, sym):
    for n in own_exprs(stmt):
        target = modified_target(n)
        if target is not None:
            root = lvalue_root(unit, target)
            if root is not None and unit.symbol_of(root) is sym:
                return n
    return None


# -- classification --------------------------------------------------------------


def _enum_series(unit, e) -> bool:
    p = unit.parent(e)
    if not isinstance(p, ast.Enumerator) or not isinstance(e, ast.Binary):
        return False
    spec = unit.parent(p)
    siblings = [
        x for x in (spec.enumerators or ())
        if x is not p and isinstance(x.value, ast.Binary) and x.value.op == e.op
    ]
    return len(siblings) >= 2


def _loop_control(unit, f: EffectlessFinding) -> bool:
    sym = f.symbol
    for a in unit.ancestors(f.node):
        if isinstance(a, (ast.While, ast.DoWhile, ast.For)):
            parts = [a.cond] + ([a.step] if isinstance(a, ast.For) else [])
            for part in parts:
                if part is not None and any(
                    isinstance(n, ast.Ident) and unit.symbol_of(n) is sym for n in part.walk()
                ):
                    return True
    return False


def _config_function(unit, call) -> bool:
    fn = unit.functions[unit.callee(call).name]
    first, last = fn.span, fn.end_span
    return any(
        c.file_id == first.file_id and first.line <= c.line <= last.line
        for c in unit.ast.conditionals
    )


def _abstraction(unit, f: EffectlessFinding) -> Optional[str]:
    if f.operation_kind == NEUTRAL_OPERAND:
        if not f.neutral_origin.direct:
            return MACRO
        if isinstance(strip_casts(f.neutral_operand), (ast.SizeofExpr, ast.SizeofType)):
            return SIZEOF
        if _enum_series(unit, f.node):
            return ENUM_SERIES
        return None
    if not f.node.origin.direct:
        return MACRO
    if f.operation_kind == DEAD_STORE and _loop_control(unit, f):
        return LOOP_CONTROL
    if f.operation_kind == NO_EFFECT_CALL and _config_function(unit, f.node):
        return CONFIG_FUNCTION
    return None


def classify(unit, finding: EffectlessFinding, ledger: Optional[JustificationLedger] = None) -> EffectlessFinding:
    reason = _abstraction(unit, finding)
    if reason is None and ledger is not None:
        entry = ledger.lookup(finding.span, CHECK_ID)
        if entry is not None:
            reason, finding.ledger_ref = LEDGER, entry.ref
    finding.classification = JUSTIFIED if reason else UNJUSTIFIED
    finding.reason = reason
    return finding


def analyze_effectless(unit, facts, ledger=None) -> list[EffectlessFinding]:
    out = [classify(unit, f, ledger) for f in detect_effectless(unit, facts)]
    out.sort(key=lambda f: (f.span.file_id, f.span.line, f.span.column, f.operation_kind))
    return out


def report_mode(findings, mode: str) -> list[Diagnostic]:
    if mode not in MODES:
        raise ValueError(f"unknown effectless mode {mode!r}")
    out = []
    for f in findings:
        status = f"justified: {f.reason}" if f.justified else "unjustified"
        message = f"{f.operation_kind}: {f.message} ({status})"
        if mode == DIRECTIVE:
            if f.justified and f.reason != LEDGER:
                continue
            rule = "D-EFFECTLESS"
        else:
            rule = "R2.2"
        out.append(Diagnostic(rule, CHECK_ID, Verdict(POSSIBLE, UNDER), f.span, message,
                              f.node.origin, f.ledger_ref))
    return out

"""Dynamic coverage as compliance evidence for reachability rules.

Statement and branch counts produced by an external test run are merged
with static reachability: a statement no test executed is either provably
unreachable (a finding in its own right) or simply not yet covered.
"""

from __future__ import annotations

import os
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Optional

from .frontend import ast
from .frontend.tokens import FrontendError
from .guidelines.diagnostics import DEFINITE, EXACT, OVER, POSSIBLE, Diagnostic, Verdict

CHECK_R2_1 = "unreachable-code-r2-1"
CHECK_R14_3 = "invariant-condition-r14-3"

COVERED = "covered"
STATIC_UNREACHABLE = "uncovered-statically-unreachable"
UNKNOWN = "uncovered-unknown"

BOTH_TAKEN = "both-taken"
ONE_SIDE_NEVER = "one-side-never"
CONSTANT = "statically-constant"


class CoverageError(ValueError):
    pass


class InternalSoundnessError(RuntimeError):
    """A statement ran although constant folding proved it unreachable."""


@dataclass
class CoverageMap:
    stmt_counts: dict = field(default_factory=dict)  # (file, line) -> count
    branch_counts: dict = field(default_factory=dict)  # (file, line, index) -> count
    provenance: str = ""

    def stmt_count(self, file_id: str, line: int) -> int:
        return _lookup(self.stmt_counts, file_id, (line,))

    def branch_count(self, file_id: str, line: int, index: int) -> int:
        return _lookup(self.branch_counts, file_id, (line, index))


def _same_file(recorded: str, file_id: str) -> bool:
    if recorded == file_id:
        return True
    return "/" not in recorded and os.path.basename(file_id) == recorded


def _lookup(table, file_id, rest) -> int:
    total = 0
    for key, count in table.items():
        if key[1:] == rest and _same_file(key[0], file_id):
            total += count
    return total


def _count(text: str, where: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise CoverageError(f"{where}: malformed coverage record") from None
    if value < 0:
        raise CoverageError(f"{where}: negative count")
    return value


def parse_coverage(text: str, source: str = "<coverage>") -> CoverageMap:
    """Parse ``S file line count`` and ``B file line index count`` records."""
    stmts: dict = defaultdict(int)
    branches: dict = defaultdict(int)
    notes = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        where = f"{source}:{lineno}"
        if not line:
            continue
        if line.startswith("#"):
            notes.append(line[1:].strip())
            continue
        parts = line.split()
        if parts[0] == "S" and len(parts) == 4:
            stmts[(parts[1], _count(parts[2], where))] += _count(parts[3], where)
        elif parts[0] == "B" and len(parts) == 5:
            key = (parts[1], _count(parts[2], where), _count(parts[3], where))
            branches[key] += _count(parts[4], where)
        else:
            raise CoverageError(f"{where}: malformed coverage record")
    return CoverageMap(dict(stmts), dict(branches), "\n".join(n for n in notes if n))


def load_coverage(path: str) -> CoverageMap:
    with open(path, encoding="utf-8") as fh:
        return parse_coverage(fh.read(), path)


@dataclass(frozen=True)
class StatementEvidence:
    stmt_id: int
    file: str
    line: int
    status: str


@dataclass(frozen=True)
class BranchEvidence:
    file: str
    line: int
    decision: int  # per-line decision number; branch indices 2k / 2k+1
    true_count: int
    false_count: int
    status: str
    stmt_id: int  # statement owning the decision


@dataclass
class EvidenceReport:
    statements: list[StatementEvidence] = field(default_factory=list)
    branches: list[BranchEvidence] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)
    provenance: str = ""

    @property
    def r2_1_open(self) -> list[StatementEvidence]:
        return [s for s in self.statements if s.status != COVERED]

    @property
    def r2_1_pass(self) -> bool:
        return not self.r2_1_open

    @property
    def r14_3_open(self) -> list[BranchEvidence]:
        return [b for b in self.branches if b.status != BOTH_TAKEN]

    @property
    def r14_3_pass(self) -> bool:
        return not self.r14_3_open

    def render_text(self) -> str:
        lines = []
        if self.provenance:
            lines.append(f"evidence provenance: {self.provenance.splitlines()[0]}")
        lines.append(f"evidence R2.1: {'pass' if self.r2_1_pass else 'open'} "
                     f"({len(self.statements)} statements, {len(self.r2_1_open)} open)")
        for s in self.r2_1_open:
            lines.append(f"  {s.file}:{s.line}: statement {s.stmt_id} {s.status}")
        lines.append(f"evidence R14.3: {'pass' if self.r14_3_pass else 'open'} "
                     f"({len(self.branches)} decisions, {len(self.r14_3_open)} open)")
        for b in self.r14_3_open:
            lines.append(f"  {b.file}:{b.line}: decision {b.decision} {b.status} "
                         f"(true {b.true_count}, false {b.false_count})")
        for w in self.warnings:
            lines.append(f"warning: {w}")
        return "\n".join(lines) + "\n"

    def records(self) -> list[dict]:
        """Machine-readable form, one object per evidence kind."""
        return [
            {
                "evidence": "R2.1",
                "pass": self.r2_1_pass,
                "open": [{"file": s.file, "line": s.line, "stmt": s.stmt_id, "status": s.status}
                         for s in self.r2_1_open],
            },
            {
                "evidence": "R14.3",
                "pass": self.r14_3_pass,
                "open": [{"file": b.file, "line": b.line, "decision": b.decision, "status": b.status,
                          "true": b.true_count, "false": b.false_count} for b in self.r14_3_open],
            },
            {"evidence": "warnings", "messages": list(self.warnings)},
        ]


def evidence_statements(unit) -> list[ast.Stmt]:
    """Statements that execute code (labels, blocks and empty
    statements do not)."""
    out = []
    for s in unit.ast.statements():
        if isinstance(s, (ast.Compound, ast.Labeled, ast.Case, ast.Default)):
            continue
        if isinstance(s, ast.ExprStmt) and s.expr is None:
            continue
        if isinstance(s, ast.DeclStmt) and all(d.init is None for d in s.decl.declarators):
            continue
        out.append(s)
    return out


def unreachable_functions(unit, annotations=()) -> set[str]:
    """Internal functions no entry point can call, directly or via a
    function pointer taken somewhere reachable."""
    functions = unit.functions
    refs = {}
    for name, fn in functions.items():
        refs[name] = {
            sym.name for n in fn.body.walk() if isinstance(n, ast.Ident)
            for sym in [unit.symbol_of(n)] if sym is not None and sym.storage == "function"
        }
    roots = {n for n in functions if not unit.declared[functions[n]].internal} | set(annotations)
    for item in unit.ast.items:
        if isinstance(item, ast.Declaration):
            for n in item.walk():
                sym = unit.symbol_of(n) if isinstance(n, ast.Ident) else None
                if sym is not None and sym.storage == "function":
                    roots.add(sym.name)
    seen, stack = set(), [r for r in roots if r in functions]
    while stack:
        f = stack.pop()
        if f in seen:
            continue
        seen.add(f)
        stack.extend(c for c in refs[f] if c in functions and c not in seen)
    return set(functions) - seen


def merge_evidence(unit, facts, coverage: Optional[CoverageMap] = None, annotations=()) -> EvidenceReport:
    coverage = coverage if coverage is not None else CoverageMap()
    report = EvidenceReport(provenance=coverage.provenance)
    dead_functions = unreachable_functions(unit, annotations)
    unreachable = facts.unreachable
    used_lines = set()
    for s in evidence_statements(unit):
        file_id, line = s.span.file_id, s.span.line
        used_lines.add((file_id, line))
        count = coverage.stmt_count(file_id, line)
        fn = unit.function_of.get(s.stmt_id)
        in_dead_function = fn is not None and fn.name in dead_functions
        if count > 0:
            if s.stmt_id in unreachable:
                raise InternalSoundnessError(
                    f"{file_id}:{line}: statement {s.stmt_id} executed but folded as unreachable")
            if in_dead_function:
                report.warnings.append(
                    f"{file_id}:{line}: '{fn.name}' executed but never called; annotate it as an entry point")
            status = COVERED
        elif s.stmt_id in unreachable or in_dead_function:
            status = STATIC_UNREACHABLE
        else:
            status = UNKNOWN
        report.statements.append(StatementEvidence(s.stmt_id, file_id, line, status))
    for name in sorted(facts.functions):
        ff = facts.functions[name]
        per_line: dict = defaultdict(int)
        for _, el in ff.cfg.elements():
            if el.kind != "cond":
                continue
            span = el.expr.span
            k = per_line[(span.file_id, span.line)]
            per_line[(span.file_id, span.line)] += 1
            t = coverage.branch_count(span.file_id, span.line, 2 * k)
            f = coverage.branch_count(span.file_id, span.line, 2 * k + 1)
            if el in ff.folded.values:
                status = CONSTANT
            elif t > 0 and f > 0:
                status = BOTH_TAKEN
            else:
                status = ONE_SIDE_NEVER
            report.branches.append(BranchEvidence(span.file_id, span.line, k, t, f, status, el.owner))
            used_lines.add((span.file_id, span.line))
    for (file_id, line) in sorted(coverage.stmt_counts):
        if not any(_same_file(file_id, f) and line == l for f, l in used_lines):
            report.warnings.append(f"{file_id}:{line}: coverage record for a line with no statement")
    return report


def evidence_diagnostics(unit, report: EvidenceReport, with_coverage: bool) -> list[Diagnostic]:
    """Definite findings for statically settled cases; with coverage
    evidence, possible findings for everything still open."""
    stmts = {s.stmt_id: s for s in unit.ast.statements()}
    out = []
    for s in report.statements:
        node = stmts[s.stmt_id]
        if s.status == STATIC_UNREACHABLE:
            out.append(Diagnostic("R2.1", CHECK_R2_1, Verdict(DEFINITE, EXACT), node.span,
                                  "statement is statically unreachable", node.origin))
        elif s.status == UNKNOWN and with_coverage:
            out.append(Diagnostic("R2.1", CHECK_R2_1, Verdict(POSSIBLE, OVER), node.span,
                                  "statement not covered by any test", node.origin))
    for b in report.branches:
        node = stmts[b.stmt_id]
        if b.status == CONSTANT:
            out.append(Diagnostic("R14.3", CHECK_R14_3, Verdict(DEFINITE, EXACT), node.span,
                                  f"controlling expression is invariant (decision {b.decision})", node.origin))
        elif b.status == ONE_SIDE_NEVER and with_coverage:
            side = "true" if b.true_count == 0 else "false"
            out.append(Diagnostic("R14.3", CHECK_R14_3, Verdict(POSSIBLE, OVER), node.span,
                                  f"{side} branch of decision {b.decision} never taken", node.origin))
    return out

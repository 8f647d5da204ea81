"""Command-line entry point: ``minicheck check|run|registry``."""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from typing import Optional

from . import coverage as cov
from . import effectless as eff
from .flow import CfgError, analyze
from .frontend import FrontendError
from .guidelines import CHECKS, PROFILES, STRICT, render_table, run_checks, sort_diagnostics
from .guidelines.diagnostics import DEFINITE
from .oracle import OracleError, run
from .sema import SemaError, load

EXIT_CLEAN = 0
EXIT_DEFINITE = 1
EXIT_POSSIBLE = 2
EXIT_ERROR = 3

FORMATS = ("text", "ndjson")
COVERAGE_CHECKS = (cov.CHECK_R2_1, cov.CHECK_R14_3)
ALL_CHECKS = tuple(CHECKS) + COVERAGE_CHECKS + (eff.CHECK_ID,)
EFFECTLESS_OFF = "off"
EFFECTLESS_MODES = eff.MODES + (EFFECTLESS_OFF,)


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    files: list = field(default_factory=list)
    defines: dict = field(default_factory=dict)
    include_paths: list = field(default_factory=list)
    profile: str = STRICT
    effectless: str = eff.DIRECTIVE
    enable: list = field(default_factory=list)
    disable: list = field(default_factory=list)
    coverage: Optional[str] = None
    ledger: Optional[str] = None
    annotations: Optional[str] = None
    format: str = "text"
    dump_cfg: bool = False

    def __post_init__(self):
        for cid in self.enable + self.disable:
            if cid not in ALL_CHECKS:
                raise UsageError(f"unknown check id '{cid}'")
        both = sorted(set(self.enable) & set(self.disable))
        if both:
            raise UsageError(f"check id '{both[0]}' is both enabled and disabled")

    @property
    def enabled(self) -> set:
        base = set(self.enable) if self.enable else set(ALL_CHECKS)
        return base - set(self.disable)


@dataclass
class Report:
    diagnostics: list = field(default_factory=list)
    evidence: list = field(default_factory=list)  # (file, EvidenceReport)
    cfg_dumps: list = field(default_factory=list)


# -- analysis ------------------------------------------------------------------


def parse_defines(items) -> dict:
    out = {}
    for item in items:
        name, eq, value = item.partition("=")
        if not name:
            raise UsageError(f"invalid define '{item}'")
        out[name] = value if eq else None
    return out


def load_annotations(path: Optional[str]) -> set:
    if path is None:
        return set()
    with open(path, encoding="utf-8") as fh:
        names = (line.split("#", 1)[0].strip() for line in fh)
        return {n for n in names if n}


def analyze_file(path: str, config: RunConfig, ledger, coverage_map, annotations, report: Report):
    with open(path, encoding="utf-8") as fh:
        source = fh.read()
    unit = load(source, path, config.defines, config.include_paths)
    facts = analyze(unit)
    if config.dump_cfg:
        report.cfg_dumps.append(facts.dump_cfgs())
    enabled = config.enabled
    diags = run_checks(unit, facts, config.profile, enabled & set(CHECKS))
    if eff.CHECK_ID in enabled and config.effectless != EFFECTLESS_OFF:
        findings = eff.analyze_effectless(unit, facts, ledger)
        diags += eff.report_mode(findings, config.effectless)
    evidence = cov.merge_evidence(unit, facts, coverage_map, annotations)
    diags += [d for d in cov.evidence_diagnostics(unit, evidence, coverage_map is not None)
              if d.check_id in enabled]
    if coverage_map is not None:
        report.evidence.append((path, evidence))
    if ledger is not None:
        diags = ledger.apply(diags)
    report.diagnostics.extend(diags)


def check(config: RunConfig) -> Report:
    ledger = None
    if config.ledger is not None:
        ledger = eff.JustificationLedger.load(config.ledger, ALL_CHECKS)
    coverage_map = cov.load_coverage(config.coverage) if config.coverage is not None else None
    annotations = load_annotations(config.annotations)
    report = Report()
    for path in config.files:
        analyze_file(path, config, ledger, coverage_map, annotations, report)
    report.diagnostics = sort_diagnostics(report.diagnostics)
    return report


def exit_code(diagnostics) -> int:
    live = [d for d in diagnostics if d.suppressed_by is None]
    if any(d.verdict.kind == DEFINITE for d in live):
        return EXIT_DEFINITE
    if live:
        return EXIT_POSSIBLE
    return EXIT_CLEAN


# -- rendering -------------------------------------------------------------------


def render_text_line(d) -> str:
    s = d.span
    extra = f", suppressed-by: {d.suppressed_by}" if d.suppressed_by else ""
    return (f"{s.file_id}:{s.line}:{s.column}: [{d.rule_id}][{d.verdict.kind}] {d.message} "
            f"(check: {d.check_id}, origin: {d.origin.render()}{extra})")


def diagnostic_record(d) -> dict:
    s = d.span
    return {
        "rule": d.rule_id,
        "check": d.check_id,
        "verdict": d.verdict.kind,
        "relation": d.verdict.relation,
        "file": s.file_id,
        "line": s.line,
        "col": s.column,
        "message": d.message,
        "origin": d.origin.render(),
        "suppressed_by": d.suppressed_by,
    }


def render(diagnostics, evidence=(), fmt: str = "text") -> str:
    lines = []
    if fmt == "ndjson":
        lines += [json.dumps(diagnostic_record(d), ensure_ascii=False) for d in diagnostics]
        for path, ev in evidence:
            for rec in ev.records():
                lines.append(json.dumps({"evidence": rec.pop("evidence"), "file": path, **rec},
                                        ensure_ascii=False))
    else:
        lines += [render_text_line(d) for d in diagnostics]
        for path, ev in evidence:
            lines.append(f"evidence file: {path}")
            lines += ev.render_text().splitlines()
    return "".join(line + "\n" for line in lines)


# -- command line ------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="minicheck", description="Decidable checks for undecidable MISRA C:2012 rules.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("check", help="analyze source files")
    c.add_argument("files", nargs="+", metavar="FILE")
    c.add_argument("-D", dest="defines", action="append", default=[], metavar="NAME[=VALUE]")
    c.add_argument("-I", dest="include_paths", action="append", default=[], metavar="DIR")
    c.add_argument("--profile", choices=PROFILES, default=STRICT)
    c.add_argument("--effectless", choices=EFFECTLESS_MODES, default=eff.DIRECTIVE)
    c.add_argument("--enable", action="append", default=[], metavar="ID")
    c.add_argument("--disable", action="append", default=[], metavar="ID")
    c.add_argument("--coverage", metavar="FILE")
    c.add_argument("--ledger", metavar="FILE")
    c.add_argument("--annotations", metavar="FILE")
    c.add_argument("--format", choices=FORMATS, default="text")
    c.add_argument("--dump-cfg", action="store_true")

    r = sub.add_parser("run", help="execute a function with the reference interpreter")
    r.add_argument("file", metavar="FILE")
    r.add_argument("--entry", required=True)
    r.add_argument("--args", default="")
    r.add_argument("--fuel", type=int, default=10_000)
    r.add_argument("-D", dest="defines", action="append", default=[], metavar="NAME[=VALUE]")
    r.add_argument("-I", dest="include_paths", action="append", default=[], metavar="DIR")

    sub.add_parser("registry", help="print the rule registry")
    return p


def _run_oracle(ns, out):
    try:
        args = [int(a) for a in ns.args.split(",") if a.strip()]
    except ValueError:
        raise UsageError(f"invalid --args '{ns.args}'") from None
    if ns.fuel <= 0:
        raise UsageError("--fuel must be positive")
    with open(ns.file, encoding="utf-8") as fh:
        unit = load(fh.read(), ns.file, parse_defines(ns.defines), ns.include_paths)
    out.write(run(unit, ns.entry, args, ns.fuel).dump())
    return EXIT_CLEAN


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        ns = build_parser().parse_args(argv)
        if ns.command == "registry":
            out.write(render_table())
            return EXIT_CLEAN
        if ns.command == "run":
            return _run_oracle(ns, out)
        config = RunConfig(
            files=ns.files,
            defines=parse_defines(ns.defines),
            include_paths=ns.include_paths,
            profile=ns.profile,
            effectless=ns.effectless,
            enable=ns.enable,
            disable=ns.disable,
            coverage=ns.coverage,
            ledger=ns.ledger,
            annotations=ns.annotations,
            format=ns.format,
            dump_cfg=ns.dump_cfg,
        )
        report = check(config)
    except UsageError as e:
        err.write(f"minicheck: usage error: {e}\n")
        return EXIT_ERROR
    except (FrontendError, SemaError, CfgError) as e:
        err.write(f"{e}\n")
        return EXIT_ERROR
    except (cov.CoverageError, eff.LedgerError, OracleError, cov.InternalSoundnessError) as e:
        err.write(f"minicheck: error: {e}\n")
        return EXIT_ERROR
    except OSError as e:
        err.write(f"minicheck: error: {e.filename}: {e.strerror}\n")
        return EXIT_ERROR
    for dump in report.cfg_dumps:
        out.write(dump + "\n")
    out.write(render(report.diagnostics, report.evidence, config.format))
    return exit_code(report.diagnostics)

"""Merge a coverage file with static reachability for the clamp example."""

from pathlib import Path

from minicheck import coverage as cov
from minicheck.flow import analyze
from minicheck.sema import load

HERE = Path(__file__).resolve().parent.parent / "tests" / "corpus" / "coverage"


def main():
    source = (HERE / "clamp.c").read_text()
    unit = load(source, "clamp.c")
    facts = analyze(unit)
    for name in ("clamp_full.cov", "clamp_missing.cov", None):
        coverage = cov.load_coverage(str(HERE / name)) if name else None
        report = cov.merge_evidence(unit, facts, coverage)
        print(f"== {name or 'no coverage'}")
        print(report.render_text())
        for d in cov.evidence_diagnostics(unit, report, coverage is not None):
            print(f"  {d.span.line}:{d.span.column} {d.rule_id} {d.verdict.kind}: {d.message}")


if __name__ == "__main__":
    main()

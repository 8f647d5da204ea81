"""Effectless findings on the corpus example, in both reporting modes."""

from pathlib import Path

from minicheck import effectless as eff
from minicheck.flow import analyze
from minicheck.sema import load

PATH = Path(__file__).resolve().parent.parent / "tests" / "corpus" / "listings" / "justified_effectless.c"


def main():
    unit = load(PATH.read_text(), PATH.name)
    findings = eff.analyze_effectless(unit, analyze(unit))
    for f in findings:
        print(f"{f.span.line}:{f.span.column} {f.operation_kind:28} {f.classification:11} {f.reason or '-'}")
    for mode in eff.MODES:
        print(f"{mode}: {len(eff.report_mode(findings, mode))} diagnostics")


if __name__ == "__main__":
    main()

"""Cross-module invariants checked on generated programs."""

from hypothesis import given, settings
from hypothesis import strategies as st

from minicheck import effectless as eff
from minicheck.flow import analyze
from minicheck.guidelines import HEURISTIC, STRICT, run_checks
from minicheck.guidelines.diagnostics import DEFINITE
from minicheck.oracle import sweep
from minicheck.sema import load
from progen import generate

SEEDS = st.integers(120, 10_000)


@given(SEEDS)
@settings(max_examples=40, deadline=None)
def test_executed_statements_are_never_unreachable(seed):
    unit = load(generate(seed), f"gen{seed}.c")
    facts = analyze(unit)
    assert not sweep(unit, "f").ever_executed & facts.unreachable


@given(SEEDS)
@settings(max_examples=40, deadline=None)
def test_live_stores_are_never_dead(seed):
    unit = load(generate(seed), f"gen{seed}.c")
    facts = analyze(unit)
    assert not sweep(unit, "f").witnessed_live_stores & facts.dead_stores


@given(SEEDS)
@settings(max_examples=40, deadline=None)
def test_analysis_is_deterministic(seed):
    src = generate(seed)
    a, b = analyze(load(src, "g.c")), analyze(load(src, "g.c"))
    assert a.unreachable == b.unreachable
    assert {(s, y.name) for s, y in a.dead_stores} == {(s, y.name) for s, y in b.dead_stores}
    assert a.dump_cfgs() == b.dump_cfgs()


@given(SEEDS)
@settings(max_examples=30, deadline=None)
def test_heuristic_definites_are_strict_definites(seed):
    unit = load(generate(seed), f"gen{seed}.c")
    facts = analyze(unit)

    def definite(profile):
        return {(d.rule_id, d.check_id, d.span) for d in run_checks(unit, facts, profile)
                if d.verdict.kind == DEFINITE}

    assert definite(HEURISTIC) <= definite(STRICT)


@given(SEEDS)
@settings(max_examples=30, deadline=None)
def test_directive_findings_are_strict_findings(seed):
    unit = load(generate(seed), f"gen{seed}.c")
    found = eff.analyze_effectless(unit, analyze(unit))
    directive = {(d.span, d.message) for d in eff.report_mode(found, eff.DIRECTIVE)}
    strict = {(d.span, d.message) for d in eff.report_mode(found, eff.STRICT_R2_2)}
    assert directive <= strict


@given(SEEDS)
@settings(max_examples=30, deadline=None)
def test_every_diagnostic_is_well_formed(seed):
    unit = load(generate(seed), f"gen{seed}.c")
    for d in run_checks(unit, analyze(unit), STRICT):
        assert d.verdict.kind in ("definite", "possible")
        assert d.span.line >= 1 and d.span.column >= 1
        assert d.message and d.check_id

"""Acceptance suite: one test per criterion.

Each test prints a single PASS/FAIL line; the same lines are repeated in
the terminal summary under "acceptance criteria".
"""

import hashlib
import os
import subprocess
import sys
import time
from contextlib import contextmanager

import pytest

from conftest import CORPUS, TESTS, cli, corpus_files
from minicheck import coverage as cov
from minicheck import effectless as eff
from minicheck.driver import RunConfig, check
from minicheck.flow import analyze
from minicheck.guidelines import HEURISTIC, STRICT, run_checks
from minicheck.oracle import sweep
from minicheck.sema import load
from progen import generate

LISTINGS = CORPUS / "listings"
COVERAGE = CORPUS / "coverage"


@contextmanager
def criterion(number, title, budget):
    start = time.perf_counter()
    ok = False
    try:
        yield
        elapsed = time.perf_counter() - start
        assert elapsed < budget, f"took {elapsed:.2f}s, budget {budget}s"
        ok = True
    finally:
        elapsed = time.perf_counter() - start
        print(f"criterion {number} ({title}): {'PASS' if ok else 'FAIL'} in {elapsed:.2f}s")


def _diags(path, **kw):
    return check(RunConfig(files=[str(path)], **kw)).diagnostics


# -- 1 ------------------------------------------------------------------------------


def _fixture_rows():
    rows = {}
    for line in (TESTS / "fixtures" / "rule_table.txt").read_text().splitlines():
        if line.startswith("#") or not line.strip():
            continue
        rule, category, *cells = line.split()
        causes = {c for c, x in zip(("flow", "numeric", "pointee", "side-effects"), cells[:4]) if x == "x"}
        grades = tuple(int(g) for g in cells[4:7])
        flags = tuple(x == "x" for x in cells[7:10])
        rows[rule] = (category, causes, grades, flags)
    return rows


def _registry_rows(text):
    glyph = {"none": 0, "∘": 1, "∘∘": 2, "∘∘∘": 3}
    rows = {}
    for line in text.splitlines()[1:]:
        rule, category, causes, fi, ty, other, c, np, d, _check = line.split()
        rows[rule] = (
            category,
            set() if causes == "-" else set(causes.split(",")),
            (glyph[fi], glyph[ty], glyph[other]),
            (c == "x", np == "x", d == "x"),
        )
    return rows


@pytest.mark.criterion(1, "registry fidelity")
def test_criterion_1_registry_fidelity():
    with criterion(1, "registry fidelity", 1.0):
        code, out, _ = cli("registry")
        assert code == 0
        rows = _registry_rows(out)
        assert len(rows) == 37
        cats = [r[0] for r in rows.values()]
        assert (cats.count("mandatory"), cats.count("required"), cats.count("advisory")) == (11, 22, 4)
        assert rows == _fixture_rows()


# -- 2 ------------------------------------------------------------------------------


def _golden(name, *extra):
    code, out, err = cli("check", f"{name}.c", *extra, cwd=LISTINGS)
    suffix = ".strict-r2-2" if extra else ""
    assert err == ""
    assert out == (LISTINGS / f"{name}{suffix}.expected").read_text()
    return code


@pytest.mark.criterion(2, "worked-example golden corpus")
def test_criterion_2_golden_corpus():
    with criterion(2, "worked-example golden corpus", 5.0):
        d = _diags(LISTINGS / "r22_5.c")
        deref = [x for x in d if x.check_id == "file-deref-r22-5"]
        assert [x.verdict.kind for x in deref] == ["definite"]

        for name in ("r17_8_example1", "r17_8_example2"):
            d = _diags(LISTINGS / f"{name}.c")
            found = [x for x in d if x.check_id == "readonly-params-r17-8"]
            assert [x.verdict.kind for x in found] == ["definite"], name

        d = _diags(LISTINGS / "transmit_octet.c", effectless=eff.STRICT_R2_2)
        assert not [x for x in d if x.message.startswith(eff.DEAD_STORE)]
        assert not [x for x in d if x.check_id == "determinate-for-r14-1-2"]
        unit = load((LISTINGS / "transmit_octet.c").read_text(), "transmit_octet.c")
        assert analyze(unit).dead_stores == set()

        assert [x for x in _diags(LISTINGS / "justified_effectless.c") if x.check_id == eff.CHECK_ID] == []
        strict = [x for x in _diags(LISTINGS / "justified_effectless.c", effectless=eff.STRICT_R2_2) if x.check_id == eff.CHECK_ID]
        assert len(strict) == 5

        d = _diags(LISTINGS / "mixed_effectless.c")
        unjustified = [x for x in d if x.check_id == eff.CHECK_ID]
        assert [x.span.line for x in unjustified] == [21, 24]
        source = (LISTINGS / "mixed_effectless.c").read_text().splitlines()
        assert "x + 0;" in source[20] and "x * 1;" in source[23]
        saturate = next(i for i, s in enumerate(source, 1) if "x = (x > MAX) ? MAX : x;" in s)
        for mode in eff.MODES:
            assert not [x for x in _diags(LISTINGS / "mixed_effectless.c", effectless=mode) if x.span.line == saturate]

        for name in ("r22_5", "r17_8_example1", "r17_8_example2", "transmit_octet", "justified_effectless", "mixed_effectless"):
            _golden(name)
        assert _golden("justified_effectless", "--effectless", "strict-r2-2") == 2
        _golden("mixed_effectless", "--effectless", "strict-r2-2")


# -- 3 ------------------------------------------------------------------------------

SOUNDNESS_PROGRAMS = 120


def soundness_violations(unit):
    facts = analyze(unit)
    result = sweep(unit, "f", fuel=10_000)
    unreachable = result.ever_executed & facts.unreachable
    dead = result.witnessed_live_stores & facts.dead_stores
    return unreachable, dead


@pytest.mark.criterion(3, "oracle soundness")
def test_criterion_3_oracle_soundness():
    with criterion(3, "oracle soundness", 60.0):
        violations = []
        for seed in range(SOUNDNESS_PROGRAMS):
            unit = load(generate(seed), f"gen{seed}.c")
            assert len(unit.functions["f"].params) <= 3
            unreachable, dead = soundness_violations(unit)
            if unreachable or dead:
                violations.append((seed, sorted(unreachable), sorted((s, y.name) for s, y in dead)))
        assert violations == []


# -- 4 ------------------------------------------------------------------------------


def _evidence(name, cov_name=None):
    unit = load((COVERAGE / name).read_text(), name)
    cmap = cov.load_coverage(str(COVERAGE / cov_name)) if cov_name else None
    return cov.merge_evidence(unit, analyze(unit), cmap), unit


@pytest.mark.criterion(4, "coverage evidence")
def test_criterion_4_coverage_evidence():
    with criterion(4, "coverage evidence", 5.0):
        full, _ = _evidence("clamp.c", "clamp_full.cov")
        assert full.r2_1_pass and full.r14_3_pass

        missing, _ = _evidence("clamp.c", "clamp_missing.cov")
        assert not missing.r2_1_pass and missing.r14_3_pass
        assert [(s.line, s.status) for s in missing.r2_1_open] == [(5, cov.UNKNOWN)]

        for cov_name in ("if0_full.cov", None):
            report, unit = _evidence("if0.c", cov_name)
            diags = cov.evidence_diagnostics(unit, report, cov_name is not None)
            r14 = [d for d in diags if d.rule_id == "R14.3"]
            assert [(d.verdict.kind, d.span.line) for d in r14] == [("definite", 4)]
        empty = cov.parse_coverage("")
        report = cov.merge_evidence(unit, analyze(unit), empty)
        assert [d.verdict.kind for d in cov.evidence_diagnostics(unit, report, True)
                if d.rule_id == "R14.3"] == ["definite"]

        runs = [
            ("clamp.c", "clamp_full", 0),
            ("clamp.c", "clamp_missing", 2),
            ("if0.c", "if0_full", 1),
        ]
        for src, name, want in runs:
            code, out, _ = cli("check", src, "--coverage", f"{name}.cov", cwd=COVERAGE)
            assert (code, out) == (want, (COVERAGE / f"{name}.expected").read_text()), name
        code, out, _ = cli("check", "if0.c", cwd=COVERAGE)
        assert (code, out) == (1, (COVERAGE / "if0_static.expected").read_text())


# -- 5 ------------------------------------------------------------------------------


def _key(d):
    return (d.rule_id, d.check_id, d.span)


@pytest.mark.criterion(5, "profile containment")
def test_criterion_5_profile_containment():
    with criterion(5, "profile containment", 30.0):
        files = corpus_files()
        assert len(files) >= 20
        for path in files:
            unit = load(path.read_text(), str(path))
            facts = analyze(unit)
            strict = {_key(d) for d in run_checks(unit, facts, STRICT)}
            heuristic = [d for d in run_checks(unit, facts, HEURISTIC) if d.definite]
            assert {_key(d) for d in heuristic} <= strict, path.name

            findings = eff.analyze_effectless(unit, facts)
            directive = {(d.span, d.message) for d in eff.report_mode(findings, eff.DIRECTIVE)}
            full = {(d.span, d.message) for d in eff.report_mode(findings, eff.STRICT_R2_2)}
            assert directive <= full, path.name


# -- 6 ------------------------------------------------------------------------------


def _ndjson_run(files, seed):
    env = dict(os.environ, PYTHONHASHSEED=str(seed))
    proc = subprocess.run(
        [sys.executable, "-m", "minicheck", "check", "--format", "ndjson", *files],
        cwd=CORPUS, env=env, capture_output=True,
    )
    assert proc.returncode in (0, 1, 2), proc.stderr
    return proc.stdout


@pytest.mark.criterion(6, "determinism")
def test_criterion_6_determinism():
    with criterion(6, "determinism", 30.0):
        files = [str(p.relative_to(CORPUS)) for p in corpus_files()]
        first = _ndjson_run(files, 1)
        second = _ndjson_run(files, 2)
        assert first.count(b"\n") > 50
        assert hashlib.sha256(first).hexdigest() == hashlib.sha256(second).hexdigest()

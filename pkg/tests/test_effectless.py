import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import CORPUS, facts_of
from minicheck import effectless as eff
from minicheck.effectless import JustificationLedger, LedgerError

KNOWN = ("effectless", "file-deref-r22-5")


def classified(source, ledger=None, file_id="t.c"):
    unit, facts = facts_of(source, file_id)
    return eff.analyze_effectless(unit, facts, ledger)


def summary(findings):
    return [(f.span.line, f.operation_kind, f.reason) for f in findings]


def wrap(body, prelude=""):
    return f"{prelude}unsigned int x;\nvoid use(unsigned int);\nvoid f(void) {{\n{body}\n}}\n"


# -- detection ----------------------------------------------------------------------

NEUTRAL = ["x + 0", "0 + x", "x - 0", "x * 1", "1 * x", "x / 1", "x << 0", "x >> 0", "x | 0", "x & ~0U", "x ^ 0"]
NOT_NEUTRAL = ["0 - x", "1 / x", "x * 0", "x & 0", "0 << x", "x % 1", "x + 1"]


@pytest.mark.parametrize("expr", NEUTRAL)
def test_neutral_operand_detected(expr):
    (f,) = classified(wrap(f"use({expr});"))
    assert f.operation_kind == eff.NEUTRAL_OPERAND
    assert f.reason is None and not f.statement_unused
    assert f.neutral_origin.direct


@pytest.mark.parametrize("expr", NOT_NEUTRAL)
def test_non_neutral_operand_ignored(expr):
    assert classified(wrap(f"use({expr});")) == []


def test_unused_neutral_statement_is_one_finding():
    (f,) = classified(wrap("x + 0;"))
    assert f.operation_kind == eff.NEUTRAL_OPERAND and f.statement_unused


def test_unused_expression_statement():
    (f,) = classified(wrap("x == 3;"))
    assert f.operation_kind == eff.NO_EFFECT_STATEMENT


@pytest.mark.parametrize("stmt", ["x = 3;", "use(x);", "(void)x;", "x++;"])
def test_statements_with_effects(stmt):
    assert classified(wrap(stmt)) == []


def test_volatile_read_is_an_effect():
    src = "volatile int v;\nvoid f(void) {\n v;\n}\n"
    assert classified(src) == []


def test_dead_store():
    body = "unsigned int y;\ny = 1;\ny = 2;\nuse(y);"
    (f,) = classified(wrap(body))
    assert (f.span.line, f.operation_kind, f.symbol.name) == (5, eff.DEAD_STORE, "y")


def test_empty_body_call():
    (f,) = classified(wrap("stub();", "static void stub(void) {}\n"))
    assert f.operation_kind == eff.NO_EFFECT_CALL and f.reason is None


# -- classification -------------------------------------------------------------------------


def test_macro_abstraction():
    (f,) = classified(wrap("use(x + OFFSET);", "#define OFFSET 0\n"))
    assert f.reason == eff.MACRO and f.neutral_origin.names == ("OFFSET",)


def test_sizeof_abstraction():
    (f,) = classified(wrap("use(x * sizeof(T));", "typedef unsigned char T;\n"))
    assert f.reason == eff.SIZEOF


def test_enum_series():
    src = "enum { B0 = 1U << 0, B1 = 1U << 1, B2 = 1U << 2 };\nenum { L = 1U << 0, M = 5 };\n"
    found = classified(src)
    assert summary(found) == [(1, eff.NEUTRAL_OPERAND, eff.ENUM_SERIES), (2, eff.NEUTRAL_OPERAND, None)]


def test_literal_unjustified():
    (f,) = classified(wrap("use(x * 1);"))
    assert f.classification == eff.UNJUSTIFIED


def test_loop_control():
    body = ("unsigned int i = 0;\nwhile (i < 4U) {\n use(i);\n i = i + 1U;\n if (x) { i = 9U; break; }\n}")
    found = [f for f in classified(wrap(body)) if f.operation_kind == eff.DEAD_STORE]
    assert summary(found) == [(8, eff.DEAD_STORE, eff.LOOP_CONTROL)]


def test_config_function():
    prelude = "static void cfg(void) {\n#ifdef FEATURE\n x = 1U;\n#endif\n}\n"
    (f,) = classified(wrap("cfg();", prelude))
    assert f.reason == eff.CONFIG_FUNCTION


def test_ledger_entry():
    ledger = JustificationLedger.parse("t.c:4:effectless: kept for the timing budget @rev\n", KNOWN)
    (f,) = classified(wrap("use(x * 1);"), ledger)
    assert f.reason == eff.LEDGER and f.ledger_ref == "<ledger>:1"


def test_macro_rename_and_inline():
    named = classified(wrap("use(x + OFFSET);", "#define OFFSET 0\n"))
    renamed = classified(wrap("use(x + DISPLACEMENT);", "#define DISPLACEMENT 0\n"))
    inlined = classified(wrap("use(x + 0);"))
    assert [f.reason for f in named] == [f.reason for f in renamed] == [eff.MACRO]
    assert [f.classification for f in inlined] == [eff.UNJUSTIFIED]


# -- modes ----------------------------------------------------------------------------------------


def _modes(path):
    unit, facts = facts_of(path.read_text(), path.name)
    found = eff.analyze_effectless(unit, facts)
    return eff.report_mode(found, eff.DIRECTIVE), eff.report_mode(found, eff.STRICT_R2_2)


def test_justified_effectless_counts():
    directive, strict = _modes(CORPUS / "listings" / "justified_effectless.c")
    assert directive == []
    assert [d.span.line for d in strict] == [16, 17, 18, 20, 25]
    assert {d.rule_id for d in strict} == {"R2.2"}
    assert all(d.verdict.kind == "possible" for d in strict)


def test_mixed_effectless_directive():
    directive, _ = _modes(CORPUS / "listings" / "mixed_effectless.c")
    assert [(d.rule_id, d.span.line) for d in directive] == [("D-EFFECTLESS", 21), ("D-EFFECTLESS", 24)]


def test_effectless_corpus_file():
    directive, strict = _modes(CORPUS / "checks" / "effectless.c")
    assert [d.span.line for d in directive] == [12, 14, 15]
    assert [d.span.line for d in strict] == [12, 13, 14, 15]


def test_unknown_mode():
    with pytest.raises(ValueError):
        eff.report_mode([], "lenient")


def test_directive_keeps_ledger_findings_as_suppressed():
    ledger = JustificationLedger.parse("t.c:4:effectless: deliberate\n", KNOWN)
    unit, facts = facts_of(wrap("use(x * 1);"))
    (d,) = eff.report_mode(eff.analyze_effectless(unit, facts, ledger), eff.DIRECTIVE)
    assert d.suppressed_by == "<ledger>:1"


# -- ledger ---------------------------------------------------------------------------------------


def test_ledger_parse():
    text = "# header\n\nsrc/a.c:12:effectless: loop unrolled by hand @jd\nb.c:3:file-deref-r22-5: audited\n"
    ledger = JustificationLedger.parse(text, KNOWN, "l.txt")
    a, b = ledger.entries
    assert (a.file, a.line, a.check_id, a.reason, a.author, a.ref) == (
        "src/a.c", 12, "effectless", "loop unrolled by hand", "jd", "l.txt:3")
    assert (b.author, b.ref) == (None, "l.txt:4")


@pytest.mark.parametrize("text,msg", [
    ("a.c:x:effectless: r\n", "malformed"),
    ("a.c:3:effectless:\n", "malformed"),
    ("a.c:3: r\n", "malformed"),
    ("a.c:3:no-such-check: r\n", "unknown check id"),
])
def test_ledger_errors(text, msg):
    with pytest.raises(LedgerError, match=msg):
        JustificationLedger.parse(text, KNOWN, "l.txt")


def test_ledger_basename_matching():
    ledger = JustificationLedger.parse("t.c:4:effectless: r\n", KNOWN)
    unit, facts = facts_of(wrap("use(x * 1);"), "dir/t.c")
    (f,) = eff.analyze_effectless(unit, facts, ledger)
    assert f.reason == eff.LEDGER
    other = JustificationLedger.parse("else/t.c:4:effectless: r\n", KNOWN)
    (g,) = eff.analyze_effectless(unit, facts, other)
    assert g.reason is None


# -- properties ------------------------------------------------------------------------------------

_PIECES = st.sampled_from([
    "x + 0;", "x + OFFSET;", "use(x * 1);", "use(x * SCALE);", "use(x * sizeof(T));", "stub();",
    "cfg();", "x == 2;", "y = 1;", "y = 2;", "use(y);", "use(x << 0);", "x = x;",
])


@given(st.lists(_PIECES, max_size=8))
@settings(max_examples=80, deadline=None)
def test_directive_subset_of_strict(pieces):
    prelude = ("#define OFFSET 0\n#define SCALE 1\ntypedef unsigned char T;\n"
               "static void stub(void) {}\nstatic void cfg(void) {\n#ifdef F\n x = 1U;\n#endif\n}\n")
    body = "unsigned int y = 0;\n" + "\n".join(pieces) + "\nuse(y);"
    unit, facts = facts_of(wrap(body, prelude))
    found = eff.analyze_effectless(unit, facts)
    directive = {(d.span, d.message) for d in eff.report_mode(found, eff.DIRECTIVE)}
    strict = {(d.span, d.message) for d in eff.report_mode(found, eff.STRICT_R2_2)}
    assert directive <= strict
    assert len(strict) == len(found)
    for f in found:
        assert (f.reason is not None) == (f.classification == eff.JUSTIFIED)

import pytest

from conftest import CORPUS, facts_of
from minicheck.guidelines import (
    CHECKS,
    DEFINITE,
    HEURISTIC,
    OVER,
    POSSIBLE,
    STRICT,
    UNDER,
    lookup,
    registry,
    run_checks,
)
from minicheck.guidelines.diagnostics import Diagnostic, Verdict, sort_diagnostics
from minicheck.guidelines.registry import CAUSES, check_ids, rule_key
from minicheck.sema import load

CHECKS_DIR = CORPUS / "checks"


def findings(source, profile=STRICT, enabled=None, file_id="t.c"):
    unit, facts = facts_of(source, file_id)
    return run_checks(unit, facts, profile, enabled)


def brief(diags):
    return sorted((d.rule_id, d.span.line, d.span.column, d.verdict.kind) for d in diags)


def only(check_id):
    return {check_id}


# -- registry ---------------------------------------------------------------------


def test_registry_counts():
    rows = registry()
    assert len(rows) == 37
    cats = [g.category for g in rows]
    assert (cats.count("mandatory"), cats.count("required"), cats.count("advisory")) == (11, 22, 4)


def test_registry_rows():
    r22_5 = lookup("R22.5")
    assert r22_5.undecidability_causes == {"flow"}
    assert r22_5.approx_available["flow-insensitive"] == "∘∘"
    assert r22_5.implemented_check == "file-deref-r22-5"
    r2_2 = lookup("R2.2")
    assert r2_2.not_provable and r2_2.definition_issues


REGISTRY_ONLY = ("R1.2 R1.3 R2.2 R12.2 R13.1 R13.2 R13.5 R17.5 R18.1 R18.2 R18.3 R18.6 "
                 "R19.1 R21.17 R21.18 R21.20 R22.2 R22.3 R22.4 R22.6 R22.7").split()


@pytest.mark.parametrize("rule", REGISTRY_ONLY)
def test_registry_only_rows(rule):
    assert lookup(rule).implemented_check is None


def test_registry_is_immutable():
    g = lookup("R9.1")
    with pytest.raises(Exception):
        g.category = "advisory"
    with pytest.raises(TypeError):
        g.approx_available["other"] = "none"


def test_causes_are_known():
    for g in registry():
        assert g.undecidability_causes <= set(CAUSES)


def test_checks_cover_implemented_rows():
    implemented = set(check_ids())
    assert set(CHECKS) <= implemented
    assert implemented - set(CHECKS) == {"unreachable-code-r2-1", "invariant-condition-r14-3"}


def test_rule_key_order():
    ids = ["R22.10", "R2.2", "D-EFFECTLESS", "R14.1", "R22.9"]
    assert sorted(ids, key=rule_key) == ["R2.2", "R14.1", "R22.9", "R22.10", "D-EFFECTLESS"]


# -- corpus expectations ------------------------------------------------------------------

D, P = DEFINITE, POSSIBLE

CORPUS_STRICT = {
    "file_deref.c": [("R8.13", 3, 21, D), ("R22.5", 5, 17, D), ("R8.13", 8, 18, D), ("R22.5", 10, 11, D)],
    "readonly_params.c": [("R17.8", 8, 7, D), ("R17.8", 13, 6, D), ("R17.8", 18, 10, D)],
    "const_candidates.c": [("R8.13", 3, 21, D), ("R17.8", 6, 14, D)],
    "init_at_decl.c": [("R9.1", 3, 9, D), ("R9.1", 10, 9, D)],
    "determinate_for.c": [("R14.1", 5, 10, D), ("R14.2", 12, 5, D), ("R14.2", 12, 5, D),
                          ("R14.2", 12, 5, D), ("R14.2", 20, 11, D)],
    "recursion.c": [("R17.2", 1, 5, D), ("R17.2", 8, 5, D), ("R17.2", 13, 5, D), ("R17.2", 20, 12, P)],
    "eof_domain.c": [("R9.1", 7, 9, D), ("R21.13", 19, 20, D)],
    "cstring.c": [("R21.14", 6, 12, D), ("R21.19", 17, 15, D)],
    "errno_protocol.c": [("R9.1", 6, 11, D), ("R9.1", 7, 12, D), ("R9.1", 18, 11, D), ("R9.1", 19, 10, D),
                         ("R22.8", 20, 9, D), ("R22.9", 20, 9, D)],
    "stream_ownership.c": [("R22.1", 15, 15, D), ("R22.1", 27, 5, D), ("R22.1", 32, 5, D)],
    "effectless.c": [("R9.1", 11, 9, D)],
}

CORPUS_HEURISTIC_DIFF = {
    "recursion.c": [("R17.2", 1, 5, D), ("R17.2", 8, 5, D), ("R17.2", 13, 5, D)],
    "eof_domain.c": [("R21.13", 19, 20, D)],
    "init_at_decl.c": [("R9.1", 14, 12, P)],
    "errno_protocol.c": [("R9.1", 6, 11, P), ("R9.1", 18, 11, P), ("R22.8", 20, 9, D), ("R22.9", 20, 9, D)],
    "effectless.c": [],
}


@pytest.mark.parametrize("name", sorted(CORPUS_STRICT))
def test_corpus_strict(name):
    path = CHECKS_DIR / name
    assert brief(findings(path.read_text(), STRICT, file_id=name)) == sorted(CORPUS_STRICT[name])


@pytest.mark.parametrize("name", sorted(CORPUS_STRICT))
def test_corpus_heuristic(name):
    path = CHECKS_DIR / name
    want = CORPUS_HEURISTIC_DIFF.get(name, CORPUS_STRICT[name])
    assert brief(findings(path.read_text(), HEURISTIC, file_id=name)) == sorted(want)


def test_relations_never_under():
    for path in sorted(CORPUS.rglob("*.c")):
        for profile in (STRICT, HEURISTIC):
            for d in findings(path.read_text(), profile, file_id=path.name):
                assert d.verdict.relation != UNDER
                assert lookup(d.rule_id) is not None


def test_macro_origin_preserved():
    src = "#define DEREF(p) (*(p))\nvoid f(FILE *p) { FILE g = DEREF(p); (void)g; }\n"
    (d,) = findings(src, enabled=only("file-deref-r22-5"))
    assert "DEREF" in d.origin.names


def test_sorting_is_total():
    a = findings((CHECKS_DIR / "determinate_for.c").read_text())
    assert sort_diagnostics(list(reversed(a))) == a


def test_verdict_validation():
    with pytest.raises(ValueError):
        Verdict("maybe", OVER)
    with pytest.raises(ValueError):
        Verdict(DEFINITE, "sideways")


# -- R22.5 ----------------------------------------------------------------------------

DEREF_FORMS = [
    ("FILE g = *p; (void)g;", 1),
    ("(void)p->_flags;", 1),
    ("FILE g = p[0]; (void)g;", 1),
    ("FILE g; g = *p; (void)g;", 1),
    ("(void)fgetc(p);", 0),
]


@pytest.mark.parametrize("stmt,count", DEREF_FORMS)
def test_file_deref_forms(stmt, count):
    diags = findings(f"void f(FILE *p) {{ {stmt} }}", enabled=only("file-deref-r22-5"))
    assert len(diags) == count
    assert all(d.verdict == Verdict(DEFINITE, OVER) for d in diags)


# -- R17.8 ----------------------------------------------------------------------------


def test_readonly_params_examples():
    # Findings sit on the modifying operator: the '=' and the '&'.
    src = ("void g(uint32_t *p);\nvoid h(const uint32_t *p);\n"
           "void a(uint32_t x) { x = 0; }\nvoid b(uint32_t x) { g(&x); }\nvoid c(uint32_t x) { h(&x); }\n")
    assert brief(findings(src, enabled=only("readonly-params-r17-8"))) == [("R17.8", 3, 24, D), ("R17.8", 4, 24, D)]


def test_readonly_params_incdec_and_compound():
    src = "int f(int n, int m) { n++; m += 2; return n + m; }"
    assert len(findings(src, enabled=only("readonly-params-r17-8"))) == 2


# -- R8.13 ------------------------------------------------------------------------------


def test_const_candidates():
    src = ("size_t len(char *s) { size_t n = 0; while (s[n]) { n++; } return n; }\n"
           "void set(int *p) { *p = 1; }\n"
           "void sink(int *q);\nvoid pass(int *p) { sink(p); }\n")
    diags = findings(src, enabled=only("const-candidates-r8-13"))
    assert brief(diags) == [("R8.13", 1, 18, D)]
    assert "const char *" in diags[0].message


# -- R9.1 -------------------------------------------------------------------------------


def test_init_at_decl_profiles():
    assert brief(findings("void f(void) { int x; (void)x; }", enabled=only("init-at-decl-r9-1")))[0][3] == D
    assert findings("int f(void) { int x = 0; return x; }", enabled=only("init-at-decl-r9-1")) == []
    assert findings("int f(void) { int x = 0; return x; }", HEURISTIC, only("init-at-decl-r9-1")) == []
    src = "int f(int c) {\n int x;\n if (c) x = 1;\n return x;\n}\n"
    assert brief(findings(src, HEURISTIC, only("init-at-decl-r9-1"))) == [("R9.1", 4, 9, P)]


# -- R14.1 / R14.2 ----------------------------------------------------------------------------

FOR_TABLE = [
    ("for (uint8_t bit = 0; bit < 8; ++bit) { g(bit); }", []),
    ("for (float f = 0.0f; f < 1.0f; f += 0.1f) { g(1); }", ["R14.1"]),
    ("for (uint8_t bit = 0; bit < 8; ++bit) { bit = 0; }", ["R14.2"]),
    ("for (int i = 0; i < n; i += 2) { g(i); }", []),
    ("for (int i = 0; i < n; i++) { n--; }", ["R14.2"]),
    ("for (int i = 0; i != 8; i++) { g(i); }", ["R14.2"]),
    ("for (int i = 0; i < 8; i *= 2) { g(i); }", ["R14.2"]),
    ("for (int i = 0; i < 8; i++) { int *q = &i; (void)q; }", ["R14.2"]),
]


@pytest.mark.parametrize("loop,rules", FOR_TABLE)
def test_determinate_for(loop, rules):
    src = f"void g(int);\nvoid f(int n) {{\n {loop}\n}}\n"
    diags = findings(src, enabled=only("determinate-for-r14-1-2"))
    assert [d.rule_id for d in diags] == rules
    assert all(d.verdict.kind == D for d in diags)


# -- R17.2 ----------------------------------------------------------------------------------

RECURSION_TABLE = [
    # (source, strict rules+kinds, heuristic rules+kinds)
    ("int h(int x) { return x; }\nint f(int (*cb)(int)) { return cb(1); }\n", [P], []),
    ("int h(int x) { return x; }\nint f(int (*cb)(int)) { return cb(1); }\nint g(void) { return f(&h); }\n", [P], [P]),
    ("int f(int x) { return x + 1; }\n", [], []),
]


@pytest.mark.parametrize("src,strict,heuristic", RECURSION_TABLE)
def test_recursion_indirect_table(src, strict, heuristic):
    assert [d.verdict.kind for d in findings(src, STRICT, only("no-recursion-r17-2"))] == strict
    assert [d.verdict.kind for d in findings(src, HEURISTIC, only("no-recursion-r17-2"))] == heuristic


def test_recursion_cycles():
    src = "void f(void);\nvoid g(void) { f(); }\nvoid f(void) { g(); }\nvoid s(void) { s(); }\n"
    diags = findings(src, enabled=only("no-recursion-r17-2"))
    assert brief(diags) == [("R17.2", 2, 6, D), ("R17.2", 3, 6, D), ("R17.2", 4, 6, D)]


# -- R21.13 ------------------------------------------------------------------------------------


def test_eof_domain_check():
    src = ("int a(const char *s) { char c = s[0]; return isdigit(c); }\n"
           "int b(const char *s) { char c = s[0]; return isdigit((unsigned char)c); }\n"
           "int d(FILE *f) { int c = fgetc(f); return isdigit(c); }\n")
    diags = findings(src, HEURISTIC, only("eof-domain-r21-13"))
    assert brief(diags) == [("R21.13", 1, 54, D)]


# -- R21.14 / R21.19 ------------------------------------------------------------------------------

MEMCMP_TABLE = [
    ("char", "char", 1),
    ("char", "uint8_t", 1),
    ("uint8_t", "char", 1),
    ("uint8_t", "uint8_t", 0),
]


@pytest.mark.parametrize("ta,tb,count", MEMCMP_TABLE)
def test_memcmp_pointee_types(ta, tb, count):
    src = f"int f(void) {{ {ta} a[8] = {{0}}; {tb} b[8] = {{0}}; return memcmp(a, b, 8); }}"
    assert len(findings(src, enabled=only("cstring-r21-14-19"))) == count


def test_strchr_const_result():
    src = ("void f(const char *cs) {\n char *r = strchr(cs, 'x');\n const char *k = strchr(cs, 'x');\n"
           " (void)r; (void)k;\n}\n")
    assert brief(findings(src, enabled=only("cstring-r21-14-19"))) == [("R21.19", 2, 12, D)]


# -- R22.8 / R22.9 / R22.10 --------------------------------------------------------------------------

ERRNO_PERMUTATIONS = [
    ("errno = 0; d = strtod(s, &e); if (errno != 0) { d = 0; }", []),
    ("errno = 0; if (strtod(s, &e) > 1.0) { d = 1; } if (errno != 0) { d = 0; }", []),
    ("d = strtod(s, &e); if (errno != 0) { d = 0; }", ["R22.8"]),
    ("errno = 0; d = strtod(s, &e); v = d; if (errno != 0) { d = 0; }", []),
    ("errno = 0; d = strtod(s, &e); k = 1; if (errno != 0) { d = 0; }", ["R22.10", "R22.9"]),
    ("errno = 0; d = strtod(s, &e);", ["R22.9"]),
    ("d = 0; if (errno == 0) { d = 1; }", ["R22.10"]),
    ("strcpy(a, s); if (errno) { d = 1; }", ["R22.10"]),
]


@pytest.mark.parametrize("body,rules", ERRNO_PERMUTATIONS)
def test_errno_protocol_window(body, rules):
    src = f"double f(const char *s) {{ char a[8]; char *e = 0; double d = 0, v = 0; int k = 0; {body} return d + v + k; }}"
    diags = findings(src, enabled=only("errno-protocol-r22-8-9-10"))
    assert sorted(d.rule_id for d in diags) == sorted(rules)


# -- R22.1 ----------------------------------------------------------------------------------------------


def test_ownership_examples():
    clean = 'int f(const char *p) { FILE *f = fopen(p, "r"); if (!f) return -1; fclose(f); return 0; }'
    assert findings(clean, enabled=only("stream-ownership-r22-1")) == []
    leak = 'int f(const char *p, int c) { FILE *f = fopen(p, "r"); if (c) return 0; fclose(f); return 0; }'
    assert [d.verdict.kind for d in findings(leak, enabled=only("stream-ownership-r22-1"))] == [D]


def test_ownership_escape_profiles():
    src = 'FILE *g;\nvoid f(const char *p) {\n FILE *f = fopen(p, "r");\n g = f;\n}\n'
    assert [d.verdict.kind for d in findings(src, STRICT, only("stream-ownership-r22-1"))] == [P]
    assert findings(src, HEURISTIC, only("stream-ownership-r22-1")) == []


def test_ownership_memory_and_path_dependent_release():
    src = "void f(int c) { int *p = malloc(4); if (c) { free(p); } }"
    diags = findings(src, enabled=only("stream-ownership-r22-1"))
    assert [d.verdict.kind for d in diags] == [D]


def test_profile_is_the_only_library_source():
    src = (CHECKS_DIR / "stream_ownership.c").read_text()
    renamed = "FILE *my_fopen(const char *p, const char *m);\n" + src.replace("fopen(", "my_fopen(")
    assert findings(src, enabled=only("stream-ownership-r22-1"))
    assert findings(renamed, enabled=only("stream-ownership-r22-1")) == []


def test_diagnostic_fields():
    (d,) = findings("void f(FILE *p) { FILE g = *p; (void)g; }", enabled=only("file-deref-r22-5"))
    assert isinstance(d, Diagnostic)
    assert (d.rule_id, d.check_id, d.suppressed_by) == ("R22.5", "file-deref-r22-5", None)
    assert d.origin.direct
    unit = load("int x;", "t.c")
    assert unit.file_id == "t.c"

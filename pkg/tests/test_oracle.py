import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import CORPUS
from minicheck.frontend import ast
from minicheck.oracle import (
    FUEL_EXHAUSTED,
    INCONCLUSIVE,
    RUNTIME_ERROR,
    TERMINATED,
    OracleError,
    run,
    sweep,
)
from minicheck.sema import load
from progen import generate, statement_count


def trace_of(src, entry="f", args=(), fuel=10_000):
    return run(load(src, "t.c"), entry, args, fuel)


def outcome(src, args=(), fuel=10_000):
    o = trace_of(src, args=args, fuel=fuel).outcome
    return o.kind, o.status if o.kind == TERMINATED else o.detail


def stmt_at(unit, line, kind=ast.Stmt):
    return [s for s in unit.ast.statements() if s.span.line == line and isinstance(s, kind)][-1].stmt_id


# -- reference examples ----------------------------------------------------------------------


def test_infinite_loop_exhausts_fuel():
    unit = load("void f(void) {\n while (1);\n}\n", "t.c")
    t = run(unit, "f", (), 1000)
    assert t.outcome.kind == FUEL_EXHAUSTED
    loop = stmt_at(unit, 2, ast.While)
    assert t.executed == [loop] * 1000


def test_division_by_zero():
    assert outcome("int f(void) { return 10 / 0; }") == (RUNTIME_ERROR, "division-by-zero")


def test_uninitialized_read():
    assert outcome("int f(void) { int x; return x; }") == (RUNTIME_ERROR, "uninitialized-read")


def test_guarded_division():
    src = "int f(int a, int b) { return (b == 0) ? 0 : (a / b); }"
    assert outcome(src, (7, 0)) == (TERMINATED, 0)
    assert outcome(src, (7, 2)) == (TERMINATED, 3)


# -- undefined behaviour kinds --------------------------------------------------------------

UB_TABLE = [
    ("int f(int a) { return a + 2147483647; }", (1,), "signed-overflow"),
    ("int f(int a) { return -a; }", (-2147483647 - 1,), "signed-overflow"),
    ("int f(int a) { return a % 0; }", (1,), "division-by-zero"),
    ("int f(void) { int *p = 0; return *p; }", (), "null-deref"),
    ("int f(void) { int a[2] = {0}; return a[2]; }", (), "oob-access"),
    ("int f(void) { int x = 0; int *p = &x; free(p); return 0; }", (), "bad-free"),
    ("int f(void) { int *p = malloc(4); free(p); free(p); return 0; }", (), "bad-free"),
    ("int f(void) { int *p = malloc(4); *p = 1; free(p); return *p; }", (), "oob-access"),
    ("int f(int c) { return isdigit(c); }", (300,), "oob-access"),
]


@pytest.mark.parametrize("src,args,kind", UB_TABLE)
def test_runtime_errors(src, args, kind):
    assert outcome(src, args) == (RUNTIME_ERROR, kind)


def test_unsigned_wraps():
    assert outcome("int f(void) { unsigned int u = 0; u = u - 1U; return u == 4294967295U; }") == (TERMINATED, 1)


def test_char_is_signed_8_bit():
    assert outcome("int f(void) { char c = (char)200; return c; }") == (TERMINATED, -56)


def test_exit_and_abort():
    assert outcome("int f(void) { exit(4); return 0; }") == (TERMINATED, 4)
    assert outcome("int f(void) { abort(); return 0; }") == (TERMINATED, 134)


def test_environment_call_is_inconclusive():
    kind, detail = outcome("int env(int); int f(void) { return env(1); }")
    assert kind == INCONCLUSIVE and detail == "environment call 'env'"


def test_deep_recursion_is_inconclusive():
    src = "int f(int n) { return f(n + 0) + 0; }"
    assert outcome(src, (1,))[0] == INCONCLUSIVE


def test_streams_are_simulated():
    src = ('int f(void) { FILE *s = tmpfile(); if (!s) return -1; int c = fgetc(s);'
           ' fclose(s); return c; }')
    assert outcome(src) == (TERMINATED, -1)
    assert outcome("int f(void) { FILE *s = tmpfile(); fclose(s); return fclose(s); }") == (RUNTIME_ERROR, "bad-free")


def test_string_library():
    src = ('int f(void) { const char *s = "hello"; char b[8] = {0}; strcpy(b, s);'
           ' return (int)strlen(b) * 10 + (strchr(s, \'l\') - s) + (memcmp(b, s, 5) == 0); }')
    assert outcome(src) == (TERMINATED, 53)


def test_strtol_and_errno():
    src = 'int f(void) { char *e = 0; errno = 0; long v = strtol("99999999999999999999", &e, 10); return errno; }'
    assert outcome(src) == (TERMINATED, 34)


def test_structs_and_pointers():
    src = ("struct p { int x; int y[2]; };\n"
           "int f(void) { struct p v = {1, {2, 3}}; struct p *q = &v; q->y[1] += q->x; int *r = &v.y[0];"
           " return r[1] * 10 + *r; }")
    assert outcome(src) == (TERMINATED, 42)


def test_switch_and_goto():
    src = ("int f(int a) { int r = 0; switch (a) { case 1: r = 10; break; case 2: r = 20; default: r += 1; }"
           " if (r > 20) goto out; r = r * 2; out: return r; }")
    assert [outcome(src, (a,)) for a in (1, 2, 3)] == [(TERMINATED, 20), (TERMINATED, 21), (TERMINATED, 2)]


# -- setup errors --------------------------------------------------------------------------------


def test_setup_errors():
    unit = load("int f(int a) { return a; } int g(double d) { return 0; }", "t.c")
    with pytest.raises(OracleError):
        run(unit, "missing")
    with pytest.raises(OracleError):
        run(unit, "f", (1, 2))
    with pytest.raises(OracleError):
        run(unit, "g", (1,))


# -- traces ----------------------------------------------------------------------------------------


def test_trace_dump_format():
    src = "int f(int a) {\n int x = 1;\n x = 2;\n if (a) x = 3;\n return x;\n}\n"
    text = trace_of(src, args=(0,)).dump()
    assert text.splitlines() == [
        "EXEC 1", "STORE 1 x dead", "EXEC 2", "STORE 2 x live", "EXEC 3", "EXEC 5",
        "OUTCOME terminated 2",
    ]


def test_store_events_dead_then_live():
    # Initializers are stores at run time too.
    src = "void use(int);\nint f(void) {\n int x = 0;\n x = 1;\n x = 2;\n return x;\n}\n"
    t = trace_of(src)
    assert [(e.sym.name, e.live) for e in t.stores] == [("x", False), ("x", False), ("x", True)]


def test_empty_entry_executes_nothing():
    t = trace_of("void f(void) {}")
    assert t.executed == [] and t.outcome.kind == TERMINATED


def test_determinism():
    src = generate(7)
    unit = load(src, "gen7.c")
    a = [run(unit, "f", (i, -i, 1)[: len(unit.functions["f"].params)]).dump() for i in range(-2, 3)]
    b = [run(load(src, "gen7.c"), "f", (i, -i, 1)[: len(unit.functions["f"].params)]).dump() for i in range(-2, 3)]
    assert a == b


def test_uninit_read_matches_flow_example():
    # Two concrete paths over c in {0, 1}: exactly one reads x uninitialized.
    src = "int f(int c) { int x; if (c) x = 1; return x; }"
    kinds = [outcome(src, (c,))[1] for c in (0, 1)]
    assert kinds == ["uninitialized-read", 1]


# -- sweep ---------------------------------------------------------------------------------------------


def test_sweep_witnesses_branch():
    src = "void g(void) {}\nvoid f(int a) {\n if (a > 0) g();\n}\n"
    unit = load(src, "t.c")
    r = sweep(unit, "f")
    assert stmt_at(unit, 3, ast.ExprStmt) in r.ever_executed
    assert r.runs == 5 and r.outcomes == {TERMINATED: 5}


def test_sweep_absence_is_not_proof():
    src = "void g(void) {}\nvoid f(int a) {\n if (a * a < 0) g();\n}\n"
    unit = load(src, "t.c")
    from minicheck.flow import analyze

    body = stmt_at(unit, 3, ast.ExprStmt)
    assert body not in sweep(unit, "f").ever_executed
    assert body not in analyze(unit).unreachable


def test_sweep_live_store():
    src = "void use(int v) { (void)v; }\nvoid f(int a) {\n int x;\n x = 1;\n if (a) use(x);\n}\n"
    unit = load(src, "t.c")
    r = sweep(unit, "f")
    assert {(s, y.name) for s, y in r.witnessed_live_stores} == {(stmt_at(unit, 4), "x")}
    single = sweep(unit, "f", grid=(0,))
    assert single.witnessed_live_stores == set()


def test_sweep_arity_grid():
    unit = load("int f(int a, int b, int c) { return a + b + c; }", "t.c")
    assert sweep(unit, "f", grid=(0, 1)).runs == 8


def test_generator_bounds():
    for seed in range(30):
        unit = load(generate(seed), f"gen{seed}.c")
        assert len(unit.functions["f"].params) <= 3
        assert statement_count(unit) <= 40


def test_corpus_docs_load_but_are_not_run():
    for path in sorted((CORPUS / "docs").glob("*.c")):
        assert load(path.read_text(), path.name).functions


# -- properties -------------------------------------------------------------------------------------------


@given(st.integers(0, 60), st.integers(1, 400), st.integers(1, 400), st.integers(-2, 2))
@settings(max_examples=60, deadline=None)
def test_fuel_prefix(seed, f1, f2, arg):
    small, big = sorted((f1, f2))
    unit = load(generate(seed), f"gen{seed}.c")
    args = (arg,) * len(unit.functions["f"].params)
    a = run(unit, "f", args, small)
    b = run(unit, "f", args, big)
    assert b.executed[: len(a.executed)] == a.executed
    if a.outcome.kind != FUEL_EXHAUSTED:
        assert a.dump() == b.dump()
    else:
        assert len(a.executed) == small

import json
import re

import pytest

from conftest import CORPUS, cli
from minicheck import driver

TEXT_LINE = re.compile(
    r"^(?P<file>[^:]+):(?P<line>\d+):(?P<col>\d+): \[(?P<rule>[A-Z0-9.-]+)\]\[(?P<verdict>definite|possible)\] "
    r"(?P<message>.+) \(check: (?P<check>[a-z0-9-]+), origin: (?P<origin>[^,)]+(?:\([^)]*\))?)"
    r"(?:, suppressed-by: (?P<sup>[^)]+))?\)$"
)
FIELDS = ["rule", "check", "verdict", "relation", "file", "line", "col", "message", "origin", "suppressed_by"]

CLEAN = "int f(int a)\n{\n    return a;\n}\n"
POSSIBLE = "static void h(void)\n{\n}\nstatic void (*const cb)(void) = &h;\nvoid g(void)\n{\n    cb();\n}\n"


# -- exit codes ------------------------------------------------------------------------


def test_exit_clean(tmp_c):
    assert cli("check", tmp_c(CLEAN))[:2] == (0, "")


def test_exit_definite():
    code, out, _ = cli("check", str(CORPUS / "listings" / "r22_5.c"))
    assert code == 1 and "[R22.5][definite]" in out


def test_exit_possible_only(tmp_c):
    code, out, _ = cli("check", tmp_c(POSSIBLE))
    assert code == 2
    assert {m["verdict"] for m in map(TEXT_LINE.match, out.splitlines())} == {"possible"}


def test_exit_error_on_parse_failure(tmp_c):
    code, out, err = cli("check", tmp_c("int f(void) { return 1 }\n", "bad.c"))
    assert code == 3 and out == ""
    assert re.match(r"^.*bad\.c:\d+:\d+: ", err)


@pytest.mark.parametrize("argv", [
    [],
    ["check"],
    ["check", "--profile", "loose", "x.c"],
    ["check", "--enable", "no-such-check", "x.c"],
    ["check", "--enable", "effectless", "--disable", "effectless", "x.c"],
    ["run", "x.c"],
])
def test_usage_errors(argv):
    code, out, err = cli(*argv)
    assert code == 3 and out == "" and err.startswith("minicheck: usage error: ")


def test_missing_file():
    code, _, err = cli("check", "does/not/exist.c")
    assert code == 3 and "exist.c" in err


# -- output grammar -----------------------------------------------------------------------


def test_text_grammar_over_corpus():
    for path in sorted(CORPUS.rglob("*.c")):
        _, out, _ = cli("check", "--profile", "heuristic", str(path))
        for line in out.splitlines():
            assert TEXT_LINE.match(line), line


def test_ndjson_fields_and_order():
    _, out, _ = cli("check", "--format", "ndjson", str(CORPUS / "listings" / "r22_5.c"))
    records = [json.loads(line) for line in out.splitlines()]
    assert records and all(list(r) == FIELDS for r in records)
    assert records[-1]["rule"] == "R22.5" and records[-1]["relation"] == "over-approx"


def test_ndjson_and_text_agree():
    path = str(CORPUS / "checks" / "errno_protocol.c")
    _, text, _ = cli("check", path)
    _, nd, _ = cli("check", "--format", "ndjson", path)
    parsed = [TEXT_LINE.match(line).groupdict() for line in text.splitlines()]
    records = [json.loads(line) for line in nd.splitlines()]
    assert [(p["rule"], int(p["line"]), int(p["col"]), p["message"]) for p in parsed] == [
        (r["rule"], r["line"], r["col"], r["message"]) for r in records]


def test_sorted_across_files():
    paths = [str(CORPUS / "listings" / n) for n in ("r22_5.c", "mixed_effectless.c")]
    _, out, _ = cli("check", *paths)
    keys = [(m["file"], int(m["line"]), int(m["col"])) for m in map(TEXT_LINE.match, out.splitlines())]
    assert keys == sorted(keys)


# -- options ---------------------------------------------------------------------------------


def test_enable_and_disable():
    path = str(CORPUS / "listings" / "r22_5.c")
    _, only, _ = cli("check", "--enable", "file-deref-r22-5", path)
    assert [TEXT_LINE.match(x)["rule"] for x in only.splitlines()] == ["R22.5"]
    _, rest, _ = cli("check", "--disable", "file-deref-r22-5", path)
    assert "R22.5" not in rest and rest


def test_effectless_modes():
    path = str(CORPUS / "listings" / "justified_effectless.c")
    counts = {m: cli("check", "--effectless", m, path)[1].count("[R2.2]") for m in ("directive", "strict-r2-2", "off")}
    assert counts == {"directive": 0, "strict-r2-2": 5, "off": 0}


def test_defines_reach_the_preprocessor(tmp_c):
    src = "int f(void)\n{\n#ifdef BROKEN\n    FILE *p = 0; return (*p)._x;\n#endif\n    return 0;\n}\n"
    path = tmp_c("#include <stdio.h>\n" + src)
    assert cli("check", path)[0] == 0
    assert cli("check", "-D", "BROKEN", "--enable", "file-deref-r22-5", path)[0] == 1


def test_ledger_suppression_does_not_count(tmp_path):
    src = CORPUS / "listings" / "r22_5.c"
    ledger = tmp_path / "ledger.txt"
    ledger.write_text("r22_5.c:10:file-deref-r22-5: audited, branch is compiled out @qa\n")
    code, out, _ = cli("check", "--enable", "file-deref-r22-5", "--ledger", str(ledger), str(src))
    assert code == 0
    m = TEXT_LINE.match(out.strip())
    assert m["sup"] == f"{ledger}:1"


def test_bad_ledger_is_an_error(tmp_path):
    ledger = tmp_path / "ledger.txt"
    ledger.write_text("x.c:1:nope: r\n")
    code, _, err = cli("check", "--ledger", str(ledger), str(CORPUS / "listings" / "r22_5.c"))
    assert code == 3 and "unknown check id" in err


def test_evidence_without_diagnostics():
    code, out, _ = cli("check", "--coverage", "clamp_full.cov", "--format", "ndjson", "clamp.c",
                       cwd=CORPUS / "coverage")
    assert code == 0
    records = [json.loads(line) for line in out.splitlines()]
    assert [r["evidence"] for r in records] == ["R2.1", "R14.3", "warnings"]


def test_dump_cfg(tmp_c):
    code, out, _ = cli("check", "--dump-cfg", tmp_c(CLEAN))
    assert code == 0 and out.startswith("function f: entry 0, exit ")


# -- other commands ----------------------------------------------------------------------------


def test_run_command(tmp_c):
    path = tmp_c("int f(int a, int b)\n{\n    return a / b;\n}\n")
    assert cli("run", path, "--entry", "f", "--args", "6,3") == (0, "EXEC 1\nOUTCOME terminated 2\n", "")
    code, out, _ = cli("run", path, "--entry", "f", "--args", "6,0")
    assert code == 0 and out.splitlines()[-1] == f"OUTCOME runtime-error division-by-zero at {path}:3:14"


@pytest.mark.parametrize("argv,msg", [
    (["--entry", "g"], "error"),
    (["--entry", "f", "--args", "1"], "error"),
    (["--entry", "f", "--args", "x,y"], "usage error"),
    (["--entry", "f", "--args", "1,2", "--fuel", "0"], "usage error"),
])
def test_run_errors(tmp_c, argv, msg):
    code, _, err = cli("run", tmp_c("int f(int a, int b) { return a + b; }\n"), *argv)
    assert code == 3 and err.startswith(f"minicheck: {msg}")


def test_registry_command():
    code, out, _ = cli("registry")
    assert code == 0 and len(out.splitlines()) > 37


def test_api_check():
    report = driver.check(driver.RunConfig(files=[str(CORPUS / "listings" / "r22_5.c")], enable=["file-deref-r22-5"]))
    assert driver.exit_code(report.diagnostics) == driver.EXIT_DEFINITE
    with pytest.raises(driver.UsageError):
        driver.RunConfig(enable=["bogus"])

import io
import os
import sys
from pathlib import Path

import pytest

TESTS = Path(__file__).resolve().parent
CORPUS = TESTS / "corpus"
sys.path.insert(0, str(TESTS))

from minicheck.driver import main  # noqa: E402
from minicheck.flow import analyze  # noqa: E402
from minicheck.sema import load  # noqa: E402


def corpus_files():
    """Every C file of the corpus, sorted for stable ordering."""
    return sorted(CORPUS.rglob("*.c"))


def unit_of(source: str, file_id: str = "t.c", defines=None):
    return load(source, file_id, defines)


def facts_of(source: str, file_id: str = "t.c"):
    unit = load(source, file_id)
    return unit, analyze(unit)


def cli(*argv, cwd=None):
    """Run the command line in-process; returns (exit code, stdout, stderr)."""
    out, err = io.StringIO(), io.StringIO()
    old = os.getcwd()
    if cwd is not None:
        os.chdir(cwd)
    try:
        code = main([str(a) for a in argv], out=out, err=err)
    finally:
        os.chdir(old)
    return code, out.getvalue(), err.getvalue()


@pytest.fixture
def tmp_c(tmp_path):
    """Write a C file into a temp dir and return its path."""

    def write(source: str, name: str = "t.c") -> Path:
        path = tmp_path / name
        path.write_text(source, encoding="utf-8")
        return path

    return write


# -- acceptance summary ----------------------------------------------------------

_criteria = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


def pytest_runtest_makereport(item, call):
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    number, title = marker.args
    failed = call.excinfo is not None and not call.excinfo.errisinstance(pytest.skip.Exception)
    ok = _criteria.get(number, (title, True))[1] and not failed
    _criteria[number] = (title, ok)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        title, ok = _criteria[number]
        terminalreporter.write_line(f"criterion {number} ({title}): {'PASS' if ok else 'FAIL'}")
